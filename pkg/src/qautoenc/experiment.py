"""Experiment configuration and the file-based pipeline behind the CLI.

A run is described by a TOML file::

    name = "h2-a-4to2"
    seed = 0
    restarts = 10
    output = "runs/h2-a-4to2"

    [system]
    kind = "h2"            # h2 | h4 | hubbard | coefficient-file

    [grid]
    train = "h2-train"     # preset name or explicit list
    test = "h2-test"

    [circuit]
    kind = "A"             # A | B | hamiltonian
    cells = 1

    [compression]
    n_original = 4
    n_latent = 2

    [optimizer]
    max_iterations = 500

Every command reads its inputs from and writes its outputs to the output
directory. JSON payloads are byte-identical across reruns except for the
top-level ``timestamp`` field.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import presets
from .autoencoder import (
    LOG_FLOOR,
    TrainingEnsemble,
    cost_c1,
    cost_c2,
    latent_state,
    roundtrip,
    swap_test,
    swap_test_probability,
    trash_state,
)
from .circuits import CircuitTemplate, bind, make_template
from .errors import ConfigError, MissingData, NumericalFailure
from .hamiltonians import (
    LatticeSpec,
    build_hubbard,
    coefficient_fixture_path,
    ground_state,
    load_coefficients,
    molecular_hamiltonian,
)
from .optimize import OptimizerConfig, train
from .pauli import PauliSum
from .qstate import StateVector

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

SYSTEMS = ("h2", "h4", "hubbard", "coefficient-file")
CIRCUITS = ("A", "B", "hamiltonian")
ELECTRONS = {"h2": 2, "h4": 4}
CHEMICAL_ACCURACY = 1.6e-3

GRID_PRESETS = {
    "h2-train": presets.H2_TRAIN_GRID,
    "h2-test": presets.H2_TEST_GRID,
    "h2-extra": presets.H2_EXTRA_POINTS,
    "h4-train": presets.H4_TRAIN_GRID,
    "hubbard-t": presets.HUBBARD_T_GRID,
}


@dataclass
class SystemConfig:
    kind: str
    # particle-number sector of the ground state; None means the whole Fock space
    sector: Optional[int] = None
    # Hubbard lattice
    rows: int = 1
    cols: int = 2
    U: float = presets.HUBBARD_U
    periodic_horizontal: bool = True
    periodic_vertical: bool = False
    # coefficient files; "{geometry}" is formatted with the grid value
    coefficients: Optional[str] = None

    def __post_init__(self):
        if self.kind not in SYSTEMS:
            raise ConfigError(f"unknown system {self.kind!r}; expected one of {SYSTEMS}")

    def default_sector(self) -> Optional[int]:
        if self.sector is not None:
            return self.sector
        if self.kind in ELECTRONS:
            return ELECTRONS[self.kind]
        if self.kind == "hubbard":
            return self.rows * self.cols
        return None


@dataclass
class ExperimentConfig:
    system: SystemConfig
    train_grid: tuple[float, ...]
    test_grid: tuple[float, ...]
    circuit: str
    cells: int
    n_original: int
    n_latent: int
    optimizer: OptimizerConfig
    restarts: int = 1
    seed: int = 0
    output: Path = Path("runs/default")
    name: str = "experiment"
    # geometry whose Hamiltonian terms define the hamiltonian-ansatz circuit
    ansatz_geometry: Optional[float] = None
    # train exits with a numerical failure when the best objective stays above this
    target_objective: Optional[float] = None
    base_dir: Path = field(default=Path("."), compare=False)

    def __post_init__(self):
        if self.circuit not in CIRCUITS:
            raise ConfigError(f"unknown circuit {self.circuit!r}; expected one of {CIRCUITS}")
        if self.cells < 1:
            raise ConfigError("cells must be at least 1")
        if not 1 <= self.n_latent < self.n_original:
            raise ConfigError(f"need 1 <= n_latent < n_original, got {self.n_latent} and {self.n_original}")
        if self.restarts < 1:
            raise ConfigError("restarts must be at least 1")
        if not self.train_grid:
            raise ConfigError("training grid is empty")
        points = list(self.train_grid) + list(self.test_grid)
        if len(set(points)) != len(points):
            raise ConfigError("grid points must be distinct across training and testing")
        self.optimizer = dataclasses.replace(self.optimizer, seed=self.seed)

    def with_overrides(self, seed: Optional[int] = None, restarts: Optional[int] = None,
                       output: Optional[str | Path] = None) -> ExperimentConfig:
        changes: dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if restarts is not None:
            changes["restarts"] = restarts
        if output is not None:
            changes["output"] = Path(output)
        return dataclasses.replace(self, **changes) if changes else self

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "system": dataclasses.asdict(self.system),
            "train_grid": list(self.train_grid),
            "test_grid": list(self.test_grid),
            "circuit": self.circuit,
            "cells": self.cells,
            "compression": [self.n_original, self.n_latent],
            "optimizer": self.optimizer.to_json(),
            "restarts": self.restarts,
            "seed": self.seed,
            "ansatz_geometry": self.ansatz_geometry,
            "target_objective": self.target_objective,
        }


def _grid(value, key: str) -> tuple[float, ...]:
    if value is None:
        return ()
    if isinstance(value, str):
        if value not in GRID_PRESETS:
            raise ConfigError(f"unknown grid preset {value!r} for {key}; known: {sorted(GRID_PRESETS)}")
        return tuple(GRID_PRESETS[value])
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be a list of numbers or a preset name") from exc


def _build(cls, table: dict, where: str):
    unknown = set(table) - {f.name for f in dataclasses.fields(cls)}
    if unknown:
        raise ConfigError(f"unknown keys in [{where}]: {sorted(unknown)}")
    try:
        return cls(**table)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad [{where}] section: {exc}") from exc


def config_from_dict(data: dict, base_dir: Path = Path(".")) -> ExperimentConfig:
    data = dict(data)
    allowed = {"name", "seed", "restarts", "output", "target_objective",
               "system", "grid", "circuit", "compression", "optimizer"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    for section in ("system", "grid", "circuit", "compression"):
        if section not in data:
            raise ConfigError(f"missing [{section}] section")
    system = _build(SystemConfig, data["system"], "system")
    grid = dict(data["grid"])
    if set(grid) - {"train", "test"}:
        raise ConfigError(f"unknown keys in [grid]: {sorted(set(grid) - {'train', 'test'})}")
    circuit = dict(data["circuit"])
    if set(circuit) - {"kind", "cells", "ansatz_geometry"}:
        raise ConfigError("[circuit] accepts kind, cells and ansatz_geometry")
    comp = dict(data["compression"])
    if set(comp) != {"n_original", "n_latent"}:
        raise ConfigError("[compression] needs exactly n_original and n_latent")
    opt_table = dict(data.get("optimizer", {}))
    if "seed" in opt_table:
        raise ConfigError("set the seed at the top level, not in [optimizer]")
    optimizer = _build(OptimizerConfig, opt_table, "optimizer")
    output = Path(data.get("output", f"runs/{data.get('name', 'experiment')}"))
    try:
        return ExperimentConfig(
            system=system,
            train_grid=_grid(grid.get("train"), "grid.train"),
            test_grid=_grid(grid.get("test"), "grid.test"),
            circuit=str(circuit.get("kind", "A")),
            cells=int(circuit.get("cells", 1)),
            n_original=int(comp["n_original"]),
            n_latent=int(comp["n_latent"]),
            optimizer=optimizer,
            restarts=int(data.get("restarts", 1)),
            seed=int(data.get("seed", 0)),
            output=output,
            name=str(data.get("name", "experiment")),
            ansatz_geometry=circuit.get("ansatz_geometry"),
            target_objective=data.get("target_objective"),
            base_dir=base_dir,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data, base_dir=path.parent)


# Hamiltonians and ground states


def hamiltonian_at(system: SystemConfig, geometry: float, base_dir: Path = Path(".")) -> PauliSum:
    if system.kind in ("h2", "h4"):
        return molecular_hamiltonian(system.kind, geometry)[0]
    if system.kind == "hubbard":
        lat = LatticeSpec(system.rows, system.cols, system.periodic_horizontal, system.periodic_vertical)
        return build_hubbard(lat, t=geometry, U=system.U)
    if system.coefficients is None:
        path = coefficient_fixture_path(geometry)
    else:
        path = Path(system.coefficients.format(geometry=geometry))
        if not path.is_absolute():
            path = base_dir / path
    if not path.exists():
        raise MissingData(f"coefficient file {path} not found; generate H2 files with "
                          f"'python scripts/make_fixtures.py --h2 {geometry}'")
    return load_coefficients(path).terms


def ground_states(cfg: ExperimentConfig, grid: Sequence[float]) -> tuple[list[StateVector], list[float]]:
    states, energies = [], []
    sector = cfg.system.default_sector()
    for g in grid:
        h = hamiltonian_at(cfg.system, g, cfg.base_dir)
        if h.n_qubits != cfg.n_original:
            raise ConfigError(f"{cfg.system.kind} at {g} acts on {h.n_qubits} qubits, "
                              f"compression expects {cfg.n_original}")
        gs = ground_state(h, sector=sector)
        states.append(gs.state)
        energies.append(gs.energy)
    return states, energies


def make_circuit(cfg: ExperimentConfig) -> CircuitTemplate:
    terms = None
    if cfg.circuit == "hamiltonian":
        g = cfg.ansatz_geometry if cfg.ansatz_geometry is not None else cfg.train_grid[0]
        terms = hamiltonian_at(cfg.system, g, cfg.base_dir)
    return make_template(cfg.circuit, cfg.n_original, cfg.cells, terms)


# file helpers


def _timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path: Path, payload: dict) -> None:
    payload = {"timestamp": _timestamp(), **payload}
    path.write_text(json.dumps(payload, indent=2, default=_plain) + "\n")


def read_json(path: Path, what: str) -> dict:
    if not path.exists():
        raise MissingData(f"{what} {path} not found; run the preceding command first")
    return json.loads(path.read_text())


def strip_timestamp(payload: dict) -> dict:
    return {k: v for k, v in payload.items() if k != "timestamp"}


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _out(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def neg_log(err: float) -> float:
    return -math.log10(max(err, 0.0) + LOG_FLOOR)


# commands


def gen_data(cfg: ExperimentConfig) -> dict:
    """Ground-state ensembles for the training and testing grids."""
    out = _out(cfg)
    sector = cfg.system.default_sector()
    manifest: dict[str, Any] = {"config": cfg.to_json(), "sector": sector, "splits": {}}
    pes = []
    for split, grid in (("train", cfg.train_grid), ("test", cfg.test_grid)):
        if not grid:
            continue
        states, energies = ground_states(cfg, grid)
        prov = {"system": cfg.system.kind, "split": split, "sector": sector,
                "geometries": list(grid), "energies": energies}
        ens = TrainingEnsemble.uniform(states, cfg.n_latent, provenance=prov)
        write_json(out / f"{split}.json", ens.to_json())
        manifest["splits"][split] = [{"geometry": g, "energy": e} for g, e in zip(grid, energies)]
        pes.extend((split, g, e) for g, e in zip(grid, energies))
        log.info("%s: %d ground states on %d qubits", split, len(states), cfg.n_original)
    write_json(out / "manifest.json", manifest)
    pes.sort(key=lambda row: row[1])
    _write_csv(out / "pes.csv", ["split", "geometry", "energy"], pes)
    return manifest


def load_ensemble(path: Path, n_latent: Optional[int] = None) -> TrainingEnsemble:
    ens = TrainingEnsemble.from_json(read_json(path, "ensemble"))
    if n_latent is not None and n_latent != ens.n_latent:
        if not 1 <= n_latent < ens.n_qubits:
            raise ConfigError(f"cannot split {ens.n_qubits} qubits into a {n_latent}-qubit latent space")
        ens = TrainingEnsemble.uniform(ens.states, n_latent, provenance=ens.provenance)
    return ens


def _check_ensemble(cfg: ExperimentConfig, ens: TrainingEnsemble) -> None:
    if ens.n_qubits != cfg.n_original:
        raise ConfigError(f"ensemble has {ens.n_qubits} qubits, config expects {cfg.n_original}")


def cmd_train(cfg: ExperimentConfig, ensemble: Optional[Path] = None) -> dict:
    """Best-of-restarts training; writes model.json, optimization.json and trace.csv."""
    out = _out(cfg)
    ens = load_ensemble(ensemble or out / "train.json", cfg.n_latent)
    _check_ensemble(cfg, ens)
    tpl = make_circuit(cfg)
    t0 = time.perf_counter()
    result = train(tpl, ens, cfg.optimizer, cfg.restarts)
    log.info("trained %d restarts in %.1f s; best objective %.4f",
             cfg.restarts, time.perf_counter() - t0, result.best.best_value)
    best = result.best
    model = {
        "config": cfg.to_json(),
        "seed": cfg.seed,
        "template": tpl.to_json(),
        "n_latent": ens.n_latent,
        "n_trash": ens.n_trash,
        "reference": ens.reference.to_json(),
        "best_params": best.best_params.tolist(),
        "best_objective": best.best_value,
        "best_restart": result.best_index,
        "restarts": [
            {"index": i, "best_value": r.best_value, "evaluations": r.evaluations,
             "iterations": r.iterations, "converged": r.converged, "message": r.message}
            for i, r in enumerate(result.restarts)
        ],
    }
    write_json(out / "model.json", model)
    write_json(out / "optimization.json", {
        "optimizer": cfg.optimizer.to_json(),
        "seed": cfg.seed,
        "restarts": [{"index": i, "start": s.tolist(), **r.to_json()}
                     for i, (s, r) in enumerate(zip(result.starts, result.restarts))],
    })
    rows = []
    for i, r in enumerate(result.restarts):
        for j, (v, b) in enumerate(zip(r.trace, r.best_so_far())):
            rows.append((i, j, repr(float(v)), repr(float(b))))
    _write_csv(out / "trace.csv", ["restart", "evaluation", "value", "best_so_far"], rows)
    if not math.isfinite(best.best_value):
        raise NumericalFailure(f"objective is not finite ({best.best_value}); see {out / 'optimization.json'}")
    if cfg.target_objective is not None and best.best_value > cfg.target_objective:
        raise NumericalFailure(
            f"best objective {best.best_value:.4f} above target {cfg.target_objective}; "
            f"diagnostics in {out / 'optimization.json'}")
    return model


@dataclass
class Model:
    template: CircuitTemplate
    params: np.ndarray
    n_latent: int
    reference: StateVector
    best_objective: float


def load_model(path: Path) -> Model:
    data = read_json(path, "model")
    return Model(CircuitTemplate.from_json(data["template"]), np.asarray(data["best_params"], dtype=float),
                 int(data["n_latent"]), StateVector.from_json(data["reference"]), float(data["best_objective"]))


def _check_model(model: Model, ens: TrainingEnsemble) -> None:
    if model.template.n_qubits != ens.n_qubits:
        raise ConfigError(f"model acts on {model.template.n_qubits} qubits, ensemble has {ens.n_qubits}")


def _summary(errors: Sequence[float]) -> dict:
    scores = [neg_log(e) for e in errors]
    return {"mean_error": float(np.mean(errors)), "mae": neg_log(float(np.mean(errors))),
            "min": min(scores), "max": max(scores)}


def evaluate_split(cfg: ExperimentConfig, model: Model, ens: TrainingEnsemble) -> dict:
    _check_model(model, ens)
    ens = ens if ens.n_latent == model.n_latent else load_ensemble_like(ens, model.n_latent)
    geoms = ens.provenance.get("geometries", [None] * len(ens.states))
    exact = ens.provenance.get("energies")
    rows = []
    for i, (psi, g) in enumerate(zip(ens.states, geoms)):
        h = hamiltonian_at(cfg.system, g, cfg.base_dir) if g is not None else None
        rt = roundtrip(model.params, model.template, psi, model.n_latent, model.reference, h)
        e_exact = exact[i] if exact is not None else None
        if h is not None and e_exact is None:
            e_exact = ground_state(h, sector=cfg.system.default_sector()).energy
        row = {"index": i, "geometry": g, "fidelity": rt.fidelity, "fidelity_error": 1.0 - rt.fidelity}
        if rt.energy is not None:
            row.update(energy=rt.energy, exact_energy=e_exact, energy_error=abs(rt.energy - e_exact))
        rows.append(row)
    report = {
        "n_states": len(rows),
        "cost_c1": cost_c1(model.params, model.template, ens),
        "cost_c2": cost_c2(model.params, model.template, ens),
        "fidelity": _summary([r["fidelity_error"] for r in rows]),
        "states": rows,
    }
    if all("energy_error" in r for r in rows):
        energy = _summary([r["energy_error"] for r in rows])
        energy["within_chemical_accuracy"] = energy["mean_error"] < CHEMICAL_ACCURACY
        report["energy"] = energy
    return report


def load_ensemble_like(ens: TrainingEnsemble, n_latent: int) -> TrainingEnsemble:
    return TrainingEnsemble.uniform(ens.states, n_latent, provenance=ens.provenance)


def _splits(out: Path, train_path: Optional[Path], test_path: Optional[Path]) -> dict[str, Path]:
    paths = {"train": train_path or out / "train.json", "test": test_path or out / "test.json"}
    found = {k: p for k, p in paths.items() if p.exists()}
    if not found:
        raise MissingData(f"no ensembles in {out}; run gen-data first")
    return found


def cmd_evaluate(cfg: ExperimentConfig, model_path: Optional[Path] = None,
                 train_path: Optional[Path] = None, test_path: Optional[Path] = None) -> dict:
    """Round-trip fidelity and energy errors; writes report.json and report.csv."""
    out = _out(cfg)
    model = load_model(model_path or out / "model.json")
    report: dict[str, Any] = {"best_objective": model.best_objective, "splits": {}}
    csv_rows = []
    for split, path in _splits(out, train_path, test_path).items():
        ens = load_ensemble(path)
        rep = evaluate_split(cfg, model, ens)
        report["splits"][split] = rep
        for r in rep["states"]:
            csv_rows.append((split, r["index"], r["geometry"], repr(r["fidelity"]), repr(r["fidelity_error"]),
                             repr(neg_log(r["fidelity_error"])), repr(r.get("energy")), repr(r.get("exact_energy")),
                             repr(r.get("energy_error")),
                             repr(neg_log(r["energy_error"])) if "energy_error" in r else ""))
        log.info("%s: fidelity MAE %.3f (%.3f-%.3f)", split, rep["fidelity"]["mae"],
                 rep["fidelity"]["min"], rep["fidelity"]["max"])
    write_json(out / "report.json", report)
    _write_csv(out / "report.csv",
               ["split", "index", "geometry", "fidelity", "fidelity_error", "neg_log10_fidelity_error",
                "energy", "exact_energy", "energy_error", "neg_log10_energy_error"], csv_rows)
    return report


def parse_selector(text: Optional[str], count: int) -> list[int]:
    """'all', or comma-separated indices and inclusive ranges like '0,2-4'."""
    if text is None or text.strip() == "all":
        return list(range(count))
    picked: list[int] = []
    for part in text.split(","):
        part = part.strip()
        try:
            if "-" in part:
                lo, hi = (int(x) for x in part.split("-", 1))
                picked.extend(range(lo, hi + 1))
            else:
                picked.append(int(part))
        except ValueError as exc:
            raise ConfigError(f"bad state selector {part!r}") from exc
    bad = [i for i in picked if not 0 <= i < count]
    if bad:
        raise ConfigError(f"state indices {bad} out of range for {count} states")
    return picked


def _matrix_rows(tag: tuple, space: str, m: np.ndarray):
    for r in range(m.shape[0]):
        for c in range(m.shape[1]):
            v = m[r, c]
            yield (*tag, space, r + 1, c + 1, repr(float(v.real)), repr(float(v.imag)), repr(float(abs(v))))


def cmd_export_latent(cfg: ExperimentConfig, split: str = "test", selector: Optional[str] = None,
                      model_path: Optional[Path] = None, ensemble_path: Optional[Path] = None) -> dict:
    """Input and latent density matrices; writes latent.json and latent.csv.

    Matrix rows and columns are labelled 1 .. 2**n in ascending basis order.
    """
    out = _out(cfg)
    model = load_model(model_path or out / "model.json")
    ens = load_ensemble(ensemble_path or out / f"{split}.json")
    _check_model(model, ens)
    geoms = ens.provenance.get("geometries", [None] * len(ens.states))
    entries, rows = [], []
    for i in parse_selector(selector, len(ens.states)):
        psi = ens.states[i]
        rho_in = psi.density()
        rho_lat = latent_state(model.params, model.template, psi, model.n_latent)
        entries.append({"split": split, "index": i, "geometry": geoms[i],
                        "input": rho_in.to_json(), "latent": rho_lat.to_json(),
                        "latent_trace": float(np.trace(rho_lat.matrix).real)})
        tag = (split, i, geoms[i])
        rows.extend(_matrix_rows(tag, "input", rho_in.matrix))
        rows.extend(_matrix_rows(tag, "latent", rho_lat.matrix))
    payload = {"n_latent": model.n_latent, "states": entries}
    write_json(out / "latent.json", payload)
    _write_csv(out / "latent.csv", ["split", "index", "geometry", "space", "row", "col", "re", "im", "abs"], rows)
    return payload


def cmd_swap_demo(cfg: ExperimentConfig, shots: Optional[int] = 100_000, split: str = "train",
                  model_path: Optional[Path] = None, ensemble_path: Optional[Path] = None) -> dict:
    """Sampled vs exact trash fidelities from a simulated SWAP test; writes swap.csv and swap.json.

    ``shots=None`` is exact mode: the sampled column equals the exact one.
    """
    if shots is not None and shots < 1:
        raise ConfigError("shots must be at least 1")
    out = _out(cfg)
    model = load_model(model_path or out / "model.json")
    ens = load_ensemble(ensemble_path or out / f"{split}.json", model.n_latent)
    _check_model(model, ens)
    u = bind(model.template, model.params)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(ens.states))
    geoms = ens.provenance.get("geometries", [None] * len(ens.states))
    rows, within = [], 0
    for i, (psi, ss) in enumerate(zip(ens.states, seeds)):
        rho = trash_state(u, psi, (ens.n_latent, ens.n_trash))
        p0 = swap_test_probability(model.reference, rho)
        exact = swap_test(model.reference, rho, None)
        if shots is None:
            sampled, stderr = exact, 0.0
        else:
            sampled = swap_test(model.reference, rho, shots, np.random.default_rng(ss))
            # the estimator 2 * zeros / shots - 1 has twice the binomial standard error
            stderr = 2.0 * math.sqrt(p0 * (1.0 - p0) / shots)
        ok = abs(sampled - exact) <= 3.0 * stderr + 1e-12
        within += ok
        rows.append({"index": i, "geometry": geoms[i], "exact": exact, "sampled": sampled,
                     "stderr": stderr, "within_3_sigma": bool(ok)})
    payload = {"shots": shots, "exact_mode": shots is None, "seed": cfg.seed,
               "fraction_within_3_sigma": within / len(rows), "states": rows}
    write_json(out / "swap.json", payload)
    _write_csv(out / "swap.csv", ["index", "geometry", "exact", "sampled", "stderr", "within_3_sigma"],
               [(r["index"], r["geometry"], repr(r["exact"]), repr(r["sampled"]), repr(r["stderr"]),
                 int(r["within_3_sigma"])) for r in rows])
    return payload
