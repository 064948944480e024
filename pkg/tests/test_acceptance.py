"""Acceptance suite: every criterion at its stated tolerance.

Each test records one PASS/FAIL line (collected in the "acceptance criteria"
section of the pytest summary). Training runs use the shipped presets and
take roughly twenty minutes in total on one core.

    pytest -m slow tests/test_acceptance.py
"""
import itertools
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from qautoenc import experiment
from qautoenc.autoencoder import (
    TrainingEnsemble,
    cost_c1,
    cost_c2,
    roundtrip,
    swap_test,
    swap_test_probability,
)
from qautoenc.circuits import bind, template_a, template_b
from qautoenc.hamiltonians import LatticeSpec, build_hubbard, compression_bound, ground_state, molecular_hamiltonian
from qautoenc.optimize import fd_gradient
from qautoenc.pauli import jw_annihilation
from qautoenc.presets import H2_EXTRA_POINTS, H2_TEST_GRID, H2_TRAIN_GRID
from qautoenc.qstate import DensityMatrix, StateVector, random_state, tensor

pytestmark = pytest.mark.slow

PRESETS = Path(__file__).resolve().parents[1] / "presets"
CHEMICAL_ACCURACY = 1.6e-3
BUDGET_SECONDS = 600


class Run:
    def __init__(self, name: str, root: Path, subdir: str | None = None):
        self.cfg = experiment.load_config(PRESETS / f"{name}.toml").with_overrides(output=root / (subdir or name))
        experiment.gen_data(self.cfg)
        t0 = time.perf_counter()
        self.model = experiment.cmd_train(self.cfg)
        self.seconds = time.perf_counter() - t0
        self.report = experiment.cmd_evaluate(self.cfg)

    @property
    def score(self) -> float:
        """-log10(1 - C2) of the best restart."""
        return -self.model["best_objective"]

    @property
    def out(self) -> Path:
        return Path(self.cfg.output)


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    cache: dict[str, Run] = {}

    def get(name: str) -> Run:
        if name not in cache:
            cache[name] = Run(name, root)
        return cache[name]

    get.root = root
    return get


# 1. H2 compression with circuit A


@pytest.mark.parametrize("name", ["h2_a_4to2", "h2_a_4to1"])
def test_h2_circuit_a_compression(runs, verdict, name):
    run = runs(name)
    test_mae = run.report["splits"]["test"]["fidelity"]["mae"]
    ok = run.score >= 5 and test_mae >= 5 and run.seconds <= BUDGET_SECONDS
    verdict("1", ok, f"{name}: training -log10(1-C2) = {run.score:.2f} (>= 5), test fidelity MAE "
                     f"{test_mae:.2f} (>= 5) over {run.report['splits']['test']['n_states']} states, "
                     f"training {run.seconds:.0f} s (<= {BUDGET_SECONDS})")
    assert run.score >= 5
    assert run.report["splits"]["test"]["n_states"] == 44
    assert test_mae >= 5
    assert run.seconds <= BUDGET_SECONDS


# 2. chemical accuracy of decoded energies


@pytest.mark.parametrize("name", ["h2_a_4to2", "h2_a_4to1"])
def test_h2_energy_within_chemical_accuracy(runs, verdict, name):
    energy = runs(name).report["splits"]["test"]["energy"]
    ok = energy["mean_error"] < CHEMICAL_ACCURACY
    verdict("2", ok, f"{name}: test energy MAE {energy['mean_error']:.3e} Hartree (< {CHEMICAL_ACCURACY})")
    assert ok


# 3. ansatz dependence on the two-site Hubbard model


def test_hubbard_a_4to3(runs, verdict):
    run = runs("hubbard2x1_a_4to3")
    ok = verdict("3", run.score >= 5, f"Hubbard 2x1 circuit A 4->3: -log10(1-C2) = {run.score:.2f} (>= 5)")
    assert ok


def test_hubbard_a_4to2_plateaus(runs, verdict):
    run = runs("hubbard2x1_a_4to2")
    scores = sorted(-r["best_value"] for r in run.model["restarts"])
    ok = verdict("3", run.score < 2, f"Hubbard 2x1 circuit A 4->2: -log10(1-C2) = {run.score:.2f} (< 2); "
                                     f"per-restart range {scores[0]:.2f}-{scores[-1]:.2f}")
    assert ok


def test_hubbard_b_4to2(runs, verdict):
    run = runs("hubbard2x1_b_4to2")
    ok = verdict("3", run.score >= 3, f"Hubbard 2x1 circuit B 4->2: -log10(1-C2) = {run.score:.2f} (>= 3)")
    assert ok


# 4. compression bound and the eight-qubit negatives


def test_compression_bound(verdict):
    value = compression_bound(8, 4)
    ok = abs(value - math.log2(70)) <= 1e-12 and math.ceil(value) == 7
    verdict("4", ok, f"compression_bound(8, 4) = {value!r}, log2(70) = {math.log2(70)!r}")
    assert ok


@pytest.mark.xfail(strict=False, reason="asserts an optimization negative; reported, not gated")
@pytest.mark.parametrize("name", ["hubbard2x2_a_8to6", "hubbard2x2_b_8to6", "h4_a_8to6", "h4_b_8to6"])
def test_eight_qubit_compression_stays_lossy(runs, verdict, name):
    run = runs(name)
    ok = verdict("4", run.score < 3, f"{name}: -log10(1-C2) = {run.score:.2f} (expected < 3) "
                                     f"with {len(run.model['restarts'])} restarts")
    assert ok


# 5. property suite


def random_ensemble(rng, n_total, n_latent):
    m = int(rng.integers(1, 5))
    w = rng.dirichlet(np.ones(m))
    return TrainingEnsemble([random_state(n_total, rng) for _ in range(m)], w, n_latent, n_total - n_latent,
                            StateVector.zeros(n_total - n_latent))


def test_c1_never_exceeds_c2(verdict):
    rng = np.random.default_rng(2024)
    worst = -np.inf
    for _ in range(200):
        n_total = int(rng.integers(2, 5))
        n_latent = int(rng.integers(1, n_total))
        tpl = (template_a if rng.random() < 0.5 else template_b)(n_total)
        ens = random_ensemble(rng, n_total, n_latent)
        p = rng.uniform(0, 4 * np.pi, tpl.param_count)
        worst = max(worst, cost_c1(p, tpl, ens) - cost_c2(p, tpl, ens))
    ok = verdict("5", worst <= 1e-10, f"C1 <= C2 + 1e-10 on 200 draws (max C1 - C2 = {worst:.2e})")
    assert ok


def test_decoupled_instance_is_lossless(verdict):
    rng = np.random.default_rng(5)
    worst = 0.0
    for tpl, n_latent in ((template_a(4), 2), (template_b(3), 1), (template_a(4), 3)):
        p = rng.uniform(0, 4 * np.pi, tpl.param_count)
        u = bind(tpl, p)
        k = tpl.n_qubits - n_latent
        states = [StateVector.normalized(u.conj().T @ tensor(random_state(n_latent, rng), StateVector.zeros(k)).amplitudes)
                  for _ in range(4)]
        ens = TrainingEnsemble.uniform(states, n_latent)
        errs = [1 - cost_c1(p, tpl, ens), 1 - cost_c2(p, tpl, ens)]
        errs += [1 - roundtrip(p, tpl, s, n_latent).fidelity for s in states]
        worst = max(worst, max(abs(e) for e in errs))
    ok = verdict("5", worst <= 1e-10, f"decoupled instance: C1 = C2 = 1 and round-trip fidelity 1 (max error {worst:.1e})")
    assert ok


def test_random_circuits_unitary_and_counts(verdict):
    rng = np.random.default_rng(77)
    worst = 0.0
    draws = 0
    cases = list(itertools.product((template_a, template_b), (2, 4, 6)))
    for i in range(1000):
        make, n = cases[i % len(cases)]
        tpl = make(n)
        u = bind(tpl, rng.uniform(0, 4 * np.pi, tpl.param_count))
        worst = max(worst, np.max(np.abs(u.conj().T @ u - np.eye(1 << n))))
        draws += 1
    counts_ok = all(template_a(n, c).param_count == c * 15 * n * (n - 1) // 2
                    and template_b(n, c).param_count == c * (3 * n * (n - 1) + 6 * n)
                    for n in range(2, 9) for c in (1, 2, 3))
    ok = verdict("5", worst <= 1e-10 and counts_ok,
                 f"{draws} random bound circuits unitary (max deviation {worst:.1e}); parameter counts exact: {counts_ok}")
    assert ok


def test_car_relations_and_hubbard_dimer(verdict):
    ann = [jw_annihilation(p, 4).to_matrix() for p in range(4)]
    eye = np.eye(16)
    worst = 0.0
    for p, q in itertools.product(range(4), repeat=2):
        anti = ann[p] @ ann[q].conj().T + ann[q].conj().T @ ann[p] - (p == q) * eye
        worst = max(worst, np.max(np.abs(anti)), np.max(np.abs(ann[p] @ ann[q] + ann[q] @ ann[p])))
    t, u = 1.0, 2.0
    e = ground_state(build_hubbard(LatticeSpec(1, 2), t, u)).energy
    analytic = (u - math.sqrt(u**2 + 16 * t**2)) / 2
    ok = verdict("5", worst <= 1e-12 and abs(e - analytic) <= 1e-9,
                 f"CAR relations on 4 modes (max residual {worst:.1e}); dimer energy {e:.12f} vs {analytic:.12f}")
    assert ok


def test_h2_fixture_support(verdict):
    grid = sorted(set(H2_TRAIN_GRID) | set(H2_TEST_GRID) | set(H2_EXTRA_POINTS))
    counts = {r: int(np.count_nonzero(np.abs(ground_state(molecular_hamiltonian("h2", r)[0]).state.amplitudes) > 1e-10))
              for r in grid}
    ok = verdict("5", set(counts.values()) == {2},
                 f"{len(counts)} H2 ground states with exactly 2 amplitudes above 1e-10: {sorted(set(counts.values()))}")
    assert ok


def test_fd_gradient_and_swap_sampling(verdict):
    rng = np.random.default_rng(3)
    # roundoff in central differences is ~eps*|f|/h, so keep |f| of order 10 at h = 1e-8
    g1 = fd_gradient(lambda x: float(x[0] ** 2), np.array([3.0]), 1e-8)
    a = rng.normal(size=(5, 5)) / 3
    hess = a @ a.T + np.eye(5)
    b = rng.normal(size=5)
    p = rng.uniform(0.5, 1.5, 5)
    g = fd_gradient(lambda x: 0.5 * x @ hess @ x + b @ x, p, 1e-8, 0.0, 4 * np.pi)
    grad_err = max(abs(g1[0] - 6.0), float(np.max(np.abs(g - (hess @ p + b)))))

    shots, inside, total = 100_000, 0, 0
    for i in range(200):
        k = 1 + i % 2
        ref = StateVector.zeros(k)
        # mixtures close to and far from the reference
        w = rng.dirichlet(np.ones(3)) if i % 3 else np.array([0.98, 0.01, 0.01])
        vecs = [ref] + [random_state(k, rng) for _ in range(2)]
        rho = DensityMatrix(sum(wi * v.density().matrix for wi, v in zip(w, vecs)))
        exact = swap_test(ref, rho, None)
        sigma = 2 * math.sqrt(max(swap_test_probability(ref, rho) * (1 - swap_test_probability(ref, rho)), 0.0) / shots)
        inside += abs(swap_test(ref, rho, shots, seed=i) - exact) <= 3 * sigma + 1e-12
        total += 1
    frac = inside / total
    ok = verdict("5", grad_err <= 1e-6 and frac >= 0.99,
                 f"FD gradient of a quadratic within {grad_err:.1e} (<= 1e-6); SWAP test at 1e5 shots within 3 sigma "
                 f"for {frac:.1%} of {total} states (>= 99%)")
    assert ok


def test_best_so_far_traces_monotone(runs, verdict):
    run = runs("h2_a_4to2")
    data = json.loads((run.out / "optimization.json").read_text())
    monotone = all(np.all(np.diff(np.minimum.accumulate([v for _, v in r["trace"]])) <= 0) for r in data["restarts"])
    lengths = all(r["evaluations"] == len(r["trace"]) for r in data["restarts"])
    ok = verdict("5", monotone and lengths,
                 f"best-so-far traces monotone for {len(data['restarts'])} restarts; trace length equals evaluations")
    assert ok


# 6. determinism


def _without_timestamp(path: Path) -> bytes:
    lines = path.read_bytes().splitlines(keepends=True)
    return b"".join(line for line in lines if not line.startswith(b'  "timestamp": '))


def test_preset_rerun_is_byte_identical(runs, verdict):
    first = runs("hubbard2x1_b_4to2")
    again = Run("hubbard2x1_b_4to2", runs.root, "hubbard2x1_b_4to2_rerun")
    files = ["train.json", "manifest.json", "model.json", "optimization.json", "report.json"]
    same = {f: _without_timestamp(first.out / f) == _without_timestamp(again.out / f) for f in files}
    same["trace.csv"] = (first.out / "trace.csv").read_bytes() == (again.out / "trace.csv").read_bytes()
    ok = verdict("6", all(same.values()), f"hubbard2x1_b_4to2 rerun identical: {same}")
    assert ok
