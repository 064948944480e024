"""Run preset experiments and collect the results into one CSV.

    python scripts/run_presets.py --group h2          # H2 rows, circuits A and B
    python scripts/run_presets.py --group lattice     # Hubbard and H4 rows
    python scripts/run_presets.py h2_a_4to2 h4_b_8to7 # any presets by name

Each preset writes its own run directory under ``--root``; the summary goes
to ``<root>/<group>.csv`` (or ``summary.csv`` for a custom list).
"""
from __future__ import annotations

import argparse
import csv
import logging
import time
from pathlib import Path

from qautoenc import experiment

PRESETS = Path(__file__).resolve().parents[1] / "presets"

GROUPS = {
    "h2": ["h2_a_4to2", "h2_a_4to1", "h2_b_4to2", "h2_b_4to1"],
    "lattice": [f"{system}_{c}_{rate}" for c in "ab"
                for system, rates in (("hubbard2x1", ("4to3", "4to2", "4to1")),
                                      ("hubbard2x2", ("8to7", "8to6")),
                                      ("h4", ("8to7", "8to6")))
                for rate in rates],
}


def run(name: str, root: Path, seed: int | None, restarts: int | None) -> list[dict]:
    cfg = experiment.load_config(PRESETS / f"{name}.toml").with_overrides(seed, restarts, root / name)
    experiment.gen_data(cfg)
    t0 = time.perf_counter()
    model = experiment.cmd_train(cfg)
    seconds = time.perf_counter() - t0
    report = experiment.cmd_evaluate(cfg)
    rows = []
    for split, rep in report["splits"].items():
        row = {
            "preset": name, "circuit": cfg.circuit, "system": cfg.system.kind,
            "compression": f"{cfg.n_original}->{cfg.n_latent}", "split": split,
            "neg_log10_c2_error": -model["best_objective"] if split == "train" else "",
            "fidelity_mae": rep["fidelity"]["mae"], "fidelity_min": rep["fidelity"]["min"],
            "fidelity_max": rep["fidelity"]["max"], "train_seconds": round(seconds, 1),
        }
        if "energy" in rep:
            row.update(energy_mae=rep["energy"]["mae"], energy_min=rep["energy"]["min"],
                       energy_max=rep["energy"]["max"], energy_mean_abs_hartree=rep["energy"]["mean_error"])
        rows.append(row)
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("presets", nargs="*")
    parser.add_argument("--group", choices=sorted(GROUPS))
    parser.add_argument("--root", type=Path, default=Path("runs"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--restarts", type=int)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    names = args.presets or GROUPS.get(args.group)
    if not names:
        parser.error("give preset names or --group")
    rows = []
    for name in names:
        rows.extend(run(name, args.root, args.seed, args.restarts))
    args.root.mkdir(parents=True, exist_ok=True)
    target = args.root / (f"{args.group}.csv" if args.group and not args.presets else "summary.csv")
    fields = list(dict.fromkeys(k for row in rows for k in row))
    with target.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
