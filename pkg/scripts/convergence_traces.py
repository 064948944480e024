"""Convergence traces of the local quasi-Newton search and basin hopping.

Both optimizers start from the same random point on the H2 4 -> 2 circuit-A
problem. Output is a long-format CSV (method, evaluation, value,
best_so_far) ready for plotting the objective against evaluation count.

    python scripts/convergence_traces.py --out runs/convergence.csv --hops 5
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
from pathlib import Path

import numpy as np

from qautoenc import experiment
from qautoenc.autoencoder import TrainingEnsemble, TrashObjective
from qautoenc.optimize import OptimizerConfig, basin_hop, local_minimize

PRESET = Path(__file__).resolve().parents[1] / "presets" / "h2_a_4to2.toml"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", type=Path, default=Path("runs/convergence.csv"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--hops", type=int, default=5)
    parser.add_argument("--max-iterations", type=int, default=300)
    args = parser.parse_args()

    cfg = experiment.load_config(PRESET)
    states, _ = experiment.ground_states(cfg, cfg.train_grid)
    ens = TrainingEnsemble.uniform(states, cfg.n_latent)
    tpl = experiment.make_circuit(cfg)
    obj = TrashObjective(tpl, ens)
    opt = OptimizerConfig(max_iterations=args.max_iterations, seed=args.seed, hop_count=args.hops)
    p0 = np.random.default_rng(args.seed).uniform(opt.lower, opt.upper, tpl.param_count)

    def grad(p):
        return obj.fd_gradient(p, opt.fd_step, opt.lower, opt.upper)

    results = {
        "local-quasi-newton": local_minimize(obj, p0, opt, grad),
        "basin-hopping": basin_hop(obj, p0, dataclasses.replace(opt, method="basin-hopping"), grad),
    }
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "evaluation", "value", "best_so_far"])
        for method, res in results.items():
            for i, (v, b) in enumerate(zip(res.trace, res.best_so_far())):
                w.writerow([method, i, repr(float(v)), repr(float(b))])
            print(f"{method}: best {res.best_value:.3f} after {res.evaluations} evaluations")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
