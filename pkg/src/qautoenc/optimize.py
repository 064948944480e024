"""Finite-difference gradients, box-constrained L-BFGS and basin hopping.

All parameters live in the box ``[0, 4*pi)``; the closed upper bound used
internally is the largest double below ``4*pi``.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .autoencoder import TrainingEnsemble, TrashObjective
from .circuits import CircuitTemplate

log = logging.getLogger(__name__)

FOUR_PI = 4 * math.pi
UPPER = float(np.nextafter(FOUR_PI, 0.0))

Objective = Callable[[np.ndarray], float]
# returns (gradient, list of objective values evaluated along the way)
GradientFn = Callable[[np.ndarray], "tuple[np.ndarray, list[float]]"]


@dataclass
class OptimizerConfig:
    method: str = "local-quasi-newton"  # or "basin-hopping"
    fd_step: float = 1e-8
    lower: float = 0.0
    upper: float = UPPER
    max_iterations: int = 1000
    gradient_tolerance: float = 1e-9
    # relative objective decrease below which a local run stops
    ftol: float = 1e-12
    memory: int = 10
    hop_count: int = 50
    hop_scale: float = 0.5
    temperature: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")
        if not self.lower < self.upper:
            raise ValueError("bounds need lower < upper")
        if self.method not in ("local-quasi-newton", "basin-hopping"):
            raise ValueError(f"unknown method {self.method!r}")

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class OptResult:
    best_params: np.ndarray
    best_value: float
    evaluations: int
    trace: np.ndarray  # objective value of evaluation i at index i
    converged: bool
    iterations: int = 0
    message: str = ""

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.trace) if self.trace.size else self.trace

    def to_json(self, with_trace: bool = True) -> dict:
        out = {
            "best_params": self.best_params.tolist(),
            "best_value": self.best_value,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "iterations": self.iterations,
            "message": self.message,
        }
        if with_trace:
            out["trace"] = [[i, v] for i, v in enumerate(self.trace.tolist())]
        return out


class _Recorder:
    """Wraps an objective and logs every evaluation."""

    def __init__(self, f: Objective, grad: Optional[GradientFn], cfg: OptimizerConfig):
        self.f = f
        self.cfg = cfg
        self.values: list[float] = []
        self._grad = grad

    def __call__(self, p: np.ndarray) -> float:
        v = float(self.f(p))
        self.values.append(v)
        return v

    def gradient(self, p: np.ndarray) -> np.ndarray:
        if self._grad is None:
            return fd_gradient(self, p, self.cfg.fd_step, self.cfg.lower, self.cfg.upper)
        g, probes = self._grad(p)
        self.values.extend(float(v) for v in probes)
        return np.asarray(g, dtype=float)


def fd_gradient(f: Objective, p, h: float = 1e-8, lower: float = -np.inf, upper: float = np.inf) -> np.ndarray:
    """Central differences (f(p + h e_j) - f(p - h e_j)) / 2h.

    A probe that would leave ``[lower, upper]`` is replaced by the one-sided
    difference on the other side.
    """
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    p = np.asarray(p, dtype=float)
    grad = np.zeros(p.size)
    f0 = None
    for j in range(p.size):
        up_ok = p[j] + h <= upper
        dn_ok = p[j] - h >= lower
        q = p.copy()
        if up_ok and dn_ok:
            q[j] = p[j] + h
            fp = f(q)
            q[j] = p[j] - h
            grad[j] = (fp - f(q)) / (2 * h)
            continue
        if not (up_ok or dn_ok):
            continue
        if f0 is None:
            f0 = f(p)
        if up_ok:
            q[j] = p[j] + h
            grad[j] = (f(q) - f0) / h
        else:
            q[j] = p[j] - h
            grad[j] = (f0 - f(q)) / h
    return grad


def _two_loop(g: np.ndarray, pairs) -> np.ndarray:
    """Inverse-Hessian times g from stored (s, y, 1/(y.s)) pairs."""
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= np.dot(s, y) / np.dot(y, y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return q


def _check_start(p0, cfg: OptimizerConfig) -> np.ndarray:
    x = np.array(p0, dtype=float).reshape(-1)
    if np.any(x < cfg.lower) or np.any(x > cfg.upper):
        raise ValueError("starting point lies outside the bounds")
    return x


def _local(rec: _Recorder, x: np.ndarray, cfg: OptimizerConfig) -> tuple[np.ndarray, float, bool, int, str]:
    lo, hi = cfg.lower, cfg.upper
    fx = rec(x)
    g = rec.gradient(x)
    pairs: deque = deque(maxlen=cfg.memory)
    for it in range(cfg.max_iterations):
        pg = np.clip(x - g, lo, hi) - x
        if np.max(np.abs(pg), initial=0.0) < cfg.gradient_tolerance:
            return x, fx, True, it, "projected gradient below tolerance"
        # variables pinned at a bound with the gradient pushing outward stay fixed
        free = ~(((x <= lo) & (g > 0)) | ((x >= hi) & (g < 0)))
        gf = np.where(free, g, 0.0)
        d = -_two_loop(gf, list(pairs))
        d[~free] = 0.0
        if np.dot(d, g) >= 0:
            pairs.clear()
            d = -gf
        step = 1.0 if pairs else min(1.0, 1.0 / max(np.linalg.norm(d), 1e-300))
        accepted = False
        for _ in range(60):
            xn = np.clip(x + step * d, lo, hi)
            dec = np.dot(g, xn - x)
            if dec >= 0:
                break
            fn = rec(xn)
            if fn <= fx + 1e-4 * dec:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if pairs:
                pairs.clear()
                continue
            return x, fx, False, it, "line search failed"
        gn = rec.gradient(xn)
        s, y = xn - x, gn - g
        sy = np.dot(s, y)
        if sy > 1e-12 * np.dot(y, y):
            pairs.append((s, y, 1.0 / sy))
        rel = (fx - fn) / max(abs(fx), abs(fn), 1.0)
        x, fx, g = xn, fn, gn
        if rel <= cfg.ftol:
            return x, fx, True, it + 1, "relative reduction below ftol"
    return x, fx, False, cfg.max_iterations, "iteration limit reached"


def local_minimize(f: Objective, p0, cfg: OptimizerConfig, grad: Optional[GradientFn] = None) -> OptResult:
    """Projected limited-memory BFGS in the box [cfg.lower, cfg.upper].

    Directions come from the two-loop recursion restricted to the free
    variables; steps are projected back into the box and accepted by an
    Armijo backtracking test. The accepted iterates never increase f.
    """
    x0 = _check_start(p0, cfg)
    rec = _Recorder(f, grad, cfg)
    x, fx, conv, iters, msg = _local(rec, x0, cfg)
    return OptResult(x, fx, len(rec.values), np.asarray(rec.values), conv, iters, msg)


def wrap(x: np.ndarray, cfg: OptimizerConfig) -> np.ndarray:
    """Map angles periodically into [lower, upper]."""
    span = FOUR_PI if cfg.lower == 0.0 and cfg.upper == UPPER else cfg.upper - cfg.lower
    out = cfg.lower + np.mod(x - cfg.lower, span)
    out[out > cfg.upper] = cfg.lower
    return out


def basin_hop(f: Objective, p0, cfg: OptimizerConfig, grad: Optional[GradientFn] = None) -> OptResult:
    """Basin hopping with Metropolis acceptance on locally minimized values."""
    x0 = _check_start(p0, cfg)
    rng = np.random.default_rng(cfg.seed)
    rec = _Recorder(f, grad, cfg)
    cur_x, cur_f, conv, iters, msg = _local(rec, x0, cfg)
    best_x, best_f = cur_x, cur_f
    for hop in range(cfg.hop_count):
        trial = wrap(cur_x + rng.uniform(-cfg.hop_scale, cfg.hop_scale, size=cur_x.size), cfg)
        x, fx, c, it, m = _local(rec, trial, cfg)
        iters += it
        accept = fx < cur_f or rng.random() < math.exp(-(fx - cur_f) / cfg.temperature)
        if accept:
            cur_x, cur_f = x, fx
        if fx < best_f:
            best_x, best_f, conv, msg = x, fx, c, m
        log.debug("hop %d: %.6g (accepted=%s, best=%.6g)", hop, fx, accept, best_f)
    return OptResult(best_x, best_f, len(rec.values), np.asarray(rec.values), conv, iters, msg)


def minimize(f: Objective, p0, cfg: OptimizerConfig, grad: Optional[GradientFn] = None) -> OptResult:
    if cfg.method == "basin-hopping":
        return basin_hop(f, p0, cfg, grad)
    return local_minimize(f, p0, cfg, grad)


@dataclass
class TrainResult:
    best: OptResult
    restarts: list[OptResult] = field(default_factory=list)
    starts: list[np.ndarray] = field(default_factory=list)

    @property
    def best_index(self) -> int:
        return int(np.argmin([r.best_value for r in self.restarts]))


def train(tpl: CircuitTemplate, ens: TrainingEnsemble, cfg: OptimizerConfig, restarts: int = 1) -> TrainResult:
    """Independent optimizations of the log trash infidelity from random starts.

    Restart r draws its start uniformly in the box and, for basin hopping,
    its own hop seed, both from ``cfg.seed``.
    """
    if restarts < 1:
        raise ValueError("need at least one restart")
    obj = TrashObjective(tpl, ens)

    def grad(p):
        return obj.fd_gradient(p, cfg.fd_step, cfg.lower, cfg.upper)

    seeds = np.random.SeedSequence(cfg.seed).spawn(restarts)
    results, starts = [], []
    for r, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        p0 = np.clip(rng.uniform(cfg.lower, cfg.upper, tpl.param_count), cfg.lower, cfg.upper)
        sub = OptimizerConfig(**{**asdict(cfg), "seed": int(rng.integers(2**31))})
        res = minimize(obj, p0, sub, grad)
        log.info("restart %d: objective %.4f after %d evaluations (%s)", r, res.best_value, res.evaluations, res.message)
        results.append(res)
        starts.append(p0)
    best = min(results, key=lambda r: r.best_value)
    return TrainResult(best, results, starts)
