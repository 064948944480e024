import json
from dataclasses import replace

import numpy as np
import pytest
import scipy.optimize
from hypothesis import given, settings
from hypothesis import strategies as st

from qautoenc.autoencoder import TrainingEnsemble, TrashObjective
from qautoenc.circuits import template_a, template_b
from qautoenc.optimize import (
    FOUR_PI,
    UPPER,
    OptimizerConfig,
    basin_hop,
    fd_gradient,
    local_minimize,
    minimize,
    train,
    wrap,
)
from qautoenc.hamiltonians import ground_state, molecular_hamiltonian
from qautoenc.presets import H2_TRAIN_GRID
from qautoenc.qstate import random_state


def double_well(p):
    x = p[0]
    return min((x - 1) ** 2, (x - 10) ** 2 + 0.5)


def small_ensemble(seed=0, n_latent=1, n_trash=1, m=3):
    rng = np.random.default_rng(seed)
    return TrainingEnsemble.uniform([random_state(n_latent + n_trash, rng) for _ in range(m)], n_latent)


def test_fd_gradient_quadratic():
    g = fd_gradient(lambda p: p[0] ** 2, [3.0], 1e-8)
    assert g[0] == pytest.approx(6.0, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.5, 12.0), min_size=1, max_size=6))
def test_fd_gradient_quadratic_random(p):
    p = np.array(p)
    c = np.arange(1, p.size + 1, dtype=float)
    f = lambda x: float(np.sum(c * (x - 2.0) ** 2))
    assert np.allclose(fd_gradient(f, p, 1e-6), 2 * c * (p - 2.0), atol=1e-6 * max(1, np.max(np.abs(p))) * c.max() * 10)


def test_fd_gradient_constant():
    assert np.allclose(fd_gradient(lambda p: 4.2, np.ones(5), 1e-8), 0.0)


def test_fd_gradient_rejects_bad_step():
    with pytest.raises(ValueError):
        fd_gradient(lambda p: 0.0, [1.0], 0.0)


def test_fd_gradient_one_sided_at_bounds():
    seen = []

    def f(p):
        seen.append(p.copy())
        return float(np.sum(p**2 + p))

    g = fd_gradient(f, [0.0, UPPER], 1e-6, 0.0, UPPER)
    assert all(np.all(q >= 0) and np.all(q <= UPPER) for q in seen)
    assert g[0] == pytest.approx(1.0, abs=1e-5)
    assert g[1] == pytest.approx(2 * UPPER + 1, rel=1e-5)


def test_structured_gradient_matches_generic():
    ens = small_ensemble(1, 2, 1)
    tpl = template_b(3)
    obj = TrashObjective(tpl, ens)
    p = np.random.default_rng(2).uniform(0, FOUR_PI, tpl.param_count)
    g_fast, probes = obj.fd_gradient(p, 1e-6, 0.0, UPPER)
    g_ref = fd_gradient(obj, p, 1e-6, 0.0, UPPER)
    assert np.allclose(g_fast, g_ref, atol=1e-7)
    assert len(probes) == 2 * tpl.param_count


def test_fd_gradient_step_halving_consistency():
    ens = small_ensemble(3, 1, 1)
    tpl = template_a(2)
    obj = TrashObjective(tpl, ens)
    p = np.random.default_rng(4).uniform(1, FOUR_PI - 1, tpl.param_count)
    g6, _ = obj.fd_gradient(p, 1e-6, 0.0, UPPER)
    g7, _ = obj.fd_gradient(p, 1e-7, 0.0, UPPER)
    dominant = np.abs(g6) > 0.1 * np.max(np.abs(g6))
    assert np.allclose(g7[dominant], g6[dominant], rtol=1e-3)


def test_local_minimize_convex_quadratic():
    res = local_minimize(lambda p: float(np.sum((p - 1) ** 2)), np.full(4, 2.0), OptimizerConfig())
    assert np.allclose(res.best_params, 1.0, atol=1e-6)
    assert res.best_value == pytest.approx(0.0, abs=1e-12)


def test_local_minimize_interior_and_boundary():
    res = local_minimize(lambda p: float((p[0] - 5) ** 2), [2.0], OptimizerConfig())
    assert res.best_params[0] == pytest.approx(5.0, abs=1e-6)
    assert res.best_value == pytest.approx(0.0, abs=1e-12)
    res = local_minimize(lambda p: float((p[0] + 1) ** 2), [3.0], OptimizerConfig())
    assert res.best_params[0] == 0.0
    assert res.best_value == pytest.approx(1.0, abs=1e-12)
    assert res.converged


def test_local_minimize_rejects_out_of_bounds():
    with pytest.raises(ValueError):
        local_minimize(lambda p: 0.0, [-0.1], OptimizerConfig())
    with pytest.raises(ValueError):
        local_minimize(lambda p: 0.0, [FOUR_PI], OptimizerConfig())


def test_config_invariants():
    with pytest.raises(ValueError):
        OptimizerConfig(fd_step=0)
    with pytest.raises(ValueError):
        OptimizerConfig(lower=1.0, upper=1.0)
    with pytest.raises(ValueError):
        OptimizerConfig(method="newton")
    assert json.loads(json.dumps(OptimizerConfig().to_json()))["fd_step"] == 1e-8


def test_agrees_with_scipy_lbfgsb_on_rosenbrock_box():
    # independent reference: scipy's L-BFGS-B on the same box-constrained problem
    f = lambda p: float(scipy.optimize.rosen(p - 3.0))
    p0 = np.full(3, 0.5)
    ours = local_minimize(f, p0, OptimizerConfig(max_iterations=2000))
    ref = scipy.optimize.minimize(f, p0, method="L-BFGS-B", bounds=[(0, UPPER)] * 3)
    assert ours.best_value <= ref.fun + 1e-8
    assert np.allclose(ours.best_params, ref.x, atol=1e-3)


def test_bounds_respected_everywhere():
    seen = []

    def f(p):
        seen.append(p.copy())
        return float(np.sum((p + 1) ** 2) + np.sum((p - 20) ** 2) * 1e-3)

    cfg = OptimizerConfig(method="basin-hopping", hop_count=5, hop_scale=3.0)
    res = basin_hop(f, np.full(3, 12.0), cfg)
    pts = np.array(seen)
    assert np.all(pts >= 0.0) and np.all(pts < FOUR_PI)
    assert np.all(res.best_params >= 0.0) and np.all(res.best_params < FOUR_PI)


def test_accepted_iterates_non_increasing():
    f = lambda p: float(np.sum(np.sin(p) + 0.1 * p))
    cfg = OptimizerConfig(max_iterations=50)
    res = local_minimize(f, np.full(5, 6.0), cfg)
    assert res.best_value <= f(np.full(5, 6.0))
    best = res.best_so_far()
    assert np.all(np.diff(best) <= 0)
    assert best[-1] == pytest.approx(res.best_value)


def test_trace_length_matches_evaluations():
    count = [0]

    def f(p):
        count[0] += 1
        return float(np.sum((p - 2) ** 2))

    res = local_minimize(f, np.full(3, 7.0), OptimizerConfig())
    assert res.evaluations == len(res.trace) == count[0]


def test_wrap_maps_into_box():
    cfg = OptimizerConfig()
    x = wrap(np.array([-0.5, FOUR_PI, FOUR_PI + 1.0, 3.0]), cfg)
    assert np.allclose(x, [FOUR_PI - 0.5, 0.0, 1.0, 3.0])
    assert np.all(x < FOUR_PI)


def test_basin_hop_finds_global_well():
    grid = np.linspace(0, UPPER, 200001)
    vals = np.minimum((grid - 1) ** 2, (grid - 10) ** 2 + 0.5)
    x_star, f_star = grid[np.argmin(vals)], vals.min()
    cfg = OptimizerConfig(method="basin-hopping", hop_count=30, hop_scale=5.0, seed=3)
    local = local_minimize(double_well, [9.0], cfg)
    assert local.best_params[0] == pytest.approx(10.0, abs=1e-4)
    res = basin_hop(double_well, [9.0], cfg)
    assert res.best_params[0] == pytest.approx(x_star, abs=1e-4)
    assert res.best_value == pytest.approx(f_star, abs=1e-8)


def test_basin_hop_zero_hops_is_local():
    cfg = OptimizerConfig(method="basin-hopping", hop_count=0)
    f = lambda p: float(np.sum(np.cos(p) * p))
    a = basin_hop(f, np.full(3, 4.0), cfg)
    b = local_minimize(f, np.full(3, 4.0), cfg)
    assert np.array_equal(a.best_params, b.best_params)
    assert a.best_value == b.best_value
    assert np.array_equal(a.trace, b.trace)


def test_basin_hop_dominates_first_local_phase():
    f = lambda p: float(np.sum(np.sin(3 * p) + 0.05 * (p - 6) ** 2))
    cfg = OptimizerConfig(method="basin-hopping", hop_count=10, seed=7)
    assert basin_hop(f, np.full(2, 1.0), cfg).best_value <= local_minimize(f, np.full(2, 1.0), cfg).best_value


def test_basin_hop_deterministic():
    f = lambda p: float(np.sum(np.sin(3 * p) + 0.05 * (p - 6) ** 2))
    cfg = OptimizerConfig(method="basin-hopping", hop_count=8, seed=11)
    a, b = basin_hop(f, np.full(2, 1.0), cfg), basin_hop(f, np.full(2, 1.0), cfg)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())
    c = basin_hop(f, np.full(2, 1.0), replace(cfg, seed=12))
    assert not np.array_equal(a.trace, c.trace)


def test_minimize_dispatch():
    f = lambda p: float((p[0] - 3) ** 2)
    assert minimize(f, [1.0], OptimizerConfig()).best_value == pytest.approx(0, abs=1e-12)
    assert minimize(f, [1.0], OptimizerConfig(method="basin-hopping", hop_count=2)).best_value == pytest.approx(0, abs=1e-12)


def test_train_deterministic_and_best_of_restarts():
    ens = small_ensemble(5, 1, 1)
    tpl = template_a(2)
    cfg = OptimizerConfig(max_iterations=30, seed=9)
    a = train(tpl, ens, cfg, restarts=2)
    b = train(tpl, ens, cfg, restarts=2)
    assert len(a.restarts) == 2
    assert a.best.best_value == min(r.best_value for r in a.restarts)
    assert a.best is a.restarts[a.best_index]
    for ra, rb in zip(a.restarts, b.restarts):
        assert json.dumps(ra.to_json()) == json.dumps(rb.to_json())
    assert not np.array_equal(a.starts[0], a.starts[1])
    for r in a.restarts:
        assert r.evaluations == len(r.trace)
        assert np.all(np.diff(r.best_so_far()) <= 0)
    with pytest.raises(ValueError):
        train(tpl, ens, cfg, restarts=0)


def test_train_h2_drops_one_qubit():
    states = [ground_state(molecular_hamiltonian("h2", r)[0]).state for r in H2_TRAIN_GRID]
    ens = TrainingEnsemble.uniform(states, 3)
    res = train(template_a(4), ens, OptimizerConfig(max_iterations=300, seed=0), restarts=3)
    assert res.best.best_value <= -6
