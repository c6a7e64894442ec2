import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradnorm.core import fd_gradient_check, rng_stream
from gradnorm.instances import (OneDimPiecewise, WitnessViolation, build_instance,
                                component_gradient_variance, descriptor_json, hardness_witness,
                                make_abs1d, make_logistic, make_nbs, make_quadratic, make_stat_lb,
                                stat_lb_dimension, stationary_interval)


def power_iteration(A, iters=5000, seed=0):
    v = np.random.default_rng(seed).standard_normal(A.shape[0])
    for _ in range(iters):
        v = A @ v
        v /= np.linalg.norm(v)
    return float(v @ A @ v)


# -- quadratics ------------------------------------------------------------

def test_quadratic_1d():
    inst = make_quadratic(1, H=1.0, lam=1.0, R=2.0, seed=0)
    x_star = inst.x_star[0]
    assert abs(inst.x0[0] - x_star) == pytest.approx(2.0, abs=1e-15)
    for x in (-1.0, 0.5, 3.0):
        assert inst.objective.value(np.array([x])) == pytest.approx(0.5 * (x - x_star) ** 2)


def test_quadratic_gradient_zero_at_minimizer():
    inst = make_quadratic(7, H=9.0, lam=0.3, R=1.5, seed=2)
    assert np.linalg.norm(inst.objective.gradient(inst.x_star)) <= 1e-12


def test_quadratic_spectrum_by_power_iteration():
    H, lam = 10.0, 0.5
    inst = make_quadratic(6, H=H, lam=lam, R=1.0, seed=5)
    top = power_iteration(inst.A)
    # smallest eigenvalue: power iteration on the shifted matrix H I - A
    bottom = H - power_iteration(H * np.eye(6) - inst.A)
    assert top == pytest.approx(H, abs=1e-8)
    assert bottom == pytest.approx(lam, abs=1e-8)


def test_quadratic_linear_system_residual_and_distance():
    inst = make_quadratic(12, H=100.0, lam=1.0, R=3.0, seed=9)
    assert np.linalg.norm(inst.A @ inst.x_star - inst.b) <= 1e-10
    assert np.linalg.norm(inst.x0 - inst.x_star) == pytest.approx(3.0, rel=1e-14)


@pytest.mark.parametrize("kw", [
    dict(d=3, H=1.0, lam=2.0, R=1.0),
    dict(d=0, H=1.0, lam=1.0, R=1.0),
    dict(d=3, H=1.0, lam=-1.0, R=1.0),
    dict(d=3, H=2.0, lam=1.0, R=1.0, noise="component"),
])
def test_quadratic_rejects(kw):
    with pytest.raises(ValueError):
        make_quadratic(**kw)


def test_component_noise_population_offset():
    sigma = 0.7
    inst = make_quadratic(4, H=2.0, lam=2.0, R=1.0, sigma=sigma, noise="component", seed=1)
    # E (lam/2)||x - z||^2 = (lam/2)||x - x*||^2 + sigma^2/(2 lam)
    assert inst.objective.value(inst.x_star) == pytest.approx(sigma**2 / 4)


def test_logistic_fd_and_minimizer():
    inst = make_logistic(seed=3)
    obj = inst.objective
    assert np.linalg.norm(obj.gradient(obj.exact_minimizer())) <= 1e-12
    assert fd_gradient_check(obj, np.ones(obj.dim)) <= 1e-6


# -- statistical lower-bound instance -------------------------------------

def test_stat_lb_dimension_formula():
    assert stat_lb_dimension(16) == math.ceil(8 + 512 * 16 * math.log(32))
    assert stat_lb_dimension(16) == 28400


def test_stat_lb_default_instance():
    inst = make_stat_lb(1.0, R=1.0, m_hard=16, seed=0)
    assert inst.d == 28400
    assert inst.b_coef == 0.25
    assert float(inst.x_star @ inst.x_star) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("sigma,R,Delta,m", [(1.0, 1.0, None, 16), (2.0, 0.5, 3.0, 8),
                                             (0.3, None, 0.01, 32)])
def test_stat_lb_identities(sigma, R, Delta, m):
    inst = make_stat_lb(sigma, R=R, Delta=Delta, m_hard=m, d=4 * m, seed=1)
    b = inst.b_coef
    branches = [v for v in (sigma / (R * math.sqrt(m)) if R else None,
                            sigma**2 / (2 * Delta * m) if Delta else None) if v is not None]
    assert b == max(branches)
    Z = inst.Z
    assert np.max(np.abs(Z.T @ Z - np.eye(m))) <= 1e-10
    assert float(inst.x_star @ inst.x_star) == pytest.approx(sigma**2 / (b**2 * m), rel=1e-10)
    F = inst.objective
    gap = F.value(np.zeros(inst.d)) - F.value(inst.x_star)
    assert gap == pytest.approx(sigma**2 / (2 * b * m), rel=1e-10)
    assert component_gradient_variance(inst) == pytest.approx(sigma**2 * (1 - 1 / m), abs=1e-10)


def test_stat_lb_components_strongly_convex():
    inst = make_stat_lb(1.0, R=1.0, m_hard=8, d=32)
    assert inst.model.components_convex and inst.model.component_lam == inst.b_coef > 0


def test_stat_lb_size_cap():
    with pytest.raises(MemoryError):
        make_stat_lb(1.0, R=1.0, m_hard=256)


def test_stat_lb_needs_a_bound():
    with pytest.raises(ValueError):
        make_stat_lb(1.0, m_hard=8, d=16)


def test_witness_at_origin():
    inst = make_stat_lb(1.0, R=1.0, m_hard=16, d=64, seed=2)
    w = hardness_witness(inst, np.zeros(inst.d))
    assert w.condition
    assert w.grad_norm == pytest.approx(1 / math.sqrt(16), rel=1e-12)
    assert w.grad_norm >= w.bound


def test_witness_at_minimizer_fails_condition():
    inst = make_stat_lb(1.0, R=1.0, m_hard=16, d=64, seed=2)
    w = hardness_witness(inst, inst.x_star)
    assert not w.condition
    ips = inst.Z.T @ inst.x_star
    assert np.allclose(ips, -1.0 / (inst.b_coef * 16), rtol=1e-10)


def test_witness_random_unit_sweep():
    inst = make_stat_lb(1.0, R=1.0, m_hard=16, d=64, seed=3)
    rng = rng_stream(0, 0)
    X = rng.standard_normal((1000, inst.d))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    X *= 0.01  # small radius so that many probes satisfy the condition
    w = hardness_witness(inst, X)
    assert w.condition.sum() > 100
    assert np.all(w.grad_norm[w.condition] >= w.bound)


def test_witness_raises_on_fake_violation():
    inst = make_stat_lb(1.0, R=1.0, m_hard=16, d=64, seed=3)
    inst.model.zbar = np.zeros(inst.d)  # corrupt the instance: gradient at 0 vanishes
    with pytest.raises(WitnessViolation):
        hardness_witness(inst, np.zeros(inst.d))


# -- noisy binary search ---------------------------------------------------

EPS, SIG = 1 / 16, 0.5


@pytest.fixture(scope="module")
def nbs():
    return make_nbs(1.0, 1.0, EPS, SIG, seed=0)


def expected_derivative(inst, x):
    a = inst.endpoints
    j = inst.j_star
    if x < a[j - 1]:
        return -2 * EPS
    if x >= a[j]:
        return 2 * EPS
    return -2 * EPS + 1.0 * (x - a[j - 1])


def test_nbs_dimensions(nbs):
    assert nbs.N == 4
    assert np.allclose(np.diff(nbs.endpoints), 0.25)
    assert nbs.p == EPS / SIG
    assert 1 <= nbs.j_star <= nbs.N
    assert nbs.model.H_eff == pytest.approx(1.0)


@pytest.mark.parametrize("kw", [dict(H=1, R=1, eps=0.3, sigma=0.5),
                                dict(H=1, R=1, eps=0.4, sigma=1.0)])
def test_nbs_rejects(kw):
    with pytest.raises(ValueError):
        make_nbs(**kw)


def test_nbs_mean_derivative_closed_form(nbs):
    for x in np.linspace(-0.2, 1.2, 57):
        assert nbs.model.mean_derivative(x) == pytest.approx(expected_derivative(nbs, x), abs=1e-15)


def test_nbs_mean_derivative_monte_carlo(nbs):
    n = 10**5
    rows = nbs.model.sample(rng_stream(0, 0), n)
    for x in np.linspace(0.01, 0.99, 7):
        d = nbs.model.derivative(x, rows)
        assert abs(d.mean() - expected_derivative(nbs, x)) <= 5 * SIG / math.sqrt(n)


def test_nbs_derivative_bounded_and_convex_combination(nbs):
    rows = nbs.model.sample(rng_stream(1, 0), 2000)
    w = nbs.model.width
    for x in np.linspace(-0.5, 1.5, 41):
        d = nbs.model.derivative(x, rows)
        assert np.all(np.abs(d) <= max(2 * EPS, SIG))
        if 0 <= x < 1.0:
            s = (x % w) / w
            allowed = [s * u + (1 - s) * v for u in (-SIG, SIG) for v in (-SIG, SIG)]
            assert np.all(np.min(np.abs(d[:, None] - np.array(allowed)), axis=1) <= 1e-12)


def test_nbs_entries_are_fixed(nbs):
    rows = np.array([3, 17, 2**40], dtype=np.uint64)
    a = nbs.model.entries(rows, 2)
    b = nbs.model.entries(rows, 2)
    assert np.array_equal(a, b)


def test_nbs_slope_exactly_H_on_middle_interval(nbs):
    a = nbs.endpoints
    j = nbs.j_star
    xs = np.linspace(a[j - 1], a[j], 6)[:-1]
    slopes = np.diff([nbs.model.mean_derivative(x) for x in xs]) / np.diff(xs)
    assert np.allclose(slopes, 1.0, rtol=1e-12)
    outside = [x for x in np.linspace(0, 1, 101) if not a[j - 1] - 0.01 <= x <= a[j] + 0.01]
    g = np.array([nbs.model.mean_derivative(x) for x in outside])
    assert set(np.round(g, 12)) <= {-2 * EPS, 2 * EPS}


@pytest.mark.parametrize("seed", range(5))
def test_nbs_identification_contract(seed):
    inst = make_nbs(1.0, 1.0, EPS, SIG, seed=seed)
    a = inst.endpoints
    j = inst.j_star
    for x in np.linspace(-0.3, 1.3, 641):
        stationary = abs(inst.model.mean_derivative(x)) <= EPS
        if stationary:
            assert a[j - 1] <= x < a[j]
            assert inst.interval_index(x) == j


def test_nbs_population_value_and_fd(nbs):
    obj = nbs.objective
    for x in (-0.3, 0.13, 0.37, 0.61, 0.88, 1.4):
        assert fd_gradient_check(obj, np.array([x]), h=1e-6) <= 1e-8
    assert obj.value(np.zeros(1)) == 0.0
    assert obj.value(nbs.model.x_star) < obj.value(np.zeros(1))
    assert abs(obj.gradient(nbs.model.x_star)[0]) <= EPS


def test_nbs_component_value_matches_derivative(nbs):
    model = nbs.model
    t = model.sample(rng_stream(3, 0), 1)[0]
    c = model.component(t)
    for x in (0.1, 0.3, 0.55, 0.8):
        assert fd_gradient_check(c, np.array([x]), h=1e-6) <= 1e-8


def test_nbs_interval_index_clamps(nbs):
    assert nbs.interval_index(-0.5) == 1
    assert nbs.interval_index(5.0) == nbs.N
    assert nbs.interval_index(0.3) == 2


def test_nbs_j_star_roughly_uniform():
    counts = np.bincount([make_nbs(1.0, 1.0, EPS, SIG, seed=s).j_star for s in range(400)],
                         minlength=5)[1:]
    assert np.all(counts > 60)


# -- 1-D piecewise ---------------------------------------------------------

def test_stationary_interval_two_kinks():
    f = OneDimPiecewise([-1.0, 1.0], [-1.0, 0.0, 1.0])
    assert stationary_interval(f, 0.4) == (-1.0, 1.0)


def test_stationary_interval_abs():
    f = OneDimPiecewise([0.0], [-1.0, 1.0])
    assert stationary_interval(f, 0.5) == (0.0, 0.0)


@pytest.mark.parametrize("eps", [0.05, 0.2, 0.5])
def test_stationary_interval_of_piecewise_half_square(eps):
    mesh = 1e-3
    bp = np.arange(-2.0, 2.0 + mesh / 2, mesh)
    # slopes of the chord interpolant of x^2/2 are the segment midpoints
    slopes = np.concatenate([[bp[0] - mesh / 2], 0.5 * (bp[1:] + bp[:-1]), [bp[-1] + mesh / 2]])
    a, b = stationary_interval(OneDimPiecewise(bp, slopes), eps)
    assert abs(a + eps) <= mesh and abs(b - eps) <= mesh


def test_stationary_interval_rejects_unbounded():
    with pytest.raises(ValueError):
        stationary_interval(OneDimPiecewise([0.0], [0.5, 1.0]), 0.1)


def test_one_dim_piecewise_invariants():
    with pytest.raises(ValueError):
        OneDimPiecewise([0.0, 1.0], [1.0, -1.0, 2.0])
    f = OneDimPiecewise([-1.0, 2.0], [-2.0, 0.5, 1.5], value_at_first=1.0)
    assert f.L == 2.0
    assert f.value(-1.0) == 1.0 and f.value(-2.0) == 3.0 and f.value(2.0) == 2.5
    assert f.subdifferential(2.0) == (0.5, 1.5)


@settings(max_examples=40, deadline=None)
@given(p=st.floats(0.05, 0.95), shift=st.floats(-3, 3), eps=st.floats(0.01, 0.9))
def test_abs_model_stationary_set_matches_inf_subgradient(p, shift, eps):
    inst = make_abs1d(probs=(p, 1 - p), shift=shift)
    f = inst.piecewise
    a, b = stationary_interval(f, eps)
    for x in np.linspace(shift - 2, shift + 2, 81):
        inside = a <= x <= b
        assert inside == (f.inf_subgradient(x) <= eps)


def test_abs_model_population_gradient_is_min_norm():
    inst = make_abs1d()
    assert inst.objective.gradient(np.array([0.3]))[0] == 0.0
    assert inst.objective.gradient(np.array([-1.0]))[0] == 0.0
    assert inst.objective.gradient(np.array([1.5]))[0] == 1.0
    assert inst.model.sigma == 1.0


# -- descriptors -----------------------------------------------------------

@pytest.mark.parametrize("inst", [
    make_quadratic(4, H=5.0, lam=1.0, R=1.0, sigma=0.5, seed=7),
    make_logistic(n=50, d=3, seed=2),
    make_stat_lb(1.0, R=1.0, m_hard=8, d=40, seed=4),
    make_nbs(1.0, 1.0, EPS, SIG, seed=5),
    make_abs1d(probs=(0.25, 0.75), shift=1.0),
], ids=lambda i: i.descriptor["name"])
def test_descriptor_round_trip(inst):
    again = build_instance(json.loads(descriptor_json(inst)))
    assert again.descriptor == inst.descriptor
    x = rng_stream(0, 0).standard_normal(inst.objective.dim) * 0.3
    assert again.objective.value(x) == inst.objective.value(x)
    assert np.array_equal(again.objective.gradient(x), inst.objective.gradient(x))


def test_build_instance_unknown_name():
    with pytest.raises(ValueError):
        build_instance({"name": "rosenbrock", "params": {}})
