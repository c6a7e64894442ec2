import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradnorm.harness import (FIELDS, ConfigError, ExperimentConfig, RunRecord, aggregate,
                              fit_rate, nbs_decode, parse_csv, read_csv, records_to_csv,
                              run_sweep, run_trial, sweep_to_json, write_csv)
from gradnorm.instances import make_nbs

QUAD = {"name": "quadratic", "params": {"d": 5, "H": 10.0, "lambda": 0.15625, "R": 1.0}}
NBS = {"name": "nbs", "params": {"H": 1.0, "R": 1.0, "eps": 1 / 16, "sigma": 0.5}}


def cfg(**kw):
    base = dict(instance=QUAD, solver="rr_acsa2", sigma=1.0, budgets=[64, 128, 256], trials=2)
    base.update(kw)
    return ExperimentConfig(**base)


# -- config ----------------------------------------------------------------

@pytest.mark.parametrize("kw", [dict(budgets=[128, 64]), dict(budgets=[64, 64]),
                                dict(trials=0), dict(format="xml"), dict(budgets=[]),
                                dict(eps=-1.0), dict(instance={"params": {}})])
def test_config_invariants(kw):
    with pytest.raises(ConfigError):
        cfg(**kw)


def test_config_round_trip_and_unknown_keys(tmp_path):
    c = cfg(out="x.csv")
    p = tmp_path / "c.json"
    p.write_text(json.dumps(c.to_dict()))
    assert ExperimentConfig.from_json(p) == c
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({**c.to_dict(), "colour": "red"})


def test_instance_descriptor_injects_sigma_and_seed():
    d = cfg(seed=7, sigma=0.25).instance_descriptor
    assert d["seed"] == 7 and d["params"]["sigma"] == 0.25
    assert "sigma" not in QUAD["params"]  # caller's dict untouched


# -- trials ----------------------------------------------------------------

def test_run_trial_noiseless_reaches_eps():
    eps = 0.05
    c = ExperimentConfig(
        instance={"name": "quadratic", "params": {"d": 10, "H": 10.0, "lambda": 0.0, "R": 1.0}},
        solver={"name": "rr_acsa2", "params": {"lambda_mode": "domain_R"}},
        eps=eps, sigma=0.0, budgets=[10**4])
    r = run_trial(c, 10**4, 0)
    assert r.grad_norm <= eps
    assert r.oracle_calls == 10**4


def test_run_trial_deterministic_and_accounted():
    c = cfg()
    a, b = run_trial(c, 128, 1), run_trial(c, 128, 1)
    assert a.key() == b.key()
    assert a.oracle_calls == 128
    assert a.grad_norm >= 0 and a.f_subopt >= 0
    assert run_trial(c, 128, 2).key() != a.key()


@pytest.mark.parametrize("solver", [
    "sgd", "ac_sa", "ac_sa2", "rr_acsa2", "rr_sgd", "rr_rerm", "rerm",
    {"name": "rr_acsa2", "params": {"lambda_mode": "fixed", "lambda": 0.5, "regularize": True}},
    {"name": "sgd", "params": {"lambda_mode": "sample_R", "c_lambda": 2.0}},
])
def test_every_solver_runs_within_budget(solver):
    c = cfg(solver=solver, eps=0.1)
    r = run_trial(c, 256, 0)
    assert r.oracle_calls == 256
    assert math.isfinite(r.grad_norm)


def test_one_dim_solver_through_harness():
    c = ExperimentConfig(instance={"name": "abs1d", "params": {}}, solver="one_dim", eps=0.1,
                         budgets=[3200])
    r = run_trial(c, 3200, 0)
    assert r.oracle_calls == 3200 and r.grad_norm <= 0.1


def test_unknown_solver_is_config_error():
    with pytest.raises(ConfigError):
        run_trial(cfg(solver="newton"), 64, 0)


def test_bad_lambda_mode_is_config_error():
    with pytest.raises(ConfigError):
        run_trial(cfg(solver={"name": "sgd", "params": {"lambda_mode": "huge"}}), 64, 0)


# -- sweeps ----------------------------------------------------------------

def test_sweep_shape_order_and_aggregate():
    res = run_sweep(cfg())
    assert len(res.records) == 6 and not res.failures
    assert [(r.m, r.trial) for r in res.records] == [(m, t) for m in (64, 128, 256)
                                                     for t in range(2)]
    for row in res.aggregate:
        g = [r.grad_norm for r in res.records if r.m == row.m]
        assert row.mean == pytest.approx(sum(g) / len(g), rel=4 * np.finfo(float).eps)
        assert row.stderr == pytest.approx(np.std(g, ddof=1) / math.sqrt(2), rel=1e-12)
        assert row.n == 2


def test_sweep_records_failures_and_continues():
    # T = 6 rounds cannot run with a budget of 2
    res = run_sweep(cfg(budgets=[2, 64], trials=2))
    assert len(res.failures) == 2 and all(m == 2 for m, _, _ in res.failures)
    assert [r.m for r in res.records] == [64, 64]
    assert "trial=" in res.failures[0][2]


def test_sweep_concurrency_determinism():
    c = cfg(budgets=[64, 128], trials=3)
    serial = run_sweep(c, workers=1)
    parallel = run_sweep(c, workers=2)
    assert [r.key() for r in serial.records] == [r.key() for r in parallel.records]
    assert serial.aggregate == parallel.aggregate


def test_aggregate_single_trial_has_zero_error():
    r = RunRecord("q", "s", 0, 0, 8, 8, 0.5, 0.1, 1.0)
    (row,) = aggregate([r])
    assert row.mean == 0.5 and row.stderr == 0.0


# -- rate fits -------------------------------------------------------------

def test_fit_exact_power_law():
    ms = [2.0**k for k in range(8, 17)]
    fit = fit_rate([(m, 3.0 * m**-0.5) for m in ms])
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-10)


def test_fit_constant_has_zero_slope():
    fit = fit_rate([(m, 0.7) for m in (10, 20, 40, 80)])
    assert fit.slope == pytest.approx(0.0, abs=1e-12)


def test_fit_range_and_minimum_points():
    pts = [(m, m**-1.0) for m in (1, 2, 4, 8, 16, 32)]
    assert fit_rate(pts, 2, 16).n_points == 4
    with pytest.raises(ValueError):
        fit_rate(pts, 4, 16)


def test_fit_rejects_nonpositive_means():
    with pytest.raises(ValueError):
        fit_rate([(1, 1.0), (2, 0.0), (4, 0.5), (8, 0.2)])


# -- serialization ---------------------------------------------------------

def test_csv_header_is_fixed():
    text = records_to_csv([])
    assert text.strip() == ",".join(FIELDS)
    assert FIELDS == ("instance", "solver", "seed", "trial", "m", "oracle_calls", "grad_norm",
                      "f_subopt", "wall_ms")


def test_csv_round_trip_of_sweep(tmp_path):
    res = run_sweep(cfg())
    path = tmp_path / "out.csv"
    write_csv(res.records, path)
    back = read_csv(path)
    for a, b in zip(res.records, back):
        for k in FIELDS:
            assert getattr(a, k) == getattr(b, k)
            assert type(getattr(a, k)) is type(getattr(b, k))


finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(g=st.floats(0, 1e300), f=st.one_of(finite, st.just(math.nan)), w=st.floats(0, 1e9),
       seed=st.integers(0, 2**63), m=st.integers(1, 2**40))
def test_csv_round_trip_is_bit_exact(g, f, w, seed, m):
    r = RunRecord("quadratic", "rr_rerm", seed, 3, m, m, g, f, w)
    (back,) = parse_csv(records_to_csv([r]))
    for k in FIELDS:
        a, b = getattr(r, k), getattr(back, k)
        if isinstance(a, float) and math.isnan(a):
            assert math.isnan(b)
        elif isinstance(a, float):
            assert np.float64(a).tobytes() == np.float64(b).tobytes()
        else:
            assert a == b


def test_csv_rejects_wrong_header():
    with pytest.raises(ValueError):
        parse_csv("a,b,c\n1,2,3\n")


def test_json_output_is_valid():
    res = run_sweep(cfg())
    doc = json.loads(sweep_to_json(res))
    assert len(doc["records"]) == 6 and len(doc["aggregate"]) == 3


# -- noisy binary search decoding ------------------------------------------

def test_nbs_decode_in_interval_and_clamp():
    inst = make_nbs(1.0, 1.0, 1 / 16, 0.5, seed=4)
    a = inst.endpoints
    j = inst.j_star
    for x in np.linspace(a[j - 1], a[j], 9)[:-1]:
        assert nbs_decode(np.array([x]), inst) == j
    assert nbs_decode(np.array([-0.3]), inst) == 1
    assert nbs_decode(np.array([7.0]), inst) == inst.N


def test_nbs_decode_success_rate_with_sgd():
    solver = {"name": "sgd", "params": {"step": 0.2}}
    hits = stationary = 0
    for seed in range(50):
        c = ExperimentConfig(instance=NBS, solver=solver, budgets=[2000], seed=seed)
        rec = run_trial(c, 2000, 0)
        inst = make_nbs(1.0, 1.0, 1 / 16, 0.5, seed=seed)
        stationary += rec.grad_norm <= 1 / 16
        hits += nbs_decode(rec, inst) == inst.j_star
    assert stationary >= 45
    assert hits / 50 >= 0.9
