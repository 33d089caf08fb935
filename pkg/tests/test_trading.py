import math

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st

from scorecal.predictive import GaussianPredictive
from scorecal.trading import (
    MarketData,
    StrategySpec,
    portfolio_stats,
    run_strategy,
    signal_percentile_rule,
    signal_probability_rule,
    strategy_signals,
    strategy_table,
)

import oracles


def market(n=300, seed=0):
    rng = np.random.default_rng(seed)
    fo = 20 + rng.uniform(-2, 2, n)
    return MarketData(np.arange(n), rng.normal(4e-4, 0.01, n), np.full(n, 1e-4),
                      fo, fo, fo * (1 + rng.normal(0, 0.04, n)))


def test_probability_rule_boundary():
    pred = GaussianPredictive(np.log(20.0), 0.1)
    assert signal_probability_rule(pred, 20.0) == 0
    up = GaussianPredictive(np.log(20.0) + 0.2, 0.1)
    assert signal_probability_rule(up, 20.0) == 1


def test_probability_rule_randomized():
    rng = np.random.default_rng(1)
    mean, sd = rng.normal(3, 0.2, 500), rng.uniform(0.02, 0.3, 500)
    vix = np.exp(rng.normal(3, 0.2, 500))
    got = signal_probability_rule(GaussianPredictive(mean, sd), vix)
    ref = [int(oracles.tail_quad(np.log(v), m, s) > 0.5) for m, s, v in zip(mean, sd, vix)]
    assert got.tolist() == ref


def test_percentile_rule_boundary():
    z80 = oracles.quantile_bisect(0.8)
    pred = GaussianPredictive(np.log(39.9) - 0.1 * z80, 0.1)
    assert signal_percentile_rule(pred) == 0
    assert signal_percentile_rule(GaussianPredictive(np.log(41.0), 1e-300)) == 1


def test_percentile_rule_grid():
    means, sds = np.meshgrid(np.linspace(3.2, 4.0, 17), np.linspace(0.01, 0.4, 9))
    pred = GaussianPredictive(means.ravel(), sds.ravel())
    z = oracles.quantile_bisect(0.8)
    ref = (np.exp(means.ravel() + z * sds.ravel()) > 40.0).astype(int)
    np.testing.assert_array_equal(signal_percentile_rule(pred, 0.8, 40.0), ref)


def test_all_zero_signals_accounting():
    d = market()
    spec = StrategySpec("probability", hedge_weight=0.05)
    ret = run_strategy(d, spec, np.zeros(len(d), int))
    np.testing.assert_array_equal(ret, 0.95 * d.stock_return + 0.05 * d.risk_free)
    zero_w = run_strategy(d, StrategySpec("probability", hedge_weight=0.0), np.zeros(len(d), int))
    np.testing.assert_array_equal(zero_w, d.stock_return)


def test_single_day_arithmetic():
    d = MarketData(np.array([0]), np.array([0.01]), np.array([0.0]), np.array([20.0]),
                   np.array([20.0]), np.array([21.0]))
    ret = run_strategy(d, StrategySpec("percentile", hedge_weight=0.05), np.array([1]))
    assert ret[0] == pytest.approx(0.012, abs=1e-15)


def test_idle_stock_variant():
    d = market()
    ret = run_strategy(d, StrategySpec("probability", idle="stock"), np.zeros(len(d), int))
    np.testing.assert_allclose(ret, d.stock_return, rtol=1e-15)


def test_static_ignores_signals():
    d = market()
    a = run_strategy(d, StrategySpec("static"))
    b = run_strategy(d, StrategySpec("static"), np.zeros(len(d), int))
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a, 0.95 * d.stock_return + 0.05 * d.futures_return)


def test_stats_two_pass_and_ratio():
    rng = np.random.default_rng(4)
    r, rf = rng.normal(5e-4, 0.012, 1000), np.full(1000, 1e-4)
    st_ = portfolio_stats(r, rf)
    m, s = oracles.two_pass_stats(r, rf)
    assert st_.mean_excess == pytest.approx(m, rel=1e-12)
    assert st_.std_dev == pytest.approx(s, rel=1e-12)
    assert abs(st_.sharpe - st_.mean_excess / st_.std_dev) < 1e-12


def test_constant_excess_flags_undefined_sharpe():
    st_ = portfolio_stats(np.full(50, 0.002), np.full(50, 0.001))
    assert not st_.sharpe_defined and math.isnan(st_.sharpe)


def test_strategy_table():
    d = market()
    sig = np.random.default_rng(2).integers(0, 2, len(d))
    table = strategy_table(d, {"static": (StrategySpec("static"), None),
                               "p": (StrategySpec("probability"), sig)})
    assert table["strategy"].tolist() == ["static", "p"]
    assert table.loc[1, "signal_days"] == sig.sum()


def test_strategy_signals_dispatch():
    pred = GaussianPredictive(np.full(4, np.log(30.0)), np.full(4, 0.1))
    assert strategy_signals(StrategySpec("static"), n=4).tolist() == [1, 1, 1, 1]
    with pytest.raises(ValueError):
        strategy_signals(StrategySpec("probability"), pred)
    assert strategy_signals(StrategySpec("percentile"), pred).tolist() == [0, 0, 0, 0]


@pytest.mark.parametrize("kw", [
    dict(rule="nope"), dict(rule="static", hedge_weight=1.5), dict(rule="static", idle="bond"),
    dict(rule="probability", prob_threshold=1.0),
])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        StrategySpec(**kw)


def test_market_validation():
    with pytest.raises(ValueError):
        MarketData(np.arange(3), np.zeros(3), np.zeros(3), np.ones(3), np.ones(3), np.ones(2))
    with pytest.raises(ValueError):
        MarketData(np.array([1, 0]), np.zeros(2), np.zeros(2), np.ones(2), np.ones(2), np.ones(2))
    frame = pd.DataFrame({"date": ["2020-01-02", "2020-01-03"], "stock_return": [0.0, 0.01],
                          "risk_free": [0.0, 0.0], "vix": [15.0, 16.0],
                          "futures_open": [16.0, 17.0], "futures_close": [16.5, 16.0]})
    assert len(MarketData.from_frame(frame)) == 2


@settings(max_examples=100, deadline=None)
@given(w=st.floats(0, 1), seed=st.integers(0, 1000))
def test_portfolio_is_convex_combination(w, seed):
    d = market(50, seed)
    sig = np.random.default_rng(seed).integers(0, 2, 50)
    ret = run_strategy(d, StrategySpec("probability", hedge_weight=w), sig)
    hedge = np.where(sig == 1, d.futures_return, d.risk_free)
    np.testing.assert_allclose(ret, (1 - w) * d.stock_return + w * hedge, rtol=1e-12, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(lo=st.floats(10, 60), step=st.floats(0, 30), seed=st.integers(0, 1000))
def test_percentile_signals_monotone_in_threshold(lo, step, seed):
    rng = np.random.default_rng(seed)
    pred = GaussianPredictive(rng.normal(3.3, 0.3, 80), rng.uniform(0.02, 0.4, 80))
    assert signal_percentile_rule(pred, 0.8, lo + step).sum() <= \
        signal_percentile_rule(pred, 0.8, lo).sum()


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 1000))
def test_static_ignores_predictive(seed):
    d = market(40, 1)
    rng = np.random.default_rng(seed)
    pred = GaussianPredictive(rng.normal(3, 1, 40), rng.uniform(0.01, 1, 40))
    spec = StrategySpec("static")
    np.testing.assert_array_equal(run_strategy(d, spec, strategy_signals(spec, pred)),
                                  run_strategy(d, spec))
