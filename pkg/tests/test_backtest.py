import numpy as np
import pytest

from scorecal.backtest import (
    BacktestConfig,
    BacktestResult,
    ScoreTrack,
    exceedances,
    run_backtest,
)
from scorecal.calibration import calibrate_score, get_model
from scorecal.io import task_seed
from scorecal.predictive import gaussian_var
from scorecal.simulation import DgpSpec, simulate

import oracles


@pytest.fixture(scope="module")
def small_run():
    y = simulate(DgpSpec("gaussian_garch", 420, seed=21))
    cfg = BacktestConfig(initial_window=300, holdout=120, reestimation_stride=40,
                         scores_to_calibrate=("LS", "QS5", "CLS10"),
                         scores_to_evaluate=("LS", "QS5", "CLS10", "CLS_ABOVE_LAG"))
    return y, cfg, run_backtest(cfg, y)


def test_single_window_reduction():
    y = simulate(DgpSpec("gaussian_garch", 200, seed=1))
    cfg = BacktestConfig(initial_window=199, holdout=1, scores_to_calibrate=("LS", "QS10"))
    res = run_backtest(cfg, y)
    ls = calibrate_score(y[:199], "LS")
    pred = get_model("garch").forecast(ls.params, y[:199])
    track = res["LS"]
    assert track.date_index.tolist() == [200]
    assert track.mean[0] == pred.mean and track.sd[0] == pred.sd
    qs = calibrate_score(y[:199], "QS10", initial_params=ls.params)
    assert res["QS10"].sd[0] == get_model("garch").forecast(qs.params, y[:199]).sd


def test_track_shapes_and_recalibration_schedule(small_run):
    _, cfg, res = small_run
    assert set(res.tracks) == {"LS", "QS5", "CLS10"}
    for tr in res.tracks.values():
        assert tr.date_index[0] == 301 and tr.date_index[-1] == 420
        assert np.flatnonzero(tr.recalibrated).tolist() == [0, 40, 80]
        assert set(tr.scores) == {"LS", "QS5", "CLS10", "CLS_ABOVE_LAG"}
        assert np.all(tr.es[0.05] <= tr.var[0.05])


def test_hits_match_recount(small_run):
    _, _, res = small_run
    for label, tr in res.tracks.items():
        for p in (0.025, 0.05, 0.10):
            hits = exceedances(res, label, p).hits
            assert hits.sum() == oracles.hit_recount(tr.realized, tr.var[p])


def test_hit_conventions():
    tr = ScoreTrack("LS", np.arange(1, 4), np.array([1.0, -1.0, 2.0]), np.zeros(3), np.ones(3),
                    {0.05: np.array([0.0, -1.0, 5.0])}, {0.05: np.full(3, -9.0)}, {},
                    [], np.zeros(3, bool), np.ones(3, bool), np.zeros(3, bool))
    res = BacktestResult(BacktestConfig(30, 3, var_levels=(0.05,)), {"LS": tr})
    assert exceedances(res, "LS", 0.05).hits.tolist() == [0, 1, 1]
    tr.realized[:] = 10.0
    assert exceedances(res, "LS", 0.05).hits.tolist() == [0, 0, 0]
    with pytest.raises(KeyError):
        exceedances(res, "QS5", 0.05)
    with pytest.raises(KeyError):
        exceedances(res, "LS", 0.1)


def test_forecast_uses_only_past_data(small_run):
    y, cfg, res = small_run
    # perturbing the future leaves earlier forecasts untouched
    z = y.copy()
    z[380:] += 50.0
    other = run_backtest(cfg, z)
    np.testing.assert_array_equal(other["LS"].var[0.05][:80], res["LS"].var[0.05][:80])


def test_var_matches_standalone_forecast(small_run):
    y, _, res = small_run
    tr = res["QS5"]
    k = 57
    pred = get_model("garch").forecast(tr.params[k], y[:300 + k])
    assert tr.var[0.05][k] == pytest.approx(float(gaussian_var(pred, 0.05)), abs=1e-12)


def test_frame_round_trip(small_run):
    _, _, res = small_run
    tr = res["CLS10"]
    back = ScoreTrack.from_frame("CLS10", tr.to_frame())
    np.testing.assert_array_equal(back.var[0.025], tr.var[0.025])
    np.testing.assert_array_equal(back.scores["CLS_ABOVE_LAG"], tr.scores["CLS_ABOVE_LAG"])


def test_parallel_matches_serial(small_run):
    y, cfg, res = small_run
    par = run_backtest(cfg, y, n_jobs=2)
    for label in res.tracks:
        np.testing.assert_array_equal(par[label].sd, res[label].sd)


def test_average_scores_layout(small_run):
    _, _, res = small_run
    table = res.average_scores()
    assert list(table.index) == ["LS", "QS5", "CLS10"]
    assert table.loc["LS", "LS"] == pytest.approx(res["LS"].scores["LS"].mean())
    assert len(res.records()) == 120


def test_config_validation():
    with pytest.raises(ValueError):
        BacktestConfig(10, 5)
    with pytest.raises(ValueError):
        BacktestConfig(100, 5, reestimation_stride=0)
    with pytest.raises(ValueError):
        BacktestConfig(100, 5, var_levels=(1.5,))
    with pytest.raises(ValueError):
        run_backtest(BacktestConfig(100, 50), np.zeros(120))


@pytest.mark.slow
def test_desk_scale_ls_exceedance():
    y = simulate(DgpSpec("gaussian_garch", 3000, seed=task_seed(0, "desk-scale-ls")))
    cfg = BacktestConfig(2500, 500, reestimation_stride=25, var_levels=(0.05,))
    rate = exceedances(run_backtest(cfg, y), "LS", 0.05).rate
    assert 0.03 <= rate <= 0.07
