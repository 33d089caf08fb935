import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scorecal.calibration import (
    BoundaryWarning,
    CalibrationError,
    CalibrationProblem,
    calibrate,
    calibrate_score,
    maximize_simplex,
    sample_criterion,
    transform_params,
    untransform_params,
)
from scorecal.io import task_seed
from scorecal.predictive import (
    GarchParams,
    GaussianPredictive,
    HarGarchParams,
    garch_filter,
    gaussian_var,
)
from scorecal.scoring import ScoreSpec
from scorecal.simulation import DgpSpec, simulate

import oracles

TRUE = GarchParams(0.0, 1.0, 0.2, 0.7)


def test_transform_round_trip():
    back = untransform_params(transform_params(TRUE))
    np.testing.assert_allclose(back.to_array(), TRUE.to_array(), rtol=0, atol=1e-12)


def test_persistence_to_one_diverges():
    u = [transform_params(GarchParams(0.0, 1.0, 0.1, 0.9 - 10.0**-k))[2] for k in (2, 6, 12)]
    assert u[0] < u[1] < u[2] and u[2] > 25


@settings(max_examples=1000, deadline=None)
@given(mu=st.floats(-5, 5), a0=st.floats(1e-4, 10), total=st.floats(1e-3, 0.999),
       share=st.floats(1e-3, 0.999))
def test_random_round_trips(mu, a0, total, share):
    p = GarchParams(mu, a0, total * share, total * (1 - share))
    back = untransform_params(transform_params(p))
    np.testing.assert_allclose(back.to_array(), p.to_array(), rtol=1e-9, atol=1e-12)


def test_har_round_trip():
    p = HarGarchParams(0.1, 0.8, 0.1, 0.05, 0.002, 0.1, 0.85)
    back = untransform_params(transform_params(p), "har_garch")
    np.testing.assert_allclose(back.to_array(), p.to_array(), atol=1e-12)


def test_criterion_is_mean_log_likelihood():
    y = simulate(DgpSpec("gaussian_garch", 300, seed=4))
    s = oracles.garch_variances_loop(y, 0.0, 1.0, 0.2, 0.7, float(np.var(y)))
    ref = np.mean([oracles.log_density(y[t], 0.0, np.sqrt(s[t])) for t in range(1, y.size)])
    assert sample_criterion("garch", TRUE, ScoreSpec.parse("LS"), y) == pytest.approx(ref, abs=1e-12)


def test_simplex_on_quadratic():
    x, val, it, ok = maximize_simplex(lambda v: -np.sum((v - [1.0, -2.0]) ** 2), [0, 0], [0.5, 0.5])
    np.testing.assert_allclose(x, [1.0, -2.0], atol=1e-5)
    assert ok and it > 0


def test_argmax_invariant_to_affine_rescaling():
    y = simulate(DgpSpec("gaussian_garch", 400, seed=8))
    spec = ScoreSpec.parse("QS5")
    problem = CalibrationProblem("garch", spec, y)
    base = calibrate(problem)

    class Scaled(ScoreSpec):
        def score(self, pred, y, boundary=None):
            return 3.0 * super().score(pred, y, boundary) + 7.0

    scaled = calibrate(CalibrationProblem("garch", Scaled("QS", level=0.05), y))
    np.testing.assert_allclose(scaled.params.to_array(), base.params.to_array(), atol=1e-10)


def test_recovers_parameters_and_matches_mle():
    y = simulate(DgpSpec("gaussian_garch", 50_000, seed=task_seed(0, "consistency")))
    res = calibrate_score(y, "LS")
    assert res.converged
    est = res.params.to_array()
    np.testing.assert_allclose(est[1:], [1.0, 0.2, 0.7], atol=0.05)
    np.testing.assert_allclose(est, oracles.garch_mle(y), atol=1e-4)


def test_qs_var_path_tracks_truth():
    y = simulate(DgpSpec("gaussian_garch", 50_000, seed=task_seed(0, "qs-path")))
    res = calibrate_score(y, "QS5")
    sig_true = np.sqrt(oracles.garch_variances_loop(y, 0.0, 1.0, 0.2, 0.7, float(np.var(y))))
    sig_hat = np.sqrt(garch_filter(res.params, y))
    v_hat = gaussian_var(GaussianPredictive(res.params.mu, sig_hat), 0.05)
    v_true = -1.6448536269514722 * sig_true
    assert np.corrcoef(v_hat[100:], v_true[100:])[0, 1] > 0.99


def test_constant_data_hits_boundary():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = calibrate_score(np.full(200, 0.3), "LS")
    assert res.converged and res.at_boundary
    assert res.params.alpha0 < 1e-10
    assert any(issubclass(w.category, BoundaryWarning) for w in caught)


def test_short_or_bad_data_rejected():
    with pytest.raises(ValueError):
        calibrate_score(np.zeros(10), "LS")
    with pytest.raises(ValueError):
        calibrate_score(np.r_[np.zeros(50), np.nan], "LS")


@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
def test_degenerate_initial_criterion():
    # the sample variance overflows, so no predictive has a finite sd
    y = np.r_[np.zeros(60), 1e200, -1e200]
    with pytest.raises(CalibrationError):
        calibrate_score(y, "LS")


def test_har_calibration_improves_on_ols_start():
    rng = np.random.default_rng(2)
    x = np.empty(400)
    x[:22] = 3.0
    for t in range(22, 400):
        x[t] = 0.3 + 0.7 * x[t - 1] + 0.2 * x[t - 22:t].mean() + 0.05 * rng.standard_normal()
    res = calibrate_score(x, "LS", model="har_garch")
    assert res.criterion_value >= res.initial_value
    assert isinstance(res.params, HarGarchParams)
