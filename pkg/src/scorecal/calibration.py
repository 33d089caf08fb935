"""
Score-based calibration of predictive models.

A model's parameters are chosen to maximise the sample average score of its
one-step-ahead predictives over the estimation window (terms t = 2..n), for
whichever proper score the user cares about. With the log score this is
Gaussian maximum likelihood.

Optimisation runs Nelder-Mead on an unconstrained reparameterisation:
variance intercepts on the log scale, persistence through a logistic map and
the ARCH share of persistence through a second logistic map.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .predictive import (
    HAR_MIN_LENGTH,
    GarchParams,
    GaussianPredictive,
    HarGarchParams,
    ParameterError,
    garch_filter,
    har_design,
    har_garch_filter,
)
from .scoring import ScoreSpec

MIN_WINDOW = 30
SIMPLEX_TOL = 1e-6
MAX_ITER = 2000
# transformed variance coordinates are confined to [-BOX, BOX]
BOX = 30.0


class CalibrationError(RuntimeError):
    pass


class BoundaryWarning(UserWarning):
    """The optimum sits on the edge of the admissible parameter region."""


def _logit(p):
    with np.errstate(divide="ignore"):
        return special.logit(p)


def _split_transform(a, b):
    total = a + b
    share = a / total if total > 0 else 0.5
    return _logit(total), _logit(share)


def _split_untransform(u_total, u_share):
    total = special.expit(u_total)
    share = special.expit(u_share)
    return total * share, total * (1.0 - share)


class GarchModel:
    name = "garch"
    params_type = GarchParams
    n_params = 4
    free_dims = (0,)

    def default_params(self, data) -> GarchParams:
        y = np.asarray(data, dtype=float)
        var = max(float(np.var(y)), 1e-12)
        return GarchParams(float(np.mean(y)), 0.05 * var, 0.05, 0.90)

    def transform(self, params: GarchParams) -> np.ndarray:
        u_total, u_share = _split_transform(params.alpha1, params.beta1)
        return np.array([params.mu, np.log(params.alpha0), u_total, u_share])

    def untransform(self, u) -> GarchParams:
        a1, b1 = _split_untransform(u[2], u[3])
        return GarchParams(float(u[0]), float(np.exp(u[1])), float(a1), float(b1))

    def initial_steps(self, data) -> np.ndarray:
        sd = float(np.std(data)) or 1.0
        return np.array([0.1 * sd, 0.25, 0.25, 0.25])

    def in_sample(self, params: GarchParams, data):
        """Predictives for y_2..y_n with their realisations and the
        preceding observations."""
        y = np.asarray(data, dtype=float)
        sig2 = garch_filter(params, y)
        pred = GaussianPredictive(np.full(y.size - 1, params.mu), np.sqrt(sig2[1:-1]))
        return pred, y[1:], y[:-1]

    def forecast(self, params: GarchParams, data) -> GaussianPredictive:
        sig2 = garch_filter(params, data)
        return GaussianPredictive(params.mu, float(np.sqrt(sig2[-1])))


class HarGarchModel:
    name = "har_garch"
    params_type = HarGarchParams
    n_params = 7
    free_dims = (0, 1, 2, 3)

    def default_params(self, data) -> HarGarchParams:
        """OLS HAR coefficients; variance-targeted GARCH part."""
        x = np.asarray(data, dtype=float)
        design = har_design(x)[:-1]
        target = x[HAR_MIN_LENGTH - 1:]
        coefs, *_ = np.linalg.lstsq(design, target, rcond=None)
        var = max(float(np.var(target - design @ coefs)), 1e-12)
        return HarGarchParams(*coefs, 0.05 * var, 0.05, 0.90)

    def transform(self, params: HarGarchParams) -> np.ndarray:
        u_total, u_share = _split_transform(params.alpha1, params.alpha2)
        return np.concatenate([params.mean_coefs, [np.log(params.alpha0), u_total, u_share]])

    def untransform(self, u) -> HarGarchParams:
        a1, a2 = _split_untransform(u[5], u[6])
        return HarGarchParams(*(float(v) for v in u[:4]), float(np.exp(u[4])),
                              float(a1), float(a2))

    def initial_steps(self, data) -> np.ndarray:
        return np.array([0.1, 0.1, 0.1, 0.1, 0.25, 0.25, 0.25])

    def in_sample(self, params: HarGarchParams, data):
        x = np.asarray(data, dtype=float)
        means, variances = har_garch_filter(params, x)
        pred = GaussianPredictive(means[:-1], np.sqrt(variances[:-1]))
        return pred, x[HAR_MIN_LENGTH:], x[HAR_MIN_LENGTH - 1:-1]

    def forecast(self, params: HarGarchParams, data) -> GaussianPredictive:
        means, variances = har_garch_filter(params, data)
        return GaussianPredictive(float(means[-1]), float(np.sqrt(variances[-1])))


MODELS = {"garch": GarchModel(), "har_garch": HarGarchModel()}


def get_model(model):
    if isinstance(model, str):
        try:
            return MODELS[model]
        except KeyError:
            raise ValueError(f"unknown model {model!r}; choose from {sorted(MODELS)}") from None
    return model


def model_for(params):
    for model in MODELS.values():
        if isinstance(params, model.params_type):
            return model
    raise TypeError(f"no model for parameters of type {type(params).__name__}")


def transform_params(params) -> np.ndarray:
    """Map constrained parameters to an unconstrained vector."""
    if not isinstance(params, (GarchParams, HarGarchParams)):
        raise ParameterError(f"unsupported parameter object {params!r}")
    return model_for(params).transform(params)


def untransform_params(u, model="garch"):
    return get_model(model).untransform(np.asarray(u, dtype=float))


def sample_criterion(model, params, spec: ScoreSpec, data) -> float:
    """Average score of the in-sample one-step predictives.

    CLS tail boundaries are the empirical quantiles of ``data``; the
    ``above_lag`` boundary is each target's preceding observation.
    """
    model = get_model(model)
    spec = spec.resolve(data)
    pred, realized, previous = model.in_sample(params, data)
    scores = spec.score(pred, realized, boundary=previous)
    return float(np.mean(scores))


@dataclass(frozen=True)
class CalibrationProblem:
    model: str
    score: ScoreSpec
    data: np.ndarray
    initial_params: GarchParams | HarGarchParams | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 1 or data.size < MIN_WINDOW:
            raise ValueError(f"calibration needs at least {MIN_WINDOW} observations")
        if not np.all(np.isfinite(data)):
            raise ValueError("calibration data must be finite")
        object.__setattr__(self, "data", data)
        get_model(self.model)


@dataclass
class CalibrationResult:
    params: GarchParams | HarGarchParams
    criterion_value: float
    iterations: int
    converged: bool
    initial_value: float = np.nan
    at_boundary: bool = False


def _box(model, u):
    u = np.array(u, dtype=float)
    dims = np.setdiff1d(np.arange(u.size), model.free_dims)
    u[dims] = np.clip(u[dims], -BOX, BOX)
    return u


def maximize_simplex(fun, x0, steps, tol=SIMPLEX_TOL, max_iter=MAX_ITER, restarts=1):
    """
    Maximise ``fun`` with Nelder-Mead, restarting from the best vertex.

    Convergence is judged on the simplex size alone (no function-value
    tolerance), so the trajectory depends on ``fun`` only through
    comparisons.

    Returns
    -------
    x, value, iterations, converged
    """
    x = np.asarray(x0, dtype=float)
    steps = np.asarray(steps, dtype=float)
    total_iter = 0
    converged = True

    def neg(v):
        val = fun(v)
        return -val if np.isfinite(val) else np.inf

    for _ in range(restarts + 1):
        simplex = np.vstack([x, x + np.diag(steps)])
        res = optimize.minimize(
            neg, x, method="Nelder-Mead",
            options={"xatol": tol, "fatol": np.inf, "maxiter": max_iter,
                     "maxfev": 4 * max_iter * x.size, "initial_simplex": simplex},
        )
        total_iter += int(res.nit)
        converged = converged and bool(res.success)
        x = res.x
    return x, -float(res.fun), total_iter, converged


def calibrate(problem: CalibrationProblem) -> CalibrationResult:
    """
    Maximise the sample average score over the model's parameter space.

    Raises
    ------
    CalibrationError
        If the criterion is not finite at the initial parameters.
    """
    model = get_model(problem.model)
    data = problem.data
    spec = problem.score.resolve(data)
    try:
        start = problem.initial_params or model.default_params(data)
    except ValueError as exc:
        raise CalibrationError(f"no valid starting parameters for this data: {exc}") from exc
    u0 = _box(model, model.transform(start))

    def criterion(u):
        try:
            params = model.untransform(_box(model, u))
            with np.errstate(all="ignore"):
                pred, realized, previous = model.in_sample(params, data)
                return float(np.mean(spec.score(pred, realized, boundary=previous)))
        except ValueError:
            # ParameterError, or a filter that overflowed to a zero/inf sd
            return -np.inf

    initial_value = criterion(u0)
    if not np.isfinite(initial_value):
        raise CalibrationError(
            f"degenerate {spec.label} criterion at the initial parameters ({initial_value})"
        )

    u, value, iterations, converged = maximize_simplex(
        criterion, u0, model.initial_steps(data)
    )
    u = _box(model, u)
    params = model.untransform(u)
    dims = np.setdiff1d(np.arange(u.size), model.free_dims)
    at_boundary = bool(np.any(np.abs(u[dims]) >= BOX - 1e-6))
    if at_boundary:
        warnings.warn(
            f"{spec.label} calibration stopped on the parameter-space boundary: {params}",
            BoundaryWarning, stacklevel=2,
        )
    return CalibrationResult(params, value, iterations, converged,
                             initial_value=initial_value, at_boundary=at_boundary)


def calibrate_score(data, score, model="garch", initial_params=None) -> CalibrationResult:
    """Shorthand for ``calibrate(CalibrationProblem(...))`` accepting score labels."""
    if isinstance(score, str):
        score = ScoreSpec.parse(score)
    return calibrate(CalibrationProblem(model, score, data, initial_params))
