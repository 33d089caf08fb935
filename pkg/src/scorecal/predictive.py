"""
One-step-ahead Gaussian predictive distributions.

Two volatility filters produce the conditional mean and variance that define
the predictive of the next observation:

- ``garch_filter``: constant mean with a GARCH(1,1) conditional variance.
- ``har_garch_filter``: HAR mean (daily, weekly and monthly averages of the
  series) with a GARCH(1,1) variance driven by the mean residuals.

Risk functionals of a Gaussian predictive (VaR, ES, exceedance probability)
are closed-form and vectorised over arrays of predictives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal, special

HAR_WEEK = 5
HAR_MONTH = 22
HAR_MIN_LENGTH = HAR_MONTH + 1


class ParameterError(ValueError):
    """Raised when a parameter vector violates its model constraints."""


def norm_cdf(x):
    return special.ndtr(x)


def norm_ppf(p):
    return special.ndtri(p)


def norm_logpdf(x):
    return -0.5 * np.square(x) - 0.5 * np.log(2.0 * np.pi)


def _check_finite(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValueError(f"{name} contains a non-finite value at index {bad[0]}")
    return arr


def _check_probability(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0.0) | ~(p < 1.0)):
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    return p


@dataclass(frozen=True)
class GaussianPredictive:
    """Normal predictive with the given mean and standard deviation.

    Fields may be scalars or equally shaped arrays; an array instance stands
    for a sequence of predictives (one per forecast date).
    """

    mean: float | np.ndarray
    sd: float | np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        sd = np.asarray(self.sd, dtype=float)
        if not np.all(np.isfinite(mean)):
            raise ValueError("predictive mean must be finite")
        if not np.all(sd > 0.0) or not np.all(np.isfinite(sd)):
            raise ValueError("predictive sd must be finite and > 0")

    def __len__(self) -> int:
        return int(np.size(self.mean))

    def __getitem__(self, idx) -> "GaussianPredictive":
        return GaussianPredictive(np.asarray(self.mean)[idx], np.asarray(self.sd)[idx])

    def standardize(self, y):
        return (np.asarray(y, dtype=float) - self.mean) / self.sd

    def logpdf(self, y):
        return norm_logpdf(self.standardize(y)) - np.log(self.sd)

    def cdf(self, y):
        return norm_cdf(self.standardize(y))

    def var(self, p):
        return gaussian_var(self, p)

    def es(self, p):
        return gaussian_es(self, p)


@dataclass(frozen=True)
class GarchParams:
    """Constant-mean Gaussian GARCH(1,1) parameters."""

    mu: float
    alpha0: float
    alpha1: float
    beta1: float

    def __post_init__(self):
        vals = (self.mu, self.alpha0, self.alpha1, self.beta1)
        if not all(np.isfinite(vals)):
            raise ParameterError(f"non-finite GARCH parameter in {vals}")
        if not self.alpha0 > 0.0:
            raise ParameterError(f"alpha0 must be > 0, got {self.alpha0}")
        if self.alpha1 < 0.0 or self.beta1 < 0.0:
            raise ParameterError("alpha1 and beta1 must be >= 0")
        if not self.alpha1 + self.beta1 < 1.0:
            raise ParameterError(
                f"alpha1 + beta1 must be < 1, got {self.alpha1 + self.beta1}"
            )

    @property
    def persistence(self) -> float:
        return self.alpha1 + self.beta1

    @property
    def unconditional_variance(self) -> float:
        return self.alpha0 / (1.0 - self.persistence)

    def to_array(self) -> np.ndarray:
        return np.array([self.mu, self.alpha0, self.alpha1, self.beta1])

    @classmethod
    def from_array(cls, values) -> "GarchParams":
        return cls(*(float(v) for v in values))


@dataclass(frozen=True)
class HarGarchParams:
    """HAR mean coefficients (intercept, daily, weekly, monthly) and GARCH(1,1)
    coefficients of the residual variance."""

    beta0: float
    beta1: float
    beta2: float
    beta3: float
    alpha0: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        vals = (self.beta0, self.beta1, self.beta2, self.beta3,
                self.alpha0, self.alpha1, self.alpha2)
        if not all(np.isfinite(vals)):
            raise ParameterError(f"non-finite HAR-GARCH parameter in {vals}")
        if not self.alpha0 > 0.0:
            raise ParameterError(f"alpha0 must be > 0, got {self.alpha0}")
        if self.alpha1 < 0.0 or self.alpha2 < 0.0:
            raise ParameterError("alpha1 and alpha2 must be >= 0")
        if not self.alpha1 + self.alpha2 < 1.0:
            raise ParameterError(
                f"alpha1 + alpha2 must be < 1, got {self.alpha1 + self.alpha2}"
            )

    @property
    def mean_coefs(self) -> np.ndarray:
        return np.array([self.beta0, self.beta1, self.beta2, self.beta3])

    def to_array(self) -> np.ndarray:
        return np.array([self.beta0, self.beta1, self.beta2, self.beta3,
                         self.alpha0, self.alpha1, self.alpha2])

    @classmethod
    def from_array(cls, values) -> "HarGarchParams":
        return cls(*(float(v) for v in values))


def _variance_recursion(innov_sq, alpha0, alpha1, beta1, initial_variance):
    """Run s[k+1] = alpha0 + alpha1 * innov_sq[k] + beta1 * s[k] from s[0]."""
    out = np.empty(innov_sq.size + 1)
    out[0] = initial_variance
    drive = alpha0 + alpha1 * innov_sq
    out[1:], _ = signal.lfilter([1.0], [1.0, -beta1], drive, zi=[beta1 * initial_variance])
    return out


def garch_filter(params: GarchParams, series, initial_variance: float | None = None):
    """
    Conditional variance path of a Gaussian GARCH(1,1).

    Parameters
    ----------
    params : GarchParams
    series : array_like
        Observations y_1..y_n.
    initial_variance : float, optional
        sigma^2 of the first observation. Defaults to the sample variance of
        ``series``.

    Returns
    -------
    np.ndarray
        Length n + 1. Element k is the conditional variance of y_{k+1}; the
        last element is the one-step-ahead forecast variance.
    """
    y = _check_finite(series, "series")
    if y.ndim != 1 or y.size < 1:
        raise ValueError("series must be one-dimensional with at least one value")
    if initial_variance is None:
        initial_variance = float(np.var(y))
    resid_sq = np.square(y - params.mu)
    return _variance_recursion(resid_sq, params.alpha0, params.alpha1,
                               params.beta1, initial_variance)


def har_design(log_vix) -> np.ndarray:
    """Regressor matrix [1, x_t, weekly mean, monthly mean] for t = 22..n.

    Row j (0-based) is built from observations up to index t = 21 + j and
    predicts observation t + 1. Averages cover the m most recent values
    including x_t.
    """
    x = _check_finite(log_vix, "log_vix")
    if x.ndim != 1 or x.size < HAR_MIN_LENGTH:
        raise ValueError(
            f"insufficient history: HAR needs at least {HAR_MIN_LENGTH} "
            f"observations, got {x.size}"
        )
    csum = np.concatenate([[0.0], np.cumsum(x)])
    t = np.arange(HAR_MONTH - 1, x.size)
    week = (csum[t + 1] - csum[t + 1 - HAR_WEEK]) / HAR_WEEK
    month = (csum[t + 1] - csum[t + 1 - HAR_MONTH]) / HAR_MONTH
    return np.column_stack([np.ones(t.size), x[t], week, month])


def har_garch_filter(params: HarGarchParams, log_vix, initial_variance: float | None = None):
    """
    Conditional means and variances of a HAR-GARCH model.

    The first forecastable target is x_23 (it needs 22 lags for the monthly
    average). Its residual seeds the variance recursion with
    ``initial_variance`` (default: sample variance of all mean residuals), so
    the returned predictives start at target x_24.

    Returns
    -------
    means, variances : np.ndarray
        Length n - 22, for targets x_24..x_{n+1}. The last pair is the
        one-step-ahead forecast.
    """
    x = np.asarray(log_vix, dtype=float)
    design = har_design(x)
    means = design @ params.mean_coefs
    resid = x[HAR_MONTH:] - means[:-1]
    if initial_variance is None:
        initial_variance = float(np.var(resid))
    variances = _variance_recursion(np.square(resid), params.alpha0, params.alpha1,
                                    params.alpha2, initial_variance)
    return means[1:], variances[1:]


def gaussian_var(pred: GaussianPredictive, p):
    """p-quantile of the predictive (lower-tail VaR convention)."""
    p = _check_probability(p)
    return pred.mean + pred.sd * norm_ppf(p)


def gaussian_es(pred: GaussianPredictive, p):
    """Expected shortfall: the average of VaR_a over a in (0, p]."""
    p = _check_probability(p)
    z = norm_ppf(p)
    return pred.mean - pred.sd * np.exp(norm_logpdf(z)) / p


def prob_exceed(pred: GaussianPredictive, threshold):
    """Predictive probability that the next value exceeds ``threshold``."""
    threshold = np.asarray(threshold, dtype=float)
    if np.any(np.isnan(threshold)):
        raise ValueError("threshold must not be NaN")
    return norm_cdf(-pred.standardize(threshold))
