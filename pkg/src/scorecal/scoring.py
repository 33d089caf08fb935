"""
Positively oriented scoring rules for Gaussian predictives.

Higher is better for every score here. ``log_score``, ``censored_log_score``
and ``quantile_score`` rate a predictive against a realisation and can be
used as calibration criteria. ``fz_joint_score`` rates a (VaR, ES) pair and
is used only for evaluation (Murphy diagrams).

All functions broadcast over arrays, so a ``GaussianPredictive`` holding
arrays of means and sds is scored date by date in one call.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .predictive import GaussianPredictive, gaussian_es, gaussian_var, _check_probability

LOWER = "lower"
UPPER = "upper"
ABOVE_LAG = "above_lag"
REGION_KINDS = (LOWER, UPPER, ABOVE_LAG)

LS = "LS"
CLS = "CLS"
QS = "QS"


@dataclass(frozen=True)
class Region:
    """Region of interest A for the censored log score.

    ``lower``: A = (-inf, b]; ``upper``: A = [b, inf). For both, b is the
    empirical ``quantile_level`` quantile of the data the region is resolved
    on. ``above_lag``: A = [y_{t-1}, inf), so the boundary changes each date
    and is supplied at scoring time.
    """

    kind: str
    quantile_level: float | None = None
    boundary: float | None = None

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind in (LOWER, UPPER):
            if self.quantile_level is None or not 0.0 < self.quantile_level < 1.0:
                raise ValueError("tail regions need a quantile_level in (0, 1)")

    def resolve(self, window) -> "Region":
        """Fix the boundary at the empirical quantile of ``window``."""
        if self.kind == ABOVE_LAG:
            return self
        b = float(np.quantile(np.asarray(window, dtype=float), self.quantile_level))
        return replace(self, boundary=b)

    def inside(self, y, boundary=None):
        b = self.boundary if boundary is None else boundary
        if b is None:
            raise ValueError("region boundary is unresolved")
        y = np.asarray(y, dtype=float)
        if self.kind == LOWER:
            return y <= b
        return y >= b


@dataclass(frozen=True)
class ScoreSpec:
    kind: str
    region: Region | None = None
    level: float | None = None

    def __post_init__(self):
        if self.kind == CLS:
            if self.region is None:
                raise ValueError("CLS requires a region")
        elif self.kind == QS:
            if self.level is None or not 0.0 < self.level < 1.0:
                raise ValueError("QS requires a level in (0, 1)")
        elif self.kind != LS:
            raise ValueError(f"unknown score kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == LS:
            return LS
        if self.kind == QS:
            return f"QS{_pct(self.level)}"
        if self.region.kind == ABOVE_LAG:
            return "CLS_ABOVE_LAG"
        return f"CLS{_pct(self.region.quantile_level)}"

    @classmethod
    def parse(cls, label: str) -> "ScoreSpec":
        """Build a spec from labels such as ``LS``, ``CLS10``, ``CLS90``,
        ``QS2.5`` or ``CLS_ABOVE_LAG``.

        CLS levels below 50 denote lower-tail regions and levels above 50
        upper-tail regions.
        """
        text = label.strip().upper()
        if text == LS:
            return cls(LS)
        if text == "CLS_ABOVE_LAG":
            return cls(CLS, region=Region(ABOVE_LAG))
        m = re.fullmatch(r"(CLS|QS)(\d+(?:\.\d+)?)", text)
        if m is None:
            raise ValueError(f"cannot parse score label {label!r}")
        level = float(m.group(2)) / 100.0
        if m.group(1) == QS:
            return cls(QS, level=level)
        if level == 0.5:
            raise ValueError("CLS50 is ambiguous between lower and upper tails")
        return cls(CLS, region=Region(LOWER if level < 0.5 else UPPER, level))

    def resolve(self, window) -> "ScoreSpec":
        if self.kind != CLS:
            return self
        return replace(self, region=self.region.resolve(window))

    def score(self, pred: GaussianPredictive, y, boundary=None):
        """Per-observation scores.

        ``boundary`` is the preceding observation of each target; only
        ``above_lag`` regions use it, tail regions keep their resolved
        boundary.
        """
        if self.kind == LS:
            return log_score(pred, y)
        if self.kind == QS:
            return quantile_score(pred, y, self.level)
        if self.region.kind != ABOVE_LAG:
            boundary = None
        elif boundary is None:
            raise ValueError("above_lag regions need the preceding observation")
        return censored_log_score(pred, y, self.region, boundary=boundary)


def _pct(level: float) -> str:
    return f"{100.0 * level:g}"


def log_score(pred: GaussianPredictive, y):
    return pred.logpdf(y)


def censored_log_score(pred: GaussianPredictive, y, region: Region, boundary=None):
    """
    Log density inside the region, log predictive mass of the complement
    outside it.

    A realisation on the boundary counts as inside the region. A zero
    complement mass for a realisation outside the region gives ``-inf``.
    """
    b = region.boundary if boundary is None else boundary
    if b is None:
        raise ValueError("region boundary is unresolved")
    b = np.asarray(b, dtype=float)
    y = np.asarray(y, dtype=float)
    zb = pred.standardize(b)
    if region.kind == LOWER:
        # complement (b, inf)
        log_mass = special.log_ndtr(-zb)
    else:
        # complement (-inf, b)
        log_mass = special.log_ndtr(zb)
    inside = region.inside(y, boundary=b)
    return np.where(inside, pred.logpdf(y), log_mass)


def quantile_score(pred: GaussianPredictive, y, p):
    """[1(y <= VaR_p) - p] (y - VaR_p); non-positive, zero at y = VaR_p."""
    var = gaussian_var(pred, p)
    return quantile_score_from_var(var, y, p)


def quantile_score_from_var(var, y, p):
    y = np.asarray(y, dtype=float)
    hit = (y <= var).astype(float)
    return (hit - p) * (y - var)


@dataclass(frozen=True)
class VarEsPair:
    """Joint VaR/ES forecast, lower-tail convention (es <= var)."""

    var: float | np.ndarray
    es: float | np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.es) > np.asarray(self.var)):
            raise ValueError("ES must not exceed VaR")

    @classmethod
    def from_predictive(cls, pred: GaussianPredictive, p) -> "VarEsPair":
        return cls(gaussian_var(pred, p), gaussian_es(pred, p))


def fz_joint_score(pair: VarEsPair, y, p, eta):
    """
    Elementary joint VaR/ES score indexed by ``eta`` (positive orientation):

        -1(eta <= es) * [ 1(y <= var)(var - y)/p - (var - eta) ]
        - 1(eta <= y) * (y - eta)

    Broadcasts over ``pair``/``y`` (dates) and ``eta``.
    """
    p = float(_check_probability(p))
    var = np.asarray(pair.var, dtype=float)
    es = np.asarray(pair.es, dtype=float)
    y = np.asarray(y, dtype=float)
    eta = np.asarray(eta, dtype=float)
    tail = np.where(y <= var, var - y, 0.0) / p
    first = np.where(eta <= es, tail - (var - eta), 0.0)
    second = np.where(eta <= y, y - eta, 0.0)
    return 0.0 - first - second


def average_score(spec: ScoreSpec, predictives: GaussianPredictive, realizations,
                  boundary=None) -> float:
    y = np.atleast_1d(np.asarray(realizations, dtype=float))
    n_pred = np.broadcast(np.asarray(predictives.mean), np.asarray(predictives.sd)).size
    if n_pred != y.size:
        raise ValueError(
            f"length mismatch: {n_pred} predictives vs {y.size} realisations"
        )
    if y.size < 1:
        raise ValueError("need at least one observation")
    return float(np.mean(spec.score(predictives, y, boundary=boundary)))
