"""
Forecast evaluation.

- ``christoffersen_cc``: unconditional coverage, first-order Markov
  independence and conditional coverage likelihood-ratio tests of VaR hits.
- ``gw_test``: unconditional equal-predictive-ability test on score
  differences with a Bartlett-kernel HAC variance.
- ``murphy_diagram``: average joint VaR/ES score differences over a grid of
  eta values, with moving-block bootstrap bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from .backtest import BacktestResult, ExceedanceSeries, exceedances, level_tag
from .scoring import LS, ScoreSpec, VarEsPair, fz_joint_score

BOOTSTRAP_REPLICATES = 1000
DEFAULT_GRID_SIZE = 201


@dataclass(frozen=True)
class CoverageTestResult:
    lr_uc: float
    lr_ind: float
    lr_cc: float
    p_uc: float
    p_ind: float
    p_cc: float
    empirical_rate: float
    n: int
    n_hits: int
    degenerate: bool = False

    def rejects(self, alpha: float = 0.05) -> bool:
        return self.p_cc < alpha


def _xlogy(count, prob):
    # 0 * log(0) = 0
    return float(count * np.log(prob)) if count > 0 else 0.0


def christoffersen_cc(hits, nominal: float) -> CoverageTestResult:
    """
    Christoffersen conditional coverage test.

    Parameters
    ----------
    hits : ExceedanceSeries or array_like of {0, 1}
    nominal : float
        Nominal exceedance probability of the VaR.

    Returns
    -------
    CoverageTestResult
        ``lr_cc`` is ``lr_uc + lr_ind``; p-values use chi-squared laws with
        1, 1 and 2 degrees of freedom. ``degenerate`` is set when a
        transition probability cannot be estimated (no hits, all hits, or no
        visits to one state) and the convention 0 * log 0 = 0 was applied.
    """
    h = np.asarray(hits.hits if isinstance(hits, ExceedanceSeries) else hits).astype(int)
    if h.ndim != 1 or h.size < 2:
        raise ValueError("need at least two hit indicators")
    if np.any((h != 0) & (h != 1)):
        raise ValueError("hits must be 0/1")
    if not 0.0 < nominal < 1.0:
        raise ValueError("nominal level must lie in (0, 1)")
    n = h.size
    n1 = int(h.sum())
    n0 = n - n1
    pi_hat = n1 / n
    ll_null = _xlogy(n0, 1.0 - nominal) + _xlogy(n1, nominal)
    ll_alt = _xlogy(n0, 1.0 - pi_hat) + _xlogy(n1, pi_hat)
    lr_uc = max(-2.0 * (ll_null - ll_alt), 0.0) + 0.0  # + 0.0 drops a signed zero

    prev, curr = h[:-1], h[1:]
    n00 = int(np.sum((prev == 0) & (curr == 0)))
    n01 = int(np.sum((prev == 0) & (curr == 1)))
    n10 = int(np.sum((prev == 1) & (curr == 0)))
    n11 = int(np.sum((prev == 1) & (curr == 1)))
    from0, from1 = n00 + n01, n10 + n11
    pi01 = n01 / from0 if from0 else 0.0
    pi11 = n11 / from1 if from1 else 0.0
    pi = (n01 + n11) / (n - 1)
    ll_markov = (_xlogy(n00, 1.0 - pi01) + _xlogy(n01, pi01)
                 + _xlogy(n10, 1.0 - pi11) + _xlogy(n11, pi11))
    ll_iid = _xlogy(n00 + n10, 1.0 - pi) + _xlogy(n01 + n11, pi)
    lr_ind = max(-2.0 * (ll_iid - ll_markov), 0.0) + 0.0
    lr_cc = lr_uc + lr_ind
    degenerate = n1 == 0 or n1 == n or from0 == 0 or from1 == 0

    return CoverageTestResult(
        lr_uc=lr_uc, lr_ind=lr_ind, lr_cc=lr_cc,
        p_uc=float(stats.chi2.sf(lr_uc, 1)),
        p_ind=float(stats.chi2.sf(lr_ind, 1)),
        p_cc=float(stats.chi2.sf(lr_cc, 2)),
        empirical_rate=pi_hat, n=n, n_hits=n1, degenerate=degenerate,
    )


@dataclass(frozen=True)
class EpaTestResult:
    statistic: float
    p_value: float
    mean_diff: float
    lags: int
    degenerate: bool = False


def bartlett_lags(n: int) -> int:
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def hac_variance(d, lags: int) -> float:
    """Newey-West long-run variance of ``d`` with Bartlett weights."""
    d = np.asarray(d, dtype=float)
    u = d - d.mean()
    n = u.size
    lrv = float(u @ u) / n
    for k in range(1, lags + 1):
        w = 1.0 - k / (lags + 1.0)
        lrv += 2.0 * w * float(u[k:] @ u[:-k]) / n
    return lrv


def gw_test(score_a, score_b, lags: int | None = None) -> EpaTestResult:
    """
    Unconditional Giacomini-White test of equal predictive ability.

    The statistic is mean(d) / sqrt(HAC(d) / n) with d = score_a - score_b;
    positive values favour ``score_a`` (scores are positively oriented). The
    p-value is two-sided under the standard normal.
    """
    a = np.asarray(score_a, dtype=float)
    b = np.asarray(score_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("score sequences must be one-dimensional and of equal length")
    if a.size < 30:
        raise ValueError("gw_test needs at least 30 paired scores")
    d = a - b
    n = d.size
    lags = bartlett_lags(n) if lags is None else int(lags)
    mean = float(d.mean())
    lrv = hac_variance(d, lags)
    if not lrv > 0.0:
        if mean == 0.0:
            return EpaTestResult(0.0, 1.0, 0.0, lags, degenerate=True)
        raise ValueError("score differences have zero variance but non-zero mean")
    stat = mean / math.sqrt(lrv / n)
    return EpaTestResult(stat, float(2.0 * stats.norm.sf(abs(stat))), mean, lags)


@dataclass(frozen=True)
class MurphyCurve:
    eta_grid: np.ndarray
    delta: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    level: float = 0.95

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"eta": self.eta_grid, "delta": self.delta,
                             "lo": self.ci_lower, "hi": self.ci_upper})


def default_eta_grid(realized, size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """Equally spaced grid from min(realized) - sd(realized) to max(realized)."""
    y = np.asarray(realized, dtype=float)
    return np.linspace(y.min() - y.std(), y.max(), size)


def block_length(n: int) -> int:
    return int(math.ceil(n ** (1.0 / 3.0)))


def moving_block_means(values, n_boot: int, block: int, rng) -> np.ndarray:
    """
    Moving-block bootstrap replicates of the column means of ``values``.

    Rows (dates) are resampled in overlapping blocks of ``block`` consecutive
    rows; ceil(n / block) blocks are drawn per replicate and the last one is
    truncated so every replicate has exactly n rows.

    Returns
    -------
    np.ndarray, shape (n_boot, n_columns)
    """
    x = np.asarray(values, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    block = max(1, min(block, n))
    n_starts = n - block + 1
    n_blocks = -(-n // block)
    tail = n - (n_blocks - 1) * block
    csum = np.vstack([np.zeros((1, x.shape[1])), np.cumsum(x, axis=0)])
    full_sums = csum[block:] - csum[:n_starts]
    tail_sums = csum[tail:tail + n_starts] - csum[:n_starts]

    starts = rng.integers(0, n_starts, size=(n_boot, n_blocks))
    counts = np.zeros((n_boot, n_starts))
    rows = np.repeat(np.arange(n_boot), n_blocks - 1)
    np.add.at(counts, (rows, starts[:, :-1].ravel()), 1.0)
    totals = counts @ full_sums + tail_sums[starts[:, -1]]
    return totals / n


def murphy_diagram(pairs_a: VarEsPair, pairs_b: VarEsPair, realized, p: float,
                   eta_grid=None, level: float = 0.95, n_boot: int = BOOTSTRAP_REPLICATES,
                   block: int | None = None, seed=0) -> MurphyCurve:
    """
    Murphy diagram of forecast A against forecast B for the joint VaR/ES score.

    ``delta[k]`` is the average over dates of S_eta(A) - S_eta(B) at
    ``eta_grid[k]``; positive values favour A. Bands are percentile intervals
    of a moving-block bootstrap over dates (block length ceil(n^(1/3)) by
    default), widened where needed so they contain ``delta``.
    """
    y = np.asarray(realized, dtype=float)
    if eta_grid is None:
        eta_grid = default_eta_grid(y)
    eta = np.asarray(eta_grid, dtype=float)
    if eta.ndim != 1 or eta.size == 0:
        raise ValueError("eta grid must be a non-empty 1-d sequence")
    if np.any(np.diff(eta) < 0):
        raise ValueError("eta grid must be sorted ascending")
    va, ea, vb, eb = (np.asarray(v, dtype=float) for v in
                      (pairs_a.var, pairs_a.es, pairs_b.var, pairs_b.es))
    if not (va.shape == ea.shape == vb.shape == eb.shape == y.shape):
        raise ValueError("forecast pairs and realisations must have equal lengths")

    col = (slice(None), None)
    diff = (fz_joint_score(VarEsPair(va[col], ea[col]), y[col], p, eta[None, :])
            - fz_joint_score(VarEsPair(vb[col], eb[col]), y[col], p, eta[None, :]))
    delta = diff.mean(axis=0)

    rng = np.random.default_rng(seed)
    boot = moving_block_means(diff, n_boot, block or block_length(y.size), rng)
    tail = 50.0 * (1.0 - level)
    lo, hi = np.percentile(boot, [tail, 100.0 - tail], axis=0)
    return MurphyCurve(eta, delta, np.minimum(lo, delta), np.maximum(hi, delta), level)


def coverage_table(result: BacktestResult, alpha: float = 0.05) -> pd.DataFrame:
    """Exceedance rates and conditional coverage tests, one row per calibrated
    score and a column block per VaR level."""
    rows = []
    for label in result.tracks:
        row = {"optimizer": label}
        for p in result.config.var_levels:
            test = christoffersen_cc(exceedances(result, label, p), p)
            tag = level_tag(p)
            row[f"rate_{tag}"] = test.empirical_rate
            row[f"lr_cc_{tag}"] = test.lr_cc
            row[f"p_cc_{tag}"] = test.p_cc
            row[f"pass_{tag}"] = int(not test.rejects(alpha))
        rows.append(row)
    return pd.DataFrame(rows)


def score_comparison_table(result: BacktestResult, benchmark: str = LS) -> pd.DataFrame:
    """
    Average out-of-sample score of the benchmark-calibrated predictive against
    the predictive calibrated to the evaluation score itself, with the
    equal-predictive-ability test of the two score sequences.
    """
    bench = result[benchmark]
    rows = []
    for label in result.config.scores_to_evaluate:
        if label not in result.tracks or label not in bench.scores:
            continue
        own = result.tracks[label].scores[label]
        base = bench.scores[label]
        test = gw_test(own, base) if own.size >= 30 else None
        rows.append({
            "score": label,
            "benchmark": float(np.mean(base)),
            "optimal": float(np.mean(own)),
            "gw_stat": test.statistic if test else np.nan,
            "gw_p": test.p_value if test else np.nan,
        })
    return pd.DataFrame(rows, columns=["score", "benchmark", "optimal", "gw_stat", "gw_p"])


def murphy_from_backtest(result: BacktestResult, label: str, p: float,
                         benchmark: str = LS, **kwargs) -> MurphyCurve:
    a, b = result[label], result[benchmark]
    key = _level_key(a.var, p)
    return murphy_diagram(VarEsPair(a.var[key], a.es[key]),
                          VarEsPair(b.var[key], b.es[key]), a.realized, p, **kwargs)


def _level_key(levels, p):
    for q in levels:
        if abs(q - p) < 1e-12:
            return q
    raise KeyError(f"level {p} not among backtest levels {sorted(levels)}")


def default_murphy_level(label: str, fallback: float = 0.10) -> float:
    spec = ScoreSpec.parse(label)
    return spec.level if spec.kind == "QS" else fallback
