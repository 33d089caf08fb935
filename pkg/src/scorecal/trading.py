"""
Equity portfolios hedged with front-month VIX futures.

A fraction ``hedge_weight`` of the portfolio goes into a VIX futures position
opened at the day's open and closed at its close, on days selected by a rule
applied to the predictive of tomorrow's log VIX:

- probability rule: Pr(VIX_{t+1} > VIX_t | F_t) > prob_threshold
- percentile rule: the ``percentile`` predictive quantile of VIX_{t+1}
  exceeds ``level_threshold`` index points
- static: every day

On days without a position that fraction earns the risk-free rate (or stays
in the stock, with ``idle="stock"``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .predictive import GaussianPredictive, gaussian_var, prob_exceed

PROBABILITY_RULE = "probability"
PERCENTILE_RULE = "percentile"
STATIC = "static"
RULES = (PROBABILITY_RULE, PERCENTILE_RULE, STATIC)
TRADING_DAYS = 252


@dataclass(frozen=True)
class MarketData:
    """Aligned daily market series. Returns and rates are decimals per day."""

    dates: np.ndarray
    stock_return: np.ndarray
    risk_free: np.ndarray
    vix: np.ndarray
    futures_open: np.ndarray
    futures_close: np.ndarray

    def __post_init__(self):
        fields = ("dates", "stock_return", "risk_free", "vix", "futures_open", "futures_close")
        arrays = {f: np.asarray(getattr(self, f)) for f in fields}
        n = arrays["dates"].size
        for f, arr in arrays.items():
            if arr.shape != (n,):
                raise ValueError(f"{f} has length {arr.size}, expected {n}")
            if f != "dates":
                arr = arr.astype(float)
                if not np.all(np.isfinite(arr)):
                    raise ValueError(f"{f} contains non-finite values")
            object.__setattr__(self, f, arr)
        if n > 1 and not np.all(self.dates[1:] > self.dates[:-1]):
            raise ValueError("dates must be strictly increasing")
        if np.any(self.futures_open <= 0) or np.any(self.futures_close <= 0):
            raise ValueError("futures prices must be positive")
        if np.any(self.vix <= 0):
            raise ValueError("VIX levels must be positive")

    def __len__(self) -> int:
        return self.dates.size

    @property
    def futures_return(self) -> np.ndarray:
        return self.futures_close / self.futures_open - 1.0

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "MarketData":
        return cls(frame["date"].to_numpy(), frame["stock_return"].to_numpy(float),
                   frame["risk_free"].to_numpy(float), frame["vix"].to_numpy(float),
                   frame["futures_open"].to_numpy(float), frame["futures_close"].to_numpy(float))


@dataclass(frozen=True)
class StrategySpec:
    rule: str
    hedge_weight: float = 0.05
    prob_threshold: float = 0.5
    percentile: float = 0.80
    level_threshold: float = 40.0
    idle: str = "cash"

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if not 0.0 <= self.hedge_weight <= 1.0:
            raise ValueError("hedge_weight must lie in [0, 1]")
        if not 0.0 < self.prob_threshold < 1.0 or not 0.0 < self.percentile < 1.0:
            raise ValueError("probability thresholds must lie in (0, 1)")
        if not self.level_threshold > 0:
            raise ValueError("level_threshold must be positive")
        if self.idle not in ("cash", "stock"):
            raise ValueError("idle must be 'cash' or 'stock'")


@dataclass(frozen=True)
class PortfolioStats:
    mean_excess: float
    std_dev: float
    sharpe: float
    n: int
    sharpe_defined: bool = True


def signal_probability_rule(pred: GaussianPredictive, vix_today, threshold: float = 0.5):
    """1 where the predictive probability that log VIX rises above today's
    level strictly exceeds ``threshold``."""
    vix_today = np.asarray(vix_today, dtype=float)
    if np.any(vix_today <= 0):
        raise ValueError("VIX level must be positive")
    return (prob_exceed(pred, np.log(vix_today)) > threshold).astype(int)


def signal_percentile_rule(pred: GaussianPredictive, percentile: float = 0.80,
                           level_threshold: float = 40.0):
    """1 where the ``percentile`` predictive quantile of the VIX level
    (exp of the log-scale quantile) strictly exceeds ``level_threshold``."""
    return (np.exp(gaussian_var(pred, percentile)) > level_threshold).astype(int)


def strategy_signals(spec: StrategySpec, pred: GaussianPredictive | None = None,
                     vix_previous=None, n: int | None = None) -> np.ndarray:
    """Signals for each trading day from the predictives of that day's log VIX
    (formed with data through the previous day)."""
    if spec.rule == STATIC:
        if n is None:
            n = len(pred) if pred is not None else None
        if n is None:
            raise ValueError("static signals need a length")
        return np.ones(n, dtype=int)
    if pred is None:
        raise ValueError(f"{spec.rule} rule needs predictives")
    if spec.rule == PROBABILITY_RULE:
        if vix_previous is None:
            raise ValueError("probability rule needs the previous VIX level")
        return np.atleast_1d(signal_probability_rule(pred, vix_previous, spec.prob_threshold))
    return np.atleast_1d(signal_percentile_rule(pred, spec.percentile, spec.level_threshold))


def run_strategy(data: MarketData, spec: StrategySpec, signals=None) -> np.ndarray:
    """
    Daily portfolio returns.

    Signal days hold (1 - w) in the stock and w in the intraday futures
    position; other days hold w in cash at the risk-free rate (or in the
    stock when ``spec.idle == "stock"``). The static rule trades every day
    and ignores ``signals``.
    """
    n = len(data)
    if spec.rule == STATIC:
        signals = np.ones(n, dtype=int)
    elif signals is None:
        raise ValueError("signals are required for dynamic rules")
    s = np.asarray(signals)
    if s.shape != (n,):
        raise ValueError(f"{s.size} signals for {n} trading days")
    w = spec.hedge_weight
    idle = data.risk_free if spec.idle == "cash" else data.stock_return
    hedge = np.where(s == 1, data.futures_return, idle)
    return (1.0 - w) * data.stock_return + w * hedge


def portfolio_stats(returns, risk_free, periods_per_year: int = TRADING_DAYS) -> PortfolioStats:
    """Annualised mean excess return, standard deviation and Sharpe ratio
    (sample standard deviation, ddof=1)."""
    r = np.asarray(returns, dtype=float)
    rf = np.broadcast_to(np.asarray(risk_free, dtype=float), r.shape)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("need at least two returns")
    excess = r - rf
    mean = float(np.mean(excess)) * periods_per_year
    sd = float(np.std(excess, ddof=1)) * math.sqrt(periods_per_year)
    if sd > 0.0:
        return PortfolioStats(mean, sd, mean / sd, r.size)
    return PortfolioStats(mean, sd, float("nan"), r.size, sharpe_defined=False)


def strategy_table(data: MarketData, strategies: dict,
                   periods_per_year: int = TRADING_DAYS) -> pd.DataFrame:
    """
    Performance table for named strategies.

    ``strategies`` maps a row name to a ``(StrategySpec, signals)`` pair;
    signals may be ``None`` for the static rule.
    """
    rows = []
    for name, (spec, signals) in strategies.items():
        ret = run_strategy(data, spec, signals)
        st = portfolio_stats(ret, data.risk_free, periods_per_year)
        rows.append({"strategy": name, "mean_excess": st.mean_excess,
                     "std_dev": st.std_dev, "sharpe": st.sharpe,
                     "signal_days": int(np.sum(signals)) if signals is not None else len(data)})
    return pd.DataFrame(rows, columns=["strategy", "mean_excess", "std_dev", "sharpe",
                                       "signal_days"])
