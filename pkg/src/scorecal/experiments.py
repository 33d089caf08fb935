"""
Multi-step pipelines: Monte-Carlo coverage studies on simulated data and the
VIX-futures hedging backtest.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from .backtest import BacktestConfig, BacktestResult, exceedances, level_tag, run_backtest
from .evaluation import christoffersen_cc
from .io import task_seed
from .predictive import GaussianPredictive
from .simulation import DgpSpec, simulate
from .trading import (
    PERCENTILE_RULE,
    PROBABILITY_RULE,
    STATIC,
    MarketData,
    StrategySpec,
    strategy_signals,
    strategy_table,
)


def coverage_replications(scenario: str, config: BacktestConfig, replications: int,
                          root_seed: int = 0, **dgp_kwargs) -> pd.DataFrame:
    """
    Repeat simulate -> backtest -> coverage test.

    Each replication draws ``initial_window + holdout`` observations with a
    seed derived from ``root_seed`` and the replication number.

    Returns
    -------
    pd.DataFrame
        One row per (replication, calibrated score, VaR level) with the
        exceedance rate and the conditional coverage p-value.
    """
    length = config.initial_window + config.holdout
    rows = []
    for rep in range(replications):
        seed = task_seed(root_seed, scenario, rep)
        y = simulate(DgpSpec(scenario, length, seed=seed, **dgp_kwargs))
        result = run_backtest(config, y)
        for label in result.tracks:
            for p in config.var_levels:
                test = christoffersen_cc(exceedances(result, label, p), p)
                rows.append({"replication": rep, "seed": seed, "optimizer": label,
                             "level": p, "rate": test.empirical_rate, "p_cc": test.p_cc})
    return pd.DataFrame(rows)


def coverage_summary(reps: pd.DataFrame, alpha: float = 0.05) -> pd.DataFrame:
    """Median exceedance rate and rejection frequency per optimizer and level."""
    grouped = reps.assign(reject=reps["p_cc"] < alpha).groupby(["optimizer", "level"], sort=False)
    return grouped.agg(median_rate=("rate", "median"), reject_rate=("reject", "mean"),
                       replications=("rate", "size")).reset_index()


def hedging_backtest(log_vix, config: BacktestConfig, n_jobs: int = 1) -> BacktestResult:
    """HAR-GARCH backtest of log VIX whose hold-out covers the trading days."""
    if config.model != "har_garch":
        raise ValueError("the hedging pipeline uses the har_garch model")
    return run_backtest(config, log_vix, n_jobs=n_jobs)


def hedging_strategies(result: BacktestResult, log_vix, market: MarketData,
                       strategies: list, hedge_weight: float = 0.05, idle: str = "cash",
                       periods_per_year: int = 252) -> pd.DataFrame:
    """
    Performance of each strategy over the hold-out (= trading) days.

    ``strategies`` is a list of dicts with a ``rule`` and, for dynamic rules,
    the calibrated ``score`` whose predictives drive the signals; any other
    keys are passed to ``StrategySpec``.
    """
    x = np.asarray(log_vix, dtype=float)
    first = next(iter(result.tracks.values()))
    if first.date_index.size != len(market):
        raise ValueError(f"backtest covers {first.date_index.size} days but market data "
                         f"has {len(market)}")
    prev_vix = np.exp(x[first.date_index - 2])

    table = {}
    for item in strategies:
        item = dict(item)
        score = item.pop("score", None)
        spec = StrategySpec(hedge_weight=hedge_weight, idle=idle, **item)
        if spec.rule == STATIC:
            table["static"] = (spec, None)
            continue
        track = result[score]
        pred = GaussianPredictive(track.mean, track.sd)
        signals = strategy_signals(spec, pred, vix_previous=prev_vix)
        table[f"{spec.rule}/{track.label}"] = (spec, signals)
    return strategy_table(market, table, periods_per_year)


def hedging_scores(strategies: list) -> tuple:
    labels = ["LS"]
    for item in strategies:
        if item.get("rule") in (PROBABILITY_RULE, PERCENTILE_RULE) and item.get("score"):
            if item["score"] not in labels:
                labels.append(item["score"])
    return tuple(labels)


def coverage_layout(summary: pd.DataFrame, value: str = "median_rate") -> pd.DataFrame:
    """Pivot a coverage summary to optimizer rows x VaR-level columns."""
    wide = summary.pivot(index="optimizer", columns="level", values=value)
    wide.columns = [f"var_{level_tag(p)}" for p in wide.columns]
    order = list(dict.fromkeys(summary["optimizer"]))
    return wide.loc[order].reset_index()
