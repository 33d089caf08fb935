"""
Hedging equities with VIX futures
=================================

A HAR-GARCH model of log VIX produces a predictive for tomorrow's level. Two
rules turn it into a hedge signal: go long futures when a rise is more
likely than not, or when the 80th predictive percentile tops 40. The market
data here are simulated stand-ins with the required columns.
"""

import numpy as np
import pandas as pd

from scorecal.backtest import BacktestConfig
from scorecal.experiments import hedging_backtest, hedging_scores, hedging_strategies
from scorecal.io import ExperimentConfig
from scorecal.trading import MarketData

rng = np.random.default_rng(11)
n, n_trade = 900, 250

# %%
# Log VIX as a persistent AR(1) with occasional bursts.
x = np.empty(n)
x[0] = np.log(18.0)
for t in range(1, n):
    burst = 0.25 if rng.random() < 0.01 else 0.0
    x[t] = 0.16 + 0.945 * x[t - 1] + burst + 0.07 * rng.standard_normal()
vix = np.exp(x)

# %%
# Stock returns fall when VIX jumps; futures trade close to spot.
dvix = np.diff(x[-n_trade - 1:])
stock = 4e-4 - 0.08 * dvix + 0.006 * rng.standard_normal(n_trade)
fut_open = vix[-n_trade:] * np.exp(0.02 * rng.standard_normal(n_trade))
fut_close = fut_open * np.exp(0.8 * dvix + 0.01 * rng.standard_normal(n_trade))
market = MarketData.from_frame(pd.DataFrame({
    "date": np.arange(n_trade), "stock_return": stock, "risk_free": np.full(n_trade, 1e-4),
    "vix": vix[-n_trade:], "futures_open": fut_open, "futures_close": fut_close,
}))

# %%
# The default strategy set pairs each rule with an LS-fitted and a
# tail-fitted predictive. VIX rarely reaches 40 in this simulation, so the
# percentile rules here use a threshold of 25.
strategies = [dict(s, level_threshold=25.0) if s["rule"] == "percentile" else s
              for s in ExperimentConfig().strategies]
cfg = BacktestConfig(initial_window=n - n_trade, holdout=n_trade, reestimation_stride=50,
                     scores_to_calibrate=hedging_scores(strategies), var_levels=(0.8,),
                     model="har_garch")
result = hedging_backtest(x, cfg)
table = hedging_strategies(result, x, market, strategies)
print(table.round(4).to_string(index=False))
