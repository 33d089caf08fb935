"""
Murphy diagram for VaR and ES
=============================

Compare exact VaR/ES forecasts of a simulated GARCH process with forecasts
that overstate both by 20%. The elementary joint score at each eta gives one
point of the diagram; positive values favour the first forecast.
"""

import numpy as np

from scorecal.predictive import GarchParams, GaussianPredictive, garch_filter
from scorecal.evaluation import murphy_diagram
from scorecal.scoring import VarEsPair
from scorecal.simulation import DgpSpec, simulate

p = 0.05
y = simulate(DgpSpec("gaussian_garch", 3001, seed=3))
sig2 = garch_filter(GarchParams(0.0, 1.0, 0.2, 0.7), y)
pred = GaussianPredictive(0.0, np.sqrt(sig2[1:-1]))
truth = VarEsPair.from_predictive(pred, p)
wide = VarEsPair(1.2 * truth.var, 1.2 * truth.es)

curve = murphy_diagram(truth, wide, y[1:], p, n_boot=500, seed=1)

# %%
# Print every 20th grid point; the band is a moving-block bootstrap
# percentile interval.
frame = curve.to_frame()
print(frame.iloc[::20].round(4).to_string(index=False))
print(f"points with delta < 0: {(curve.delta < 0).sum()} of {curve.delta.size}")

# %%
# Swapping the forecasts flips the sign exactly.
back = murphy_diagram(wide, truth, y[1:], p, eta_grid=curve.eta_grid, n_boot=10)
print("antisymmetric:", np.array_equal(back.delta, -curve.delta))
