"""
Scoring a Gaussian predictive
=============================

Four ways to reward a one-step-ahead forecast, all positively oriented:
the log score, a censored log score that only looks closely at the lower
tail, the quantile score of a VaR forecast and the joint VaR/ES score.
"""

import numpy as np

from scorecal.predictive import GaussianPredictive
from scorecal.scoring import Region, ScoreSpec, VarEsPair, fz_joint_score

# %%
# A standard normal forecast and a few outcomes.
pred = GaussianPredictive(0.0, 1.0)
ys = np.array([-2.5, -1.0, 0.0, 1.0, 2.5])

# %%
# The censored log score keeps the density inside A = (-inf, b] and only the
# probability of the complement outside it. Here b is the empirical 10%
# quantile of some history.
history = np.random.default_rng(0).standard_normal(1000)
cls10 = ScoreSpec.parse("CLS10").resolve(history)
print(f"CLS10 boundary b = {cls10.region.boundary:.3f}")

for label, spec in [("LS", ScoreSpec.parse("LS")), ("CLS10", cls10),
                    ("QS5", ScoreSpec.parse("QS5"))]:
    print(f"{label:>6}", np.round(spec.score(pred, ys), 4))

# %%
# Above the boundary every outcome gets the same CLS10 value, log(1 - F(b)):
# the score does not care where in the body the outcome falls.
print("log(1 - F(b)) =", np.log(1 - pred.cdf(cls10.region.boundary)))

# %%
# The joint VaR/ES score at a single eta. Both indicators switch off once eta
# exceeds ES and y, so the score is zero there.
pair = VarEsPair.from_predictive(pred, 0.05)
print(f"VaR5 = {pair.var:.4f}, ES5 = {pair.es:.4f}")
for eta in (-4.0, -2.0, 0.0, 3.0):
    print(f"eta={eta:+.1f}", np.round(fz_joint_score(pair, ys, 0.05, eta), 4))

# %%
# Propriety in miniature: the average log score over draws from the truth
# is highest for the true sd.
draws = np.random.default_rng(1).standard_normal(200_000)
for sd in (0.8, 0.9, 1.0, 1.1, 1.2):
    print(f"sd={sd:.1f}  mean LS = {np.mean(GaussianPredictive(0.0, sd).logpdf(draws)):.5f}")
