"""Independent reference computations used by the tests.

Nothing here calls into scorecal; normal probabilities come from numerical
integration of the density written out by hand.
"""

import math

import numpy as np
from scipy import integrate, optimize

SQRT_2PI = math.sqrt(2.0 * math.pi)


def phi(x):
    return math.exp(-0.5 * x * x) / SQRT_2PI


def cdf_quad(x, mean=0.0, sd=1.0):
    z = (x - mean) / sd
    if z <= 0:
        val, _ = integrate.quad(phi, -np.inf, z, epsabs=1e-14, epsrel=1e-13)
        return val
    val, _ = integrate.quad(phi, z, np.inf, epsabs=1e-14, epsrel=1e-13)
    return 1.0 - val


def tail_quad(x, mean=0.0, sd=1.0):
    """Upper tail mass Pr(Y > x) without cancellation."""
    z = (x - mean) / sd
    val, _ = integrate.quad(phi, z, np.inf, epsabs=1e-15, epsrel=1e-13)
    return val


def quantile_bisect(p, mean=0.0, sd=1.0):
    z = optimize.brentq(lambda t: cdf_quad(t) - p, -40.0, 40.0, xtol=1e-14, rtol=1e-15)
    return mean + sd * z


def es_integral(p, mean=0.0, sd=1.0):
    """(1/p) * integral over a in (0, p] of VaR_a, via the substitution a = Phi(z)."""
    zp = quantile_bisect(p)
    val, _ = integrate.quad(lambda z: z * phi(z), -np.inf, zp, epsabs=1e-14, epsrel=1e-13)
    return mean + sd * val / p


def log_density(y, mean, sd):
    return math.log(phi((y - mean) / sd) / sd)


def fz_by_hand(p, var, es, y, eta):
    """Fissler-Ziegel elementary score evaluated one term at a time."""
    first = 0.0
    if eta <= es:
        hit = 1.0 if y <= var else 0.0
        first = hit * (var - y) / p - (var - eta)
    second = (y - eta) if eta <= y else 0.0
    return -first - second


def garch_variances_loop(y, mu, a0, a1, b1, s0):
    out = [s0]
    for v in y:
        out.append(a0 + a1 * (v - mu) ** 2 + b1 * out[-1])
    return np.array(out)


def har_garch_loop(x, b0, b1, b2, b3, a0, a1, a2, s0=None):
    """Spreadsheet-style HAR-GARCH recomputation, one row per date.

    Returns means and variances for targets x_24..x_{n+1} (1-based).
    """
    x = list(map(float, x))
    n = len(x)
    means = {}
    for t in range(22, n + 1):  # 1-based origin t, predicting x_{t+1}
        week = sum(x[t - 5:t]) / 5.0
        month = sum(x[t - 22:t]) / 22.0
        means[t + 1] = b0 + b1 * x[t - 1] + b2 * week + b3 * month
    resid = {s: x[s - 1] - means[s] for s in range(23, n + 1)}
    if s0 is None:
        r = list(resid.values())
        m = sum(r) / len(r)
        s0 = sum((v - m) ** 2 for v in r) / len(r)
    var = {23: s0}
    for s in range(24, n + 2):
        var[s] = a0 + a1 * resid[s - 1] ** 2 + a2 * var[s - 1]
    targets = range(24, n + 2)
    return np.array([means[s] for s in targets]), np.array([var[s] for s in targets])


def garch_mle(y, start=None):
    """Gaussian GARCH(1,1) MLE with a loop likelihood, an analytic gradient
    and L-BFGS-B on the raw parameters (sigma^2_1 = sample variance,
    targets y_2..y_n). Returns (mu, alpha0, alpha1, beta1)."""
    y = [float(v) for v in y]
    n = len(y)
    s0 = float(np.var(y))

    def nll(theta):
        mu, a0, a1, b1 = (float(v) for v in theta)
        s = s0
        ds = [0.0, 0.0, 0.0, 0.0]
        total = 0.0
        g = [0.0, 0.0, 0.0, 0.0]
        for t in range(1, n):
            e_prev = y[t - 1] - mu
            ds = [-2.0 * a1 * e_prev + b1 * ds[0], 1.0 + b1 * ds[1],
                  e_prev * e_prev + b1 * ds[2], s + b1 * ds[3]]
            s = a0 + a1 * e_prev * e_prev + b1 * s
            e = y[t] - mu
            total += 0.5 * (math.log(2.0 * math.pi * s) + e * e / s)
            w = 0.5 * (1.0 / s - e * e / (s * s))
            g[0] += w * ds[0] - e / s
            g[1] += w * ds[1]
            g[2] += w * ds[2]
            g[3] += w * ds[3]
        m = n - 1
        return total / m, np.array(g) / m

    if start is None:
        start = [float(np.mean(y)), 0.1 * s0, 0.1, 0.8]
    cons = optimize.LinearConstraint([[0, 0, 1, 1]], -np.inf, 0.9999)
    res = optimize.minimize(nll, start, jac=True, method="trust-constr", constraints=[cons],
                            bounds=[(-np.inf, np.inf), (1e-8, np.inf), (0, 1), (0, 1)],
                            options={"gtol": 1e-11, "xtol": 1e-12, "maxiter": 500})
    return res.x


def hit_recount(realized, var):
    return sum(1 for r, v in zip(realized, var) if r <= v)


def two_pass_stats(r, rf, periods=252):
    ex = [a - b for a, b in zip(r, rf)]
    n = len(ex)
    m = sum(ex) / n
    ss = sum((e - m) ** 2 for e in ex)
    sd = math.sqrt(ss / (n - 1))
    return m * periods, sd * math.sqrt(periods)
