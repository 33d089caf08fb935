"""
Data-generating processes for the simulation experiments.

- ``gaussian_garch``: y_t = sigma_t eps_t, sigma_t^2 = 1 + 0.2 y_{t-1}^2 + 0.7 sigma_{t-1}^2
- ``student_t_garch``: same recursion with unit-variance Student-t innovations
- ``skew_normal_sv``: a log-normal stochastic-volatility series z_t mapped
  through its own marginal CDF and the inverse skew-normal CDF, so y_t is
  marginally skew-normal with the requested shape.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import signal, special

from .predictive import norm_cdf, norm_ppf

GAUSSIAN_GARCH = "gaussian_garch"
STUDENT_T_GARCH = "student_t_garch"
SKEW_NORMAL_SV = "skew_normal_sv"
SCENARIOS = (GAUSSIAN_GARCH, STUDENT_T_GARCH, SKEW_NORMAL_SV)

GARCH_ALPHA0 = 1.0
GARCH_ALPHA1 = 0.2
GARCH_BETA1 = 0.7

SV_MEAN = -0.4581
SV_PERSISTENCE = 0.9
SV_VOL_OF_VOL = 0.4172

BURN_IN = 1000
HERMITE_ORDER = 64
ROOT_TOL = 1e-10


@dataclass(frozen=True)
class DgpSpec:
    scenario: str
    length: int
    seed: int = 0
    df: float | None = None
    shape: float | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if int(self.length) < 1:
            raise ValueError("length must be >= 1")
        if self.scenario == STUDENT_T_GARCH and (self.df is None or not self.df > 2):
            raise ValueError("Student-t GARCH needs df > 2")
        if self.scenario == SKEW_NORMAL_SV and (self.shape is None or not np.isfinite(self.shape)):
            raise ValueError("skew-normal SV needs a finite shape")

    @property
    def label(self) -> str:
        if self.scenario == STUDENT_T_GARCH:
            return f"{self.scenario}(df={self.df:g})"
        if self.scenario == SKEW_NORMAL_SV:
            return f"{self.scenario}(shape={self.shape:g})"
        return self.scenario

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SvState:
    h: float
    stationary_mean: float = SV_MEAN
    persistence: float = SV_PERSISTENCE
    vol_of_vol: float = SV_VOL_OF_VOL

    def __post_init__(self):
        if not abs(self.persistence) < 1:
            raise ValueError("log-volatility persistence must satisfy |phi| < 1")

    @property
    def stationary_variance(self) -> float:
        return self.vol_of_vol ** 2 / (1.0 - self.persistence ** 2)


def simulate_garch(innovations, alpha0=GARCH_ALPHA0, alpha1=GARCH_ALPHA1, beta1=GARCH_BETA1):
    """GARCH(1,1) path driven by unit-variance ``innovations``, started at
    the unconditional variance."""
    eps = np.asarray(innovations, dtype=float)
    y = np.empty(eps.size)
    s2 = alpha0 / (1.0 - alpha1 - beta1)
    prev = 0.0
    for t, e in enumerate(eps):
        if t:
            s2 = alpha0 + alpha1 * prev * prev + beta1 * s2
        prev = np.sqrt(s2) * e
        y[t] = prev
    return y


def standardized_t(rng, df, size):
    """Student-t draws scaled by sqrt((df - 2)/df) to unit variance."""
    return np.sqrt((df - 2.0) / df) * rng.standard_t(df, size)


def simulate_sv(rng, size, state: SvState | None = None):
    """Stochastic-volatility draws z_t = exp(h_t/2) eps_t."""
    state = state or SvState(SV_MEAN)
    eta = rng.standard_normal(size)
    eps = rng.standard_normal(size)
    phi = state.persistence
    dev0 = state.h - state.stationary_mean
    dev, _ = signal.lfilter([state.vol_of_vol], [1.0, -phi], eta, zi=[phi * dev0])
    h = state.stationary_mean + dev
    return np.exp(h / 2.0) * eps


def _sv_tails(z):
    """Lower and upper tail probabilities of the stationary SV marginal."""
    z = np.asarray(z, dtype=float)
    nodes, weights = special.roots_hermite(HERMITE_ORDER)
    var_h = SV_VOL_OF_VOL ** 2 / (1.0 - SV_PERSISTENCE ** 2)
    h = SV_MEAN + np.sqrt(2.0 * var_h) * nodes
    w = weights / np.sqrt(np.pi)
    scaled = z[..., None] * np.exp(-h / 2.0)
    lower = norm_cdf(scaled) @ w
    upper = norm_cdf(-scaled) @ w
    return lower, upper


def sv_marginal_cdf(z):
    """Marginal CDF of z_t = exp(h_t/2) eps_t under the stationary law of h_t."""
    return _sv_tails(z)[0]


def skew_normal_cdf(x, shape):
    x = np.asarray(x, dtype=float)
    return norm_cdf(x) - 2.0 * special.owens_t(x, shape)


def skew_normal_sf(x, shape):
    x = np.asarray(x, dtype=float)
    return norm_cdf(-x) + 2.0 * special.owens_t(x, shape)


def skew_normal_pdf(x, shape):
    x = np.asarray(x, dtype=float)
    return 2.0 * np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi) * norm_cdf(shape * x)


def skew_normal_quantile(u, shape, upper_tail=None, tol=ROOT_TOL, max_iter=200):
    """
    Inverse CDF of the standard skew-normal (location 0, scale 1).

    Solved by Newton steps safeguarded by bisection on a bracket. Probabilities
    above 0.5 are matched on the survival function, which keeps precision in
    the upper tail; ``upper_tail`` (= 1 - u, if known more accurately than by
    subtraction) can be supplied for that purpose.
    """
    u = np.asarray(u, dtype=float)
    if upper_tail is None:
        if np.any(~(u > 0.0) | ~(u < 1.0)):
            raise ValueError("u must lie in (0, 1)")
        upper_tail = 1.0 - u
    upper_tail = np.broadcast_to(np.asarray(upper_tail, dtype=float), u.shape)
    if np.any(~(u > 0.0) | ~(upper_tail > 0.0) | (u > 1.0)):
        raise ValueError("u must lie in (0, 1)")
    if shape == 0.0:
        return np.where(u <= 0.5, norm_ppf(u), -norm_ppf(upper_tail))

    use_sf = u > 0.5

    def residual(x):
        # increasing in x in both branches
        return np.where(use_sf, upper_tail - skew_normal_sf(x, shape),
                        skew_normal_cdf(x, shape) - u)

    # the skew-normal lies between N(0,1) and the half-normal in each tail
    start = np.where(use_sf, -norm_ppf(upper_tail), norm_ppf(u))
    lo = np.minimum(start, norm_ppf(np.where(use_sf, 0.5, u / 2.0))) - 1.0
    hi = np.maximum(start, -norm_ppf(np.where(use_sf, upper_tail / 2.0, 0.5))) + 1.0
    x = np.clip(start, lo, hi)
    for _ in range(max_iter):
        r = residual(x)
        lo = np.where(r < 0, x, lo)
        hi = np.where(r > 0, x, hi)
        dens = skew_normal_pdf(x, shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = x - r / dens
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        new = np.where(bad, 0.5 * (lo + hi), step)
        done = np.abs(new - x) < tol
        x = new
        if np.all(done | (hi - lo < tol)):
            break
    return x


def simulate(spec: DgpSpec) -> np.ndarray:
    """Draw ``spec.length`` observations after discarding a burn-in."""
    rng = np.random.default_rng(spec.seed)
    n = int(spec.length) + BURN_IN
    if spec.scenario == GAUSSIAN_GARCH:
        y = simulate_garch(rng.standard_normal(n))
    elif spec.scenario == STUDENT_T_GARCH:
        y = simulate_garch(standardized_t(rng, spec.df, n))
    else:
        state = SvState(SV_MEAN + np.sqrt(SvState(SV_MEAN).stationary_variance)
                        * rng.standard_normal())
        z = simulate_sv(rng, n, state)
        lower, upper = _sv_tails(z)
        tiny = np.finfo(float).tiny
        y = skew_normal_quantile(np.clip(lower, tiny, 1.0), float(spec.shape),
                                 upper_tail=np.clip(upper, tiny, 1.0))
    return y[BURN_IN:]
