"""
Expanding-window out-of-sample backtests.

For each hold-out date t the model is (re)calibrated on observations before t,
the one-step predictive for y_t is formed, and its VaR/ES at each level and
its realised scores are stored. Each calibrated score is an independent
track; tracks can run in separate processes.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .calibration import (
    MIN_WINDOW,
    CalibrationError,
    CalibrationProblem,
    CalibrationResult,
    calibrate,
    get_model,
)
from .predictive import gaussian_es, gaussian_var
from .scoring import LS, ScoreSpec

log = logging.getLogger(__name__)

DEFAULT_LEVELS = (0.025, 0.05, 0.10)


@dataclass(frozen=True)
class BacktestConfig:
    initial_window: int
    holdout: int
    reestimation_stride: int = 1
    scores_to_calibrate: tuple = (LS,)
    var_levels: tuple = DEFAULT_LEVELS
    model: str = "garch"
    scores_to_evaluate: tuple | None = None

    def __post_init__(self):
        if self.initial_window < MIN_WINDOW:
            raise ValueError(f"initial_window must be >= {MIN_WINDOW}")
        if self.holdout < 1 or self.reestimation_stride < 1:
            raise ValueError("holdout and reestimation_stride must be >= 1")
        if not self.scores_to_calibrate:
            raise ValueError("at least one score must be calibrated")
        if any(not 0.0 < p < 1.0 for p in self.var_levels):
            raise ValueError("var_levels must lie in (0, 1)")
        get_model(self.model)
        # canonical labels, validated
        object.__setattr__(self, "scores_to_calibrate",
                           tuple(_spec(s).label for s in self.scores_to_calibrate))
        evals = self.scores_to_evaluate or self.scores_to_calibrate
        object.__setattr__(self, "scores_to_evaluate", tuple(_spec(s).label for s in evals))
        object.__setattr__(self, "var_levels", tuple(float(p) for p in self.var_levels))

    @property
    def calibration_specs(self):
        return [ScoreSpec.parse(s) for s in self.scores_to_calibrate]

    @property
    def evaluation_specs(self):
        return [ScoreSpec.parse(s) for s in self.scores_to_evaluate]


def _spec(score) -> ScoreSpec:
    return score if isinstance(score, ScoreSpec) else ScoreSpec.parse(score)


@dataclass
class ScoreTrack:
    """Out-of-sample forecasts of the predictive calibrated to one score."""

    label: str
    date_index: np.ndarray
    realized: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    var: dict
    es: dict
    scores: dict
    params: list = field(repr=False)
    recalibrated: np.ndarray = field(repr=False)
    converged: np.ndarray = field(repr=False)
    failed: np.ndarray = field(repr=False)

    def to_frame(self) -> pd.DataFrame:
        cols = {"date_index": self.date_index, "realized": self.realized,
                "mean": self.mean, "sd": self.sd}
        for p in sorted(self.var):
            cols[f"var_{level_tag(p)}"] = self.var[p]
            cols[f"es_{level_tag(p)}"] = self.es[p]
        for label, values in self.scores.items():
            cols[f"score_{label}"] = values
        cols["recalibrated"] = self.recalibrated.astype(int)
        cols["converged"] = self.converged.astype(int)
        cols["failed"] = self.failed.astype(int)
        return pd.DataFrame(cols)

    @classmethod
    def from_frame(cls, label: str, frame: pd.DataFrame) -> "ScoreTrack":
        var, es, scores = {}, {}, {}
        for col in frame.columns:
            if col.startswith("var_"):
                var[parse_level_tag(col[4:])] = frame[col].to_numpy(float)
            elif col.startswith("es_"):
                es[parse_level_tag(col[3:])] = frame[col].to_numpy(float)
            elif col.startswith("score_"):
                scores[col[6:]] = frame[col].to_numpy(float)
        n = len(frame)

        def flags(name, default):
            if name in frame:
                return frame[name].to_numpy().astype(bool)
            return np.full(n, default)

        return cls(label, frame["date_index"].to_numpy(int), frame["realized"].to_numpy(float),
                   frame["mean"].to_numpy(float), frame["sd"].to_numpy(float), var, es, scores,
                   [], flags("recalibrated", False), flags("converged", True),
                   flags("failed", False))


def level_tag(p: float) -> str:
    return f"{100.0 * p:g}"


def parse_level_tag(tag: str) -> float:
    return float(tag) / 100.0


@dataclass(frozen=True)
class BacktestRecord:
    """All forecasts for one hold-out date, keyed by calibrated score."""

    date_index: int
    realized: float
    forecasts: dict


@dataclass(frozen=True)
class ExceedanceSeries:
    level: float
    hits: np.ndarray

    @property
    def rate(self) -> float:
        return float(np.mean(self.hits))


@dataclass
class BacktestResult:
    config: BacktestConfig
    tracks: dict

    def __getitem__(self, label) -> ScoreTrack:
        return self.tracks[_spec(label).label]

    def records(self) -> list:
        first = next(iter(self.tracks.values()))
        out = []
        for k, t in enumerate(first.date_index):
            forecasts = {}
            for label, tr in self.tracks.items():
                forecasts[label] = {
                    "mean": float(tr.mean[k]),
                    "sd": float(tr.sd[k]),
                    "var": {p: float(v[k]) for p, v in tr.var.items()},
                    "es": {p: float(v[k]) for p, v in tr.es.items()},
                    "scores": {s: float(v[k]) for s, v in tr.scores.items()},
                }
            out.append(BacktestRecord(int(t), float(first.realized[k]), forecasts))
        return out

    def average_scores(self) -> pd.DataFrame:
        """Mean out-of-sample score: rows are calibrated scores, columns are
        evaluation scores."""
        rows = {label: {s: float(np.mean(v)) for s, v in tr.scores.items()}
                for label, tr in self.tracks.items()}
        return pd.DataFrame.from_dict(rows, orient="index")


def _calibrate_window(model_name, spec, window, start):
    try:
        return calibrate(CalibrationProblem(model_name, spec, window, start))
    except (CalibrationError, ValueError) as exc:
        log.warning("%s calibration failed on a %d-observation window: %s",
                    spec.label, window.size, exc)
        return None


def _run_track(series, config: BacktestConfig, label: str, first: CalibrationResult | None):
    spec = ScoreSpec.parse(label)
    model = get_model(config.model)
    evals = config.evaluation_specs
    n = series.size
    start_idx = n - config.holdout
    h = config.holdout
    mean, sd, realized = np.empty(h), np.empty(h), np.empty(h)
    var = {p: np.empty(h) for p in config.var_levels}
    es = {p: np.empty(h) for p in config.var_levels}
    scores = {e.label: np.empty(h) for e in evals}
    recal = np.zeros(h, bool)
    conv = np.ones(h, bool)
    failed = np.zeros(h, bool)
    params_hist = []

    params = None
    for k in range(h):
        i = start_idx + k
        window = series[:i]
        if k % config.reestimation_stride == 0:
            recal[k] = True
            if k == 0 and first is not None and spec.label == LS:
                result = first
            else:
                init = params if params is not None else (first.params if first else None)
                result = _calibrate_window(config.model, spec, window, init)
            if result is None:
                failed[k] = True
                if params is None:
                    params = model.default_params(window)
            else:
                params = result.params
                conv[k] = result.converged
        params_hist.append(params)

        pred = model.forecast(params, window)
        y = series[i]
        realized[k] = y
        mean[k], sd[k] = pred.mean, pred.sd
        for p in config.var_levels:
            var[p][k] = gaussian_var(pred, p)
            es[p][k] = gaussian_es(pred, p)
        for e in evals:
            scores[e.label][k] = e.resolve(window).score(pred, y, boundary=window[-1])

    return ScoreTrack(label, np.arange(start_idx, n) + 1, realized, mean, sd, var, es,
                      scores, params_hist, recal, conv, failed)


def run_backtest(config: BacktestConfig, series, n_jobs: int = 1) -> BacktestResult:
    """
    Expanding-window backtest of every score in ``config.scores_to_calibrate``.

    Hold-out dates are the last ``config.holdout`` observations; date indices
    in the result are 1-based positions in ``series``. The window for date t
    is y_1..y_{t-1}. Calibration re-runs every ``reestimation_stride`` dates,
    warm-started from the previous solution; the first calibration of every
    non-LS score starts from the LS solution on the first window.
    """
    series = np.asarray(series, dtype=float)
    if series.ndim != 1 or not np.all(np.isfinite(series)):
        raise ValueError("series must be a finite one-dimensional sequence")
    if series.size < config.initial_window + config.holdout:
        raise ValueError(
            f"series of length {series.size} is shorter than initial_window + holdout "
            f"= {config.initial_window + config.holdout}"
        )
    first_window = series[: series.size - config.holdout]
    first = _calibrate_window(config.model, ScoreSpec(LS), first_window, None)

    labels = config.scores_to_calibrate
    if n_jobs > 1 and len(labels) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            futures = [pool.submit(_run_track, series, config, label, first) for label in labels]
            tracks = [f.result() for f in futures]
    else:
        tracks = [_run_track(series, config, label, first) for label in labels]
    return BacktestResult(config, {t.label: t for t in tracks})


def exceedances(result: BacktestResult, score, level: float) -> ExceedanceSeries:
    """Hits where the realisation is at or below the VaR forecast."""
    label = _spec(score).label
    if label not in result.tracks:
        raise KeyError(f"score {label} was not calibrated in this backtest")
    track = result.tracks[label]
    match = [p for p in track.var if np.isclose(p, level, rtol=0, atol=1e-12)]
    if not match:
        raise KeyError(f"VaR level {level} not in backtest levels {sorted(track.var)}")
    hits = (track.realized <= track.var[match[0]]).astype(int)
    return ExceedanceSeries(float(level), hits)
