"""Command-line entry point: ``scorecal <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from . import io
from .backtest import BacktestConfig, ScoreTrack, BacktestResult, level_tag, run_backtest
from .calibration import CalibrationError, calibrate_score
from .evaluation import (
    coverage_table,
    default_murphy_level,
    murphy_from_backtest,
    score_comparison_table,
)
from .experiments import hedging_scores, hedging_strategies
from .scoring import LS
from .simulation import DgpSpec, simulate
from .trading import MarketData

log = logging.getLogger("scorecal")


def _config(args) -> io.ExperimentConfig:
    cfg = io.ExperimentConfig.load(args.config) if args.config else io.ExperimentConfig()
    overrides = {}
    for key in ("model", "initial_window", "holdout", "stride", "seed", "murphy_level",
                "bootstrap_replicates"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    for key in ("scores", "evaluate_scores", "var_levels"):
        value = getattr(args, key, None)
        if value:
            overrides[key] = list(value)
    return replace(cfg, **overrides)


def _backtest_config(cfg: io.ExperimentConfig, n: int) -> BacktestConfig:
    holdout = min(cfg.holdout, n - cfg.initial_window)
    return BacktestConfig(
        initial_window=cfg.initial_window, holdout=holdout, reestimation_stride=cfg.stride,
        scores_to_calibrate=tuple(cfg.scores), var_levels=tuple(cfg.var_levels),
        model=cfg.model,
        scores_to_evaluate=tuple(cfg.evaluate_scores) if cfg.evaluate_scores else None,
    )


def cmd_simulate(args) -> None:
    cfg = _config(args)
    spec = DgpSpec(args.scenario, args.length, seed=cfg.seed, df=args.df, shape=args.shape)
    cfg = replace(cfg, scenario=spec.to_dict())
    digest = cfg.digest()
    y = simulate(spec)
    out = Path(args.out_dir)
    io.write_series(out / "simulated.csv", y, config_hash=digest)
    io.emit_report({"spec": spec.to_dict(), "seed": spec.seed, "config": cfg.to_dict()},
                   out / "simulated.json", "json", digest)


def cmd_returns(args) -> None:
    digest = _config(args).digest()
    prices = io.load_series(args.input)
    r = io.price_returns(prices.values)
    dates = prices.dates[1:] if prices.dates else None
    io.write_series(Path(args.out_dir) / "returns.csv", r, dates, config_hash=digest)


def cmd_calibrate(args) -> None:
    cfg = _config(args)
    data = io.load_series(args.input).values
    digest = cfg.digest()
    out = {}
    for label in cfg.scores:
        res = calibrate_score(data, label, cfg.model)
        out[label] = {"params": dict(zip(_param_names(res.params), res.params.to_array())),
                      "criterion": res.criterion_value, "iterations": res.iterations,
                      "converged": res.converged, "at_boundary": res.at_boundary}
    io.emit_report(out, Path(args.out_dir) / "calibration.json", "json", digest)


def _param_names(params):
    return list(params.__dataclass_fields__)


def cmd_backtest(args) -> None:
    cfg = _config(args)
    series = io.load_series(args.input)
    bt = _backtest_config(cfg, len(series))
    cfg = replace(cfg, holdout=bt.holdout)
    digest = cfg.digest()
    result = run_backtest(bt, series.values, n_jobs=args.threads)
    _write_backtest(result, series, Path(args.out_dir), cfg, digest)


def _write_backtest(result: BacktestResult, series, out: Path, cfg, digest) -> None:
    for label, track in result.tracks.items():
        frame = track.to_frame()
        if series.dates:
            frame.insert(1, "date", [series.dates[i - 1] for i in track.date_index])
        io.emit_report(frame, out / f"backtest_{label}.csv", "csv", digest)
    summary = result.average_scores()
    io.emit_report({"average_scores": {k: row.to_dict() for k, row in summary.iterrows()},
                    "config": cfg.to_dict()}, out / "summary.json", "json", digest)


def _read_backtest(directory: Path, cfg: io.ExperimentConfig) -> BacktestResult:
    tracks = {}
    hashes = set()
    for path in sorted(directory.glob("backtest_*.csv")):
        frame, digest = io.read_report(path)
        hashes.add(digest)
        label = path.stem[len("backtest_"):]
        tracks[label] = ScoreTrack.from_frame(label, frame)
    if not tracks:
        raise FileNotFoundError(f"no backtest_*.csv files in {directory}")
    if len(hashes) > 1:
        raise ValueError(f"backtest files in {directory} come from different configs")
    first = next(iter(tracks.values()))
    levels = tuple(sorted(first.var))
    evals = tuple(first.scores)
    bt = BacktestConfig(initial_window=max(30, int(first.date_index[0]) - 1),
                        holdout=first.date_index.size, scores_to_calibrate=tuple(tracks),
                        var_levels=levels, scores_to_evaluate=evals, model=cfg.model)
    return BacktestResult(bt, tracks)


def cmd_evaluate(args) -> None:
    cfg = _config(args)
    digest = cfg.digest()
    directory = Path(args.backtest_dir)
    result = _read_backtest(directory, cfg)
    out = Path(args.out_dir)
    io.emit_report(coverage_table(result), out / "coverage.csv", "csv", digest)
    if LS in result.tracks:
        io.emit_report(score_comparison_table(result), out / "scores.csv", "csv", digest)
        for label in result.tracks:
            if label == LS:
                continue
            p = default_murphy_level(label, cfg.murphy_level)
            if not any(abs(p - q) < 1e-12 for q in result.config.var_levels):
                log.warning("skipping Murphy diagram for %s: level %g not in backtest", label, p)
                continue
            curve = murphy_from_backtest(result, label, p, n_boot=cfg.bootstrap_replicates,
                                         block=cfg.block_length,
                                         seed=io.task_seed(cfg.seed, "murphy", label))
            io.emit_report(curve.to_frame(), out / f"murphy_{label}_{level_tag(p)}.csv",
                           "csv", digest)


def cmd_trade(args) -> None:
    cfg = _config(args)
    cfg = replace(cfg, model="har_garch")
    vix = io.load_series(args.vix)
    market_frame = pd.read_csv(args.market, comment="#")
    market_frame["date"] = pd.to_datetime(market_frame["date"]).dt.date.astype(str)
    market = MarketData.from_frame(market_frame)
    if vix.dates is None:
        raise ValueError("the VIX file needs a date column")
    n_trade = len(market)
    if list(vix.dates[-n_trade:]) != list(market.dates):
        raise ValueError("market dates must be the final dates of the VIX series")
    log_vix = np.log(vix.values)
    bt = BacktestConfig(initial_window=len(vix) - n_trade, holdout=n_trade,
                        reestimation_stride=cfg.stride,
                        scores_to_calibrate=hedging_scores(cfg.strategies),
                        var_levels=(0.8,), model="har_garch")
    cfg = replace(cfg, initial_window=bt.initial_window, holdout=n_trade,
                  scores=list(bt.scores_to_calibrate))
    digest = cfg.digest()
    result = run_backtest(bt, log_vix, n_jobs=args.threads)
    table = hedging_strategies(result, log_vix, market, cfg.strategies, cfg.hedge_weight,
                               cfg.idle, cfg.periods_per_year)
    out = Path(args.out_dir)
    io.emit_report(table, out / "strategies.csv", "csv", digest)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scorecal", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="ExperimentConfig JSON file")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out-dir", default=".")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate a DGP scenario")
    p.add_argument("--scenario", required=True,
                   choices=["gaussian_garch", "student_t_garch", "skew_normal_sv"])
    p.add_argument("--length", type=int, default=6000)
    p.add_argument("--df", type=float)
    p.add_argument("--shape", type=float)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("returns", parents=[common], help="prices -> 100 log returns")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_returns)

    for name, func, helptext in (("calibrate", cmd_calibrate, "score-optimal parameters"),
                                 ("backtest", cmd_backtest, "expanding-window backtest")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--input", required=True)
        p.add_argument("--model", choices=["garch", "har_garch"])
        p.add_argument("--scores", nargs="+")
        if name == "backtest":
            p.add_argument("--evaluate-scores", dest="evaluate_scores", nargs="+")
            p.add_argument("--var-levels", dest="var_levels", nargs="+", type=float)
            p.add_argument("--initial-window", dest="initial_window", type=int)
            p.add_argument("--holdout", type=int)
            p.add_argument("--stride", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("evaluate", parents=[common], help="coverage, EPA and Murphy outputs")
    p.add_argument("--backtest-dir", required=True)
    p.add_argument("--murphy-level", dest="murphy_level", type=float)
    p.add_argument("--bootstrap-replicates", dest="bootstrap_replicates", type=int)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("trade", parents=[common], help="VIX-futures hedging strategies")
    p.add_argument("--vix", required=True, help="date,value CSV of VIX levels")
    p.add_argument("--market", required=True,
                   help="CSV: date,stock_return,risk_free,vix,futures_open,futures_close")
    p.add_argument("--stride", type=int)
    p.set_defaults(func=cmd_trade)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        args.func(args)
    except (ValueError, KeyError, OSError, CalibrationError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
