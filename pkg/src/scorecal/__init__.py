"""Score-optimal calibration and evaluation of financial risk forecasts."""

from .backtest import BacktestConfig, BacktestResult, ScoreTrack, exceedances, run_backtest
from .calibration import (
    BoundaryWarning,
    CalibrationError,
    CalibrationProblem,
    CalibrationResult,
    calibrate,
    calibrate_score,
    transform_params,
    untransform_params,
)
from .evaluation import (
    christoffersen_cc,
    coverage_table,
    gw_test,
    murphy_diagram,
    score_comparison_table,
)
from .io import ExperimentConfig, emit_report, load_series, task_seed
from .predictive import (
    GarchParams,
    GaussianPredictive,
    HarGarchParams,
    garch_filter,
    gaussian_es,
    gaussian_var,
    har_garch_filter,
    prob_exceed,
)
from .scoring import (
    Region,
    ScoreSpec,
    VarEsPair,
    censored_log_score,
    fz_joint_score,
    log_score,
    quantile_score,
)
from .simulation import DgpSpec, simulate
from .trading import MarketData, StrategySpec, portfolio_stats, run_strategy

__version__ = "0.1.0"
