"""Builds the seeded run behind tests/data/coverage_golden.csv.

Regenerate with ``python3 tests/golden.py`` after an intentional change.
"""

from pathlib import Path

from scorecal.backtest import BacktestConfig, run_backtest
from scorecal.evaluation import coverage_table
from scorecal.io import emit_report, task_seed
from scorecal.simulation import DgpSpec, simulate

GOLDEN = Path(__file__).parent / "data" / "coverage_golden.csv"


def golden_coverage():
    y = simulate(DgpSpec("student_t_garch", 900, seed=task_seed(0, "golden"), df=5))
    cfg = BacktestConfig(600, 300, reestimation_stride=100,
                         scores_to_calibrate=("LS", "CLS10", "QS2.5", "QS5", "QS10"))
    return coverage_table(run_backtest(cfg, y))


if __name__ == "__main__":
    emit_report(golden_coverage(), GOLDEN)
