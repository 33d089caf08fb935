"""
File formats and run configuration.

Series files are CSV with ``date,value`` columns (ISO-8601 dates) or a single
``value`` column. Reports are written deterministically: fixed column order,
floats with 17 significant digits and the SHA-256 of the run configuration
in a leading ``#`` comment line (CSV) or a top-level key (JSON).
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
import math
import zlib
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import pandas as pd

HASH_KEY = "config_sha256"


class SeriesFileError(ValueError):
    def __init__(self, path, line, message):
        self.path, self.line = str(path), line
        where = f"{path}:{line}" if line else str(path)
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class SeriesFile:
    path: str
    dates: tuple | None
    values: np.ndarray

    def __len__(self) -> int:
        return self.values.size


def _is_header(row) -> bool:
    try:
        float(row[-1])
    except ValueError:
        return True
    return False


def load_series(path) -> SeriesFile:
    """
    Read a ``date,value`` (or ``value``) CSV.

    Rows are sorted by date. Lines starting with ``#`` and a header row are
    skipped.

    Raises
    ------
    SeriesFileError
        For an empty file, malformed rows, unparsable or duplicate dates, and
        non-finite values; the message names the offending line.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SeriesFileError(path, None, f"cannot read file ({exc})") from exc
    rows = []
    width = None
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        row = [c.strip() for c in row]
        if width is None and _is_header(row):
            width = len(row)
            continue
        if width is None:
            width = len(row)
        if len(row) != width or width not in (1, 2):
            raise SeriesFileError(path, lineno, f"expected {width} columns, got {len(row)}")
        try:
            value = float(row[-1])
        except ValueError:
            raise SeriesFileError(path, lineno, f"non-numeric value {row[-1]!r}") from None
        if not math.isfinite(value):
            raise SeriesFileError(path, lineno, f"non-finite value {row[-1]!r}")
        date = None
        if width == 2:
            try:
                date = dt.date.fromisoformat(row[0])
            except ValueError:
                raise SeriesFileError(path, lineno, f"bad ISO-8601 date {row[0]!r}") from None
        rows.append((lineno, date, value))
    if not rows:
        raise SeriesFileError(path, None, "no observations")

    if width == 2:
        rows.sort(key=lambda r: r[1])
        for (_, d0, _), (lineno, d1, _) in zip(rows, rows[1:]):
            if d1 == d0:
                raise SeriesFileError(path, lineno, f"duplicate date {d1.isoformat()}")
        dates = tuple(r[1].isoformat() for r in rows)
    else:
        dates = None
    return SeriesFile(str(path), dates, np.array([r[2] for r in rows]))


def write_series(path, values, dates=None, config_hash: str | None = None) -> Path:
    frame = pd.DataFrame({"value": np.asarray(values, dtype=float)})
    if dates is not None:
        frame.insert(0, "date", list(dates))
    return emit_report(frame, path, "csv", config_hash)


def price_returns(prices) -> np.ndarray:
    """Continuously compounded percentage returns 100 log(P_t / P_{t-1})."""
    p = np.asarray(prices, dtype=float)
    if np.any(p <= 0):
        raise ValueError("prices must be positive")
    return 100.0 * np.diff(np.log(p))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return "nan" if math.isnan(v) else format(v, ".17g")
    return str(value)


def _json_text(obj, indent=0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_text(obj[k], indent + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        return "[\n" + ",\n".join(pad + _json_text(v, indent + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return "null" if not math.isfinite(v) else format(v, ".17g")
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def emit_report(results, path, fmt: str = "csv", config_hash: str | None = None) -> Path:
    """
    Write ``results`` (a DataFrame for CSV; any JSON-like mapping for JSON).

    Output is byte-identical for identical inputs.
    """
    path = Path(path)
    if fmt == "csv":
        if not isinstance(results, pd.DataFrame):
            results = pd.DataFrame(results)
        lines = []
        if config_hash:
            lines.append(f"# {HASH_KEY}={config_hash}")
        lines.append(",".join(str(c) for c in results.columns))
        for row in results.itertuples(index=False, name=None):
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = dict(results) if isinstance(results, dict) else {"results": results}
        if config_hash:
            payload[HASH_KEY] = config_hash
        text = _json_text(payload) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def read_report(path) -> tuple[pd.DataFrame, str | None]:
    """Read a CSV written by ``emit_report``; returns the frame and its hash."""
    path = Path(path)
    first = path.read_text().split("\n", 1)[0]
    config_hash = None
    if first.startswith(f"# {HASH_KEY}="):
        config_hash = first.split("=", 1)[1].strip()
    return pd.read_csv(path, comment="#"), config_hash


def task_seed(root: int, *keys) -> int:
    """Deterministic per-task seed derived from a root seed and task keys."""
    words = [int(root)] + [zlib.crc32(str(k).encode()) for k in keys]
    return int(np.random.SeedSequence(words).generate_state(1)[0])


@dataclass
class ExperimentConfig:
    """Complete description of a run; serialised alongside every output."""

    model: str = "garch"
    scores: list = field(default_factory=lambda: ["LS", "CLS10", "QS2.5", "QS5", "QS10"])
    evaluate_scores: list | None = None
    var_levels: list = field(default_factory=lambda: [0.025, 0.05, 0.10])
    initial_window: int = 1000
    holdout: int = 5000
    stride: int = 1
    seed: int = 0
    scenario: dict | None = None
    bootstrap_replicates: int = 1000
    block_length: int | None = None
    eta_grid_size: int = 201
    murphy_level: float = 0.10
    strategies: list = field(default_factory=lambda: [
        {"rule": "static"},
        {"rule": "probability", "score": "CLS_ABOVE_LAG"},
        {"rule": "probability", "score": "LS"},
        {"rule": "percentile", "score": "CLS80"},
        {"rule": "percentile", "score": "LS"},
    ])
    hedge_weight: float = 0.05
    idle: str = "cash"
    periods_per_year: int = 252

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json(Path(path).read_text())

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()
