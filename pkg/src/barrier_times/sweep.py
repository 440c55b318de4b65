"""Parameter sweeps of the delay times over ``n`` at fixed opacity ``wL``.

Absolute times are reported in natural units with ``w = m = 1`` (so
``L = wL`` and ``k = sqrt(n)``); with ``normalize`` every time column is
divided by ``tau_k`` while the ``tau_k`` column keeps its absolute value.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import delay_times as dt
from .errors import ConfigurationError

CSV_SCHEMA_VERSION = 1
COLUMNS = (
    "n", "alpha", "tau_k",
    "tT_std", "tT_plus", "tT_minus",
    "tD_plus", "tD_minus",
    "tI_plus", "tI_minus",
)
TIME_COLUMNS = COLUMNS[3:]
THREADS_ENV = "BARRIER_TIMES_THREADS"


@dataclass(frozen=True)
class SweepConfig:
    wL: float = 4.0 * math.pi
    n_min: float = 0.05
    n_max: float = 0.95
    n_steps: int = 181
    normalize: bool = False

    def __post_init__(self):
        for name in ("wL", "n_min", "n_max"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        if not self.wL > 0:
            raise ConfigurationError(f"wL must be positive, got {self.wL}")
        if not 0 < self.n_min < self.n_max < 1:
            raise ConfigurationError(
                f"need 0 < n_min < n_max < 1, got n_min={self.n_min}, n_max={self.n_max}"
            )
        if self.n_steps < 2:
            raise ConfigurationError(f"n_steps must be at least 2, got {self.n_steps}")

    @property
    def n_values(self) -> np.ndarray:
        return np.linspace(self.n_min, self.n_max, self.n_steps)


def worker_count(default: Optional[int] = None) -> int:
    cap = os.environ.get(THREADS_ENV)
    n = default or min(8, os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return n


def _block(wL: float, n: np.ndarray, normalize: bool) -> np.ndarray:
    times = dt.normalized_times(n, wL)
    tau = wL / np.sqrt(n)
    scale = 1.0 if normalize else tau
    cols = [times["n"], times["alpha"], tau]
    cols += [times[c] * scale for c in TIME_COLUMNS]
    return np.column_stack(cols)


def sweep_table(config: SweepConfig, workers: Optional[int] = None) -> np.ndarray:
    """Rows in ``COLUMNS`` order, computed in chunks by a thread pool.

    Every row depends only on its own ``n``, so the result is identical for
    any worker count.
    """
    n = config.n_values
    workers = worker_count(workers)
    chunks = np.array_split(n, min(workers, n.size))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        blocks = list(pool.map(lambda c: _block(config.wL, c, config.normalize), chunks))
    return np.vstack(blocks)


def format_csv(table: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in table:
        writer.writerow([f"{v:.15g}" for v in row])
    return buf.getvalue()


def write_csv(text: str, out) -> Path:
    """Write ``text`` to ``out`` via a temporary file, so a failure leaves nothing behind."""
    out = Path(out)
    tmp = out.with_name(out.name + ".part")
    try:
        tmp.write_text(text)
        os.replace(tmp, out)
    finally:
        if tmp.exists():
            tmp.unlink()
    return out
