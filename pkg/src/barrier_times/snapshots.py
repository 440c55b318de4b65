"""Binary dump of sampled densities for offline plotting.

Layout (little endian)::

    8 bytes   magic  b"BTSNAP01"
    uint32    N      grid points
    uint32    S      number of snapshots
    float64   x_min, dx, V0, L, m
    float64   times[S]
    float64   density[S, N]   row-major, one row per snapshot

The trailing digits of the magic string are the format version.
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError

MAGIC = b"BTSNAP01"
_HEADER = struct.Struct("<8sII5d")


@dataclass(frozen=True)
class Snapshots:
    x_min: float
    dx: float
    V0: float
    L: float
    m: float
    times: np.ndarray
    density: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.density.shape[1])


def write_snapshots(path, history) -> Path:
    """Write ``history.density`` to ``path`` atomically."""
    path = Path(path)
    g, b = history.grid, history.barrier
    S, N = history.density.shape
    tmp = path.with_name(path.name + ".part")
    try:
        with open(tmp, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, N, S, g.x_min, g.dx, b.V0, b.L, b.m))
            fh.write(np.ascontiguousarray(history.times, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(history.density, dtype="<f8").tobytes())
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()
    return path


def read_snapshots(path) -> Snapshots:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ConfigurationError(f"{path}: file too short for a snapshot header")
    magic, N, S, x_min, dx, V0, L, m = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ConfigurationError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != S * (N + 1):
        raise ConfigurationError(f"{path}: expected {S * (N + 1)} values, found {body.size}")
    return Snapshots(x_min, dx, V0, L, m, body[:S].copy(), body[S:].reshape(S, N).copy())
