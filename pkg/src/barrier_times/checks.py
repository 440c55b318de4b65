"""Invariant suite behind the ``check`` subcommand.

Each check returns a short detail string and raises :class:`CheckFailure`
when the invariant is violated.  Functions are looked up through their
modules at call time so a patched formula is seen by the suite.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import delay_times as dt
from . import scattering as sc
from . import tdse
from .kinematics import BarrierSpec

WL_GRID = (math.pi, 2.0 * math.pi, 4.0 * math.pi, 8.0 * math.pi)
N_GRID = np.linspace(0.0, 1.0, 99)[1:-1]


class CheckFailure(AssertionError):
    pass


def _barriers():
    return [BarrierSpec.from_strength(wL) for wL in WL_GRID]


def check_unitarity() -> str:
    worst = 0.0
    for b in _barriers():
        k = np.sqrt(N_GRID) * b.w
        R, T = sc.reflection_amplitude(b, k), sc.transmission_amplitude(b, k)
        worst = max(worst, float(np.max(np.abs(np.abs(R) ** 2 + np.abs(T) ** 2 - 1.0))))
    if worst > 1e-12:
        raise CheckFailure(f"max | |R|^2 + |T|^2 - 1 | = {worst:.3e}")
    return f"max deviation {worst:.1e}"


def check_unimodularity() -> str:
    worst = 0.0
    for b in _barriers():
        k = np.sqrt(N_GRID) * b.w
        for parity in "+-":
            c = sc.combined_amplitude(b, k, parity)
            worst = max(worst, float(np.max(np.abs(np.abs(c) - 1.0))))
    if worst > 1e-12:
        raise CheckFailure(f"max | |R +- T| - 1 | = {worst:.3e}")
    return f"max deviation {worst:.1e}"


def check_decomposition() -> str:
    worst = 0.0
    for wL in WL_GRID:
        eps = 1.0 - N_GRID
        alpha = wL * np.sqrt(eps)
        for parity in "+-":
            tT = dt.normalized_phase_time_parity(N_GRID, alpha, parity, eps)
            tD = dt.normalized_dwell_time_parity(N_GRID, alpha, parity, eps)
            tI = dt.normalized_self_interference_time(N_GRID, alpha, parity, eps)
            worst = max(worst, float(np.max(np.abs(tT - tD - tI) / np.abs(tT))))
    if worst > 1e-10:
        raise CheckFailure(f"max relative |t_T - t_D - t_I| = {worst:.3e}")
    return f"max relative residual {worst:.1e}"


def check_fermionic_bound() -> str:
    worst = -np.inf
    for wL in WL_GRID:
        t = dt.normalized_times(N_GRID, wL)["tT_minus"]
        worst = max(worst, float(np.max(t)))
    if not worst < 1.0:
        raise CheckFailure(f"antisymmetric phase time reaches {worst:.6f} tau_k")
    return f"max t_T-/tau_k = {worst:.4f}"


def check_hartman() -> str:
    n = 0.5
    values = {}
    for wL in (8.0 * math.pi, 12.0 * math.pi):
        t = dt.normalized_times(n, wL)
        asym = 2.0 / float(t["alpha"])  # 2m/(k rho) in units of tau_k, fixed as L grows
        values[wL] = [float(t[c]) / asym for c in ("tT_std", "tT_plus", "tT_minus")]
    ratios = values[12.0 * math.pi]
    worst = max(abs(r - 1.0) for r in ratios)
    drift = max(abs(a - b) / abs(b) for a, b in zip(values[8.0 * math.pi], values[12.0 * math.pi]))
    if worst > 1e-6:
        raise CheckFailure(f"phase times differ from 2m/(k rho) by {worst:.3e} at wL = 12 pi")
    if drift > 1e-6:
        raise CheckFailure(f"saturated delay changes by {drift:.3e} between wL = 8 pi and 12 pi")
    return f"max deviation from 2m/(k rho) {worst:.1e}"


def gradient_errors(rel_step: float = 1e-3, n_values=None) -> float:
    """Largest relative gap between analytic phase times and central differences."""
    n_values = N_GRID if n_values is None else n_values
    worst = 0.0
    for b in _barriers():
        phases = {
            "std": (sc.standard_phase, dt.phase_time_standard),
            "+": (lambda b_, k_: sc.phi(b_, k_, "+"), lambda b_, k_: dt.phase_time_parity(b_, k_, "+")),
            "-": (lambda b_, k_: sc.phi(b_, k_, "-"), lambda b_, k_: dt.phase_time_parity(b_, k_, "-")),
        }
        for n in n_values:
            k = math.sqrt(n) * b.w
            h = rel_step * min(k, b.w - k)
            for phase_fn, time_fn in phases.values():
                fd = dt.phase_time_fd_oracle(phase_fn, b, k, h)
                an = time_fn(b, k)
                worst = max(worst, abs(fd - an) / abs(an))
    return worst


def check_gradient() -> str:
    worst = gradient_errors(n_values=N_GRID[::4])
    if worst > 1e-6:
        raise CheckFailure(f"analytic vs finite-difference phase times differ by {worst:.3e}")
    return f"max relative gap {worst:.1e}"


def check_parity_preservation() -> str:
    b = BarrierSpec.from_strength(2.0 * math.pi)
    k0 = math.sqrt(0.5) * b.w
    p = tdse.PacketSpec(k0, 0.1 * k0, x0=-(b.L / 2.0 + 8.0 / (0.2 * k0)))
    grid = tdse.auto_grid(b, p, N=1024, samples_per_width=5.0)
    worst = 0.0
    for parity in "+-":
        report, _ = tdse.run_symmetric_collision(b, p, grid, parity)
        if report.norm_drift > 1e-8:
            raise CheckFailure(f"parity {parity}: norm drift {report.norm_drift:.3e}")
        worst = max(worst, report.parity_residual)
    if worst > 1e-8:
        raise CheckFailure(f"parity residual {worst:.3e}")
    return f"max parity residual {worst:.1e}"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    seconds: float
    detail: str


CHECKS: list[tuple[str, Callable[[], str], bool]] = [
    ("unitarity", check_unitarity, False),
    ("unimodularity", check_unimodularity, False),
    ("decomposition identity", check_decomposition, False),
    ("fermionic bound", check_fermionic_bound, False),
    ("Hartman saturation", check_hartman, False),
    ("gradient consistency", check_gradient, False),
    ("parity preservation", check_parity_preservation, True),
]


def run_checks(fast: bool = False) -> list[CheckResult]:
    results = []
    for name, fn, needs_tdse in CHECKS:
        if fast and needs_tdse:
            continue
        start = time.perf_counter()
        try:
            detail, ok = fn(), True
        except Exception as exc:  # any error counts as a failed check
            detail, ok = f"{type(exc).__name__}: {exc}", False
        results.append(CheckResult(name, ok, time.perf_counter() - start, detail))
    return results
