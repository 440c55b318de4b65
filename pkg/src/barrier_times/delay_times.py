"""Closed-form tunneling times and their numerical cross-checks.

Times come in two flavours: absolute (natural units, functions taking a
:class:`BarrierSpec` and a momentum) and normalized by the classical
traversal time ``tau_k = m L / k`` (vectorized functions of ``n = k^2/w^2``
and ``alpha = rho L``).

The normalized expressions are rearranged so they stay accurate over the
whole tunneling regime: the ``n -> 1`` end (``alpha -> 0``) would otherwise
lose every digit to cancellation in ``n alpha - sinh(alpha)``, and the opaque
end overflows ``sinh``.  ``1 - n`` is carried separately as ``eps``.

For the antisymmetrized (fermionic) configuration the phase time uses the
numerator ``n alpha - sinh(alpha)``; the variant with ``sinh(alpha) - n alpha``
is negative everywhere in the regime and disagrees with ``(m/k) d(phi_-)/dk``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import DomainError
from .kinematics import BarrierSpec, kinematics
from .scattering import Config, parity_sign, phi, stationary_field

__all__ = [
    "DelayTimes",
    "normalized_phase_time_standard",
    "normalized_phase_time_parity",
    "normalized_dwell_time_parity",
    "normalized_self_interference_time",
    "normalized_times",
    "phase_time_standard",
    "phase_time_standard_direct",
    "phase_time_parity",
    "dwell_time_parity",
    "self_interference_time",
    "self_interference_from_phase",
    "classical_traversal",
    "dwell_time_numeric",
    "phase_time_fd_oracle",
    "delay_times",
    "transmission_dominant",
    "bosonic_acceleration",
]

_SERIES_CUTOFF = 0.5


def _sinh_excess(x):
    """``sinh(x) - x`` without cancellation for small ``x``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_CUTOFF
    xs = np.where(small, x, 0.0)
    x2 = xs * xs
    term = xs * x2 / 6.0
    series = term.copy()
    for j in range(2, 10):
        term = term * x2 / ((2 * j) * (2 * j + 1))
        series = series + term
    with np.errstate(over="ignore"):
        direct = np.sinh(x) - x
    return np.where(small, series, direct)


def _with_eps(n, alpha, eps=None):
    """Validate and precompute the hyperbolic pieces shared by every formula.

    ``eps`` overrides ``1 - n`` when the caller has it to better precision.
    """
    n = np.asarray(n, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    eps = 1.0 - n if eps is None else np.asarray(eps, dtype=float)
    if np.any(n <= 0) or np.any(eps <= 0) or np.any(n > 1):
        raise DomainError("n", "must lie strictly between 0 and 1")
    if np.any(alpha <= 0):
        raise DomainError("alpha", "must be positive")
    # 1/sinh and the two hyperbolic ratios are bounded for every alpha > 0
    inv_s = 2.0 * np.exp(-alpha) / -np.expm1(-2.0 * alpha)
    coth = 1.0 / np.tanh(alpha)
    tanh_half = np.tanh(alpha / 2.0)
    return n, alpha, eps, inv_s, coth, tanh_half


def _out(value):
    return value[()] if isinstance(value, np.ndarray) and value.ndim == 0 else value


def normalized_phase_time_standard(n, alpha, eps=None):
    """One-way phase time over ``tau_k``.

    ``(2/alpha) [cosh sinh - alpha n (2n - 1)] / [4 n (1 - n) + sinh^2]``
    """
    n, alpha, eps, inv_s, coth, _ = _with_eps(n, alpha, eps)
    # small alpha: cosh*sinh - alpha*n*(2n-1) = (sinh(2a) - 2a)/2 + alpha*eps*(3 - 2 eps)
    excess = 0.5 * _sinh_excess(np.minimum(alpha, 1.0) * 2.0)
    num_small = (excess + alpha * eps * (3.0 - 2.0 * eps)) * inv_s ** 2
    num_large = coth - alpha * n * (2.0 * n - 1.0) * inv_s ** 2
    num = np.where(alpha < 1.0, num_small, num_large)
    den = 4.0 * n * eps * inv_s ** 2 + 1.0
    return _out(2.0 / alpha * num / den)


def normalized_phase_time_parity(n, alpha, parity, eps=None):
    """Phase time of the symmetrized (``"+"``) or antisymmetrized (``"-"``) wave.

    ``(2/alpha) (n alpha pm sinh) / (2n - 1 pm cosh)``
    """
    s = parity_sign(parity)
    n, alpha, eps, inv_s, coth, tanh_half = _with_eps(n, alpha, eps)
    if s > 0:
        t = (n * alpha * inv_s + 1.0) / ((2.0 * n - 1.0) * inv_s + coth)
    else:
        # numerator and denominator both flipped to positive quantities
        t = (eps * alpha + _sinh_excess(alpha)) * inv_s / (2.0 * eps * inv_s + tanh_half)
    return _out(2.0 / alpha * t)


def normalized_dwell_time_parity(n, alpha, parity, eps=None):
    """``(2 n / alpha) (alpha pm sinh) / (2n - 1 pm cosh)``."""
    s = parity_sign(parity)
    n, alpha, eps, inv_s, coth, tanh_half = _with_eps(n, alpha, eps)
    if s > 0:
        t = (alpha * inv_s + 1.0) / ((2.0 * n - 1.0) * inv_s + coth)
    else:
        t = _sinh_excess(alpha) * inv_s / (2.0 * eps * inv_s + tanh_half)
    return _out(2.0 * n / alpha * t)


def normalized_self_interference_time(n, alpha, parity, eps=None):
    """``pm (2/alpha) (1 - n) sinh / (2n - 1 pm cosh)``; positive for both parities."""
    s = parity_sign(parity)
    n, alpha, eps, inv_s, coth, tanh_half = _with_eps(n, alpha, eps)
    if s > 0:
        t = eps / ((2.0 * n - 1.0) * inv_s + coth)
    else:
        t = eps / (2.0 * eps * inv_s + tanh_half)
    return _out(2.0 / alpha * t)


def normalized_times(n, wL) -> dict:
    """All normalized times on a grid of ``n`` at fixed opacity ``wL``."""
    n = np.asarray(n, dtype=float)
    eps = 1.0 - n
    alpha = wL * np.sqrt(eps)
    return {
        "n": n,
        "alpha": alpha,
        "tT_std": normalized_phase_time_standard(n, alpha, eps),
        "tT_plus": normalized_phase_time_parity(n, alpha, "+", eps),
        "tT_minus": normalized_phase_time_parity(n, alpha, "-", eps),
        "tD_plus": normalized_dwell_time_parity(n, alpha, "+", eps),
        "tD_minus": normalized_dwell_time_parity(n, alpha, "-", eps),
        "tI_plus": normalized_self_interference_time(n, alpha, "+", eps),
        "tI_minus": normalized_self_interference_time(n, alpha, "-", eps),
    }


def _kin(b: BarrierSpec, k0: float):
    kin = kinematics(b, k0)
    if b.L <= 0:
        raise DomainError("L", "delay times need a barrier of positive width")
    return kin


def phase_time_standard(b: BarrierSpec, k0: float) -> float:
    """Group delay ``(m/k0) dTheta/dk`` of the one-way transmitted packet."""
    kin = _kin(b, k0)
    return kin.tau_k * float(normalized_phase_time_standard(kin.n, kin.alpha, kin.epsilon))


def phase_time_standard_direct(b: BarrierSpec, k0: float) -> float:
    """The same group delay evaluated term by term in absolute units.

    ``(2 m L / (k alpha)) [w^4 sinh cosh - (2k^2 - w^2) k^2 alpha]
    / [4 k^2 (w^2 - k^2) + w^4 sinh^2]``; no cancellation guard.
    """
    kin = _kin(b, k0)
    k, a, w = kin.k, kin.alpha, b.w
    sh, ch = np.sinh(a), np.cosh(a)
    num = w ** 4 * sh * ch - (2 * k * k - w * w) * k * k * a
    den = 4 * k * k * kin.rho ** 2 + w ** 4 * sh * sh
    return float(2.0 * b.m * b.L / (k * a) * num / den)


def phase_time_parity(b: BarrierSpec, k0: float, parity: str) -> float:
    kin = _kin(b, k0)
    return kin.tau_k * float(
        normalized_phase_time_parity(kin.n, kin.alpha, parity, kin.epsilon)
    )


def dwell_time_parity(b: BarrierSpec, k0: float, parity: str) -> float:
    kin = _kin(b, k0)
    return kin.tau_k * float(
        normalized_dwell_time_parity(kin.n, kin.alpha, parity, kin.epsilon)
    )


def self_interference_time(b: BarrierSpec, k0: float, parity: str) -> float:
    kin = _kin(b, k0)
    return kin.tau_k * float(
        normalized_self_interference_time(kin.n, kin.alpha, parity, kin.epsilon)
    )


def self_interference_from_phase(b: BarrierSpec, k0: float, parity: str) -> float:
    """``-Im[exp(i phi_pm)] (m / k0^2)``, the phase-based form of the same delay.

    With ``phi_pm = arg[(R pm T) exp(ikL)]`` the sine is negative in the
    regime, so the leading minus sign is what makes the delay positive.
    """
    return -b.m * float(np.sin(phi(b, k0, parity))) / k0 ** 2


def classical_traversal(b: BarrierSpec, k0: float) -> float:
    """Free-flight time ``m L / k0`` across the barrier length."""
    if not k0 > 0:
        raise DomainError("k0", f"must be positive, got {k0}")
    return b.m * b.L / k0


def _gauss_legendre(f, a: float, b: float, panels: int, order: int = 16) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    wts = (half[:, None] * weights[None, :]).ravel()
    return float(np.dot(wts, f(x)))


def dwell_time_numeric(
    b: BarrierSpec, k0: float, config: Config, panels: int = 32, order: int = 16
) -> float:
    """``(m/k) * integral of |phi_2|^2`` over the barrier, by composite Gauss-Legendre.

    ``config`` selects a single side of incidence (``"L"``/``"R"``) or a
    parity superposition (``"+"``/``"-"``, normalized by ``1/sqrt(2)``).
    """
    if b.L <= 0:
        raise DomainError("L", "dwell integral needs a barrier of positive width")
    kin = kinematics(b, k0)

    def density(x):
        return np.abs(stationary_field(b, k0, config, x)) ** 2

    integral = _gauss_legendre(density, -b.L / 2.0, b.L / 2.0, panels, order)
    return b.m / kin.k * integral


def phase_time_fd_oracle(
    phase_fn: Callable[[BarrierSpec, float], float], b: BarrierSpec, k0: float, h: float
) -> float:
    """``(m/k0) * [phase(k0 + h) - phase(k0 - h)] / (2h)`` with the jump unwrapped."""
    if not h > 0:
        raise DomainError("h", f"must be positive, got {h}")
    if k0 - h <= 0 or (b.w > 0 and k0 + h >= b.w):
        raise DomainError("h", "difference stencil leaves the tunneling regime")
    step = float(phase_fn(b, k0 + h)) - float(phase_fn(b, k0 - h))
    step = (step + np.pi) % (2.0 * np.pi) - np.pi
    return b.m / k0 * step / (2.0 * h)


@dataclass(frozen=True)
class DelayTimes:
    t_T_std: float
    t_T_plus: float
    t_T_minus: float
    t_D_plus: float
    t_D_minus: float
    t_I_plus: float
    t_I_minus: float
    tau_k: float
    normalized: bool = False

    def in_units_of_tau(self) -> "DelayTimes":
        """View with every time divided by ``tau_k``."""
        if self.normalized:
            return self
        scale = 1.0 / self.tau_k
        return replace(
            self,
            t_T_std=self.t_T_std * scale,
            t_T_plus=self.t_T_plus * scale,
            t_T_minus=self.t_T_minus * scale,
            t_D_plus=self.t_D_plus * scale,
            t_D_minus=self.t_D_minus * scale,
            t_I_plus=self.t_I_plus * scale,
            t_I_minus=self.t_I_minus * scale,
            tau_k=1.0,
            normalized=True,
        )


def delay_times(b: BarrierSpec, k0: float, normalized: bool = False) -> DelayTimes:
    kin = _kin(b, k0)
    args = (kin.n, kin.alpha)
    eps = kin.epsilon
    times = DelayTimes(
        t_T_std=kin.tau_k * float(normalized_phase_time_standard(*args, eps)),
        t_T_plus=kin.tau_k * float(normalized_phase_time_parity(*args, "+", eps)),
        t_T_minus=kin.tau_k * float(normalized_phase_time_parity(*args, "-", eps)),
        t_D_plus=kin.tau_k * float(normalized_dwell_time_parity(*args, "+", eps)),
        t_D_minus=kin.tau_k * float(normalized_dwell_time_parity(*args, "-", eps)),
        t_I_plus=kin.tau_k * float(normalized_self_interference_time(*args, "+", eps)),
        t_I_minus=kin.tau_k * float(normalized_self_interference_time(*args, "-", eps)),
        tau_k=kin.tau_k,
    )
    return times.in_units_of_tau() if normalized else times


def transmission_dominant(n, alpha):
    """True where ``|T|^2 > 1/2``, i.e. ``sinh(alpha) < 2 sqrt(n (1 - n))``."""
    n = np.asarray(n, dtype=float)
    return _out(np.sinh(np.asarray(alpha, dtype=float)) < 2.0 * np.sqrt(n * (1.0 - n)))


def bosonic_acceleration(alpha):
    """True where the symmetrized phase time beats ``tau_k``: ``(a/2) tanh(a/2) > 1``."""
    alpha = np.asarray(alpha, dtype=float)
    return _out(alpha / 2.0 * np.tanh(alpha / 2.0) > 1.0)
