"""Barrier parameters and per-momentum derived quantities.

Natural units with hbar = 1 throughout: energies, lengths, masses and
momenta are plain floats, and a time is whatever ``m * L / k`` evaluates to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, RegimeError

__all__ = [
    "BarrierSpec",
    "Kinematics",
    "make_barrier",
    "free_region",
    "kinematics",
    "alpha_of",
]


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(name, f"must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class BarrierSpec:
    """Rectangular barrier of height ``V0`` on ``[-L/2, L/2]`` for mass ``m``.

    The direct constructor admits ``V0 = 0`` (free reference region) and
    ``L = 0`` (vanishing barrier); :func:`make_barrier` is the strict factory.
    """

    V0: float
    L: float
    m: float = 1.0
    w: float = field(init=False)

    def __post_init__(self):
        V0 = _require_finite("V0", self.V0)
        L = _require_finite("L", self.L)
        m = _require_finite("m", self.m)
        if V0 < 0:
            raise DomainError("V0", f"must be non-negative, got {V0}")
        if L < 0:
            raise DomainError("L", f"must be non-negative, got {L}")
        if m <= 0:
            raise DomainError("m", f"must be positive, got {m}")
        object.__setattr__(self, "V0", V0)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "w", math.sqrt(2.0 * m * V0))

    @property
    def wL(self) -> float:
        """Dimensionless barrier strength ``w * L``."""
        return self.w * self.L

    @classmethod
    def from_strength(cls, wL: float, w: float = 1.0, m: float = 1.0) -> "BarrierSpec":
        """Barrier with momentum scale ``w`` and opacity ``wL``."""
        return cls(V0=w * w / (2.0 * m), L=wL / w, m=m)


def make_barrier(V0: float, L: float, m: float) -> BarrierSpec:
    """Validated barrier constructor; every argument must be strictly positive."""
    for name, value in (("V0", V0), ("L", L), ("m", m)):
        value = _require_finite(name, value)
        if value <= 0:
            raise DomainError(name, f"must be strictly positive, got {value}")
    return BarrierSpec(V0=V0, L=L, m=m)


def free_region(L: float, m: float = 1.0) -> BarrierSpec:
    """Zero-height region of width ``L``, used as a free-flight reference."""
    return BarrierSpec(V0=0.0, L=L, m=m)


@dataclass(frozen=True)
class Kinematics:
    """Derived quantities for one momentum ``k`` below the barrier top.

    ``epsilon`` is ``1 - n`` computed without cancellation as ``(rho/w)**2``;
    near the barrier top it is the accurate one to use.
    """

    k: float
    n: float
    rho: float
    alpha: float
    E: float
    tau_k: float
    flux_in: float
    epsilon: float


def kinematics(b: BarrierSpec, k: float) -> Kinematics:
    k = _require_finite("k", k)
    if k <= 0:
        raise DomainError("k", f"must be positive, got {k}")
    if b.w == 0 or k >= b.w:
        raise RegimeError("k", f"above-barrier not supported (k={k}, w={b.w})")
    # (w - k)(w + k) keeps rho accurate as k -> w
    rho = math.sqrt((b.w - k) * (b.w + k))
    return Kinematics(
        k=k,
        n=(k / b.w) ** 2,
        rho=rho,
        alpha=rho * b.L,
        E=k * k / (2.0 * b.m),
        tau_k=b.m * b.L / k,
        flux_in=k / b.m,
        epsilon=(rho / b.w) ** 2,
    )


def alpha_of(n: float, wL: float) -> float:
    """Opacity ``alpha = wL * sqrt(1 - n)`` for a normalized energy ``n``."""
    if not 0 <= n < 1:
        raise DomainError("n", f"must lie in [0, 1), got {n}")
    if not wL > 0:
        raise DomainError("wL", f"must be positive, got {wL}")
    return wL * math.sqrt(1.0 - n)
