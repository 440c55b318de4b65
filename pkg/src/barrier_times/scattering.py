"""Stationary scattering off a rectangular barrier.

Left incidence uses ``exp(+ikx)`` coming from ``x < -L/2``, right incidence
``exp(-ikx)`` coming from ``x > L/2``.  Both see the same reflection ``R`` and
transmission ``T``; the even/odd superpositions of the two solutions combine
them into the unimodular amplitudes ``R + T`` and ``R - T``.

All functions accept a scalar momentum or an array of momenta.  Array input
returns arrays; phases returned for arrays are unwrapped along the array.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, RegimeError
from .kinematics import BarrierSpec

Parity = Literal["+", "-"]
Side = Literal["L", "R"]
Config = Literal["L", "R", "+", "-"]

__all__ = [
    "ScatteringSet",
    "InteriorCoefficients",
    "transmission_magnitude",
    "reflection_amplitude",
    "transmission_amplitude",
    "standard_phase",
    "theta_angle",
    "combined_amplitude",
    "phi",
    "phi_closed_form",
    "scattering_set",
    "interior_coefficients",
    "continuity_residuals",
    "stationary_field",
    "transfer_matrix_oracle",
    "parity_sign",
]


def parity_sign(parity: str) -> int:
    if parity == "+":
        return 1
    if parity == "-":
        return -1
    raise DomainError("parity", f"expected '+' or '-', got {parity!r}")


def _momenta(b: BarrierSpec, k):
    k = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(k)):
        raise DomainError("k", "must be finite")
    if np.any(k <= 0):
        raise DomainError("k", "must be positive")
    if b.w == 0 or np.any(k >= b.w):
        raise RegimeError("k", f"above-barrier not supported (w={b.w})")
    rho = np.sqrt((b.w - k) * (b.w + k))
    return k, rho, rho * b.L


def _out(value):
    return value[()] if isinstance(value, np.ndarray) and value.ndim == 0 else value


def theta_angle(b: BarrierSpec, k):
    """Angle whose tangent is ``2 k rho / (2k^2 - w^2)``, taken in (0, pi).

    It is the argument of ``(k + i rho)^2``, continuous through ``2k^2 = w^2``.
    """
    k, rho, _ = _momenta(b, k)
    return _out(2.0 * np.arctan2(rho, k))


def transmission_magnitude(b: BarrierSpec, k):
    """``|T| = {1 + w^4 sinh^2(rho L) / (4 k^2 rho^2)}^(-1/2)``."""
    k, rho, alpha = _momenta(b, k)
    with np.errstate(over="ignore"):
        s = np.sinh(alpha)
        ratio = (b.w ** 2 * s / (2.0 * k * rho)) ** 2
    return _out(1.0 / np.sqrt(1.0 + ratio))


def _amplitudes(b: BarrierSpec, k):
    k, rho, alpha = _momenta(b, k)
    theta = 2.0 * np.arctan2(rho, k)
    e_iTheta = np.exp(1j * theta)
    e_2iTheta = e_iTheta * e_iTheta
    # numerator and denominator of the closed forms multiplied by exp(-2 rho L)
    decay = np.exp(-2.0 * alpha)
    denom = decay - e_2iTheta
    shift = np.exp(-1j * k * b.L)
    R = shift * e_iTheta * (decay - 1.0) / denom
    T = shift * np.exp(-alpha) * (1.0 - e_2iTheta) / denom
    return R, T


def reflection_amplitude(b: BarrierSpec, k):
    """Reflection amplitude ``R(k, L)``; identical for either side of incidence."""
    return _out(_amplitudes(b, k)[0])


def transmission_amplitude(b: BarrierSpec, k):
    """Transmission amplitude ``T(k, L)``, including the ``exp(-ikL)`` offset."""
    return _out(_amplitudes(b, k)[1])


def standard_phase(b: BarrierSpec, k):
    """One-way transmission phase ``Theta = arg(T exp(ikL))``.

    Closed form ``arctan{(2k^2 - w^2) tanh(rho L) / (2 k rho)}``.
    """
    k, rho, alpha = _momenta(b, k)
    return _out(np.arctan2((2.0 * k * k - b.w ** 2) * np.tanh(alpha), 2.0 * k * rho))


def combined_amplitude(b: BarrierSpec, k, parity: Parity):
    """``R + T`` for the symmetrized and ``R - T`` for the antisymmetrized case."""
    s = parity_sign(parity)
    R, T = _amplitudes(b, k)
    return _out(R + s * T)


def phi(b: BarrierSpec, k, parity: Parity):
    """Phase ``phi_pm = arg[(R pm T) exp(ikL)]``.

    A scalar momentum gives the principal value in (-pi, pi]; an array of
    momenta is unwrapped so the result is continuous along the array.
    """
    k_arr = np.asarray(k, dtype=float)
    c = np.asarray(combined_amplitude(b, k_arr, parity)) * np.exp(1j * k_arr * b.L)
    angle = np.angle(c)
    if angle.ndim:
        angle = np.unwrap(angle)
    return _out(angle)


def phi_closed_form(b: BarrierSpec, k, parity: Parity):
    """``-arctan{2 k rho sinh(rho L) / [(k^2 - rho^2) cosh(rho L) pm w^2]}``.

    Evaluated quadrant-aware (two-argument arctangent, numerator and
    denominator both divided by ``cosh``), principal branch.
    """
    s = parity_sign(parity)
    k, rho, alpha = _momenta(b, k)
    num = 2.0 * k * rho * np.tanh(alpha)
    den = (k * k - rho * rho) + s * b.w ** 2 / np.cosh(alpha)
    return _out(-np.arctan2(num, den))


@dataclass(frozen=True)
class ScatteringSet:
    k: float
    R: complex
    T: complex
    T_mag: float
    Theta: float
    theta: float
    combined_plus: complex
    combined_minus: complex
    phi_plus: float
    phi_minus: float


def scattering_set(b: BarrierSpec, k: float) -> ScatteringSet:
    R, T = _amplitudes(b, k)
    R, T = complex(R), complex(T)
    return ScatteringSet(
        k=float(k),
        R=R,
        T=T,
        T_mag=float(transmission_magnitude(b, k)),
        Theta=float(standard_phase(b, k)),
        theta=float(theta_angle(b, k)),
        combined_plus=R + T,
        combined_minus=R - T,
        phi_plus=float(phi(b, k, "+")),
        phi_minus=float(phi(b, k, "-")),
    )


@dataclass(frozen=True)
class InteriorCoefficients:
    """Coefficients of the solution for incidence from ``side``.

    Side L:  ``exp(ikx) + R exp(-ikx)`` | ``gamma exp(-rho x) + beta exp(rho x)`` | ``T exp(ikx)``
    Side R:  ``T exp(-ikx)`` | ``gamma exp(rho x) + beta exp(-rho x)`` | ``exp(-ikx) + R exp(ikx)``
    """

    side: str
    k: float
    rho: float
    gamma: complex
    beta: complex
    R: complex
    T: complex


def _side_sign(side: str) -> int:
    if side == "L":
        return 1
    if side == "R":
        return -1
    raise DomainError("side", f"expected 'L' or 'R', got {side!r}")


def interior_coefficients(b: BarrierSpec, k: float, side: Side = "L") -> InteriorCoefficients:
    """Solve the four continuity conditions at ``x = -L/2`` and ``x = L/2``.

    The interior exponentials are referenced to the face where each one is
    largest, which keeps the linear system well conditioned for opaque
    barriers; the result is converted back to the origin-referenced basis.
    """
    if b.L <= 0:
        raise DomainError("L", "interior coefficients need a barrier of positive width")
    s = _side_sign(side)
    k_arr, rho_arr, _ = _momenta(b, k)
    k, rho = float(k_arr), float(rho_arr)
    h = b.L / 2.0
    ik = 1j * k

    def plane(sign, x):
        # value and derivative of exp(sign * i * s * k * x)
        e = np.exp(sign * ik * s * x)
        return e, sign * ik * s * e

    def evan(sign, x):
        # sign*s*rho*x exponential, scaled by exp(-rho*h) so it is 1 at its large face
        e = np.exp(sign * s * rho * x - rho * h)
        return e, sign * s * rho * e

    x_in, x_out = -s * h, s * h  # incident face, transmission face
    inc, inc_d = plane(+1, x_in)
    ref, ref_d = plane(-1, x_in)
    tr, tr_d = plane(+1, x_out)
    g_in, g_in_d = evan(-1, x_in)
    b_in, b_in_d = evan(+1, x_in)
    g_out, g_out_d = evan(-1, x_out)
    b_out, b_out_d = evan(+1, x_out)
    # unknowns: R, gamma', beta', T
    A = np.array(
        [
            [ref, -g_in, -b_in, 0.0],
            [ref_d, -g_in_d, -b_in_d, 0.0],
            [0.0, g_out, b_out, -tr],
            [0.0, g_out_d, b_out_d, -tr_d],
        ],
        dtype=complex,
    )
    rhs = np.array([-inc, -inc_d, 0.0, 0.0], dtype=complex)
    R, g_s, b_s, T = np.linalg.solve(A, rhs)
    scale = np.exp(-rho * h)
    return InteriorCoefficients(
        side=side, k=k, rho=rho, gamma=g_s * scale, beta=b_s * scale, R=R, T=T
    )


def _side_field(c: InteriorCoefficients, L: float, x, derivative=False):
    s = _side_sign(c.side)
    k, rho, h = c.k, c.rho, L / 2.0
    u = s * np.asarray(x, dtype=float)  # coordinate along the direction of incidence
    ik = 1j * k
    before = u < -h
    after = u > h
    inside = ~(before | after)
    out = np.empty(u.shape, dtype=complex)
    ub, ui, ua = u[before], u[inside], u[after]
    if not derivative:
        out[before] = np.exp(ik * ub) + c.R * np.exp(-ik * ub)
        out[inside] = c.gamma * np.exp(-rho * ui) + c.beta * np.exp(rho * ui)
        out[after] = c.T * np.exp(ik * ua)
    else:
        out[before] = s * ik * (np.exp(ik * ub) - c.R * np.exp(-ik * ub))
        out[inside] = s * rho * (-c.gamma * np.exp(-rho * ui) + c.beta * np.exp(rho * ui))
        out[after] = s * ik * c.T * np.exp(ik * ua)
    return out


def continuity_residuals(b: BarrierSpec, c: InteriorCoefficients) -> np.ndarray:
    """Mismatch of value and slope between neighbouring pieces at both faces."""
    s = _side_sign(c.side)
    k, rho, h, ik = c.k, c.rho, b.L / 2.0, 1j * c.k
    res = []
    for face in (-h, h):
        u = face  # faces are symmetric, so u = s*x runs over the same two points
        if face < 0:
            outer = np.exp(ik * u) + c.R * np.exp(-ik * u)
            outer_d = ik * (np.exp(ik * u) - c.R * np.exp(-ik * u))
        else:
            outer = c.T * np.exp(ik * u)
            outer_d = ik * c.T * np.exp(ik * u)
        inner = c.gamma * np.exp(-rho * u) + c.beta * np.exp(rho * u)
        inner_d = rho * (-c.gamma * np.exp(-rho * u) + c.beta * np.exp(rho * u))
        res.extend([outer - inner, s * (outer_d - inner_d)])
    return np.abs(np.array(res))


def stationary_field(b: BarrierSpec, k: float, config: Config, x):
    """Piecewise stationary wave at positions ``x``.

    ``config`` is a side of incidence (``"L"``/``"R"``) or a parity
    (``"+"``/``"-"``), the latter meaning ``(phi_L pm phi_R) / sqrt(2)``.
    """
    x = np.asarray(x, dtype=float)
    if config in ("L", "R"):
        return _out(_side_field(interior_coefficients(b, k, config), b.L, x))
    s = parity_sign(config)
    left = _side_field(interior_coefficients(b, k, "L"), b.L, x)
    right = _side_field(interior_coefficients(b, k, "R"), b.L, x)
    return _out((left + s * right) / np.sqrt(2.0))


def transfer_matrix_oracle(b: BarrierSpec, k: float) -> tuple[complex, complex]:
    """Reflection and transmission from a product of interface matrices.

    Each region carries ``A exp(iqx) + B exp(-iqx)`` with ``q = sqrt(2m(E - V))``
    (imaginary under the barrier); matching value and slope at each face maps
    the coefficient pair across it.  Independent of the closed forms above.
    """
    k_arr, _, _ = _momenta(b, k)
    k = float(k_arr)
    E = k * k / (2.0 * b.m)
    q = [k, np.sqrt(complex(2.0 * b.m * (E - b.V0))), k]
    faces = [-b.L / 2.0, b.L / 2.0]

    def basis(qj, x):
        ep, em = np.exp(1j * qj * x), np.exp(-1j * qj * x)
        return np.array([[ep, em], [1j * qj * ep, -1j * qj * em]])

    M = np.eye(2, dtype=complex)
    det = 1.0 + 0j
    for j, x in enumerate(faces):
        outer, inner = basis(q[j], x), basis(q[j + 1], x)
        M = np.linalg.solve(inner, outer) @ M
        # det(M) from the factors; the product matrix cancels e^(2 rho L) terms
        det *= np.linalg.det(outer) / np.linalg.det(inner)
    # (T, 0) = M (1, R)
    R = -M[1, 0] / M[1, 1]
    T = det / M[1, 1]
    return complex(R), complex(T)
