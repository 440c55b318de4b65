import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from barrier_times import BarrierSpec, DomainError, RegimeError
from barrier_times import delay_times as dt
from barrier_times import scattering as sc
from barrier_times.kinematics import free_region
from oracle_values import ORACLE

WL_GRID = (math.pi, 2 * math.pi, 4 * math.pi, 8 * math.pi)
N_GRID = np.linspace(0.0, 1.0, 99)[1:-1]
SQRT_HALF = math.sqrt(0.5)


def barrier(wL):
    return BarrierSpec.from_strength(wL)


def grid_times():
    for wL in WL_GRID:
        yield wL, dt.normalized_times(N_GRID, wL)


@pytest.mark.parametrize("key", sorted(ORACLE))
def test_normalized_times_against_frozen_oracle(key):
    ref = ORACLE[key]
    got = dt.normalized_times(key[1], key[0] * math.pi)
    for name in ("tT_std", "tT_plus", "tT_minus", "tD_plus", "tD_minus", "tI_plus", "tI_minus"):
        assert float(got[name]) == pytest.approx(ref[name], rel=1e-9), name


@pytest.mark.parametrize("key", sorted(ORACLE))
def test_absolute_times_scale_with_tau(key):
    ref = ORACLE[key]
    b = barrier(key[0] * math.pi)
    k = math.sqrt(key[1])
    tau = dt.classical_traversal(b, k)
    times = dt.delay_times(b, k)
    assert times.tau_k == pytest.approx(tau, rel=1e-15)
    assert times.t_T_minus == pytest.approx(ref["tT_minus"] * tau, rel=1e-9)
    assert dt.dwell_time_parity(b, k, "+") == pytest.approx(ref["tD_plus"] * tau, rel=1e-9)
    assert dt.self_interference_time(b, k, "-") == pytest.approx(ref["tI_minus"] * tau, rel=1e-9)
    norm = dt.delay_times(b, k, normalized=True)
    assert norm.normalized and norm.tau_k == 1.0
    assert norm.t_T_std == pytest.approx(ref["tT_std"], rel=1e-9)


def test_fermionic_value_at_half_energy():
    b = barrier(4 * math.pi)
    t = dt.phase_time_parity(b, SQRT_HALF, "-") / dt.classical_traversal(b, SQRT_HALF)
    assert t == pytest.approx(0.2248, abs=5e-5)
    assert t < 1


def test_standard_routes_agree_over_grid():
    for wL in WL_GRID:
        b = barrier(wL)
        for n in N_GRID:
            k = math.sqrt(n)
            assert dt.phase_time_standard(b, k) == pytest.approx(dt.phase_time_standard_direct(b, k), rel=1e-12)


def test_hartman_limit_of_standard_time():
    b = BarrierSpec.from_strength(40.0)
    k = SQRT_HALF
    rho = SQRT_HALF
    assert dt.phase_time_standard(b, k) == pytest.approx(2 * b.m / (k * rho), rel=1e-8)


def test_hartman_saturation_common_asymptote():
    a8, a12 = dt.normalized_times(0.5, 8 * math.pi), dt.normalized_times(0.5, 12 * math.pi)
    for name in ("tT_std", "tT_plus", "tT_minus"):
        # normalized times carry 1/alpha; undo it to compare the absolute delay
        t8 = float(a8[name]) * float(a8["alpha"])
        t12 = float(a12[name]) * float(a12["alpha"])
        assert abs(t12 - t8) / t8 < 1e-6
        assert t12 == pytest.approx(2.0, rel=1e-6)


def test_decomposition_identity_over_grid():
    for _, t in grid_times():
        for p in ("plus", "minus"):
            total = t[f"tT_{p}"]
            resid = np.abs(total - t[f"tD_{p}"] - t[f"tI_{p}"]) / total
            assert np.max(resid) < 1e-10


def test_signs_and_fermionic_bound_over_grid():
    for _, t in grid_times():
        for name in ("tT_plus", "tT_minus", "tD_plus", "tD_minus", "tI_plus", "tI_minus"):
            assert np.all(t[name] > 0), name
        assert np.all(t["tT_minus"] < 1)


def test_bosonic_acceleration_predicate():
    for _, t in grid_times():
        fast = t["tT_plus"] < 1
        assert np.array_equal(fast, dt.bosonic_acceleration(t["alpha"]))


def test_bosonic_acceleration_threshold_is_exact():
    # (a/2) tanh(a/2) = 1 at a/2 = 1.19967864...; t_T+ crosses tau_k there for every n
    a_star = 2 * 1.1996786402577338
    for n in (0.1, 0.5, 0.9):
        wL = a_star / math.sqrt(1 - n)
        assert float(dt.normalized_times(n, wL)["tT_plus"]) == pytest.approx(1.0, abs=1e-12)


def test_transmission_dominance_predicate():
    for wL in WL_GRID:
        b = barrier(wL)
        k = np.sqrt(N_GRID)
        T2 = np.abs(sc.transmission_amplitude(b, k)) ** 2
        alpha = wL * np.sqrt(1 - N_GRID)
        assert np.array_equal(T2 > 0.5, dt.transmission_dominant(N_GRID, alpha))


def test_self_interference_from_phase():
    # -(m/k^2) sin(phi): the sine of the combined-amplitude phase is negative in the regime
    for wL in WL_GRID:
        b = barrier(wL)
        for n in N_GRID[::6]:
            k = math.sqrt(n)
            for parity in "+-":
                closed = dt.self_interference_time(b, k, parity)
                assert dt.self_interference_from_phase(b, k, parity) == pytest.approx(closed, rel=1e-10)
                assert closed > 0


# -- n -> 1 at fixed opacity --------------------------------------------------


def minus_phase_limit(W):
    return 2 * (6 + W * W) / (3 * (4 + W * W))


def minus_dwell_limit(W):
    return 2 * W * W / (3 * (4 + W * W))


def minus_interference_limit(W):
    return 4 / (4 + W * W)


@pytest.mark.parametrize("wL", WL_GRID)
@pytest.mark.parametrize("eps", [1e-6, 1e-10, 1e-14])
def test_top_of_barrier_limits(wL, eps):
    t = dt.normalized_times(1 - eps, wL)
    tol = 1e-3
    assert float(t["tT_plus"]) == pytest.approx(2.0, rel=tol)
    assert float(t["tD_plus"]) == pytest.approx(2.0, rel=tol)
    assert float(t["tI_plus"]) < tol
    assert float(t["tT_minus"]) == pytest.approx(minus_phase_limit(wL), rel=tol)
    assert float(t["tD_minus"]) == pytest.approx(minus_dwell_limit(wL), rel=tol)
    assert float(t["tI_minus"]) == pytest.approx(minus_interference_limit(wL), rel=tol)


def test_two_thirds_anchor_is_the_opaque_limit():
    # the fixed-opacity limits tend to 2/3 and 0 only as wL grows
    gaps = [abs(float(dt.normalized_times(1 - 1e-12, wL)["tT_minus"]) / (2 / 3) - 1) for wL in (4 * math.pi, 16 * math.pi, 64.0)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


@pytest.mark.parametrize(
    "x, expected",
    [
        (1e-6, 1.66666666666675e-19),
        (1e-3, 1.666666750000002e-10),
        (0.1, 0.00016675001984402582),
        (0.4999, 0.021082545502515316),
        (0.5001, 0.021108070695932467),
        (2.0, 1.6268604078470188),
    ],
)
def test_sinh_excess_both_branches(x, expected):
    # reference values from 40-digit arithmetic; the cutoff sits at 0.5
    assert float(dt._sinh_excess(x)) == pytest.approx(expected, rel=1e-14)


# -- finite-difference oracle -------------------------------------------------


def test_fd_oracle_quadratic_phase():
    b = barrier(2 * math.pi)
    got = dt.phase_time_fd_oracle(lambda _b, k: k * k, b, 0.6, 1e-3)
    assert got == pytest.approx(2 * b.m, rel=1e-12)


def test_fd_oracle_parity_plus_point():
    b = barrier(2 * math.pi)
    fd = dt.phase_time_fd_oracle(lambda b_, k: sc.phi(b_, k, "+"), b, SQRT_HALF, 1e-5 * b.w)
    assert fd == pytest.approx(dt.phase_time_parity(b, SQRT_HALF, "+"), rel=1e-6)


def test_fd_oracle_standard_point():
    b = barrier(4 * math.pi)
    fd = dt.phase_time_fd_oracle(sc.standard_phase, b, SQRT_HALF, 1e-5)
    assert fd == pytest.approx(dt.phase_time_standard(b, SQRT_HALF), rel=1e-6)


def test_fd_oracle_second_order():
    b = barrier(2 * math.pi)
    k = 0.6
    for parity in "+-":
        exact = dt.phase_time_parity(b, k, parity)
        phase = lambda b_, kk, p=parity: sc.phi(b_, kk, p)
        errs = [abs(dt.phase_time_fd_oracle(phase, b, k, h) - exact) for h in (4e-3, 2e-3, 1e-3)]
        for e1, e2 in zip(errs, errs[1:]):
            assert e1 / e2 == pytest.approx(4.0, rel=0.05)


def test_fd_oracle_errors():
    b = barrier(2 * math.pi)
    with pytest.raises(DomainError):
        dt.phase_time_fd_oracle(sc.standard_phase, b, 0.99, 0.02)
    with pytest.raises(DomainError):
        dt.phase_time_fd_oracle(sc.standard_phase, b, 0.5, 0.0)


def test_rejected_fermionic_numerator():
    """The variant numerator sinh(a) - n a gives negative times and breaks both cross-checks."""
    b = barrier(4 * math.pi)
    k = SQRT_HALF
    kin_alpha = b.L * math.sqrt(1 - k * k)
    n = k * k
    variant = 2 / kin_alpha * (math.sinh(kin_alpha) - n * kin_alpha) / (2 * n - 1 - math.cosh(kin_alpha))
    adopted = dt.phase_time_parity(b, k, "-") / dt.classical_traversal(b, k)
    assert variant < 0 < adopted
    fd = dt.phase_time_fd_oracle(lambda b_, kk: sc.phi(b_, kk, "-"), b, k, 1e-5)
    assert fd / dt.classical_traversal(b, k) == pytest.approx(adopted, rel=1e-6)
    parts = dt.dwell_time_parity(b, k, "-") + dt.self_interference_time(b, k, "-")
    assert parts / dt.classical_traversal(b, k) == pytest.approx(adopted, rel=1e-12)
    assert abs(variant - parts / dt.classical_traversal(b, k)) > 0.1


# -- dwell by quadrature ------------------------------------------------------


@pytest.mark.parametrize("parity", "+-")
def test_dwell_quadrature_matches_closed_form(parity):
    b = barrier(4 * math.pi)
    numeric = dt.dwell_time_numeric(b, SQRT_HALF, parity)
    assert numeric == pytest.approx(dt.dwell_time_parity(b, SQRT_HALF, parity), rel=1e-6)


def test_dwell_quadrature_over_grid():
    for wL in WL_GRID:
        b = barrier(wL)
        for n in N_GRID[::12]:
            k = math.sqrt(n)
            for parity in "+-":
                assert dt.dwell_time_numeric(b, k, parity) == pytest.approx(
                    dt.dwell_time_parity(b, k, parity), rel=1e-10
                )


def test_dwell_quadrature_converged():
    b = barrier(4 * math.pi)
    for config in ("L", "+", "-"):
        coarse = dt.dwell_time_numeric(b, 0.6, config, panels=16)
        fine = dt.dwell_time_numeric(b, 0.6, config, panels=32)
        assert abs(coarse - fine) < 1e-10 * fine


def test_one_sided_dwell_frozen():
    # one-sided dwell has no closed form here; value frozen from a 50-digit quadrature
    b = barrier(2 * math.pi)
    assert dt.dwell_time_numeric(b, SQRT_HALF, "L") == pytest.approx(1.9994466998017821, rel=1e-10)


def test_dwell_rejects_empty_barrier():
    with pytest.raises(DomainError):
        dt.dwell_time_numeric(BarrierSpec(0.5, 0.0), 0.5, "+")


# -- classical traversal and errors ------------------------------------------


def test_classical_traversal():
    assert dt.classical_traversal(free_region(1.0), 1.0) == 1.0
    assert dt.classical_traversal(free_region(2.0), 1.0) == 2.0
    assert dt.classical_traversal(BarrierSpec(0.5, 6.0), 0.3) == pytest.approx(
        2 * dt.classical_traversal(BarrierSpec(0.5, 3.0), 0.3), rel=1e-15
    )
    with pytest.raises(DomainError):
        dt.classical_traversal(free_region(1.0), 0.0)


def test_regime_errors():
    b = barrier(2 * math.pi)
    with pytest.raises(RegimeError):
        dt.phase_time_standard(b, 1.0)
    with pytest.raises(RegimeError):
        dt.delay_times(b, 2.0)
    with pytest.raises(DomainError):
        dt.phase_time_parity(b, 0.5, "?")
    with pytest.raises(DomainError):
        dt.normalized_phase_time_parity(1.2, 1.0, "+")


@settings(max_examples=80, deadline=None)
@given(wL=st.floats(0.01, 60.0), n=st.floats(1e-6, 1 - 1e-12))
def test_identity_and_bound_random(wL, n):
    t = dt.normalized_times(n, wL)
    for p in ("plus", "minus"):
        total = float(t[f"tT_{p}"])
        assert abs(total - float(t[f"tD_{p}"]) - float(t[f"tI_{p}"])) <= 1e-10 * total
        assert float(t[f"tD_{p}"]) > 0
        assert float(t[f"tI_{p}"]) > 0
    assert float(t["tT_minus"]) < 1
    assert np.isfinite(float(t["tT_std"]))
