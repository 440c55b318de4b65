"""Delay times for tunneling through a one-dimensional rectangular barrier.

Stationary scattering amplitudes and their phases, phase, dwell and
self-interference times for single-sided and parity-symmetric incidence,
and a split-operator wave-packet solver used as an independent check.
"""
from .errors import (
    BarrierTimesError,
    ConfigurationError,
    DomainError,
    InstabilityError,
    MeasurementError,
    RegimeError,
)
from .kinematics import BarrierSpec, Kinematics, alpha_of, free_region, kinematics, make_barrier
from .scattering import (
    phi,
    reflection_amplitude,
    scattering_set,
    standard_phase,
    transmission_amplitude,
)
from .delay_times import DelayTimes, normalized_times

__version__ = "0.1.0"

__all__ = [
    "BarrierSpec",
    "BarrierTimesError",
    "ConfigurationError",
    "DelayTimes",
    "DomainError",
    "InstabilityError",
    "Kinematics",
    "MeasurementError",
    "RegimeError",
    "alpha_of",
    "free_region",
    "kinematics",
    "make_barrier",
    "normalized_times",
    "phi",
    "reflection_amplitude",
    "scattering_set",
    "standard_phase",
    "transmission_amplitude",
]
