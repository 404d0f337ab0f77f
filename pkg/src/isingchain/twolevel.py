"""Closed-form dynamics of a single driven pair of levels.

A pair ``(lower, upper)`` related by one spin flip and detuned by ``delta``
from the drive obeys::

    i dC_lower/dt = -(Omega/2) exp(-i(delta t - phi)) C_upper
    i dC_upper/dt = -(Omega/2) exp(+i(delta t - phi)) C_lower

in the interaction picture. Its propagator over a rectangular pulse is exact
and cheap, so it is evaluated directly (and broadcast over arrays of pairs).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Pulse",
    "PairAmplitudes",
    "effective_rabi",
    "evolve_pair",
    "pair_propagator",
    "rabi_for_2pik",
    "pi_pulse_duration",
]


@dataclass(frozen=True)
class Pulse:
    """Rectangular rf pulse.

    Parameters
    ----------
    nu : float
        Carrier frequency.
    omega_rabi : float
        Rabi frequency (> 0).
    phase : float
        Carrier phase in radians.
    t_start : float
        Switch-on time.
    duration : float
        Pulse length (> 0).
    """

    nu: float
    omega_rabi: float
    phase: float = 0.0
    t_start: float = 0.0
    duration: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if not self.omega_rabi > 0:
            raise ValueError(f"omega_rabi must be > 0, got {self.omega_rabi!r}")
        if self.duration is None:
            object.__setattr__(self, "duration", pi_pulse_duration(self.omega_rabi))
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration!r}")

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration


@dataclass(frozen=True)
class PairAmplitudes:
    """Amplitudes of the lower and upper member of a pair (scalars or arrays)."""

    c_lower: complex | np.ndarray
    c_upper: complex | np.ndarray

    @property
    def populations(self):
        return np.abs(self.c_lower) ** 2, np.abs(self.c_upper) ** 2


def effective_rabi(delta, omega_rabi):
    """Generalised Rabi frequency ``sqrt(delta**2 + Omega**2)``."""
    return np.hypot(delta, omega_rabi)


def pair_propagator(delta, pulse: Pulse):
    """Entries ``(u_ll, u_lu, u_ul, u_uu)`` of the interaction-picture propagator.

    ``u_ll`` maps initial lower amplitude to final lower amplitude, and so on.
    ``delta`` may be an array.
    """
    delta = np.asarray(delta, dtype=float)
    omega = pulse.omega_rabi
    t0, tau, phi = pulse.t_start, pulse.duration, pulse.phase
    lam = effective_rabi(delta, omega)
    c = np.cos(0.5 * lam * tau)
    s = np.sin(0.5 * lam * tau)
    # columns are the lower-start and upper-start solutions
    u_ll = (c + 1j * (delta / lam) * s) * np.exp(-0.5j * delta * tau)
    u_ul = 1j * (omega / lam) * s * np.exp(1j * (delta * t0 - phi + 0.5 * delta * tau))
    u_lu = 1j * (omega / lam) * s * np.exp(-1j * (delta * t0 - phi + 0.5 * delta * tau))
    u_uu = (c - 1j * (delta / lam) * s) * np.exp(0.5j * delta * tau)
    return u_ll, u_lu, u_ul, u_uu


def evolve_pair(amps: PairAmplitudes, delta, pulse: Pulse) -> PairAmplitudes:
    """Propagate a pair through ``pulse``; ``pulse.nu`` is ignored in favour of ``delta``."""
    u_ll, u_lu, u_ul, u_uu = pair_propagator(delta, pulse)
    lower = u_ll * amps.c_lower + u_lu * amps.c_upper
    upper = u_ul * amps.c_lower + u_uu * amps.c_upper
    return PairAmplitudes(lower, upper)


def rabi_for_2pik(j_coupling: float, K: int) -> float:
    """Rabi frequency that makes the ``+-2J`` detuned pairs complete K full turns.

    Returns ``2 J / sqrt(4 K**2 - 1)``.
    """
    if int(K) != K or K < 1:
        raise ValueError(f"K must be a positive integer, got {K!r}")
    return 2.0 * j_coupling / math.sqrt(4 * K * K - 1)


def pi_pulse_duration(omega_rabi: float) -> float:
    if not omega_rabi > 0:
        raise ValueError(f"omega_rabi must be > 0, got {omega_rabi!r}")
    return math.pi / omega_rabi
