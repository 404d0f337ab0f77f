"""First-order amplitudes of nonresonant transitions and the resulting error.

While spin k is driven, every other spin k' sees the pulse far off resonance,
detuned by a large ``D``. To first order in ``Omega / D`` the pulse leaks
amplitude into ``i`` (spin k' flipped) and ``j`` (spins k' and k flipped).
Amplitudes here are defined up to a common phase per final state, which does
not affect any probability.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .chain import (
    BasisState,
    ChainSpec,
    alpha_coefficient,
    detuning_D,
    transition_frequency,
)
from .twolevel import effective_rabi

__all__ = [
    "ForcedPairResult",
    "ErrorBudget",
    "MinErrorEstimate",
    "OptimalityCheck",
    "forced_pair_amplitudes",
    "pi_pulse_amplitudes",
    "error_probability",
    "min_error_estimate",
    "check_optimal",
    "chain_alphas",
]

VALIDITY_RATIO = 5.0


@dataclass(frozen=True)
class ForcedPairResult:
    """Leaked amplitudes: ``b_i`` (spin k' flipped) and ``b_j`` (k' and k flipped)."""

    b_i: complex
    b_j: complex

    @property
    def probability(self) -> float:
        return float(abs(self.b_i) ** 2 + abs(self.b_j) ** 2)


@dataclass(frozen=True)
class ErrorBudget:
    """Total nonresonant error of one resonant pi pulse, split by spin k'."""

    p_total: float
    contributions: dict[int, float]
    k: int
    omega_rabi: float
    nu: float
    ratio: float
    detunings: dict[int, float] = field(default_factory=dict)


def forced_pair_amplitudes(
    delta: float,
    Delta: float,
    D: float,
    omega_rabi: float,
    tau: float,
    initial: str = "lower",
) -> ForcedPairResult:
    """Closed-form first-order leakage after a pulse of length ``tau``.

    Parameters
    ----------
    delta : float
        Detuning of the driven pair.
    Delta : float
        Detuning of the spin-k pair once spin k' is flipped.
    D : float
        Large detuning of the k' flip.
    omega_rabi, tau : float
        Pulse Rabi frequency and length.
    initial : {"lower", "upper"}
        Which member of the driven pair starts populated.
    """
    if D == 0:
        raise ValueError("perturbative amplitudes are undefined at D = 0")
    if initial not in ("lower", "upper"):
        raise ValueError(f"initial must be 'lower' or 'upper', got {initial!r}")
    if abs(D) < VALIDITY_RATIO * omega_rabi:
        warnings.warn(
            f"|D| = {abs(D):.3g} is below {VALIDITY_RATIO:g} Omega; first-order amplitudes are unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    lam = effective_rabi(delta, omega_rabi)
    big = effective_rabi(Delta, omega_rabi)
    pref = omega_rabi / (2.0 * D)
    phase = np.exp(1j * D * tau)
    sin_l, cos_l = math.sin(0.5 * lam * tau), math.cos(0.5 * lam * tau)
    sin_b, cos_b = math.sin(0.5 * big * tau), math.cos(0.5 * big * tau)

    double = -1j * pref * (omega_rabi / big * sin_b - omega_rabi / lam * sin_l * phase)
    # the free i-j pair term carries i (Delta / Lambda) sin(Lambda tau / 2);
    # it vanishes for Delta = 0 and whenever Lambda tau / 2 is a multiple of pi
    sign = 1.0 if initial == "lower" else -1.0
    single = -pref * (
        cos_b + sign * 1j * Delta / big * sin_b - (cos_l + sign * 1j * delta / lam * sin_l) * phase
    )
    if initial == "lower":
        return ForcedPairResult(complex(single), complex(double))
    return ForcedPairResult(complex(double), complex(single))


def pi_pulse_amplitudes(D: float, omega_rabi: float, is_neighbor: bool) -> ForcedPairResult:
    """Leakage after a resonant pi pulse that satisfies the 2 pi K condition."""
    if D == 0:
        raise ValueError("perturbative amplitudes are undefined at D = 0")
    pref = omega_rabi / (2.0 * D)
    phase = np.exp(1j * math.pi * D / omega_rabi)
    if is_neighbor:
        return ForcedPairResult(complex(-pref), complex(1j * pref * phase))
    return ForcedPairResult(0j, complex(-1j * pref * (1.0 - phase)))


def error_probability(
    chain: ChainSpec, state_m: BasisState, k: int, omega_rabi: float
) -> ErrorBudget:
    """Total probability of nonresonant flips during a resonant pi pulse on spin k.

    The drive frequency is set resonant for flipping spin ``k`` of ``state_m``.
    Neighbours of k contribute ``2 (Omega / 2D)**2`` each; every other spin
    contributes ``(Omega / 2D)**2 |1 - exp(i pi D / Omega)|**2``. Terms for
    neighbours that do not exist (end spins) are simply absent.
    """
    nu = abs(transition_frequency(chain, state_m, k))
    contributions = {}
    detunings = {}
    for kp in range(chain.length):
        if kp == k:
            continue
        d = detuning_D(chain, state_m, k, kp, nu)
        amps = pi_pulse_amplitudes(d, omega_rabi, abs(kp - k) == 1)
        contributions[kp] = amps.probability
        detunings[kp] = d
    total = math.fsum(contributions.values())
    return ErrorBudget(
        p_total=total,
        contributions=contributions,
        k=k,
        omega_rabi=omega_rabi,
        nu=nu,
        ratio=chain.delta_omega / omega_rabi,
        detunings=detunings,
    )


def chain_alphas(chain: ChainSpec, state_m: BasisState, k: int) -> dict[int, int]:
    """Integer Ising offsets keyed by ``k' - k`` for a resonant drive on spin k."""
    return {
        kp - k: int(round(alpha_coefficient(chain, state_m, k, kp)))
        for kp in range(chain.length)
        if kp != k
    }


@dataclass(frozen=True)
class MinErrorEstimate:
    """Closed-form error at the optimal gradient.

    ``total`` is the full estimate, ``distant`` the per-offset minima of the
    non-neighbour terms, ``leading`` the crude ``(Omega / delta_omega)**2``.
    """

    total: float
    distant: dict[int, float]
    leading: float
    q: int


def min_error_estimate(Q: int, K_script: int, alphas: Mapping[int, int]) -> MinErrorEstimate:
    """Error at ``delta_omega / Omega = 2Q`` and ``K = 2 K_script``.

    ``alphas`` maps the offset ``k' - k`` to the Ising coefficient of that
    spin's detuning, ``|D| = |k - k'| delta_omega + alpha J``.
    """
    if int(Q) != Q or Q < 1:
        raise ValueError(f"Q must be a positive integer, got {Q!r}")
    if int(K_script) != K_script or K_script < 1:
        raise ValueError(f"K_script must be a positive integer, got {K_script!r}")
    base = 1.0 / (4.0 * Q * Q)
    suppression = (math.pi / (32.0 * K_script)) ** 2
    distant = {
        off: base * suppression * (a / off) ** 2
        for off, a in alphas.items()
        if abs(off) > 1
    }
    neighbour_shift = alphas.get(-1, 0) + alphas.get(1, 0)
    # expansion of 2 (Omega/2D)^2 in alpha J / delta_omega for the two neighbours
    correction = (K_script / Q) * neighbour_shift * (1.0 - 1.0 / (32.0 * K_script**2))
    total = base * (1.0 - correction) + math.fsum(distant.values())
    return MinErrorEstimate(total=total, distant=distant, leading=base, q=2 * Q)


@dataclass(frozen=True)
class OptimalityCheck:
    optimal: bool
    ratio: float
    K: int
    Q: int | None
    K_script: int | None
    nearest_ratio: float
    notes: tuple[str, ...] = ()

    def approx_detuning(self, distance: int, alpha: int) -> float:
        """Approximate ``|D / Omega|`` for a spin ``distance`` away with Ising offset ``alpha``."""
        ks = self.K / 2.0
        return self.ratio * abs(distance) + alpha * (2.0 * ks - 1.0 / (16.0 * ks))

    def summary(self) -> str:
        if self.optimal:
            head = f"optimal: Q={self.Q}, K_script={self.K_script}"
        else:
            head = f"not optimal: nearest optimal ratio {self.nearest_ratio:g}"
        return "; ".join((head,) + self.notes)


def check_optimal(
    delta_omega_over_omega: float, K: int, tol: float = 1e-9, q_min: int = 10
) -> OptimalityCheck:
    """Test ``delta_omega / Omega = 2Q`` and ``K = 2 K_script`` for integers Q, K_script."""
    ratio = float(delta_omega_over_omega)
    half = ratio / 2.0
    q_int = round(half)
    ratio_ok = q_int >= 1 and abs(half - q_int) <= tol * max(1.0, abs(half))
    k_ok = int(K) == K and K >= 2 and K % 2 == 0
    notes = []
    if not k_ok:
        notes.append(f"K={K} is not an even positive integer")
    if ratio_ok and q_int < q_min:
        notes.append(f"warning: Q={q_int} is not >> 1")
    return OptimalityCheck(
        optimal=bool(ratio_ok and k_ok),
        ratio=ratio,
        K=int(K),
        Q=int(q_int) if ratio_ok else None,
        K_script=int(K) // 2 if k_ok else None,
        nearest_ratio=float(2 * max(q_int, 1)),
        notes=tuple(notes),
    )
