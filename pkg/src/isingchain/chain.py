"""Spin chain definition, diagonal spectrum and detunings.

Conventions
-----------
Frequencies are angular with hbar = 1. A basis state is written with spin 0
rightmost, ``|b_{L-1} ... b_1 b_0>``, and its integer index is
``sum(b_k * 2**k)``. Bit 0 is spin-z +1/2 (the lower Zeeman level), bit 1 is
spin-z -1/2, so a 0 -> 1 flip of spin k absorbs roughly ``omega_k``.

The drive-free energy of a basis state is::

    E = -sum_k omega_k s_k / 2 - (J / 2) sum_k s_k s_{k+1},   s_k = 1 - 2 b_k
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

__all__ = [
    "ChainSpec",
    "BasisState",
    "larmor_frequency",
    "diagonal_energy",
    "flip",
    "transition_frequency",
    "detuning_delta",
    "detuning_Delta",
    "detuning_D",
    "alpha_coefficient",
    "all_energies",
    "spin_down_counts",
]

MAX_LENGTH = 24


@dataclass(frozen=True)
class ChainSpec:
    """Static parameters of an Ising chain in a field gradient.

    Parameters
    ----------
    length : int
        Number of spins ``L``.
    delta_omega : float
        Larmor frequency difference between neighbouring spins (> 0).
    j_coupling : float
        Ising constant ``J`` (>= 0).
    omega0 : float, optional
        Larmor frequency of spin 0. Defaults to ``delta_omega`` so that
        spin k precesses at ``(k + 1) * delta_omega``.
    """

    length: int
    delta_omega: float
    j_coupling: float = 1.0
    omega0: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if int(self.length) != self.length or self.length < 1:
            raise ValueError(f"length must be a positive integer, got {self.length!r}")
        if self.length > MAX_LENGTH:
            raise ValueError(f"length {self.length} exceeds the supported maximum {MAX_LENGTH}")
        if not self.delta_omega > 0:
            raise ValueError(f"delta_omega must be > 0, got {self.delta_omega!r}")
        # J = 0 is allowed for uncoupled reference chains
        if not self.j_coupling >= 0:
            raise ValueError(f"j_coupling must be >= 0, got {self.j_coupling!r}")
        object.__setattr__(self, "length", int(self.length))
        if self.omega0 is None:
            object.__setattr__(self, "omega0", float(self.delta_omega))

    @property
    def dimension(self) -> int:
        return 1 << self.length

    @property
    def larmor(self) -> np.ndarray:
        return self.omega0 + self.delta_omega * np.arange(self.length)

    def with_delta_omega(self, delta_omega: float, keep_omega0: bool = False) -> "ChainSpec":
        """Copy with a new gradient; ``omega0`` follows it unless ``keep_omega0``."""
        return ChainSpec(
            self.length,
            delta_omega,
            self.j_coupling,
            self.omega0 if keep_omega0 else None,
        )


@dataclass(frozen=True, order=True)
class BasisState:
    """Computational basis configuration of ``length`` spins."""

    length: int
    index: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("a basis state needs at least one spin")
        if not 0 <= self.index < (1 << self.length):
            raise ValueError(f"index {self.index} out of range for {self.length} spins")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BasisState":
        """Build from ``b_{L-1}, ..., b_0`` (spin 0 last)."""
        bits = [int(b) for b in bits]
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0 or 1, got {bits}")
        index = 0
        for b in bits:
            index = (index << 1) | b
        return cls(len(bits), index)

    @classmethod
    def from_string(cls, text: str) -> "BasisState":
        """Parse a ket label such as ``"00010"`` or ``"|00010>"``."""
        text = text.strip().strip("|>⟩ ")
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls.from_bits(text)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.index >> k) & 1 for k in reversed(range(self.length)))

    def bit(self, k: int) -> int:
        _check_spin(self.length, k)
        return (self.index >> k) & 1

    def spin_z(self, k: int) -> int:
        """Return ``s_k = +1`` for bit 0 and ``-1`` for bit 1."""
        return 1 - 2 * self.bit(k)

    def flip(self, k: int) -> "BasisState":
        _check_spin(self.length, k)
        return BasisState(self.length, self.index ^ (1 << k))

    def __str__(self):
        return "".join(str(b) for b in self.bits)


def _check_spin(length: int, k: int) -> None:
    if not 0 <= k < length:
        raise IndexError(f"spin index {k} out of range for a chain of {length} spins")


def _check_state(chain: ChainSpec, state: BasisState) -> None:
    if state.length != chain.length:
        raise ValueError(f"state has {state.length} spins, chain has {chain.length}")


def larmor_frequency(chain: ChainSpec, k: int) -> float:
    _check_spin(chain.length, k)
    return chain.omega0 + k * chain.delta_omega


def diagonal_energy(chain: ChainSpec, state: BasisState) -> float:
    """Energy of a basis state under the drive-free Hamiltonian."""
    _check_state(chain, state)
    s = np.array([state.spin_z(k) for k in range(chain.length)], dtype=float)
    zeeman = -0.5 * float(np.dot(chain.larmor, s))
    ising = -0.5 * chain.j_coupling * float(np.dot(s[:-1], s[1:]))
    return zeeman + ising


def flip(state: BasisState, k: int) -> BasisState:
    return state.flip(k)


def _neighbour_field(state: BasisState, k: int) -> int:
    total = 0
    if k > 0:
        total += state.spin_z(k - 1)
    if k < state.length - 1:
        total += state.spin_z(k + 1)
    return total


def transition_frequency(chain: ChainSpec, state: BasisState, k: int) -> float:
    """Energy change ``E(flip(state, k)) - E(state)``.

    A 0 -> 1 flip costs ``omega_k + J * (s_{k-1} + s_{k+1})``; missing
    neighbours of the end spins contribute nothing.
    """
    _check_state(chain, state)
    _check_spin(chain.length, k)
    cost = larmor_frequency(chain, k) + chain.j_coupling * _neighbour_field(state, k)
    return cost if state.bit(k) == 0 else -cost


def detuning_delta(chain: ChainSpec, state_m: BasisState, k: int, nu: float) -> float:
    """Detuning of the driven pair, ``E_p - E_m - nu`` with ``p`` the upper member.

    ``state_m`` may be either member of the pair.
    """
    return abs(transition_frequency(chain, state_m, k)) - nu


def detuning_Delta(chain: ChainSpec, state_i: BasisState, k: int, nu: float) -> float:
    """Detuning ``E_j - E_i - nu`` of the spin-k pair containing ``state_i``."""
    return abs(transition_frequency(chain, state_i, k)) - nu


def _lower_member(chain: ChainSpec, state: BasisState, k: int) -> BasisState:
    return state if transition_frequency(chain, state, k) > 0 else state.flip(k)


def detuning_D(
    chain: ChainSpec, state_m: BasisState, k: int, k_prime: int, nu: float
) -> float:
    """Large detuning of the nonresonant flip of spin ``k_prime``.

    Evaluated as ``E_i - E_m - sign * nu - (delta - Delta) / 2`` where ``m`` is
    the lower member of the driven spin-k pair containing ``state_m``,
    ``i = flip(m, k_prime)``, and ``sign = +1`` when ``E_i > E_m``.
    """
    _check_spin(chain.length, k_prime)
    if k_prime == k:
        raise ValueError("k_prime must differ from the driven spin k")
    m = _lower_member(chain, state_m, k)
    i = m.flip(k_prime)
    gap = transition_frequency(chain, m, k_prime)
    sign = 1.0 if gap > 0 else -1.0
    small = detuning_delta(chain, m, k, nu)
    shifted = detuning_Delta(chain, i, k, nu)
    return gap - sign * nu - 0.5 * (small - shifted)


def alpha_coefficient(
    chain: ChainSpec, state_m: BasisState, k: int, k_prime: int, nu: float | None = None
) -> float:
    """Ising offset ``(|D| - |k - k'| * delta_omega) / J``.

    With ``nu`` left as ``None`` the drive is taken resonant for ``state_m``,
    in which case the result is an integer.
    """
    if nu is None:
        nu = abs(transition_frequency(chain, state_m, k))
    if chain.j_coupling == 0:
        raise ValueError("alpha is undefined for an uncoupled chain")
    d = detuning_D(chain, state_m, k, k_prime, nu)
    return (abs(d) - abs(k - k_prime) * chain.delta_omega) / chain.j_coupling


def spin_down_counts(length: int) -> np.ndarray:
    """Number of 1-bits of every basis index."""
    idx = np.arange(1 << length, dtype=np.int64)
    counts = np.zeros(1 << length, dtype=np.int64)
    for k in range(length):
        counts += (idx >> k) & 1
    return counts


def all_energies(chain: ChainSpec) -> np.ndarray:
    """Diagonal energies of all ``2**L`` basis states, indexed by basis index."""
    idx = np.arange(chain.dimension, dtype=np.int64)
    energies = np.zeros(chain.dimension)
    prev = None
    for k, omega in enumerate(chain.larmor):
        s = 1.0 - 2.0 * ((idx >> k) & 1)
        energies -= 0.5 * omega * s
        if prev is not None:
            energies -= 0.5 * chain.j_coupling * prev * s
        prev = s
    return energies
