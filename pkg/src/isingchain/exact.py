"""Exact state-vector evolution of the driven chain.

Amplitudes ``C_q`` are kept in the interaction picture, where the
Schrodinger state is ``sum_q C_q |q> exp(-i E_q t)``. During a rectangular
pulse the frame rotating at the carrier ``nu`` makes the generator time
independent::

    H_rot = diag(E_q - nu * n_q) - (Omega/2) sum_k (I_k^- e^{-i phi} + h.c.)

with ``n_q`` the number of 1-bits. A pulse therefore maps::

    C(t0 + tau) = e^{i d (t0 + tau)} exp(-i H_rot tau) e^{-i d t0} C(t0)

with ``d = diag(H_rot)``. The exponential is applied either through a cached
dense eigendecomposition (small chains) or a matrix-free Lanczos propagator.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .chain import BasisState, ChainSpec, all_energies, spin_down_counts
from .twolevel import Pulse, pair_propagator

__all__ = [
    "StateVector",
    "ErrorReport",
    "CapacityError",
    "apply_pulse_exact",
    "apply_sequence",
    "apply_pulse_pairs",
    "classify_outcomes",
    "rotating_frame_diagonal",
    "apply_generator",
    "krylov_expm",
    "save_state",
    "load_state",
    "memory_estimate",
]

DENSE_MAX_LENGTH = 11
SNAPSHOT_FORMAT = "isingchain-statevector"


class CapacityError(ValueError):
    """Raised when a chain is too long for the requested evolution path."""


def memory_estimate(length: int) -> int:
    """Rough peak bytes for a Krylov evolution of ``length`` spins (~40 vectors)."""
    return 40 * 16 * (1 << length)


@dataclass(frozen=True)
class StateVector:
    """Interaction-picture amplitudes of all ``2**L`` basis states."""

    amplitudes: np.ndarray
    length: int

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.length,):
            raise ValueError(
                f"expected {1 << self.length} amplitudes for {self.length} spins, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, state: BasisState) -> "StateVector":
        amps = np.zeros(1 << state.length, dtype=complex)
        amps[state.index] = 1.0
        return cls(amps, state.length)

    @classmethod
    def from_pairs(cls, length: int, entries: dict) -> "StateVector":
        """Build from ``{BasisState or index: amplitude}``; the result is normalised."""
        amps = np.zeros(1 << length, dtype=complex)
        for key, value in entries.items():
            amps[key.index if isinstance(key, BasisState) else int(key)] = value
        return cls(amps / np.linalg.norm(amps), length)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __getitem__(self, state):
        idx = state.index if isinstance(state, BasisState) else int(state)
        return self.amplitudes[idx]


def _check_dims(psi: StateVector, chain: ChainSpec) -> None:
    if psi.length != chain.length:
        raise ValueError(f"state vector has {psi.length} spins, chain has {chain.length}")


def rotating_frame_diagonal(chain: ChainSpec, nu: float) -> np.ndarray:
    """Diagonal ``E_q - nu * n_q`` of the rotating-frame generator, centred on zero.

    The constant offset cancels between the propagator and the frame phases.
    """
    d = all_energies(chain) - nu * spin_down_counts(chain.length)
    return d - 0.5 * (d.max() + d.min())


def apply_generator(
    v: np.ndarray, diag: np.ndarray, omega_rabi: float, phase: float, length: int
) -> np.ndarray:
    """Matrix-free product ``H_rot @ v``; each state couples to its L single flips."""
    out = diag * v
    up = -0.5 * omega_rabi * np.exp(-1j * phase)
    down = np.conj(up)
    for k in range(length):
        src = v.reshape(-1, 2, 1 << k)
        dst = out.reshape(-1, 2, 1 << k)
        dst[:, 1, :] += up * src[:, 0, :]
        dst[:, 0, :] += down * src[:, 1, :]
    return out


def _lanczos(apply, v: np.ndarray, m: int):
    n = v.size
    m = min(m, n)
    basis = np.empty((m, n), dtype=complex)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    basis[0] = v
    for j in range(m):
        w = apply(basis[j])
        alpha[j] = np.vdot(basis[j], w).real
        w = w - alpha[j] * basis[j]
        if j > 0:
            w -= beta[j - 1] * basis[j - 1]
        # full reorthogonalisation keeps the 1e-12 budget at m ~ 30
        w -= basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
        beta[j] = np.linalg.norm(w)
        if j + 1 == m or beta[j] < 1e-13:
            return basis[: j + 1], alpha[: j + 1], beta[: j + 1]
        basis[j + 1] = w / beta[j]
    return basis, alpha, beta


def krylov_expm(apply, v: np.ndarray, t: float, m: int = 30, tol: float = 1e-12) -> np.ndarray:
    """``exp(-i H t) v`` for Hermitian ``H`` given as a matrix-free ``apply``.

    Uses restarted Lanczos with adaptive substeps; each step is accepted when
    the a-posteriori error ``beta_m |e_m^T exp(-i T dt) e_1|`` is below
    ``tol * dt / t``.
    """
    v = np.asarray(v, dtype=complex)
    scale = np.linalg.norm(v)
    if scale == 0 or t == 0:
        return v.copy()
    w = v / scale
    done = 0.0
    dt = t
    while done < t:
        basis, alpha, beta = _lanczos(apply, w, m)
        size = alpha.size
        evals, evecs = eigh_tridiagonal(alpha, beta[:-1]) if size > 1 else (alpha, np.ones((1, 1)))
        dt = min(dt, t - done)
        exact_subspace = size < m or beta[-1] < 1e-13
        # the estimate cannot drop below rounding noise of the Lanczos vectors
        floor = 64 * np.finfo(float).eps * beta[-1]
        while True:
            y = evecs @ (np.exp(-1j * evals * dt) * evecs[0].conj())
            err = 0.0 if exact_subspace else beta[-1] * abs(y[-1])
            if err <= max(tol * dt / t, floor) or dt < t * 1e-14:
                break
            dt *= 0.5
        w = basis.T @ y
        w /= np.linalg.norm(w)
        done += dt
        if err < 0.1 * tol * dt / t:
            dt *= 1.5
    return scale * w


@lru_cache(maxsize=4)
def _spectral(chain: ChainSpec, nu: float, omega_rabi: float):
    """Eigen-decomposition of the real generator at zero phase."""
    diag = rotating_frame_diagonal(chain, nu)
    n = chain.dimension
    h = np.diag(diag)
    idx = np.arange(n)
    for k in range(chain.length):
        lower = idx[((idx >> k) & 1) == 0]
        h[lower | (1 << k), lower] = -0.5 * omega_rabi
        h[lower, lower | (1 << k)] = -0.5 * omega_rabi
    evals, evecs = np.linalg.eigh(h)
    return diag, evals, evecs


def apply_pulse_exact(
    psi: StateVector, chain: ChainSpec, pulse: Pulse, method: str = "auto"
) -> StateVector:
    """Evolve ``psi`` exactly through one rectangular pulse.

    ``method`` is ``"dense"`` (cached eigendecomposition, L <= 11),
    ``"krylov"`` (matrix free) or ``"auto"``.
    """
    _check_dims(psi, chain)
    if method == "auto":
        method = "dense" if chain.length <= DENSE_MAX_LENGTH else "krylov"
    t0, tau = pulse.t_start, pulse.duration
    if method == "dense":
        if chain.length > DENSE_MAX_LENGTH:
            raise CapacityError(f"dense evolution supports L <= {DENSE_MAX_LENGTH}, got {chain.length}")
        diag, evals, evecs = _spectral(chain, float(pulse.nu), float(pulse.omega_rabi))
        b = np.exp(-1j * diag * t0) * psi.amplitudes
        # phase gauge: H(phi) = G H(0) G^dagger with G = diag(exp(-i phi n_q))
        gauge = np.exp(-1j * pulse.phase * spin_down_counts(chain.length))
        b = gauge.conj() * b
        b = evecs @ (np.exp(-1j * evals * tau) * (evecs.T @ b))
        b = gauge * b
    elif method == "krylov":
        diag = rotating_frame_diagonal(chain, pulse.nu)
        b = np.exp(-1j * diag * t0) * psi.amplitudes
        apply = lambda v: apply_generator(v, diag, pulse.omega_rabi, pulse.phase, chain.length)
        b = krylov_expm(apply, b, tau)
    else:
        raise ValueError(f"unknown method {method!r}")
    return StateVector(np.exp(1j * diag * (t0 + tau)) * b, chain.length)


def apply_sequence(psi: StateVector, chain: ChainSpec, pulses, method: str = "auto") -> StateVector:
    for pulse in pulses:
        psi = apply_pulse_exact(psi, chain, pulse, method=method)
    return psi


def apply_pulse_pairs(psi: StateVector, chain: ChainSpec, pulse: Pulse, k: int) -> StateVector:
    """Pair approximation: only spin ``k`` responds, each pair with its own detuning."""
    _check_dims(psi, chain)
    if not 0 <= k < chain.length:
        raise IndexError(f"spin index {k} out of range for a chain of {chain.length} spins")
    energies = all_energies(chain)
    idx = np.arange(chain.dimension)
    lower = idx[((idx >> k) & 1) == 0]
    upper = lower | (1 << k)
    delta = energies[upper] - energies[lower] - pulse.nu
    u_ll, u_lu, u_ul, u_uu = pair_propagator(delta, pulse)
    amps = psi.amplitudes
    out = np.empty_like(amps)
    out[lower] = u_ll * amps[lower] + u_lu * amps[upper]
    out[upper] = u_ul * amps[lower] + u_uu * amps[upper]
    return StateVector(out, chain.length)


@dataclass(frozen=True)
class ErrorReport:
    """Outcome probabilities after a pulse meant to flip spin ``k`` of ``initial``.

    ``per_state`` holds ``(state, probability, flipped)`` where ``flipped``
    is the set of spins on which the state differs from the intended outcome.
    """

    initial: BasisState
    k: int
    intended_probability: float
    unwanted_total: float
    per_state: list = field(default_factory=list)

    @property
    def intended(self) -> BasisState:
        return self.initial.flip(self.k)

    def share_within(self, spins) -> float:
        """Unwanted probability carried by states whose flip set lies inside ``spins``."""
        spins = frozenset(spins)
        return math.fsum(p for _, p, fl in self.per_state if fl and fl <= spins)

    def by_flip_set(self) -> dict:
        out: dict = {}
        for _, p, fl in self.per_state:
            if fl:
                out[fl] = out.get(fl, 0.0) + p
        return out

    def top(self, n: int = 10):
        """The ``n`` most probable unwanted outcomes."""
        rows = [r for r in self.per_state if r[2]]
        return sorted(rows, key=lambda r: -r[1])[:n]


def classify_outcomes(psi_after: StateVector, initial: BasisState, k: int) -> ErrorReport:
    if psi_after.length != initial.length:
        raise ValueError("state vector and initial state have different lengths")
    target = initial.flip(k).index
    probs = psi_after.probabilities
    rows = []
    for q, p in enumerate(probs):
        diff = q ^ target
        flipped = frozenset(b for b in range(initial.length) if (diff >> b) & 1)
        rows.append((BasisState(initial.length, q), float(p), flipped))
    intended = float(probs[target])
    # sum of the rest rather than 1 - intended, so it stays non-negative
    unwanted = math.fsum(np.delete(probs, target))
    return ErrorReport(
        initial=initial,
        k=k,
        intended_probability=intended,
        unwanted_total=unwanted,
        per_state=rows,
    )


def save_state(path, psi: StateVector, units: str = "J", metadata: dict | None = None) -> Path:
    """Write a snapshot; ``.npz`` suffix gives the binary form, anything else JSON."""
    path = Path(path)
    header = {
        "format": SNAPSHOT_FORMAT,
        "version": 1,
        "length": psi.length,
        "units": units,
        "metadata": metadata or {},
    }
    if path.suffix == ".npz":
        np.savez(path, amplitudes=psi.amplitudes, header=json.dumps(header))
    else:
        header["amplitudes"] = [[float(a.real), float(a.imag)] for a in psi.amplitudes]
        path.write_text(json.dumps(header))
    return path


def load_state(path) -> tuple[StateVector, dict]:
    """Read a snapshot written by :func:`save_state`; returns ``(psi, header)``."""
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path) as data:
            header = json.loads(str(data["header"]))
            amps = data["amplitudes"]
    else:
        header = json.loads(path.read_text())
        raw = np.asarray(header.pop("amplitudes"), dtype=float)
        amps = raw[:, 0] + 1j * raw[:, 1]
    if header.get("format") != SNAPSHOT_FORMAT:
        raise ValueError(f"{path} is not a state-vector snapshot")
    return StateVector(amps, int(header["length"])), header
