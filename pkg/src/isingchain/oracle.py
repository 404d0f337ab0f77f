"""Brute-force reference propagator built from explicit spin operators.

Assembles the full lab-frame Hamiltonian pieces with Kronecker products and
exponentiates the rotating-frame generator with ``scipy.linalg.expm``. It
shares no code with :mod:`isingchain.exact` beyond the data types, so the two
can check each other. Intended for L <= 10.
"""
from functools import reduce

import numpy as np
from scipy.linalg import expm

from .chain import ChainSpec
from .exact import CapacityError, StateVector
from .twolevel import Pulse

ORACLE_MAX_LENGTH = 10

_SZ = np.diag([0.5, -0.5])
_SMINUS = np.array([[0.0, 0.0], [1.0, 0.0]])  # bit 0 -> bit 1
_ID = np.eye(2)


def _site(op, k, length):
    # spin 0 is the least significant bit, i.e. the rightmost Kronecker factor
    factors = [op if site == k else _ID for site in reversed(range(length))]
    return reduce(np.kron, factors)


def dense_generator(chain: ChainSpec, pulse: Pulse) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(H_rot, h0_diagonal)`` as explicit matrices/arrays."""
    L = chain.length
    if L > ORACLE_MAX_LENGTH:
        raise CapacityError(f"dense oracle supports L <= {ORACLE_MAX_LENGTH}, got {L}")
    sz = [_site(_SZ, k, L) for k in range(L)]
    h0 = sum(-(chain.omega0 + k * chain.delta_omega) * sz[k] for k in range(L))
    h0 = h0 + sum(-2.0 * chain.j_coupling * sz[k] @ sz[k + 1] for k in range(L - 1))
    # nu * n_q with n_q = sum_k (1/2 - I_k^z)
    number = sum(0.5 * np.eye(1 << L) - sz[k] for k in range(L))
    drive = sum(
        np.exp(-1j * pulse.phase) * _site(_SMINUS, k, L) for k in range(L)
    )
    drive = -0.5 * pulse.omega_rabi * (drive + drive.conj().T)
    h_rot = h0 - pulse.nu * number + drive
    return h_rot, np.real(np.diag(h0))


def apply_pulse_oracle(psi: StateVector, chain: ChainSpec, pulse: Pulse) -> StateVector:
    h_rot, _ = dense_generator(chain, pulse)
    d = np.real(np.diag(h_rot))
    shift = 0.5 * (d.max() + d.min())
    h_rot = h_rot - shift * np.eye(len(d))
    d = d - shift
    t0, tau = pulse.t_start, pulse.duration
    b = np.exp(-1j * d * t0) * psi.amplitudes
    b = expm(-1j * tau * h_rot) @ b
    return StateVector(np.exp(1j * d * (t0 + tau)) * b, chain.length)
