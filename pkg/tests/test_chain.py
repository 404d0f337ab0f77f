import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isingchain.chain import (
    BasisState,
    ChainSpec,
    alpha_coefficient,
    all_energies,
    detuning_D,
    detuning_Delta,
    detuning_delta,
    diagonal_energy,
    flip,
    larmor_frequency,
    transition_frequency,
)
from isingchain.oracle import dense_generator
from isingchain.twolevel import Pulse

DW = 7.0  # generic gradient, in units of J


def test_larmor_frequency():
    chain = ChainSpec(5, DW, 1.0)
    assert larmor_frequency(chain, 0) == chain.omega0 == DW
    assert larmor_frequency(chain, 2) == 3 * DW
    assert larmor_frequency(ChainSpec(8, 5.0, 1.0, omega0=0.0), 7) == 35.0
    with pytest.raises(IndexError):
        larmor_frequency(chain, 5)


def test_chain_validation():
    for bad in (dict(length=0, delta_omega=1.0), dict(length=3, delta_omega=0.0), dict(length=3, delta_omega=1.0, j_coupling=-1.0)):
        with pytest.raises(ValueError):
            ChainSpec(**bad)
    with pytest.raises(ValueError):
        ChainSpec(25, 1.0)


def test_diagonal_energy_hand_values():
    chain = ChainSpec(2, 1.0, 1.0, omega0=10.0)
    assert diagonal_energy(chain, BasisState.from_string("00")) == pytest.approx(-11.0)
    assert diagonal_energy(chain, BasisState.from_string("11")) == pytest.approx(10.0)


def test_energies_match_kronecker_hamiltonian(rng):
    # independent path: diagonal of the explicitly assembled spin Hamiltonian
    for L in (1, 3, 5):
        chain = ChainSpec(L, 2.3, 0.7, omega0=1.1)
        _, h0 = dense_generator(chain, Pulse(nu=1.0, omega_rabi=1.0))
        assert np.allclose(all_energies(chain), h0, atol=1e-12)
        for idx in rng.integers(0, 1 << L, 5):
            assert diagonal_energy(chain, BasisState(L, int(idx))) == pytest.approx(h0[idx], abs=1e-12)


def test_flip_examples():
    assert flip(BasisState.from_string("00000"), 2) == BasisState.from_string("00100")
    assert flip(BasisState.from_string("00100"), 2) == BasisState.from_string("00000")
    assert str(flip(BasisState.from_string("11010111001"), 5)) == "11010011001"
    with pytest.raises(IndexError):
        flip(BasisState.from_string("000"), 3)


def test_basis_state_parsing():
    s = BasisState.from_string("|00010>")
    assert s.index == 2 and s.length == 5 and s.bits == (0, 0, 0, 1, 0)
    assert s.spin_z(1) == -1 and s.spin_z(0) == 1
    with pytest.raises(ValueError):
        BasisState.from_string("0120")


def test_transition_frequency_reference_states():
    chain = ChainSpec(5, DW, 1.0)
    m = BasisState.from_string("00010")
    # flipping spin 2 with opposite neighbours costs exactly omega_2 = 3 dw
    assert transition_frequency(chain, m, 2) == pytest.approx(3 * DW)
    p = m.flip(2)
    assert diagonal_energy(chain, p) - diagonal_energy(chain, m) == pytest.approx(3 * DW)
    i = BasisState.from_string("01010")
    assert transition_frequency(chain, i, 2) == pytest.approx(3 * DW - 2.0)


def test_detunings_reference_example():
    chain = ChainSpec(5, DW, 1.0)
    m = BasisState.from_string("00010")
    nu = 3 * DW
    assert detuning_delta(chain, m, 2, nu) == pytest.approx(0.0)
    assert detuning_delta(chain, m.flip(2), 2, nu) == pytest.approx(0.0)
    # Delta for each flipped k'
    assert detuning_Delta(chain, m.flip(3), 2, nu) == pytest.approx(-2.0)
    assert detuning_Delta(chain, m.flip(0), 2, nu) == pytest.approx(0.0)
    assert detuning_Delta(chain, m.flip(1), 2, nu) == pytest.approx(2.0)
    assert detuning_Delta(chain, m.flip(4), 2, nu) == pytest.approx(0.0)
    # large detunings D_k'
    expected = {0: -2 * DW - 1, 1: DW - 1, 3: DW + 1, 4: 2 * DW + 1}
    for kp, value in expected.items():
        assert detuning_D(chain, m, 2, kp, nu) == pytest.approx(value)
    with pytest.raises(ValueError):
        detuning_D(chain, m, 2, 2, nu)


def test_near_resonant_delta_is_two_j():
    chain = ChainSpec(3, 50.0, 1.0)
    nu = larmor_frequency(chain, 1)
    assert detuning_delta(chain, BasisState.from_string("000"), 1, nu) == pytest.approx(2.0)
    assert detuning_delta(chain, BasisState.from_string("101"), 1, nu) == pytest.approx(-2.0)


def _states(max_len=8):
    return st.integers(2, max_len).flatmap(
        lambda L: st.tuples(st.just(L), st.integers(0, (1 << L) - 1), st.integers(0, L - 1))
    )


@given(_states())
def test_energy_sum_rule(case):
    L, idx, k = case
    chain = ChainSpec(L, 3.7, 0.9, omega0=2.1)
    s = BasisState(L, idx)
    gap = diagonal_energy(chain, s.flip(k)) - diagonal_energy(chain, s)
    assert gap == pytest.approx(transition_frequency(chain, s, k), rel=1e-12, abs=1e-12)
    assert transition_frequency(chain, s.flip(k), k) == -transition_frequency(chain, s, k)


@given(_states(12))
def test_flip_involution_and_index_roundtrip(case):
    L, idx, k = case
    s = BasisState(L, idx)
    assert s.flip(k).flip(k) == s
    assert BasisState.from_bits(s.bits) == s
    assert BasisState.from_string(str(s)) == s


def test_neighbour_locality():
    chain = ChainSpec(7, 40.0, 1.0)
    for idx in range(1 << 7):
        s = BasisState(7, idx)
        for k in range(7):
            nu = abs(transition_frequency(chain, s, k)) + 0.3
            for kp in range(7):
                if abs(kp - k) > 1:
                    assert detuning_Delta(chain, s.flip(kp), k, nu) == pytest.approx(
                        detuning_delta(chain, s, k, nu)
                    )


def test_alpha_is_integer_and_bounded():
    # exhaustive: the Ising offset of |D| is an integer multiple of J with |alpha| <= 4
    seen = set()
    for L in range(2, 9):
        chain = ChainSpec(L, 100.0, 1.0)
        for idx in range(1 << L):
            s = BasisState(L, idx)
            for k, kp in itertools.permutations(range(L), 2):
                a = alpha_coefficient(chain, s, k, kp)
                assert a == pytest.approx(round(a), abs=1e-9)
                assert abs(round(a)) <= 4
                seen.add(int(round(a)))
    # offsets beyond +-2 do occur
    assert {-4, -3, 3, 4} <= seen


def test_alpha_reference_example():
    chain = ChainSpec(5, 100.0, 1.0)
    m = BasisState.from_string("00010")
    assert [alpha_coefficient(chain, m, 2, kp) for kp in (0, 1, 3, 4)] == pytest.approx([1, -1, 1, 1])
