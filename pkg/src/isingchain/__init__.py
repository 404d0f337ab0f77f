"""Nonresonant pulse errors in an Ising spin-chain quantum computer.

Analytic first-order error model, exact state-vector evolution and
gradient sweeps for a chain driven by rectangular rf pulses.
"""
from .chain import (
    BasisState,
    ChainSpec,
    detuning_D,
    detuning_delta,
    detuning_Delta,
    diagonal_energy,
    flip,
    larmor_frequency,
    transition_frequency,
)
from .exact import (
    ErrorReport,
    StateVector,
    apply_pulse_exact,
    apply_pulse_pairs,
    classify_outcomes,
    load_state,
    save_state,
)
from .nonresonant import (
    check_optimal,
    error_probability,
    forced_pair_amplitudes,
    min_error_estimate,
    pi_pulse_amplitudes,
)
from .sweep import SweepCurve, error_vs_length, find_minima, sweep_error
from .twolevel import (
    PairAmplitudes,
    Pulse,
    effective_rabi,
    evolve_pair,
    pi_pulse_duration,
    rabi_for_2pik,
)

__version__ = "0.1.0"
