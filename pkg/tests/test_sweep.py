import math
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isingchain.chain import BasisState, ChainSpec
from isingchain.nonresonant import check_optimal, error_probability
from isingchain.sweep import (
    SweepCurve,
    center_state,
    curves_from_json,
    curves_to_json,
    error_vs_length,
    find_minima,
    pi_pulse_error,
    random_states,
    ratio_grid,
    read_curves_csv,
    sweep_error,
    write_curves_csv,
)
from isingchain.twolevel import rabi_for_2pik


def test_ratio_grid():
    assert np.allclose(ratio_grid(1.0, 2.0, step=0.25), [1, 1.25, 1.5, 1.75, 2])
    assert ratio_grid(0.0, 1.0, num=11).size == 11
    with pytest.raises(ValueError):
        ratio_grid(0.0, 1.0)
    with pytest.raises(ValueError):
        ratio_grid(0.0, 1.0, num=3, step=0.5)


def test_single_point_grid(l5_state):
    curve = sweep_error(l5_state, 2, 2, [150.0])
    om = rabi_for_2pik(1.0, 2)
    expected = error_probability(ChainSpec(5, 150.0 * om, 1.0), l5_state, 2, om).p_total
    assert curve.values.tolist() == [expected]
    assert curve.metadata["state"] == "00010" and curve.method == "analytic"


def test_sweep_errors(l5_state):
    with pytest.raises(ValueError):
        sweep_error(l5_state, 2, 2, [])
    with pytest.raises(ValueError):
        sweep_error(l5_state, 2, 2, [100.0], method="guess")
    with pytest.raises(ValueError):
        pi_pulse_error(l5_state, 2, 2, 100.0, method="guess")


def test_curve_invariants():
    with pytest.raises(ValueError):
        SweepCurve([1, 1, 2], [0, 0, 0])
    with pytest.raises(ValueError):
        SweepCurve([1, 2], [0, -1e-3])
    with pytest.raises(ValueError):
        SweepCurve([1, 2], [0])


def test_find_minima_basics():
    with pytest.raises(ValueError):
        find_minima(SweepCurve([1, 2], [1, 0]))
    x = np.linspace(0, 5, 30)
    assert find_minima(SweepCurve(x, np.exp(-x))) == []
    assert find_minima(SweepCurve(x, np.exp(x))) == []
    # parabolic refinement recovers the vertex of a sampled parabola
    y = 3.0 * (x - 2.37) ** 2 + 0.5
    (xr, yr), = find_minima(SweepCurve(x, y), refine=True)
    assert xr == pytest.approx(2.37, abs=1e-12) and yr == pytest.approx(0.5, abs=1e-12)
    (xc, _), = find_minima(SweepCurve(x, y))
    assert abs(xc - 2.37) <= x[1] - x[0]


def test_l5_minima_spacing(l5_state):
    # the two distant spins sit two sites away, so minima repeat every unit of ratio
    curve = sweep_error(l5_state, 2, 2, ratio_grid(100.0, 106.0, step=0.01))
    minima = find_minima(curve, refine=True)
    xs = np.array([m[0] for m in minima])
    assert len(xs) == 6
    assert np.allclose(np.diff(xs), 1.0, atol=0.01)
    # located where 2 * ratio + J/Omega is even
    shift = 1.0 - math.sqrt(15) / 4
    assert np.allclose(xs - np.floor(xs), shift, atol=0.01)


def test_minimum_near_194(l5_state):
    curve = sweep_error(l5_state, 2, 2, ratio_grid(193.0, 195.0, step=0.005))
    minima = find_minima(curve, refine=True)
    x, y = min(minima, key=lambda m: abs(m[0] - 194))
    assert y == pytest.approx(2.65e-5, rel=0.05)
    assert check_optimal(round(x / 2) * 2, 2).optimal
    assert abs(x - 194) < 0.05


def test_determinism_and_threads(l5_state):
    grid = ratio_grid(120.0, 121.0, num=21)
    a = sweep_error(l5_state, 2, 2, grid)
    b = sweep_error(l5_state, 2, 2, grid, threads=3)
    assert np.array_equal(a.values, b.values)
    assert random_states(20, 4, 7) == random_states(20, 4, 7)
    assert random_states(20, 4, 7) != random_states(20, 4, 8)


def test_error_vs_length_single(l5_state):
    grid = ratio_grid(100.0, 101.0, num=5)
    (curve,) = error_vs_length([7], 1, grid)
    state, k = center_state(7)
    assert k == 3
    assert np.array_equal(curve.values, sweep_error(state, k, 2, grid).values)
    with pytest.raises(ValueError):
        error_vs_length([2], 1, grid)


def test_same_detuning_multiset_same_error():
    om = rabi_for_2pik(1.0, 2)
    chain = ChainSpec(6, 101.3 * om, 1.0)
    groups = defaultdict(list)
    for idx in range(1 << 6):
        s = BasisState(6, idx)
        for k in range(6):
            b = error_probability(chain, s, k, om)
            key = tuple(
                sorted((abs(kp - k) == 1, round(abs(d), 9)) for kp, d in b.detunings.items())
            )
            groups[key].append(b.p_total)
    shared = [v for v in groups.values() if len(v) > 1]
    assert shared
    for values in shared:
        assert max(values) - min(values) <= 1e-12 * max(values)


def test_csv_and_json_roundtrip(tmp_path, l5_state):
    grid = ratio_grid(100.0, 100.5, num=6)
    a = sweep_error(l5_state, 2, 2, grid)
    b = sweep_error(l5_state, 2, 2, grid, method="exact")
    cfg = {"seed": 3, "units": "J"}
    path = write_curves_csv(tmp_path / "c.csv", [a, b], cfg)
    curves, config = read_curves_csv(path)
    assert config == cfg
    assert np.array_equal(curves["analytic"].values, a.values)
    assert np.array_equal(curves["exact"].axis, b.axis)
    text = curves_to_json([a, b], cfg, {"minima": []})
    back, doc = curves_from_json(text)
    assert doc["config"] == cfg and doc["minima"] == []
    assert np.array_equal(back[1].values, b.values)
    assert back[0].metadata == a.metadata


@settings(deadline=None, max_examples=30)
@given(st.lists(st.floats(0, 1, allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_float_roundtrip(tmp_path_factory, values):
    curve = SweepCurve(np.arange(len(values)) + 0.1, values, {"method": "analytic"})
    path = write_curves_csv(tmp_path_factory.mktemp("csv") / "c.csv", [curve])
    curves, _ = read_curves_csv(path)
    assert np.array_equal(curves["analytic"].values, curve.values)
