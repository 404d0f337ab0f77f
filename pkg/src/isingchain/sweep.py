"""Sweeps of the pi-pulse error over the gradient ratio ``delta_omega / Omega``."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .chain import BasisState, ChainSpec, transition_frequency
from .exact import StateVector, apply_pulse_exact, classify_outcomes
from .nonresonant import error_probability
from .twolevel import Pulse, pi_pulse_duration, rabi_for_2pik

__all__ = [
    "SweepCurve",
    "METHODS",
    "ratio_grid",
    "pi_pulse_error",
    "sweep_error",
    "find_minima",
    "error_vs_length",
    "random_states",
    "center_state",
    "write_curves_csv",
    "read_curves_csv",
    "curves_to_json",
    "curves_from_json",
]

METHODS = ("analytic", "exact")


@dataclass
class SweepCurve:
    axis: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis = np.asarray(self.axis, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.axis.shape != self.values.shape or self.axis.ndim != 1:
            raise ValueError("axis and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.axis) <= 0):
            raise ValueError("axis must be strictly increasing")
        if np.any(self.values < 0):
            raise ValueError("probabilities must be non-negative")

    @property
    def method(self) -> str:
        return self.metadata.get("method", "analytic")

    def to_dict(self) -> dict:
        return {
            "axis": self.axis.tolist(),
            "values": self.values.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepCurve":
        return cls(data["axis"], data["values"], dict(data.get("metadata", {})))


def ratio_grid(start: float, stop: float, num: int | None = None, step: float | None = None) -> np.ndarray:
    """Inclusive grid of ``delta_omega / Omega`` values, by count or by step."""
    if (num is None) == (step is None):
        raise ValueError("give exactly one of num and step")
    if step is not None:
        num = int(round((stop - start) / step)) + 1
    return np.linspace(start, stop, num)


def pi_pulse_error(
    state_m: BasisState,
    k: int,
    K: int,
    ratio: float,
    j_coupling: float = 1.0,
    method: str = "analytic",
    omega0: float | None = None,
) -> float:
    """Unwanted probability after a resonant pi pulse on spin ``k`` at one gradient."""
    omega = rabi_for_2pik(j_coupling, K)
    chain = ChainSpec(state_m.length, ratio * omega, j_coupling, omega0)
    if method == "analytic":
        return error_probability(chain, state_m, k, omega).p_total
    if method == "exact":
        nu = abs(transition_frequency(chain, state_m, k))
        pulse = Pulse(nu=nu, omega_rabi=omega, duration=pi_pulse_duration(omega))
        psi = apply_pulse_exact(StateVector.basis(state_m), chain, pulse)
        return classify_outcomes(psi, state_m, k).unwanted_total
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def sweep_error(
    state_m: BasisState,
    k: int,
    K: int,
    ratios: Sequence[float],
    j_coupling: float = 1.0,
    method: str = "analytic",
    omega0: float | None = None,
    threads: int = 1,
) -> SweepCurve:
    """Error of a resonant pi pulse on spin ``k`` across a grid of gradient ratios.

    The Rabi frequency is fixed by the 2 pi K condition and ``delta_omega``
    follows each grid value.
    """
    ratios = np.asarray(ratios, dtype=float)
    if ratios.size == 0:
        raise ValueError("the ratio grid is empty")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")

    def point(r):
        return pi_pulse_error(state_m, k, K, r, j_coupling, method, omega0)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(point, ratios))
    else:
        values = [point(r) for r in ratios]
    meta = {
        "length": state_m.length,
        "k": k,
        "K": K,
        "state": str(state_m),
        "method": method,
        "j_coupling": j_coupling,
        "omega0": omega0,
    }
    return SweepCurve(ratios, values, meta)


def find_minima(curve: SweepCurve, refine: bool = False) -> list[tuple[float, float]]:
    """Interior local minima of a sampled curve.

    A plateau counts once, at its first point. With ``refine`` the location
    and value come from the parabola through the minimum and its neighbours.
    """
    x, y = curve.axis, curve.values
    if x.size < 3:
        raise ValueError("need at least 3 grid points to locate minima")
    out = []
    for i in range(1, x.size - 1):
        if not (y[i] < y[i - 1] and y[i] <= y[i + 1]):
            continue
        if refine:
            out.append(_parabola_vertex(x[i - 1 : i + 2], y[i - 1 : i + 2]))
        else:
            out.append((float(x[i]), float(y[i])))
    return out


def _parabola_vertex(x, y):
    a, b, c = np.polyfit(x, y, 2)
    if a <= 0:
        return float(x[1]), float(y[1])
    xv = -b / (2 * a)
    return float(xv), float(max(c - b * b / (4 * a), 0.0))


def center_state(length: int) -> tuple[BasisState, int]:
    """All-zero register with the driven spin in the middle of the chain."""
    return BasisState(length, 0), length // 2


def error_vs_length(
    lengths: Sequence[int],
    K_script: int,
    ratios: Sequence[float],
    j_coupling: float = 1.0,
    method: str = "analytic",
    state_factory=center_state,
    threads: int = 1,
) -> list[SweepCurve]:
    """One sweep per chain length with the driven spin at the centre, ``K = 2 K_script``."""
    curves = []
    for length in lengths:
        if length < 3:
            raise ValueError(f"chain length must be >= 3, got {length}")
        state, k = state_factory(length)
        curves.append(
            sweep_error(state, k, 2 * K_script, ratios, j_coupling, method, threads=threads)
        )
    return curves


def random_states(length: int, count: int, seed: int) -> list[BasisState]:
    """Reproducible random registers from ``numpy.random.default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    return [BasisState(length, int(i)) for i in rng.integers(0, 1 << length, size=count)]


def write_curves_csv(path, curves: Sequence[SweepCurve], config: dict | None = None) -> Path:
    """Write ``ratio,value,method`` rows with 17 significant digits.

    A leading ``#`` line carries the resolved configuration as JSON.
    """
    path = Path(path)
    buf = io.StringIO()
    if config is not None:
        buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ratio", "value", "method"])
    for curve in curves:
        for x, y in zip(curve.axis, curve.values):
            writer.writerow([f"{x:.17g}", f"{y:.17g}", curve.method])
    path.write_text(buf.getvalue())
    return path


def read_curves_csv(path) -> tuple[dict[str, SweepCurve], dict | None]:
    config = None
    rows: dict[str, tuple[list, list]] = {}
    lines = Path(path).read_text().splitlines()
    if lines and lines[0].startswith("# config: "):
        config = json.loads(lines.pop(0)[len("# config: ") :])
    for row in csv.DictReader(lines):
        xs, ys = rows.setdefault(row["method"], ([], []))
        xs.append(float(row["ratio"]))
        ys.append(float(row["value"]))
    curves = {m: SweepCurve(xs, ys, {"method": m}) for m, (xs, ys) in rows.items()}
    return curves, config


def curves_to_json(curves: Sequence[SweepCurve], config: dict | None = None, extra: dict | None = None) -> str:
    doc = {"config": config, "curves": [c.to_dict() for c in curves]}
    doc.update(extra or {})
    return json.dumps(doc, indent=1)


def curves_from_json(text: str) -> tuple[list[SweepCurve], dict]:
    doc = json.loads(text)
    return [SweepCurve.from_dict(c) for c in doc["curves"]], doc
