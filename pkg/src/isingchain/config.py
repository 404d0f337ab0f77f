"""YAML run configuration for the command-line tool.

Example::

    units: J
    seed: 7
    chain: {length: 5}
    protocol: {state: "00010", k: 2, K: 2, ratio: 194}
    sweep:
      grid: {start: 100, stop: 104, step: 0.05}
      methods: [analytic, exact]
    output: {dir: out, format: csv}

All frequencies are in units of ``J`` unless ``units: angular`` is given,
in which case ``chain.j_coupling`` must be stated explicitly.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .chain import MAX_LENGTH, BasisState, ChainSpec, transition_frequency
from .twolevel import Pulse, pi_pulse_duration, rabi_for_2pik

UNITS = ("J", "angular")
FORMATS = ("csv", "json")

_SCHEMA = {
    "units": None,
    "seed": None,
    "chain": {"length", "j_coupling", "delta_omega", "omega0"},
    "protocol": {"state", "k", "K", "ratio"},
    "pulses": None,
    "sweep": {"grid", "methods", "lengths", "K_script", "random_states", "refine"},
    "check": {"ratio", "K"},
    "output": {"dir", "format", "prefix", "snapshot"},
}
_PULSE_KEYS = {"nu", "omega_rabi", "phase", "t_start", "duration"}
_GRID_KEYS = {"start", "stop", "step", "num", "values"}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


class CapacityConfigError(ConfigError):
    """Configuration asks for a chain beyond the supported size."""


@dataclass
class RunConfig:
    units: str = "J"
    seed: int = 0
    chain: dict = field(default_factory=dict)
    protocol: dict = field(default_factory=dict)
    pulses: list = field(default_factory=list)
    sweep: dict = field(default_factory=dict)
    check: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        """Plain-dict echo of the configuration with defaults filled in."""
        return copy.deepcopy(
            {
                "units": self.units,
                "seed": self.seed,
                "chain": self.chain,
                "protocol": self.protocol,
                "pulses": self.pulses,
                "sweep": self.sweep,
                "check": self.check,
                "output": self.output,
            }
        )

    # -- derived objects -------------------------------------------------

    @property
    def j_coupling(self) -> float:
        return float(self.chain.get("j_coupling", 1.0))

    def initial_state(self) -> BasisState:
        return BasisState.from_string(self.protocol["state"])

    def driven_spin(self) -> int:
        return int(self.protocol["k"])

    def rabi(self) -> float:
        return rabi_for_2pik(self.j_coupling, int(self.protocol["K"]))

    def build_chain(self) -> ChainSpec:
        length = self.chain.get("length")
        if length is None and "state" in self.protocol:
            length = len(self.protocol["state"])
        d_omega = self.chain.get("delta_omega")
        if "ratio" in self.protocol:
            d_omega = float(self.protocol["ratio"]) * self.rabi()
        if d_omega is None:
            raise ConfigError("chain.delta_omega or protocol.ratio is required")
        return ChainSpec(int(length), float(d_omega), self.j_coupling, self.chain.get("omega0"))

    def build_pulses(self, chain: ChainSpec) -> list[Pulse]:
        if self.pulses:
            return [Pulse(**p) for p in self.pulses]
        omega = self.rabi()
        state, k = self.initial_state(), self.driven_spin()
        nu = abs(transition_frequency(chain, state, k))
        return [Pulse(nu=nu, omega_rabi=omega, duration=pi_pulse_duration(omega))]


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _number(value, path, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        _fail(path, "must be finite")
    if integer and int(value) != value:
        _fail(path, f"expected an integer, got {value!r}")
    if positive and value <= 0:
        _fail(path, f"must be > 0, got {value!r}")
    return int(value) if integer else float(value)


def _section(data, name):
    value = data.get(name, {})
    if not isinstance(value, dict):
        _fail(name, "expected a mapping")
    unknown = set(value) - _SCHEMA[name]
    if unknown:
        _fail(f"{name}.{sorted(unknown)[0]}", "unknown key")
    return dict(value)


def validate(data: dict) -> RunConfig:
    """Check a parsed mapping and return a :class:`RunConfig`."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("<root>: expected a mapping at the top level")
    unknown = set(data) - set(_SCHEMA)
    if unknown:
        _fail(sorted(unknown)[0], "unknown key")

    cfg = RunConfig()
    cfg.units = data.get("units", "J")
    if cfg.units not in UNITS:
        _fail("units", f"expected one of {UNITS}, got {cfg.units!r}")
    cfg.seed = _number(data.get("seed", 0), "seed", integer=True)

    chain = _section(data, "chain")
    if "length" in chain:
        chain["length"] = _number(chain["length"], "chain.length", positive=True, integer=True)
        if chain["length"] > MAX_LENGTH:
            raise CapacityConfigError(
                f"chain.length: {chain['length']} spins exceeds the capacity of {MAX_LENGTH}"
            )
    if "j_coupling" in chain:
        chain["j_coupling"] = _number(chain["j_coupling"], "chain.j_coupling", positive=True)
        if cfg.units == "J" and chain["j_coupling"] != 1.0:
            _fail("chain.j_coupling", "must be 1 when units is J")
    elif cfg.units == "angular":
        _fail("chain.j_coupling", "required when units is angular")
    for key in ("delta_omega", "omega0"):
        if key in chain:
            chain[key] = _number(chain[key], f"chain.{key}", positive=key == "delta_omega")
    cfg.chain = chain

    protocol = _section(data, "protocol")
    if "state" in protocol:
        try:
            protocol["state"] = str(BasisState.from_string(str(protocol["state"])))
        except ValueError as exc:
            _fail("protocol.state", str(exc))
        if "length" in chain and len(protocol["state"]) != chain["length"]:
            _fail("protocol.state", f"has {len(protocol['state'])} bits but chain.length is {chain['length']}")
        if len(protocol["state"]) > MAX_LENGTH:
            raise CapacityConfigError(f"protocol.state: {len(protocol['state'])} spins exceeds the capacity of {MAX_LENGTH}")
    if "k" in protocol:
        protocol["k"] = _number(protocol["k"], "protocol.k", integer=True)
        n = len(protocol.get("state", "")) or chain.get("length")
        if protocol["k"] < 0 or (n and protocol["k"] >= n):
            _fail("protocol.k", f"spin index {protocol['k']} outside the chain")
    if "K" in protocol:
        protocol["K"] = _number(protocol["K"], "protocol.K", positive=True, integer=True)
    if "ratio" in protocol:
        protocol["ratio"] = _number(protocol["ratio"], "protocol.ratio", positive=True)
    cfg.protocol = protocol

    pulses = data.get("pulses", [])
    if not isinstance(pulses, list):
        _fail("pulses", "expected a list of pulse mappings")
    for i, p in enumerate(pulses):
        if not isinstance(p, dict):
            _fail(f"pulses[{i}]", "expected a mapping")
        unknown = set(p) - _PULSE_KEYS
        if unknown:
            _fail(f"pulses[{i}].{sorted(unknown)[0]}", "unknown key")
        for req in ("nu", "omega_rabi"):
            if req not in p:
                _fail(f"pulses[{i}].{req}", "required")
        for key in p:
            p[key] = _number(p[key], f"pulses[{i}].{key}", positive=key in ("omega_rabi", "duration"))
    cfg.pulses = [dict(p) for p in pulses]

    sweep = _section(data, "sweep")
    if "grid" in sweep:
        grid = sweep["grid"]
        if not isinstance(grid, dict):
            _fail("sweep.grid", "expected a mapping")
        unknown = set(grid) - _GRID_KEYS
        if unknown:
            _fail(f"sweep.grid.{sorted(unknown)[0]}", "unknown key")
        if "values" in grid:
            if not isinstance(grid["values"], list):
                _fail("sweep.grid.values", "expected a list")
            grid["values"] = [_number(v, "sweep.grid.values", positive=True) for v in grid["values"]]
        else:
            for key in ("start", "stop"):
                if key not in grid:
                    _fail(f"sweep.grid.{key}", "required")
                grid[key] = _number(grid[key], f"sweep.grid.{key}", positive=True)
            if ("step" in grid) == ("num" in grid):
                _fail("sweep.grid", "give exactly one of step and num")
            if "step" in grid:
                grid["step"] = _number(grid["step"], "sweep.grid.step", positive=True)
            else:
                grid["num"] = _number(grid["num"], "sweep.grid.num", integer=True)
            if grid["stop"] < grid["start"]:
                _fail("sweep.grid.stop", "must not be below start")
        sweep["grid"] = dict(grid)
    methods = sweep.get("methods", ["analytic"])
    if not isinstance(methods, list) or not methods or any(m not in ("analytic", "exact") for m in methods):
        _fail("sweep.methods", f"expected a non-empty list drawn from analytic, exact; got {methods!r}")
    sweep["methods"] = list(methods)
    if "lengths" in sweep:
        if not isinstance(sweep["lengths"], list) or not sweep["lengths"]:
            _fail("sweep.lengths", "expected a non-empty list")
        sweep["lengths"] = [_number(v, "sweep.lengths", integer=True) for v in sweep["lengths"]]
        if min(sweep["lengths"]) < 3:
            _fail("sweep.lengths", "every length must be >= 3")
        if max(sweep["lengths"]) > MAX_LENGTH:
            raise CapacityConfigError(f"sweep.lengths: {max(sweep['lengths'])} spins exceeds the capacity of {MAX_LENGTH}")
        sweep["K_script"] = _number(sweep.get("K_script", 1), "sweep.K_script", positive=True, integer=True)
    if "random_states" in sweep:
        sweep["random_states"] = _number(sweep["random_states"], "sweep.random_states", integer=True)
    sweep["refine"] = bool(sweep.get("refine", False))
    cfg.sweep = sweep

    check = _section(data, "check")
    if "ratio" in check:
        check["ratio"] = _number(check["ratio"], "check.ratio", positive=True)
    if "K" in check:
        check["K"] = _number(check["K"], "check.K", positive=True, integer=True)
    cfg.check = check

    output = _section(data, "output")
    output.setdefault("dir", "out")
    output.setdefault("format", "csv")
    output.setdefault("prefix", "run")
    output["snapshot"] = bool(output.get("snapshot", False))
    if output["format"] not in FORMATS:
        _fail("output.format", f"expected one of {FORMATS}, got {output['format']!r}")
    output["dir"] = str(output["dir"])
    cfg.output = output
    return cfg


def load_config(path) -> RunConfig:
    """Parse and validate a YAML file; parse errors report line and column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"{path}: {where}: {exc.problem}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return validate(data)


def require(cfg: RunConfig, section: str, *keys: str) -> None:
    block = getattr(cfg, section)
    for key in keys:
        if key not in block:
            raise ConfigError(f"{section}.{key}: required for this command")
