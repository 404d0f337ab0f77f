"""Command-line front end: ``isingchain {simulate,sweep,check,oracle}``.

Exit codes: 0 success, 1 oracle mismatch, 2 configuration error,
3 capacity error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import CapacityConfigError, ConfigError, RunConfig, load_config, require, validate
from .exact import CapacityError, StateVector, apply_pulse_exact, classify_outcomes, save_state
from .nonresonant import chain_alphas, check_optimal, error_probability
from .sweep import (
    error_vs_length,
    find_minima,
    random_states,
    ratio_grid,
    sweep_error,
    curves_to_json,
    write_curves_csv,
)

log = logging.getLogger("isingchain")

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3
ORACLE_TOL = 1e-10


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output["dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _stem(cfg: RunConfig, name: str) -> Path:
    return _out_dir(cfg) / f"{cfg.output['prefix']}_{name}"


def _write_json(path: Path, doc: dict) -> Path:
    path.write_text(json.dumps(doc, indent=1))
    return path


def cmd_simulate(cfg: RunConfig, args) -> int:
    require(cfg, "protocol", "state", "k")
    if not cfg.pulses:
        require(cfg, "protocol", "K")
    chain = cfg.build_chain()
    state, k = cfg.initial_state(), cfg.driven_spin()
    pulses = cfg.build_pulses(chain)
    psi = StateVector.basis(state)
    for pulse in pulses:
        psi = apply_pulse_exact(psi, chain, pulse)
    report = classify_outcomes(psi, state, k)
    resolved = cfg.resolved()
    rows = [
        {"state": str(s), "probability": p, "flipped": sorted(fl)}
        for s, p, fl in sorted(report.per_state, key=lambda r: -r[1])
    ]
    if cfg.output["format"] == "json":
        path = _write_json(
            _stem(cfg, "report.json"),
            {
                "config": resolved,
                "intended_state": str(report.intended),
                "intended_probability": report.intended_probability,
                "unwanted_total": report.unwanted_total,
                "per_state": rows,
            },
        )
    else:
        path = _stem(cfg, "report.csv")
        with path.open("w", newline="") as fh:
            fh.write("# config: " + json.dumps(resolved, sort_keys=True) + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["state", "probability", "flipped"])
            for r in rows:
                writer.writerow([r["state"], f"{r['probability']:.17g}", ";".join(map(str, r["flipped"]))])
    if cfg.output["snapshot"]:
        save_state(_stem(cfg, "state.json"), psi, units=cfg.units, metadata={"config": resolved})
    print(f"intended {report.intended}: {report.intended_probability:.12g}")
    print(f"unwanted total: {report.unwanted_total:.6e}")
    for s, p, fl in report.top(5):
        print(f"  {s}  {p:.3e}  flipped {sorted(fl)}")
    print(f"wrote {path}")
    return EXIT_OK


def _grid(cfg: RunConfig) -> np.ndarray:
    require(cfg, "sweep", "grid")
    grid = cfg.sweep["grid"]
    if "values" in grid:
        return np.asarray(sorted(grid["values"]), dtype=float)
    return ratio_grid(grid["start"], grid["stop"], num=grid.get("num"), step=grid.get("step"))


def cmd_sweep(cfg: RunConfig, args) -> int:
    grid = _grid(cfg)
    if grid.size == 0:
        raise ConfigError("sweep.grid: the grid is empty")
    threads = args.threads
    methods = cfg.sweep["methods"]
    groups: dict[str, list] = {}
    if "lengths" in cfg.sweep:
        for method in methods:
            for curve in error_vs_length(
                cfg.sweep["lengths"], cfg.sweep["K_script"], grid, cfg.j_coupling, method, threads=threads
            ):
                groups.setdefault(f"L{curve.metadata['length']}", []).append(curve)
    else:
        require(cfg, "protocol", "state", "k", "K")
        state, k, K = cfg.initial_state(), cfg.driven_spin(), int(cfg.protocol["K"])
        states = [("main", state)]
        n_random = cfg.sweep.get("random_states", 0)
        states += [(f"random{i}", s) for i, s in enumerate(random_states(state.length, n_random, cfg.seed))]
        for label, s in states:
            for method in methods:
                curve = sweep_error(s, k, K, grid, cfg.j_coupling, method, cfg.chain.get("omega0"), threads)
                curve.metadata["seed"] = cfg.seed
                groups.setdefault(label, []).append(curve)

    resolved = cfg.resolved()
    minima = []
    for label, curves in groups.items():
        for curve in curves:
            if curve.axis.size >= 3:
                for x, y in find_minima(curve, refine=cfg.sweep["refine"]):
                    minima.append({"curve": label, "method": curve.method, "state": curve.metadata["state"], "ratio": x, "value": y})

    written = []
    if cfg.output["format"] == "json":
        doc_curves = [c for cs in groups.values() for c in cs]
        written.append(_stem(cfg, "sweep.json"))
        written[-1].write_text(curves_to_json(doc_curves, resolved, {"minima": minima}))
    else:
        for label, curves in groups.items():
            written.append(write_curves_csv(_stem(cfg, f"{label}.csv"), curves, resolved))
        path = _stem(cfg, "minima.csv")
        with path.open("w", newline="") as fh:
            fh.write("# config: " + json.dumps(resolved, sort_keys=True) + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["curve", "method", "state", "ratio", "value"])
            for m in minima:
                writer.writerow([m["curve"], m["method"], m["state"], f"{m['ratio']:.17g}", f"{m['value']:.17g}"])
        written.append(path)
    for label, curves in groups.items():
        for c in curves:
            print(f"{label} [{c.method}] state {c.metadata['state']}: min {c.values.min():.4e} at ratio {c.axis[c.values.argmin()]:.6g}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_check(cfg: RunConfig, args) -> int:
    ratio = args.ratio if args.ratio is not None else cfg.check.get("ratio", cfg.protocol.get("ratio"))
    K = args.K if args.K is not None else cfg.check.get("K", cfg.protocol.get("K"))
    if ratio is None or K is None:
        raise ConfigError("check.ratio and check.K (or --ratio/--K) are required")
    result = check_optimal(ratio, K)
    print(result.summary())
    doc = {
        "config": cfg.resolved(),
        "optimal": result.optimal,
        "ratio": result.ratio,
        "K": result.K,
        "Q": result.Q,
        "K_script": result.K_script,
        "nearest_ratio": result.nearest_ratio,
        "notes": list(result.notes),
    }
    if {"state", "k", "K"} <= set(cfg.protocol):
        # Ising offsets and approximate detunings for the configured register
        state, k = cfg.initial_state(), cfg.driven_spin()
        chain = cfg.build_chain() if ("ratio" in cfg.protocol or "delta_omega" in cfg.chain) else None
        if chain is not None:
            alphas = chain_alphas(chain, state, k)
            doc["detunings"] = {
                str(off): {"alpha": a, "approx_D_over_Omega": result.approx_detuning(off, a)}
                for off, a in sorted(alphas.items())
            }
            budget = error_probability(chain, state, k, cfg.rabi())
            doc["p_total"] = budget.p_total
            print(f"analytic error at this point: {budget.p_total:.4e}")
    if args.out is not None:
        path = _write_json(_stem(cfg, "check.json"), doc)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, args) -> int:
    from .oracle import ORACLE_MAX_LENGTH, apply_pulse_oracle

    require(cfg, "protocol", "state", "k")
    if not cfg.pulses:
        require(cfg, "protocol", "K")
    chain = cfg.build_chain()
    if chain.length > ORACLE_MAX_LENGTH:
        raise CapacityError(f"the dense oracle supports L <= {ORACLE_MAX_LENGTH}, got {chain.length}")
    psi_a = psi_b = StateVector.basis(cfg.initial_state())
    for pulse in cfg.build_pulses(chain):
        psi_a = apply_pulse_exact(psi_a, chain, pulse)
        psi_b = apply_pulse_oracle(psi_b, chain, pulse)
    diff = float(np.max(np.abs(psi_a.amplitudes - psi_b.amplitudes)))
    ok = diff <= ORACLE_TOL
    print(f"max amplitude difference exact vs dense expm: {diff:.3e} ({'ok' if ok else 'MISMATCH'})")
    return EXIT_OK if ok else EXIT_MISMATCH


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "check": cmd_check,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isingchain",
        description="Nonresonant error analysis for a driven Ising spin chain.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="YAML run configuration")
    parser.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format (overrides output.format)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    parser.add_argument("--seed", type=int, help="seed for random registers (overrides seed)")
    parser.add_argument("--ratio", type=float, help="check: delta_omega / Omega")
    parser.add_argument("--K", type=int, help="check: 2 pi K index")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        if args.config is not None:
            cfg = load_config(args.config)
        elif args.command == "check":
            cfg = validate({})
        else:
            raise ConfigError("--config is required for this command")
        if args.out is not None:
            cfg.output["dir"] = str(args.out)
        if args.format is not None:
            cfg.output["format"] = args.format
        if args.seed is not None:
            cfg.seed = args.seed
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        return COMMANDS[args.command](cfg, args)
    except (CapacityConfigError, CapacityError) as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, ValueError, IndexError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
