"""Batch front door.

One subcommand per library capability; every run validates its merged
configuration against the shipped JSON schema, then writes a JSON report
(embedding the config hash and library version) plus plot-ready CSVs.

Exit codes: 0 success, 2 configuration/validation failure, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import importlib.metadata
import importlib.resources
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, circle_dtn, kernels
from . import operator as operator_mod, rearrange as rearrange_mod
# `energy` and `minimize` name both a submodule and a function, so pull the
# callables in directly instead of importing the submodules
from .energy import (Nonlinearity, benjamin_ono_type, double_well,
                     polynomial_nonlinearity, power_constraint)
from .energy import energy as energy_fn
from .minimize import MinimizeConfig, max_principle_probe
from .minimize import minimize as run_minimize
from .errors import NonlocError
from .grids import PeriodicFunction, PeriodicGrid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _version() -> str:
    try:
        return importlib.metadata.version("nonlocper")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def load_schema() -> dict:
    ref = importlib.resources.files("nonlocper").joinpath("config_schema.json")
    return json.loads(ref.read_text())


def config_hash(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()).hexdigest()


def validate_config(config: dict) -> None:
    import jsonschema

    jsonschema.validate(config, load_schema())


def read_function_csv(path: str, grid: PeriodicGrid) -> PeriodicFunction:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    samples = data[:, 1] if data.shape[1] >= 2 else data[:, 0]
    if samples.size != grid.size:
        raise NonlocError(
            f"function CSV has {samples.size} samples, grid needs {grid.size}")
    return PeriodicFunction(grid, samples)


def write_csv(path: Path, header: str, columns) -> None:
    arr = np.column_stack(columns)
    np.savetxt(path, arr, delimiter=",", header=header, comments="")


def write_function_csv(path: Path, u: PeriodicFunction) -> None:
    write_csv(path, "x,u", (u.grid.nodes, u.samples))


def build_kernel(config: dict) -> kernels.Kernel:
    return kernels.kernel_from_spec(config["kernel"])


def build_grid(config: dict) -> PeriodicGrid:
    g = config["grid"]
    return PeriodicGrid(float(g["L"]), int(g["N"]))


def build_nonlinearity(config: dict) -> Nonlinearity:
    spec = config.get("nonlinearity", {"name": "benjamin_ono", "p": 2})
    name = spec.get("name", "polynomial")
    if name == "benjamin_ono":
        return benjamin_ono_type(spec.get("p", 2.0))
    if name == "double_well":
        return double_well()
    if name == "power":
        return power_constraint(spec["p"])
    return polynomial_nonlinearity(
        spec.get("G_coeffs", [0.0]), spec.get("Gt_coeffs"))


def resolve_seed(config: dict) -> int:
    env = os.environ.get("NONLOC_SEED")
    if env is not None:
        return int(env)
    return int(config.get("seed", 0))


def cmd_symbol(config: dict, out: Path) -> dict:
    grid = build_grid(config)
    kern = build_kernel(config)
    tol = config.get("tolerances", {}).get("symbol", 1e-9)
    sym = operator_mod.symbol_of_kernel(kern, grid, tol=tol)
    ks = np.arange(grid.size // 2 + 1)
    write_csv(out / "symbol.csv", "k,xi,ell",
              (ks, grid.frequencies(), sym.values))
    return {"provenance": sym.provenance,
            "bounds_hold": operator_mod.symbol_bounds_hold(sym, kern),
            "csv": "symbol.csv"}


def cmd_apply(config: dict, out: Path) -> dict:
    grid = build_grid(config)
    kern = build_kernel(config)
    u = read_function_csv(config["function"], grid)
    mode = config.get("mode", "spectral")
    if mode == "spectral":
        sym = operator_mod.symbol_of_kernel(kern, grid)
        result = operator_mod.apply_spectral(sym, u)
    else:
        result = operator_mod.apply_pv_grid(kern, u)
    write_function_csv(out / "applied.csv", result)
    return {"mode": mode, "csv": "applied.csv"}


def cmd_energy(config: dict, out: Path) -> dict:
    grid = build_grid(config)
    kern = build_kernel(config)
    u = read_function_csv(config["function"], grid)
    nl = build_nonlinearity(config)
    sym = operator_mod.symbol_of_kernel(kern, grid)
    rep = energy_fn(u, sym, nl)
    return rep.to_dict()


def cmd_rearrange(config: dict, out: Path) -> dict:
    grid = build_grid(config)
    u = read_function_csv(config["function"], grid)
    write_function_csv(out / "rearranged.csv", rearrange_mod.rearrange_periodic(u))
    return {"csv": "rearranged.csv"}


def cmd_polya_szego(config: dict, out: Path) -> dict:
    grid = build_grid(config)
    kern = build_kernel(config)
    u = read_function_csv(config["function"], grid)
    return rearrange_mod.polya_szego_check(kern, u).to_dict()


def cmd_riesz(config: dict, out: Path) -> dict:
    grid = build_grid(config)
    fns = config.get("functions")
    if fns:
        f = read_function_csv(fns["f"], grid)
        g = read_function_csv(fns["g"], grid)
        h = read_function_csv(fns["h"], grid)
    else:
        rng = np.random.default_rng(resolve_seed(config))
        f = PeriodicFunction(grid, rng.uniform(0, 1, grid.size))
        h = PeriodicFunction(grid, rng.uniform(0, 1, grid.size))
        g = PeriodicFunction.from_callable(
            grid, lambda x: 1.0 + np.cos(np.pi * x / grid.half_period))
    return rearrange_mod.riesz_circle_check(f, g, h)


def cmd_minimize(config: dict, out: Path) -> dict:
    grid = build_grid(config)
    kern = build_kernel(config)
    nl = build_nonlinearity(config)
    sym = operator_mod.symbol_of_kernel(kern, grid)
    seed = resolve_seed(config)
    rng = np.random.default_rng(seed)
    base = 1.0 + np.cos(np.pi * grid.nodes / grid.half_period)
    noise = rng.standard_normal(grid.size) * 0.1
    initial = PeriodicFunction(grid, base + noise)
    cfg = MinimizeConfig(
        sym=sym, nl=nl, initial=initial, c=config.get("constraint"),
        grad_tol=config.get("tolerances", {}).get("grad", 1e-8),
        max_iters=config.get("max_iters", 50000))
    result = run_minimize(cfg)
    if not result.converged:
        raise NonlocError(
            f"descent did not reach grad_tol within {cfg.max_iters} iterations")
    write_function_csv(out / "minimizer.csv", result.u)
    write_csv(out / "energy_trace.csv", "iteration,energy",
              (np.arange(result.energy_trace.size), result.energy_trace))
    payload = result.to_dict()
    payload.update({"seed": seed, "profile_csv": "minimizer.csv",
                    "trace_csv": "energy_trace.csv"})
    return payload


def cmd_maxprinciple(config: dict, out: Path) -> dict:
    grid = build_grid(config)
    kern = build_kernel(config)
    L = grid.half_period
    if "function" in config:
        v = read_function_csv(config["function"], grid)
    else:
        v = PeriodicFunction.from_callable(
            grid, lambda x: -np.sin(2 * np.pi * x / L) ** 2 * np.sin(np.pi * x / L))
    x0 = config.get("x0", L / 2)
    value = max_principle_probe(kern, v, x0)
    return {"x0": x0, "value": value, "strictly_positive": bool(value > 0)}


def cmd_regularity(config: dict, out: Path) -> dict:
    return analysis.regularity_verdict(config["s"], config["beta"]).to_dict()


def cmd_kernel_class(config: dict, out: Path) -> dict:
    kern = build_kernel(config)
    L = config.get("kernel", {}).get("L", math.pi)
    rep = kernels.classify_kernel(kern, L=L)
    return {"convex": rep.convex, "convexity_margin": rep.convexity_margin,
            "wrapped_monotone": rep.wrapped_monotone,
            "monotonicity_margin": rep.monotonicity_margin,
            "laplace_consistent": rep.laplace_consistent,
            "laplace_error": rep.laplace_error,
            "sqrt_profile_cm": rep.sqrt_profile_cm, "notes": rep.notes}


def cmd_dtn_check(config: dict, out: Path) -> dict:
    n = config.get("grid", {}).get("N", 64)
    grid = circle_dtn.circle_grid(n)
    u = PeriodicFunction.from_callable(
        grid, lambda x: np.cos(x) + 0.5 * np.sin(2 * x))
    mult = circle_dtn.dtn_multiplier(u)
    poisson = circle_dtn.dtn_poisson(u)
    probes = np.linspace(-math.pi, math.pi, 9)[:-1]
    pv_defect = max(abs(circle_dtn.half_lap_pv_circle(u, x) - mult.eval(x))
                    for x in probes)
    gaps = [circle_dtn.wrapped_identity_check(t)["gap"]
            for t in np.linspace(0.1, 2 * math.pi - 0.1, 16)]
    eid = circle_dtn.energy_identity_check(u)
    return {"poisson_vs_multiplier": float(np.max(np.abs(poisson.samples
                                                         - mult.samples))),
            "pv_vs_multiplier": pv_defect,
            "wrapped_identity_worst_gap": max(gaps),
            "energy_identity": eid,
            "energy_spread": max(eid.values()) - min(eid.values())}


COMMANDS = {
    "symbol": cmd_symbol,
    "apply": cmd_apply,
    "energy": cmd_energy,
    "rearrange": cmd_rearrange,
    "polya-szego": cmd_polya_szego,
    "riesz": cmd_riesz,
    "minimize": cmd_minimize,
    "maxprinciple": cmd_maxprinciple,
    "regularity": cmd_regularity,
    "kernel-class": cmd_kernel_class,
    "dtn-check": cmd_dtn_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocper",
        description="Periodic 1-D nonlocal operators: symbols, energies, "
                    "rearrangement checks, constrained minimization.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--kernel", help="kernel family")
        p.add_argument("--s", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--n", type=int, help="kernel dimension parameter")
        p.add_argument("--a", type=float, help="kernel core width")
        p.add_argument("--cutoff", type=float, help="indicator kernel cutoff")
        p.add_argument("--L", type=float, help="half period")
        p.add_argument("--N", type=int, help="grid size (power of two)")
        p.add_argument("--function", help="input samples CSV (x,u)")
        p.add_argument("--mode", choices=["spectral", "pv"])
        p.add_argument("--constraint", type=float)
        p.add_argument("--x0", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--max-iters", type=int, dest="max_iters")
    return parser


def merge_config(args: argparse.Namespace) -> dict:
    config: dict = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    config["command"] = args.command
    if args.kernel is not None or args.cutoff is not None:
        kspec = config.setdefault("kernel", {})
        if args.kernel is not None:
            kspec["family"] = args.kernel
        for key in ("s", "n", "a", "cutoff"):
            val = getattr(args, key)
            if val is not None:
                kspec[key] = val
    if args.command == "regularity":
        if args.s is not None:
            config["s"] = args.s
        if args.beta is not None:
            config["beta"] = args.beta
    if args.L is not None or args.N is not None:
        gspec = config.setdefault("grid", {})
        if args.L is not None:
            gspec["L"] = args.L
        if args.N is not None:
            gspec["N"] = args.N
        if args.command == "dtn-check":  # the circle has half period pi
            gspec.setdefault("L", math.pi)
    for key in ("function", "mode", "constraint", "x0", "seed", "max_iters"):
        val = getattr(args, key)
        if val is not None:
            config[key] = val
    if args.jobs != 1:
        config["jobs"] = args.jobs
    return config


def run(config: dict, out_dir: str = ".") -> int:
    """Validate, dispatch, and write the report; returns the exit code."""
    try:
        validate_config(config)
    except Exception as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        payload = COMMANDS[config["command"]](config, out)
    except NonlocError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    report = {"command": config["command"],
              "version": _version(),
              "config_hash": config_hash(config),
              "timestamp": datetime.datetime.now(
                  datetime.timezone.utc).isoformat(),
              "result": payload}
    path = out / f"{config['command']}_report.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True,
                               default=_json_default) + "\n")
    print(json.dumps(report["result"], indent=2, sort_keys=True,
                     default=_json_default))
    return EXIT_OK


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = merge_config(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config, args.out)


if __name__ == "__main__":
    sys.exit(main())
