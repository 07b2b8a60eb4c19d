"""Command-line front end.

Subcommands mirror the library workflow: inspect channel capacities, build
a lattice for a noise level, evaluate its analytic bounds, and measure its
block-error rate by simulation.  Exit codes: 0 on success, 2 on a
configuration problem (bad arguments, unreadable files), 3 when no feasible
design exists at the requested operating point.
"""

import argparse
import json
import math
import sys

from .bounds import epsilon_terms, top_level_block_error, union_bound
from .channel import Mod2AwgnChannel, level_sigma, partition_capacity
from .lattice import (
    ConstructionDLattice,
    InfeasibleDesignError,
    design_lattice,
    log2_volume,
    verify_nested,
    vnr_db,
)
from .polar import code_error_bound, evolve_metrics
from .quantize import QuantizationConfig, bms_capacity, discretize_channel
from .sim import TrialConfig, emit_report, single_record, sweep_vnr

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive real")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return value


def _vnr_list(text: str) -> list[float]:
    try:
        points = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad VNR list {text!r}") from exc
    if not points:
        raise argparse.ArgumentTypeError("VNR list is empty")
    return points


def _load_lattice(path: str) -> ConstructionDLattice:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read lattice file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    try:
        return ConstructionDLattice.from_jsonable(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path} is not a lattice descriptor: {exc}") from exc


def _cmd_capacity(args) -> int:
    total = 0.0
    print(f"sigma={args.sigma:g}  levels={args.levels}")
    for level in range(1, args.levels + 1):
        sig_l = level_sigma(level, args.sigma)
        cap = partition_capacity(level, args.sigma)
        total += cap
        line = f"level {level}: sigma={sig_l:.6g} capacity={cap:.6f}"
        if args.K is not None:
            cfg = QuantizationConfig(intervals=args.K)
            quantized = bms_capacity(discretize_channel(Mod2AwgnChannel(sig_l), cfg))
            line += f" quantized={quantized:.6f} gap={cap - quantized:.3e}"
        print(line)
    print(f"sum={total:.6f}")
    return EXIT_OK


def _cmd_construct(args) -> int:
    design = design_lattice(sigma=args.sigma, target_pe=args.target_pe, n=args.n)
    lattice = design.lattice
    payload = lattice.to_jsonable()
    payload["design"] = {
        "sigma": design.sigma,
        "target_pe": design.target_pe,
        "level_error_bounds": [l.error_bound for l in design.levels],
        "top_error_bound": design.top_error_bound,
        "total_bound": design.total_bound,
        "vnr_db": vnr_db(lattice, design.sigma),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    ks = [code.k for code in lattice.codes]
    print(f"n={lattice.n} r={lattice.r} k={ks} log2_volume={log2_volume(lattice):g}")
    print(f"vnr={vnr_db(lattice, design.sigma):.4f} dB  "
          f"total_bound={design.total_bound:.3e}  target={design.target_pe:g}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_bounds(args) -> int:
    lattice = _load_lattice(args.lattice)
    nesting = verify_nested(lattice)
    config = QuantizationConfig(intervals=args.K) if args.K else QuantizationConfig()
    level_bounds = []
    levels = []
    for lvl, code in enumerate(lattice.codes, start=1):
        sig_l = level_sigma(lvl, args.sigma)
        cap = partition_capacity(lvl, args.sigma)
        if code.k == 0:
            bound = 0.0
        else:
            metrics = evolve_metrics(
                discretize_channel(Mod2AwgnChannel(sig_l), config), code.m, config.mu
            )
            bound = code_error_bound(code, metrics)
        level_bounds.append(bound)
        levels.append(
            {
                "level": lvl,
                "sigma": sig_l,
                "capacity": cap,
                "k": code.k,
                "rate": code.rate,
                "error_bound": bound,
            }
        )
    top = top_level_block_error(
        level_sigma(lattice.r, args.sigma), lattice.n, 1.0
    ).union
    eps = epsilon_terms(args.sigma, lattice.r, [code.rate for code in lattice.codes])
    report = {
        "n": lattice.n,
        "r": lattice.r,
        "sigma": args.sigma,
        "nested": nesting.ok,
        "log2_volume": log2_volume(lattice),
        "vnr_db": vnr_db(lattice, args.sigma),
        "epsilon": eps.to_jsonable(),
        "levels": levels,
        "top_error_bound": top,
        "union_bound_pe": union_bound(level_bounds, top),
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _trial_config(args, target: str) -> TrialConfig:
    return TrialConfig(
        seed=args.seed,
        max_trials=args.max_trials,
        min_errors=args.min_errors,
        sigma=getattr(args, "sigma", None),
        target=target,
    )


def _cmd_simulate(args) -> int:
    lattice = _load_lattice(args.lattice)
    config = _trial_config(args, target=args.lattice)
    record = single_record(lattice, args.sigma, config)
    emit_report([record], args.format, args.out)
    res = record.result
    print(f"vnr={record.vnr_db:.4f} dB sigma={args.sigma:g} trials={res.trials} "
          f"errors={res.errors} pe={res.pe_hat:.4e} "
          f"ci95=({res.ci95[0]:.4e}, {res.ci95[1]:.4e})")
    if res.level_errors is not None:
        print(f"first-error attribution by level: {list(res.level_errors)}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    lattice = _load_lattice(args.lattice)
    config = _trial_config(args, target=args.lattice)
    records = sweep_vnr(lattice, args.vnr_db, config)
    emit_report(records, args.format, args.out)
    for rec in records:
        res = rec.result
        print(f"vnr={rec.vnr_db:g} dB sigma={rec.sigma:.6g} trials={res.trials} "
              f"errors={res.errors} pe={res.pe_hat:.4e}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarlattice",
        description="Construct, bound, and simulate multilevel polar-coded lattices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cap = sub.add_parser("capacity", help="per-level channel capacities")
    p_cap.add_argument("--sigma", type=_positive_float, required=True)
    p_cap.add_argument("--levels", type=_positive_int, default=3)
    p_cap.add_argument("--K", type=_positive_int, default=None,
                       help="also report the K-cell quantized capacity")
    p_cap.set_defaults(fn=_cmd_capacity)

    p_con = sub.add_parser("construct", help="design a lattice for a noise level")
    p_con.add_argument("--sigma", type=_positive_float, required=True)
    p_con.add_argument("--n", type=_positive_int, required=True)
    p_con.add_argument("--target-pe", type=_positive_float, required=True)
    p_con.add_argument("--out", required=True)
    p_con.set_defaults(fn=_cmd_construct)

    p_bnd = sub.add_parser("bounds", help="analytic bounds for a stored lattice")
    p_bnd.add_argument("--lattice", required=True)
    p_bnd.add_argument("--sigma", type=_positive_float, required=True)
    p_bnd.add_argument("--K", type=_positive_int, default=None)
    p_bnd.set_defaults(fn=_cmd_bounds)

    p_sim = sub.add_parser("simulate", help="Monte Carlo run at one noise level")
    p_sim.add_argument("--lattice", required=True)
    p_sim.add_argument("--sigma", type=_positive_float, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--max-trials", type=_positive_int, default=10_000)
    p_sim.add_argument("--min-errors", type=_positive_int, default=100)
    p_sim.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(fn=_cmd_simulate)

    p_swp = sub.add_parser("sweep", help="Monte Carlo runs across VNR points")
    p_swp.add_argument("--lattice", required=True)
    p_swp.add_argument("--vnr-db", type=_vnr_list, required=True,
                       help="comma-separated VNR points in dB")
    p_swp.add_argument("--seed", type=int, default=0)
    p_swp.add_argument("--max-trials", type=_positive_int, default=10_000)
    p_swp.add_argument("--min-errors", type=_positive_int, default=100)
    p_swp.add_argument("--format", choices=("csv", "json"), default="csv")
    p_swp.add_argument("--out", required=True)
    p_swp.set_defaults(fn=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InfeasibleDesignError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
