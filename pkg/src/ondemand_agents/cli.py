"""Command line entry point: ``ondemand-agents {analyze,fluid,simulate,compare,sweep}``.

Exit codes: 0 ran, 2 input error (nothing written), 1 internal failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

import numpy as np

from . import experiments as ex
from .fluid import FluidConfig, integrate
from .model import (
    CtmcState,
    FluidState,
    ParameterError,
    load_params,
    validate_params,
)
from .simulator import SimConfig, second_half_averages, simulate_replications
from .stability import classify


class InputError(Exception):
    pass


def _triple(text: str, cast):
    parts = text.split(",")
    if len(parts) != 3:
        raise InputError(f"expected three comma-separated values, got {text!r}")
    try:
        return tuple(cast(v) for v in parts)
    except ValueError as exc:
        raise InputError(f"bad state {text!r}: {exc}") from exc


def _params(args, for_simulation=False):
    if not args.params:
        raise InputError("--params is required")
    try:
        p = load_params(args.params)
    except ParameterError as exc:
        raise InputError("; ".join(exc.violations)) from exc
    errors = validate_params(p, for_simulation)
    if errors:
        raise InputError("; ".join(errors))
    return p


def _init(args):
    """Raw or fluid initial state; defaults to the empty raw state."""
    if args.init and args.finit:
        raise InputError("give either --init or --finit, not both")
    if args.finit:
        return FluidState(*_triple(args.finit, float))
    if args.init:
        X, Y, Z = _triple(args.init, int)
        if X < 0 or Z < 0:
            raise InputError("raw init needs X >= 0 and Z >= 0")
        return CtmcState(X, Y, Z)
    return CtmcState(0, 0, 0)


def _fluid_cfg(args):
    try:
        return FluidConfig(dt=args.dt, t_end=args.t_end,
                           conv_tol=args.conv_tol, conv_hold=args.conv_hold)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _sim_cfg(args):
    try:
        return SimConfig(seed=args.seed, t_end=args.t_end,
                         sample_dt=args.sample_dt, replications=args.reps)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _meta(args, p, extra=None):
    meta = {
        "params": p.to_dict(),
        "seed": getattr(args, "seed", None),
        "config": {k: v for k, v in vars(args).items()
                   if k not in ("func", "params", "out")},
        "build": ex.build_description(),
    }
    if extra:
        meta.update(extra)
    return meta


def cmd_analyze(args) -> int:
    p = _params(args)
    print(classify(p).to_json())
    return 0


def cmd_fluid(args) -> int:
    p = _params(args)
    init = _init(args)
    cfg = _fluid_cfg(args)
    _, f0 = ex.matched_inits(init, p)
    if not f0.x >= p.x_min - 1e-12:
        raise InputError(f"initial x = {f0.x} lies below the boundary {p.x_min}")
    traj, verdict = integrate(f0, p, cfg)
    out = _out(args)
    ex.write_fluid_csv(traj, out / "fluid.csv")
    ex.write_json(verdict.to_dict(), out / "fluid_verdict.json")
    print(json.dumps(verdict.to_dict(), indent=2))
    return 0


def cmd_simulate(args) -> int:
    p = _params(args, for_simulation=True)
    init = _init(args)
    cfg = _sim_cfg(args)
    raw, _ = ex.matched_inits(init, p)
    results = simulate_replications(raw, p, cfg, workers=args.workers)
    out = _out(args)
    summary = []
    for rep, res in enumerate(results):
        suffix = "" if cfg.replications == 1 else f"_rep{rep}"
        ex.write_raw_csv(res.trajectory, out / f"sim_raw{suffix}.csv")
        ex.write_scaled_csv(res.trajectory.scaled(p), out / f"sim_scaled{suffix}.csv")
        summary.append({
            "replication": rep,
            "event_counts": res.event_counts,
            "second_half_averages": second_half_averages(res.trajectory),
        })
    ex.write_json(_meta(args, p, {"init": list(raw.as_tuple())}), out / "sim_meta.json")
    ex.write_json({"replications": summary}, out / "sim_summary.json")
    print(json.dumps({"replications": summary}, indent=2))
    return 0


def cmd_compare(args) -> int:
    p = _params(args, for_simulation=True)
    init = _init(args)
    fcfg = _fluid_cfg(args)
    scfg = _sim_cfg(args)
    raw, f0 = ex.matched_inits(init, p)
    if not f0.x >= p.x_min - 1e-12:
        raise InputError(f"initial x = {f0.x} lies below the boundary {p.x_min}")
    results = ex.compare_replications(init, p, fcfg, scfg, workers=args.workers)
    out = _out(args)
    gaps = np.column_stack([r.gap_curve for r in results])
    header = ["t"] + [f"gap_rep{k}" for k in range(len(results))]
    ex.write_rows(out / "compare_gap.csv", header,
                  ([t, *row] for t, row in zip(results[0].times, gaps.tolist())))
    fluid_traj, _ = integrate(f0, p, fcfg)
    ex.write_fluid_csv(fluid_traj, out / "fluid.csv")
    sups = [r.sup_gap for r in results]
    report = {
        "init_raw": list(raw.as_tuple()),
        "init_fluid": list(f0.as_tuple()),
        "mean_sup_gap": float(np.mean(sups)),
        "replications": [r.to_dict() for r in results],
    }
    ex.write_json(report, out / "compare.json")
    ex.write_json(_meta(args, p), out / "compare_meta.json")
    print(json.dumps(report, indent=2))
    return 0


def cmd_sweep(args) -> int:
    p = _params(args)
    if not args.axis or len(args.axis) != 2:
        raise InputError("give exactly two --axis name=start:stop:num")
    try:
        axes = [ex.parse_axis(a) for a in args.axis]
        points = ex.sweep_points(p, axes)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if not points:
        raise InputError("empty sweep grid")
    fcfg = _fluid_cfg(args) if args.fluid else None
    rows = ex.sweep(p, axes, fcfg, workers=args.workers)
    out = _out(args)
    ex.write_sweep_csv(rows, out / "sweep.csv")
    counts = {k: int(sum(bool(r[k]) for r in rows))
              for k in ("valid", "cond_thm2", "cond_thm3", "aminus_hurwitz", "cqlf_exists")}
    print(json.dumps({"points": len(rows), "true_counts": counts}, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="JSON parameter file")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--t-end", type=float, default=100.0, dest="t_end")
    common.add_argument("--dt", type=float, default=1e-3)
    common.add_argument("--sample-dt", type=float, default=0.01, dest="sample_dt")
    common.add_argument("--init", help="raw initial state X,Y,Z")
    common.add_argument("--finit", help="fluid initial state x,y,w (write --finit=-1,0,0 for negatives)")
    common.add_argument("--reps", type=int, default=1)
    common.add_argument("--conv-tol", type=float, default=None, dest="conv_tol")
    common.add_argument("--conv-hold", type=float, default=1.0, dest="conv_hold")
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="ondemand-agents", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in [
        ("analyze", cmd_analyze, "stability classification as JSON"),
        ("fluid", cmd_fluid, "integrate the fluid model"),
        ("simulate", cmd_simulate, "simulate the stochastic system"),
        ("compare", cmd_compare, "fluid model against scaled simulations"),
        ("sweep", cmd_sweep, "stability conditions over a 2-D parameter grid"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        if name == "sweep":
            sp.add_argument("--axis", action="append",
                            help="name=start:stop:num, give twice")
            sp.add_argument("--fluid", action="store_true",
                            help="add the fluid verdict of the standard init battery")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors are input errors too
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
