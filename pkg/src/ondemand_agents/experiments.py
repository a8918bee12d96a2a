"""Experiment plumbing: bundled example parameter sets, fluid-vs-simulation comparison, sweeps."""
from __future__ import annotations

import csv
import itertools
import json
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import stability
from .fluid import FluidConfig, FluidVerdict, VerdictKind, integrate
from .model import (
    CtmcState,
    FluidState,
    ModelParams,
    Trajectory,
    check_params,
    scale_center,
    unscale,
    validate_params,
    z_from_yw,
)
from .simulator import SimConfig, second_half_averages, simulate_detailed

SWEEP_AXES = ("alpha", "beta", "mu", "gamma", "epsilon")


def _ex(alpha, beta, mu, gamma, epsilon):
    return ModelParams(lam=1.0, alpha=alpha, beta=beta, mu=mu, gamma=gamma,
                       epsilon=epsilon, r=1000.0)


#: the numerical examples, all with Lambda = 1000 (lam = 1, r = 1000)
EXAMPLES: dict[str, ModelParams] = {
    "example1": _ex(0.7, 1.0, 1.0, 2.0, 1.5),
    "example2": _ex(0.5, 3.0, 2.0, 1.0, 1.4),
    "example3_alpha0.1": _ex(0.1, 1.0, 2.0, 2.0, 0.19),
    "example3_alpha0.4": _ex(0.4, 1.0, 2.0, 2.0, 0.19),
    "example3_alpha0.6": _ex(0.6, 1.0, 2.0, 2.0, 0.19),
    "example3_alpha0.9": _ex(0.9, 1.0, 2.0, 2.0, 0.19),
    "example4": _ex(0.5, 1.0, 2.0, 2.0, 3.0),
    "example5a": _ex(0.5, 0.05, 0.5, 1.0, 1.0),
    "example5b": _ex(0.9, 0.05, 0.5, 1.0, 1.0),
}

#: raw initial states (X, Y, Z) plotted for each example
EXAMPLE_INITS: dict[str, list[CtmcState]] = {
    "example1": [CtmcState(0, 0, 0), CtmcState(0, -1000, 0)],
    "example2": [CtmcState(2000, 0, 1000), CtmcState(0, 2000, 0)],
    "example3_alpha0.1": [CtmcState(0, 1000, 500)],
    "example3_alpha0.4": [CtmcState(0, 1000, 500)],
    "example3_alpha0.6": [CtmcState(0, 1000, 500)],
    "example3_alpha0.9": [CtmcState(0, 1000, 500)],
    "example4": [CtmcState(0, 1000, 500), CtmcState(0, -1000, 0)],
    "example5a": [CtmcState(500, 1000, 500)],
    "example5b": [CtmcState(500, 1000, 500)],
}

DATA_DIR = Path(__file__).parent / "data"


def example_params_path(name: str) -> Path:
    return DATA_DIR / f"{name}.json"


@dataclass
class ExperimentSpec:
    params: ModelParams
    inits: list
    fluid_cfg: FluidConfig = field(default_factory=FluidConfig)
    sim_cfg: SimConfig = field(default_factory=SimConfig)
    outputs: Optional[Path] = None

    def __post_init__(self):
        if not self.inits:
            raise ValueError("an experiment needs at least one initial state")


@dataclass
class ComparisonResult:
    sup_gap: float
    times: np.ndarray
    gap_curve: np.ndarray
    fluid_verdict: FluidVerdict
    sim_summary: dict

    def to_dict(self) -> dict:
        return {
            "sup_gap": self.sup_gap,
            "fluid_verdict": self.fluid_verdict.to_dict(),
            "sim_summary": self.sim_summary,
        }


def matched_inits(init: Union[CtmcState, FluidState], p: ModelParams):
    """``(raw, fluid)`` pair describing the same starting point."""
    if isinstance(init, CtmcState):
        return init, scale_center(init, p)
    return unscale(init, p), init


def fluid_on_grid(fluid: Trajectory, times: np.ndarray) -> np.ndarray:
    return np.column_stack([np.interp(times, fluid.times, fluid.states[:, i])
                            for i in range(3)])


def gap_curve(sim_scaled: Trajectory, fluid: Trajectory) -> np.ndarray:
    """Euclidean distance between the scaled simulation and the fluid path on the sim grid."""
    return np.linalg.norm(sim_scaled.states - fluid_on_grid(fluid, sim_scaled.times), axis=1)


def compare(init: Union[CtmcState, FluidState], p: ModelParams,
            fluid_cfg: FluidConfig, sim_cfg: SimConfig, replication: int = 0,
            fluid: Optional[tuple] = None, validate: bool = True) -> ComparisonResult:
    """Run the fluid model and one simulation replication from matched initial states.

    The simulation horizon is the fluid horizon ``fluid_cfg.t_end``.
    """
    raw, f0 = matched_inits(init, p)
    if fluid is None:
        fluid = integrate(f0, p, fluid_cfg)
    traj, verdict = fluid
    cfg = SimConfig(seed=sim_cfg.seed, t_end=fluid_cfg.t_end,
                    sample_dt=sim_cfg.sample_dt, replications=1)
    sim = simulate_detailed(raw, p, cfg, replication, validate=validate)
    scaled = sim.trajectory.scaled(p)
    gaps = gap_curve(scaled, traj)
    summary = {
        "replication": replication,
        "seed": sim_cfg.seed,
        "event_counts": sim.event_counts,
        "second_half_averages": second_half_averages(sim.trajectory),
    }
    return ComparisonResult(float(gaps.max()), scaled.times, gaps, verdict, summary)


def _compare_job(args):
    return compare(*args)


def compare_replications(init, p: ModelParams, fluid_cfg: FluidConfig,
                         sim_cfg: SimConfig, workers: int = 1) -> list[ComparisonResult]:
    """One :class:`ComparisonResult` per replication, sharing a single fluid run."""
    _, f0 = matched_inits(init, p)
    fluid = integrate(f0, p, fluid_cfg)
    jobs = [(init, p, fluid_cfg, sim_cfg, rep, fluid)
            for rep in range(sim_cfg.replications)]
    if workers <= 1 or len(jobs) == 1:
        return [_compare_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_compare_job, jobs))


# ---------------------------------------------------------------- sweeps

def parse_axis(text: str) -> tuple[str, np.ndarray]:
    """Parse ``name=start:stop:num`` into an inclusive linspace."""
    try:
        name, spec = text.split("=", 1)
        start, stop, num = spec.split(":")
        values = np.linspace(float(start), float(stop), int(num))
    except ValueError as exc:
        raise ValueError(f"bad axis {text!r}, expected name=start:stop:num") from exc
    name = name.strip()
    if name not in SWEEP_AXES:
        raise ValueError(f"axis {name!r} not one of {', '.join(SWEEP_AXES)}")
    return name, values


def sweep_points(base: ModelParams, axes: Sequence[tuple[str, np.ndarray]]) -> list[ModelParams]:
    if len(axes) != 2:
        raise ValueError("a sweep needs exactly two axes")
    if axes[0][0] == axes[1][0]:
        raise ValueError("sweep axes must differ")
    (n1, v1), (n2, v2) = axes
    return [base.replace(**{n1: float(a), n2: float(b)})
            for a, b in itertools.product(v1, v2)]


def fluid_battery(p: ModelParams) -> list[FluidState]:
    """Scaled images of the raw states ``(0,0,0)`` and ``(0, +-r, 0)``."""
    r = int(round(p.r))
    return [scale_center(CtmcState(0, y, 0), p) for y in (0, r, -r)]


def battery_verdict(p: ModelParams, cfg: FluidConfig) -> str:
    for f0 in fluid_battery(p):
        _, v = integrate(f0, p, cfg)
        if v.kind is not VerdictKind.CONVERGED:
            return v.kind.value
    return VerdictKind.CONVERGED.value


SWEEP_COLUMNS = ("alpha", "beta", "mu", "gamma", "epsilon", "valid", "cond_thm2",
                 "cond_thm3", "aminus_hurwitz", "cqlf_exists")


def sweep_row(p: ModelParams, fluid_cfg: Optional[FluidConfig] = None) -> dict:
    row = {k: getattr(p, k) for k in SWEEP_AXES}
    ok = not validate_params(p)
    row["valid"] = ok
    if ok:
        rep = stability.classify(p)
        row.update(cond_thm2=rep.cond_thm2, cond_thm3=rep.cond_thm3,
                   aminus_hurwitz=rep.aminus_hurwitz, cqlf_exists=rep.cqlf_exists)
    else:
        row.update(cond_thm2=None, cond_thm3=None, aminus_hurwitz=None, cqlf_exists=None)
    if fluid_cfg is not None:
        row["fluid_verdict"] = battery_verdict(p, fluid_cfg) if ok else None
    return row


def _sweep_job(args):
    return sweep_row(*args)


def sweep(base: ModelParams, axes, fluid_cfg: Optional[FluidConfig] = None,
          workers: int = 1) -> list[dict]:
    points = sweep_points(base, axes)
    if not points:
        raise ValueError("empty sweep grid")
    jobs = [(p, fluid_cfg) for p in points]
    if workers <= 1:
        return [_sweep_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_job, jobs, chunksize=64))


# ---------------------------------------------------------------- output

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_fluid_csv(traj: Trajectory, path: Path) -> None:
    rows = ((t, x, y, w, z_from_yw(y, w)) for t, (x, y, w) in
            zip(traj.times, traj.states.tolist()))
    write_rows(path, ("t", "x", "y", "w", "z"), rows)


def write_raw_csv(traj: Trajectory, path: Path) -> None:
    rows = ((t, X, Y, Z, abs(Y) + 2 * Z) for t, (X, Y, Z) in
            zip(traj.times, traj.states.tolist()))
    write_rows(path, ("t", "X", "Y", "Z", "W"), rows)


def write_scaled_csv(traj: Trajectory, path: Path) -> None:
    rows = ((t, x, y, w) for t, (x, y, w) in zip(traj.times, traj.states.tolist()))
    write_rows(path, ("t", "x", "y", "w"), rows)


def write_sweep_csv(rows: list[dict], path: Path) -> None:
    header = list(SWEEP_COLUMNS)
    if rows and "fluid_verdict" in rows[0]:
        header.append("fluid_verdict")
    write_rows(path, header, ([r[h] for h in header] for r in rows))


def write_json(obj, path: Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def build_description() -> str:
    """``git describe`` of the source tree, or the package version."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=Path(__file__).parent, capture_output=True,
                             text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    from . import __version__
    return __version__


def write_example_param_files(directory: Path = DATA_DIR) -> list[Path]:
    """(Re)write the bundled example parameter files."""
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, p in EXAMPLES.items():
        check_params(p, for_simulation=True)
        path = directory / f"{name}.json"
        path.write_text(json.dumps(p.to_dict(), indent=2) + "\n", encoding="utf-8")
        paths.append(path)
    return paths
