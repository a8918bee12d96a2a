"""Fluid-limit dynamics with the reflecting boundary on ``x``."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import FluidState, ModelParams, Trajectory

BOUNDARY_TOL = 1e-12
DIVERGENCE_FACTOR = 1e6


class BoundaryViolation(ValueError):
    """State lies below the reflecting boundary ``x_min``."""


class VerdictKind(str, enum.Enum):
    CONVERGED = "ConvergedToOrigin"
    NOT_CONVERGED = "NotConvergedWithinHorizon"
    DIVERGED = "Diverged"


@dataclass(frozen=True)
class FluidConfig:
    dt: float = 1e-3
    t_end: float = 100.0
    conv_tol: Optional[float] = None  # None -> 1e-4 * (1 + |init|)
    conv_hold: float = 1.0

    def __post_init__(self):
        if not self.dt > 0 or not self.t_end > 0:
            raise ValueError("dt and t_end must be positive")
        if self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")
        if self.conv_tol is not None and not self.conv_tol > 0:
            raise ValueError("conv_tol must be positive")
        if not self.conv_hold >= 0:
            raise ValueError("conv_hold must be nonnegative")

    def tolerance_for(self, init_norm: float) -> float:
        if self.conv_tol is not None:
            return self.conv_tol
        return 1e-4 * (1.0 + init_norm)


@dataclass(frozen=True)
class FluidVerdict:
    kind: VerdictKind
    time: Optional[float]
    final_state: FluidState
    min_norm: float
    hit_boundary: bool

    @property
    def converged(self) -> bool:
        return self.kind is VerdictKind.CONVERGED

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "time": self.time,
            "final_state": {"x": self.final_state.x, "y": self.final_state.y,
                            "w": self.final_state.w},
            "min_norm": self.min_norm,
            "hit_boundary": self.hit_boundary,
        }


def _interior(x, y, w, beta, half_am, half_a2m, gamma, eps):
    busy = w - abs(y)
    dy = beta * x + half_am * busy
    dw = beta * x + half_a2m * busy
    return -gamma * dy - eps * y, dy, dw


def _constants(p: ModelParams):
    return (p.beta, 0.5 * p.alpha * p.mu, 0.5 * (p.alpha - 2.0) * p.mu,
            p.gamma, p.epsilon)


def rhs_interior(s: FluidState, p: ModelParams) -> tuple[float, float, float]:
    """Right-hand side of the boundary-free switched system."""
    return _interior(s.x, s.y, s.w, *_constants(p))


def rhs_with_boundary(s: FluidState, p: ModelParams) -> tuple[float, float, float]:
    """Right-hand side including the reflection at ``x = x_min``."""
    x_min = p.x_min
    if s.x < x_min - BOUNDARY_TOL:
        raise BoundaryViolation(f"x = {s.x} is below the boundary {x_min}")
    dx, dy, dw = rhs_interior(s, p)
    if s.x <= x_min + BOUNDARY_TOL:
        dx = max(dx, 0.0)
    return dx, dy, dw


def integrate(init: FluidState, p: ModelParams,
              cfg: FluidConfig = FluidConfig()) -> tuple[Trajectory, FluidVerdict]:
    """Fourth-order Runge-Kutta with projection onto ``x >= x_min`` after every step.

    Every step is recorded.  Integration stops early if the state becomes
    non-finite or leaves the divergence ball.
    """
    x_min = p.x_min
    if init.x < x_min - BOUNDARY_TOL:
        raise BoundaryViolation(f"initial x = {init.x} is below the boundary {x_min}")
    consts = _constants(p)
    dt = cfg.dt
    n_steps = max(int(math.ceil(cfg.t_end / dt - 1e-9)), 1)
    bound = DIVERGENCE_FACTOR * (1.0 + init.norm())

    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 3))
    x, y, w = max(init.x, x_min), init.y, init.w
    times[0] = 0.0
    states[0] = (x, y, w)
    hit = init.x <= x_min + BOUNDARY_TOL
    f = _interior
    t = 0.0
    last = n_steps
    for i in range(1, n_steps + 1):
        h = min(dt, cfg.t_end - t) if i == n_steps else dt
        k1x, k1y, k1w = f(x, y, w, *consts)
        k2x, k2y, k2w = f(x + 0.5 * h * k1x, y + 0.5 * h * k1y, w + 0.5 * h * k1w, *consts)
        k3x, k3y, k3w = f(x + 0.5 * h * k2x, y + 0.5 * h * k2y, w + 0.5 * h * k2w, *consts)
        k4x, k4y, k4w = f(x + h * k3x, y + h * k3y, w + h * k3w, *consts)
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        if x < x_min:
            x = x_min
            hit = True
        t = i * dt if i < n_steps else cfg.t_end
        times[i] = t
        states[i] = (x, y, w)
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(w)) \
                or x * x + y * y + w * w > bound * bound:
            last = i
            break

    traj = Trajectory(times[:last + 1], states[:last + 1], "fluid",
                      {"params": p.to_dict(), "dt": dt, "t_end": cfg.t_end,
                       "hit_boundary": hit})
    return traj, detect_convergence(traj, cfg, hit_boundary=hit)


def detect_convergence(traj: Trajectory, cfg: FluidConfig,
                       hit_boundary: Optional[bool] = None) -> FluidVerdict:
    """Classify a fluid trajectory.

    Converged at ``t*`` when ``t*`` opens the first run of samples with
    ``|u| <= tol`` lasting at least ``conv_hold``.  Diverged when a sample is
    non-finite or exceeds ``1e6 * (1 + |u(0)|)``.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    norms = traj.norms()
    init_norm = float(norms[0])
    tol = cfg.tolerance_for(init_norm)
    final = traj.state_at(len(traj) - 1)
    finite = np.isfinite(norms)
    min_norm = float(np.min(norms[finite])) if finite.any() else math.inf
    if hit_boundary is None:
        hit_boundary = bool(traj.meta.get("hit_boundary", False))

    def verdict(kind, time=None):
        return FluidVerdict(kind, time, final, min_norm, hit_boundary)

    bound = DIVERGENCE_FACTOR * (1.0 + init_norm)
    if not finite.all() or np.any(norms > bound):
        return verdict(VerdictKind.DIVERGED)

    below = norms <= tol
    times = traj.times
    start = None
    for i, ok in enumerate(below):
        if ok:
            if start is None:
                start = i
            if times[i] - times[start] >= cfg.conv_hold:
                return verdict(VerdictKind.CONVERGED, float(times[start]))
        else:
            start = None
    return verdict(VerdictKind.NOT_CONVERGED)


def tail_decay_rate(traj: Trajectory, t_from: Optional[float] = None,
                    floor: float = 1e-12) -> float:
    """Least-squares slope of ``log|u(t)|`` over the tail of ``traj``.

    Negative values indicate exponential decay.  Samples whose norm has hit
    the roundoff floor are dropped.
    """
    times = traj.times
    norms = traj.norms()
    if t_from is None:
        t_from = times[-1] / 2.0
    mask = (times >= t_from) & (norms > floor)
    if mask.sum() < 2:
        mask = norms > floor
        if mask.sum() < 2:
            return -math.inf
    slope, _ = np.polyfit(times[mask], np.log(norms[mask]), 1)
    return float(slope)
