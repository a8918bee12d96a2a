"""Exact simulation of the stylized invitation scheme as a continuous-time Markov chain.

Random streams: replication ``k`` of a run seeded with ``seed`` draws from a
Philox generator keyed by ``SeedSequence(seed, spawn_key=(k,))``.  Each
stream is consumed in blocks: one block of standard exponentials for holding
times and one block of uniforms for event selection.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import CtmcState, ModelParams, Trajectory, check_params

_BLOCK = 1 << 14


class InfeasibleEvent(RuntimeError):
    """An event was applied in a state where its rate is zero."""


class EventKind(enum.IntEnum):
    CUSTOMER_ARRIVAL = 0
    INVITATION_ACCEPTED = 1
    FEEDBACK_TICK = 2
    SERVICE_COMPLETION_RETURN = 3
    SERVICE_COMPLETION_LEAVE = 4


EVENT_NAMES = {
    EventKind.CUSTOMER_ARRIVAL: "CustomerArrival",
    EventKind.INVITATION_ACCEPTED: "InvitationAccepted",
    EventKind.FEEDBACK_TICK: "FeedbackTick",
    EventKind.SERVICE_COMPLETION_RETURN: "ServiceCompletionReturn",
    EventKind.SERVICE_COMPLETION_LEAVE: "ServiceCompletionLeave",
}


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    t_end: float = 40.0
    sample_dt: float = 0.01
    replications: int = 1

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.sample_dt > 0:
            raise ValueError("sample_dt must be positive")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")


def make_rng(seed: int, replication: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(replication,))
    return np.random.Generator(np.random.Philox(ss))


def _rates(X, Y, Z, lam_r, beta, alpha, mu, eps):
    busy = mu * Z
    return (lam_r, beta * X, eps * abs(Y), alpha * busy, busy - alpha * busy)


def event_rates(s: CtmcState, p: ModelParams) -> tuple[float, ...]:
    """Rates of the five event kinds, indexed by :class:`EventKind`."""
    return _rates(s.X, s.Y, s.Z, p.arrival_rate, p.beta, p.alpha, p.mu, p.epsilon)


def _apply(kind, X, Y, Z, gamma):
    if kind == 0:
        if Y > 0:
            Z += 1
        return X + gamma, Y - 1, Z
    if kind == 1:
        if X <= 0:
            raise InfeasibleEvent("invitation accepted with no pending invitations")
        if Y < 0:
            Z += 1
        return X - min(gamma, X), Y + 1, Z
    if kind == 2:
        if X >= 1:
            return X - (Y > 0) + (Y < 0), Y, Z
        return (1 if Y < 0 else 0), Y, Z
    if Z <= 0:
        raise InfeasibleEvent("service completion with nobody in service")
    if kind == 3:
        if Y >= 0:
            Z -= 1
        return X - min(gamma, X), Y + 1, Z
    return X, Y, Z - 1


def apply_event(s: CtmcState, e: EventKind, p: ModelParams) -> CtmcState:
    """State after event ``e`` fires in state ``s``."""
    return CtmcState(*_apply(int(e), s.X, s.Y, s.Z, int(p.gamma)))


@dataclass
class SimResult:
    trajectory: Trajectory
    event_counts: dict
    events: Optional[list] = None  # (time, kind, X, Y, Z) before the event
    final_state: Optional[CtmcState] = None
    final_time: float = 0.0


def _run(init: CtmcState, p: ModelParams, cfg: SimConfig, replication: int,
         keep_events: bool, max_events: Optional[int]) -> SimResult:
    rng = make_rng(cfg.seed, replication)
    gamma = int(p.gamma)
    lam_r, beta, alpha, mu, eps = p.arrival_rate, p.beta, p.alpha, p.mu, p.epsilon
    n_grid = int(math.floor(cfg.t_end / cfg.sample_dt + 1e-9)) + 1
    grid = np.arange(n_grid) * cfg.sample_dt
    samples = np.empty((n_grid, 3), dtype=np.int64)

    X, Y, Z = init.X, init.Y, init.Z
    t = 0.0
    k = 0  # next grid index to fill
    counts = [0] * 5
    log = [] if keep_events else None
    expo = rng.standard_exponential(_BLOCK)
    unif = rng.random(_BLOCK)
    j = 0
    n_events = 0
    t_end = cfg.t_end
    apply = _apply
    while True:
        r0, r1, r2, r3, r4 = _rates(X, Y, Z, lam_r, beta, alpha, mu, eps)
        total = r0 + r1 + r2 + r3 + r4
        if total <= 0.0:
            t_next = math.inf
        else:
            if j == _BLOCK:
                expo = rng.standard_exponential(_BLOCK)
                unif = rng.random(_BLOCK)
                j = 0
            t_next = t + expo[j] / total
            u = unif[j] * total
            j += 1
        while k < n_grid and grid[k] < t_next:
            samples[k] = (X, Y, Z)
            k += 1
        if t_next > t_end or (max_events is not None and n_events >= max_events):
            break
        if u < r0:
            kind = 0
        elif u < r0 + r1:
            kind = 1
        elif u < r0 + r1 + r2:
            kind = 2
        elif u < r0 + r1 + r2 + r3:
            kind = 3
        else:
            kind = 4
        if keep_events:
            log.append((t_next, kind, X, Y, Z))
        X, Y, Z = apply(kind, X, Y, Z, gamma)
        counts[kind] += 1
        n_events += 1
        t = t_next

    if k < n_grid:
        # stopped by max_events: keep only the grid actually covered
        grid = grid[:k]
        samples = samples[:k]
    traj = Trajectory(grid.copy(), samples, "raw", {
        "params": p.to_dict(), "seed": cfg.seed, "replication": replication,
        "t_end": cfg.t_end, "sample_dt": cfg.sample_dt,
        "init": list(init.as_tuple()),
    })
    return SimResult(
        trajectory=traj,
        event_counts={EVENT_NAMES[EventKind(i)]: c for i, c in enumerate(counts)},
        events=log,
        final_state=CtmcState(X, Y, Z),
        final_time=t,
    )


def simulate_detailed(init: CtmcState, p: ModelParams, cfg: SimConfig,
                      replication: int = 0, keep_events: bool = False,
                      max_events: Optional[int] = None,
                      validate: bool = True) -> SimResult:
    """Next-event simulation returning the sampled path plus event bookkeeping.

    ``validate=False`` skips the parameter checks (used for degenerate runs).
    """
    if validate:
        check_params(p, for_simulation=True)
    elif not float(p.gamma).is_integer():
        raise ValueError("gamma must be integer")
    return _run(init, p, cfg, replication, keep_events, max_events)


def simulate(init: CtmcState, p: ModelParams, cfg: SimConfig,
             replication: int = 0, validate: bool = True) -> Trajectory:
    """Raw ``(X, Y, Z)`` path sampled on the grid ``0, sample_dt, ..., t_end``."""
    return simulate_detailed(init, p, cfg, replication, validate=validate).trajectory


def simulate_scaled(init: CtmcState, p: ModelParams, cfg: SimConfig,
                    replication: int = 0, validate: bool = True) -> Trajectory:
    """Centered, fluid-scaled ``(x, y, w)`` path."""
    return simulate(init, p, cfg, replication, validate).scaled(p)


def _replication_job(args):
    init, p, cfg, rep = args
    return simulate_detailed(init, p, cfg, rep)


def simulate_replications(init: CtmcState, p: ModelParams, cfg: SimConfig,
                          workers: int = 1) -> list[SimResult]:
    """Run ``cfg.replications`` independent streams; results in replication order."""
    check_params(p, for_simulation=True)
    jobs = [(init, p, cfg, rep) for rep in range(cfg.replications)]
    if workers <= 1 or len(jobs) == 1:
        return [_replication_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_replication_job, jobs))


def second_half_averages(traj: Trajectory) -> dict:
    """Grid time-averages of the raw coordinates over ``[t_end/2, t_end]``."""
    if traj.kind != "raw":
        raise ValueError("expected a raw trajectory")
    t = traj.times
    mask = t >= t[-1] / 2.0
    X, Y, Z = (traj.states[mask, i].astype(float) for i in range(3))
    return {
        "X": float(X.mean()),
        "Y": float(Y.mean()),
        "Z": float(Z.mean()),
        "W": float((np.abs(Y) + 2.0 * Z).mean()),
        "agent_queue": float(np.maximum(Y, 0.0).mean()),
        "customer_queue": float(np.maximum(-Y, 0.0).mean()),
    }
