"""Model parameters, state records and the centering/scaling maps.

The stochastic system is described by integer counts ``(X, Y, Z)``:
pending invitations, agent-queue minus customer-queue, and customers in
service.  The fluid system works with centered, scaled reals ``(x, y, w)``
where ``W = |Y| + 2Z`` is the total number of customers and agents present.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

#: absolute slack used when checking ``w >= |y|``
PHYSICAL_TOL = 1e-9

PARAM_KEYS = ("lambda", "alpha", "beta", "mu", "gamma", "epsilon", "r")


class ParameterError(ValueError):
    """Raised when a parameter set violates one or more invariants."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ModelParams:
    """The six model constants plus the scale ``r``.

    ``lam`` is the arrival rate of the scaled system; the unscaled
    simulator uses ``Lambda = lam * r``.
    """

    lam: float
    alpha: float
    beta: float
    mu: float
    gamma: float
    epsilon: float
    r: float = 1.0

    @property
    def arrival_rate(self) -> float:
        """Unscaled customer arrival rate ``lam * r``."""
        return self.lam * self.r

    @property
    def x_min(self) -> float:
        """Reflecting boundary of the fluid ``x`` coordinate."""
        return -self.lam * (1.0 - self.alpha) / self.beta

    @property
    def x_star(self) -> float:
        return self.lam * self.r * (1.0 - self.alpha) / self.beta

    @property
    def z_star(self) -> float:
        return self.lam * self.r / self.mu

    @property
    def w_star(self) -> float:
        return 2.0 * self.lam * self.r / self.mu

    def replace(self, **changes: float) -> "ModelParams":
        values = asdict(self)
        values.update(changes)
        return ModelParams(**values)

    def to_dict(self) -> dict[str, float]:
        """Dictionary using the parameter-file key names."""
        return {
            "lambda": self.lam,
            "alpha": self.alpha,
            "beta": self.beta,
            "mu": self.mu,
            "gamma": self.gamma,
            "epsilon": self.epsilon,
            "r": self.r,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelParams":
        if not isinstance(data, dict):
            raise ParameterError(["parameter file must hold a JSON object"])
        errors = []
        unknown = sorted(set(data) - set(PARAM_KEYS))
        if unknown:
            errors.append(f"unknown keys: {', '.join(unknown)}")
        missing = [k for k in PARAM_KEYS if k not in data]
        if missing:
            errors.append(f"missing keys: {', '.join(missing)}")
        for key in PARAM_KEYS:
            if key in data and (isinstance(data[key], bool)
                                or not isinstance(data[key], (int, float))):
                errors.append(f"{key} must be a number")
        if errors:
            raise ParameterError(errors)
        return cls(
            lam=float(data["lambda"]),
            alpha=float(data["alpha"]),
            beta=float(data["beta"]),
            mu=float(data["mu"]),
            gamma=float(data["gamma"]),
            epsilon=float(data["epsilon"]),
            r=float(data["r"]),
        )


def load_params(path: Union[str, Path]) -> ModelParams:
    """Read a JSON parameter file. Does not validate bounds."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError([f"cannot read parameter file {path}: {exc}"]) from exc
    return ModelParams.from_dict(data)


def save_params(p: ModelParams, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(p.to_dict(), indent=2) + "\n", encoding="utf-8")


def validate_params(p: ModelParams, for_simulation: bool = False) -> list[str]:
    """Return the list of violated invariants (empty when ``p`` is valid).

    With ``for_simulation`` the invitation jump ``gamma`` must also be a
    positive integer, since the stochastic model moves ``X`` by whole agents.
    """
    errors = []
    values = p.to_dict()
    for key, value in values.items():
        if not math.isfinite(value):
            errors.append(f"{key} must be finite")
    if not p.lam > 0:
        errors.append("lambda must be > 0")
    if not p.alpha >= 0:
        errors.append("alpha must be >= 0")
    if not p.alpha < 1:
        errors.append("alpha must be < 1")
    for key in ("beta", "mu", "gamma", "epsilon"):
        if not values[key] > 0:
            errors.append(f"{key} must be > 0")
    if not p.r >= 1:
        errors.append("r must be >= 1")
    if for_simulation and not float(p.gamma).is_integer():
        errors.append("gamma must be integer")
    return errors


def check_params(p: ModelParams, for_simulation: bool = False) -> ModelParams:
    """Validate and return ``p``; raise :class:`ParameterError` otherwise."""
    errors = validate_params(p, for_simulation)
    if errors:
        raise ParameterError(errors)
    return p


@dataclass(frozen=True)
class CtmcState:
    X: int
    Y: int
    Z: int

    def __post_init__(self):
        if self.X < 0 or self.Z < 0:
            raise ValueError(f"X and Z must be nonnegative, got {self}")

    @property
    def W(self) -> int:
        return abs(self.Y) + 2 * self.Z

    @property
    def agent_queue(self) -> int:
        return max(self.Y, 0)

    @property
    def customer_queue(self) -> int:
        return max(-self.Y, 0)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.X, self.Y, self.Z)


@dataclass(frozen=True)
class FluidState:
    x: float
    y: float
    w: float

    @property
    def z(self) -> float:
        """Centered scaled number in service."""
        return z_from_yw(self.y, self.w)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.w * self.w)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.w)

    def is_admissible(self, p: ModelParams, tol: float = PHYSICAL_TOL) -> bool:
        """Inside the boundary and with a nonnegative unscaled service count."""
        return (self.x >= p.x_min - tol
                and self.z + p.lam / p.mu >= -tol)


def z_from_yw(y: float, w: float) -> float:
    """Invert ``W = |Y| + 2Z``."""
    return (w - abs(y)) / 2.0


def scale_center(s: CtmcState, p: ModelParams) -> FluidState:
    r = p.r
    return FluidState(
        x=(s.X - p.x_star) / r,
        y=s.Y / r,
        w=(s.W - p.w_star) / r,
    )


def unscale(f: FluidState, p: ModelParams) -> CtmcState:
    """Nearest integer raw state to a fluid state (inverse of :func:`scale_center`)."""
    r = p.r
    X = max(int(round(f.x * r + p.x_star)), 0)
    Y = int(round(f.y * r))
    W = f.w * r + p.w_star
    Z = max(int(round((W - abs(Y)) / 2.0)), 0)
    return CtmcState(X, Y, Z)


def scale_center_array(raw: np.ndarray, p: ModelParams) -> np.ndarray:
    """Vectorised :func:`scale_center` on an ``(n, 3)`` array of ``(X, Y, Z)``."""
    raw = np.asarray(raw, dtype=float)
    X, Y, Z = raw[:, 0], raw[:, 1], raw[:, 2]
    W = np.abs(Y) + 2.0 * Z
    return np.column_stack([(X - p.x_star) / p.r, Y / p.r, (W - p.w_star) / p.r])


@dataclass(frozen=True)
class Trajectory:
    """States sampled on an increasing time grid.

    ``states`` is an ``(n, 3)`` array holding ``(X, Y, Z)`` for ``kind="raw"``
    and ``(x, y, w)`` for ``kind in {"scaled", "fluid"}``.
    """

    times: np.ndarray
    states: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.times.ndim != 1 or self.states.ndim != 2 or self.states.shape[1] != 3:
            raise ValueError("times must be 1-D and states (n, 3)")
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if self.kind not in ("raw", "scaled", "fluid"):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")

    def __len__(self) -> int:
        return len(self.times)

    def state_at(self, i: int):
        a, b, c = self.states[i]
        if self.kind == "raw":
            return CtmcState(int(a), int(b), int(c))
        return FluidState(float(a), float(b), float(c))

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    def scaled(self, p: ModelParams) -> "Trajectory":
        if self.kind != "raw":
            raise ValueError("only raw trajectories can be scaled")
        return Trajectory(self.times, scale_center_array(self.states, p), "scaled",
                          dict(self.meta))
