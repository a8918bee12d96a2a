"""Local stability of the switched linear fluid dynamics.

Away from the reflecting boundary the fluid state ``u = (x, y, w)`` obeys
``u' = A_plus u`` for ``y >= 0`` and ``u' = A_minus u`` for ``y < 0``.  The
two matrices differ only in their second column, so the difference has rank
one and a common quadratic Lyapunov function (CQLF) exists iff both are
Hurwitz and ``A_plus @ A_minus`` has no negative real eigenvalue.
"""
from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .cubic import (
    EIG_TOL,
    CubicPoly,
    char_poly,
    cubic_discriminant,
    cubic_roots,
    has_negative_real_eigenvalue,
    is_real_root,
    routh_hurwitz_cubic,
)
from .model import ModelParams

DEFAULT_TAU_GRID = (0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1e4)
RANK_TOL = 1e-10


class Verdict(str, enum.Enum):
    EXPONENTIALLY_STABLE_CQLF = "ExponentiallyStable_CQLF"
    LOCALLY_STABLE_HEURISTIC = "LocallyStableHeuristic"
    NOT_CLASSIFIED = "NotClassified"
    AMINUS_NOT_HURWITZ = "AminusNotHurwitz"


def build_a_plus(p: ModelParams) -> np.ndarray:
    """Dynamics matrix on the half-space ``y >= 0``."""
    a, b, m, g, e = p.alpha, p.beta, p.mu, p.gamma, p.epsilon
    return np.array([
        [-g * b, 0.5 * g * a * m - e, -0.5 * g * a * m],
        [b, -0.5 * a * m, 0.5 * a * m],
        [b, -0.5 * (a - 2.0) * m, 0.5 * (a - 2.0) * m],
    ])


def build_a_minus(p: ModelParams) -> np.ndarray:
    """Dynamics matrix on the half-space ``y < 0``."""
    a, b, m, g, e = p.alpha, p.beta, p.mu, p.gamma, p.epsilon
    return np.array([
        [-g * b, -0.5 * g * a * m - e, -0.5 * g * a * m],
        [b, 0.5 * a * m, 0.5 * a * m],
        [b, 0.5 * (a - 2.0) * m, 0.5 * (a - 2.0) * m],
    ])


def inverse_a_plus(p: ModelParams) -> np.ndarray:
    """Closed-form inverse of :func:`build_a_plus`."""
    a, b, m, g, e = p.alpha, p.beta, p.mu, p.gamma, p.epsilon
    return np.array([
        [0.0, -(a - 2.0) / (2.0 * b), a / (2.0 * b)],
        [-1.0 / e, -g / e, 0.0],
        [-1.0 / e, (e - g * m) / (e * m), -1.0 / m],
    ])


def a_plus_char_poly(p: ModelParams) -> CubicPoly:
    b, m, g, e = p.beta, p.mu, p.gamma, p.epsilon
    return CubicPoly(1.0, b * g + m, b * e + b * g * m, b * e * m)


def a_minus_char_poly(p: ModelParams) -> CubicPoly:
    b, m, g, e = p.beta, p.mu, p.gamma, p.epsilon
    return CubicPoly(1.0, b * g + m * (1.0 - p.alpha), b * e + b * g * m, b * e * m)


def aminus_hurwitz(p: ModelParams) -> bool:
    """Closed-form Hurwitz test for ``A_minus``."""
    b, m, g, e = p.beta, p.mu, p.gamma, p.epsilon
    return (b * g / m + (1.0 - p.alpha)) * (g * m / e + 1.0) > 1.0


def check_condition_thm2(p: ModelParams) -> bool:
    """First sufficient condition for a CQLF (needs ``0 < alpha < 1``).

    ``beta*g**2/4 < eps < beta*g**2/2``,
    ``eps > beta*g**2/2 - (alpha*g*mu/2 - (1-alpha)*mu**2/(2*beta))`` and
    ``g > (1-alpha)*mu/(alpha*beta)``.
    """
    a, b, m, g, e = p.alpha, p.beta, p.mu, p.gamma, p.epsilon
    if not 0.0 < a < 1.0:
        return False
    half = b * g * g / 2.0
    return (b * g * g / 4.0 < e < half
            and e > half - (a * g * m / 2.0 - (1.0 - a) * m * m / (2.0 * b))
            and g > (1.0 - a) * m / (a * b))


def check_condition_thm3(p: ModelParams) -> bool:
    """Second sufficient condition: ``eps < beta*g**2/2 - alpha*g*mu/2`` and ``g > alpha*mu/beta``."""
    a, b, m, g, e = p.alpha, p.beta, p.mu, p.gamma, p.epsilon
    return e < b * g * g / 2.0 - a * g * m / 2.0 and g > a * m / b


def product_char_poly(p: ModelParams) -> CubicPoly:
    """Characteristic polynomial of ``A_plus @ A_minus`` in closed form."""
    a, b, m, g, e = p.alpha, p.beta, p.mu, p.gamma, p.epsilon
    return CubicPoly(
        1.0,
        -(m * m - a * m * m + b * b * g * g - 2.0 * b * e - a * b * g * m),
        b * b * e * e + b * b * g * g * m * m - 2.0 * b * e * m * m + a * b * e * m * m,
        -(b * b * e * e * m * m),
    )


def tau_pencil_poly(p: ModelParams) -> CubicPoly:
    """``N(tau)`` with ``det(inv(A_plus) + tau*A_minus) = -N(tau)/(beta*eps*mu)``."""
    prod = product_char_poly(p)
    return CubicPoly(-prod.a3, prod.a2, -prod.a1, 1.0)


def tau_pencil_positive(p: ModelParams,
                        probe_grid: Iterable[float] = DEFAULT_TAU_GRID,
                        tol: float = EIG_TOL) -> bool:
    """True iff ``inv(A_plus) + tau*A_minus`` is nonsingular for every ``tau >= 0``.

    Decided from the roots of ``N(tau)``; since ``N(0) = 1``, a nonpositive
    value on the probe grid certifies a root on the ray and overrides the
    root analysis.
    """
    N = tau_pencil_poly(p)
    roots_ok = not any(is_real_root(z, tol) and z.real >= 0.0 for z in cubic_roots(N))
    grid_ok = all(N(t) > 0.0 for t in probe_grid if t >= 0.0)
    return roots_ok and grid_ok


def rank_of_difference(p: ModelParams, tol: float = RANK_TOL) -> int:
    sv = np.linalg.svd(build_a_plus(p) - build_a_minus(p), compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def product_conditions(p: ModelParams) -> tuple[bool, bool, bool]:
    """``(b > 0, b**2 - 4c < 0, discriminant < 0)`` for the product cubic."""
    c = product_char_poly(p)
    return c.a1 > 0, c.a1 * c.a1 - 4.0 * c.a2 < 0, cubic_discriminant(c) < 0


@dataclass(frozen=True)
class StabilityReport:
    cond_thm2: bool
    cond_thm3: bool
    aplus_hurwitz: bool
    aminus_hurwitz: bool
    diff_rank_one: bool
    product_has_negative_real_eig: bool
    cqlf_exists: bool
    discriminant_product: float
    verdict: Verdict
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def classify(p: ModelParams) -> StabilityReport:
    """Run every criterion on ``p`` and reduce them to a verdict.

    The ``w`` row keeps the switch alive even at ``alpha = 0``, so the
    difference still has rank one there.  A zero difference would mean a
    single linear system, and then a CQLF exists iff it is Hurwitz.
    """
    notes = []
    a_plus, a_minus = build_a_plus(p), build_a_minus(p)
    aplus_ok = routh_hurwitz_cubic(char_poly(a_plus))
    aminus_ok = aminus_hurwitz(p)
    rank = rank_of_difference(p)
    prod = product_char_poly(p)
    negative = has_negative_real_eigenvalue(prod)

    if rank == 1:
        cqlf = aplus_ok and aminus_ok and not negative
    elif rank == 0:
        notes.append("A_plus equals A_minus: single linear system")
        cqlf = aplus_ok and aminus_ok
    else:
        cqlf = False
        notes.append(f"difference has rank {rank}")
    if not 0.0 < p.alpha < 1.0:
        notes.append("cond_thm2 requires alpha in (0,1)")

    if cqlf:
        verdict = Verdict.EXPONENTIALLY_STABLE_CQLF
    elif not aminus_ok:
        verdict = Verdict.AMINUS_NOT_HURWITZ
    elif aplus_ok:
        verdict = Verdict.LOCALLY_STABLE_HEURISTIC
    else:
        verdict = Verdict.NOT_CLASSIFIED

    return StabilityReport(
        cond_thm2=check_condition_thm2(p),
        cond_thm3=check_condition_thm3(p),
        aplus_hurwitz=aplus_ok,
        aminus_hurwitz=aminus_ok,
        diff_rank_one=rank == 1,
        product_has_negative_real_eig=negative,
        cqlf_exists=cqlf,
        discriminant_product=cubic_discriminant(prod),
        verdict=verdict,
        notes=notes,
    )
