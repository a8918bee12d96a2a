"""Cubic polynomials: Routh-Hurwitz test, discriminant and closed-form roots."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: relative tolerance used to call a root real / negative
EIG_TOL = 1e-9


@dataclass(frozen=True)
class CubicPoly:
    """``a0*s**3 + a1*s**2 + a2*s + a3``."""

    a0: float
    a1: float
    a2: float
    a3: float

    @property
    def coeffs(self) -> tuple[float, float, float, float]:
        return (self.a0, self.a1, self.a2, self.a3)

    def __call__(self, s):
        return ((self.a0 * s + self.a1) * s + self.a2) * s + self.a3

    def derivative(self, s):
        return (3.0 * self.a0 * s + 2.0 * self.a1) * s + self.a2

    def scale(self) -> float:
        return max(abs(c) for c in self.coeffs)


def char_poly(M) -> CubicPoly:
    """Monic characteristic polynomial ``det(s*I - M)`` of a 3x3 matrix."""
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {M.shape}")
    trace = M[0, 0] + M[1, 1] + M[2, 2]
    minors = (M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
              + M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
              + M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
    det = (M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
           - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
           + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]))
    return CubicPoly(1.0, float(-trace), float(minors), float(-det))


def routh_hurwitz_cubic(c: CubicPoly) -> bool:
    """True iff every root of ``c`` has strictly negative real part."""
    if not c.a0 > 0:
        raise ValueError("Routh-Hurwitz test needs a positive leading coefficient")
    return c.a1 > 0 and c.a2 > 0 and c.a3 > 0 and c.a1 * c.a2 > c.a0 * c.a3


def cubic_discriminant(c: CubicPoly) -> float:
    a, b, cc, d = c.coeffs
    if a == 0:
        raise ValueError("not a cubic: leading coefficient is zero")
    return (18 * a * b * cc * d - 4 * b ** 3 * d + b ** 2 * cc ** 2
            - 4 * a * cc ** 3 - 27 * a ** 2 * d ** 2)


def _polish(c: CubicPoly, root: complex, iters: int = 3) -> complex:
    # Newton steps, kept only while they reduce the residual
    best, best_res = root, abs(c(root))
    z = root
    for _ in range(iters):
        dz = c.derivative(z)
        if dz == 0:
            break
        z = z - c(z) / dz
        res = abs(c(z))
        if res < best_res:
            best, best_res = z, res
        else:
            break
    return best


def cubic_roots(c: CubicPoly) -> list[complex]:
    """The three complex roots of ``c`` via the depressed cubic.

    Three real roots come from the trigonometric form; otherwise Cardano's
    formula gives the real root and the conjugate pair follows by deflation.
    Each root gets a guarded Newton polish.
    """
    a, b, cc, d = c.coeffs
    if a == 0:
        raise ValueError("not a cubic: leading coefficient is zero")
    b0, c0, d0 = b / a, cc / a, d / a
    # s = sigma * t balances the coefficients so nothing under- or overflows
    sigma = max(abs(b0), math.sqrt(abs(c0)), abs(d0) ** (1.0 / 3.0))
    if sigma == 0.0:
        return [0j, 0j, 0j]
    sigma = math.ldexp(1.0, math.frexp(sigma)[1])  # power of two: exact scaling
    b, cc, d = b0 / sigma, c0 / sigma / sigma, d0 / sigma / sigma / sigma
    shift = b / 3.0
    p = cc - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * cc / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    if p == 0.0:
        # t**3 = -q
        t1 = math.copysign(abs(q) ** (1.0 / 3.0), -q)
        ts = [t1, t1 * complex(-0.5, math.sqrt(3) / 2), t1 * complex(-0.5, -math.sqrt(3) / 2)]
    elif p < 0.0 and disc <= 0.0:
        # three real roots, p < 0
        s = math.sqrt(-p / 3.0)
        m = 2.0 * s
        arg = -q / (2.0 * s) / s / s  # staged to dodge underflow of s**3
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        ts = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    else:
        sq = math.sqrt(disc)
        # pick the branch without cancellation
        u = math.copysign(abs(-q / 2.0 - math.copysign(sq, q)) ** (1.0 / 3.0),
                          -q / 2.0 - math.copysign(sq, q))
        v = -p / (3.0 * u) if u != 0.0 else 0.0
        t1 = u + v
        # t^2 + t1 t + (p + t1^2) from deflation
        half = -t1 / 2.0
        rest = p + t1 * t1 - half * half
        if rest >= 0.0:
            im = math.sqrt(rest)
            ts = [t1, complex(half, im), complex(half, -im)]
        else:
            # roundoff next to a double root
            re_ = math.sqrt(-rest)
            ts = [t1, half + re_, half - re_]

    approx = [complex(t) - shift for t in ts]
    poly = CubicPoly(1.0, b0, c0, d0)
    roots = []
    for z in _refine(approx, b, d):
        z = _polish(poly, sigma * z)
        if abs(z.imag) < 1e-300:
            z = complex(z.real, 0.0)
        roots.append(z)
    return roots


def _quadratic(e: float, f: float) -> list[complex]:
    """Roots of ``s**2 + e*s + f`` without cancellation."""
    disc = e * e - 4.0 * f
    if disc >= 0.0:
        q = -(e + math.copysign(math.sqrt(disc), e)) / 2.0
        return [complex(q), complex(f / q if q != 0.0 else 0.0)]
    im = math.sqrt(-disc) / 2.0
    return [complex(-e / 2.0, im), complex(-e / 2.0, -im)]


def _refine(approx: list[complex], b: float, d: float) -> list[complex]:
    # The shifted closed form is accurate only to eps * (largest root); small
    # roots are rebuilt from Vieta's relations using the largest real root,
    # or from the modulus of a dominant complex pair.
    real = [z for z in approx if z.imag == 0.0]
    big = max(approx, key=abs)
    if big == 0:
        return approx
    if big.imag == 0.0:
        r1 = big.real
        return [complex(r1)] + _quadratic(b + r1, -d / r1)
    r_real = real[0].real if real else None
    if r_real is None:
        return approx
    # dominant conjugate pair: the real root is -d / |pair|**2
    return [complex(-d / (abs(big) ** 2))] + [z for z in approx if z.imag != 0.0]


def is_real_root(z: complex, tol: float = EIG_TOL) -> bool:
    return abs(z.imag) <= tol * (1.0 + abs(z.real))


def has_negative_real_eigenvalue(c: CubicPoly, tol: float = EIG_TOL) -> bool:
    """True iff ``c`` has a real root below ``-tol``.

    A root counts as real when ``|imag| <= tol * (1 + |real|)``.
    """
    return any(is_real_root(z, tol) and z.real < -tol for z in cubic_roots(c))
