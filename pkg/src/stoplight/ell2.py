"""Generating functions for the two-red/two-green light.

``G(lam, x, a) = sum_{n>=1} lam^n P{S_4n = x, M_4n = a}``.  Three of these
have printed closed forms in ``theta`` and ``omega`` (roots of the quartic
kernel); the rest of the boundary values come from small linear systems
obtained by evaluating the level-``a`` functional equation at the kernel
zeros.  Both routes are checked against partial sums of the exact walk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import NumericFailure, ValidationError
from .walk import arrival_count, iter_joint, make_params, FLOAT

COND_LIMIT = 1e12

# Delta_2 as (coefficient, deg p, deg q, deg theta, deg omega), term by term as printed.
DELTA2_TERMS = (
    (4096, 12, 12, 0, 0), (8192, 11, 11, 1, 0), (-2048, 10, 12, 1, 0), (7168, 10, 10, 2, 0),
    (-4096, 9, 11, 2, 0), (5120, 9, 9, 3, 0), (-3072, 8, 10, 3, 0), (3072, 8, 8, 4, 0),
    (-1536, 7, 9, 4, 0), (1280, 7, 7, 5, 0), (-768, 6, 8, 5, 0), (448, 6, 6, 6, 0),
    (-256, 5, 7, 6, 0), (128, 5, 5, 7, 0), (-32, 4, 6, 7, 0), (16, 4, 4, 8, 0),
    (-2048, 10, 12, 0, 1), (2048, 10, 10, 1, 1), (1024, 8, 11, 1, 1), (-5120, 9, 11, 1, 1),
    (6144, 9, 9, 2, 1), (2048, 7, 10, 2, 1), (-5632, 8, 10, 2, 1), (7424, 8, 8, 3, 1),
    (1536, 6, 9, 3, 1), (-4096, 7, 9, 3, 1), (4864, 7, 7, 4, 1), (768, 5, 8, 4, 1),
    (-2304, 6, 8, 4, 1), (1856, 6, 6, 5, 1), (384, 4, 7, 5, 1), (-1024, 5, 7, 5, 1),
    (384, 5, 5, 6, 1), (128, 3, 6, 6, 1), (-352, 4, 6, 6, 1), (32, 4, 4, 7, 1),
    (16, 2, 5, 7, 1), (-80, 3, 5, 7, 1), (-8, 2, 4, 8, 1), (1024, 10, 10, 0, 2),
    (4096, 9, 9, 1, 2), (-512, 8, 10, 1, 2), (6144, 8, 8, 2, 2), (-2048, 7, 9, 2, 2),
    (5120, 7, 7, 3, 2), (-2944, 6, 8, 3, 2), (2944, 6, 6, 4, 2), (-2048, 5, 7, 4, 2),
    (1280, 5, 5, 5, 2), (-736, 4, 6, 5, 2), (384, 4, 4, 6, 2), (-128, 3, 5, 6, 2),
    (64, 3, 3, 7, 2), (-8, 2, 4, 7, 2), (4, 2, 2, 8, 2), (1024, 9, 9, 0, 3),
    (3328, 8, 8, 1, 3), (3328, 7, 7, 2, 3), (-256, 5, 8, 2, 3), (-896, 6, 8, 2, 3),
    (1984, 6, 6, 3, 3), (-256, 4, 7, 3, 3), (-1280, 5, 7, 3, 3), (1088, 5, 5, 4, 3),
    (-64, 3, 6, 4, 3), (-768, 4, 6, 4, 3), (496, 4, 4, 5, 3), (-64, 2, 5, 5, 3),
    (-320, 3, 5, 5, 3), (208, 3, 3, 6, 3), (-16, 1, 4, 6, 3), (-56, 2, 4, 6, 3),
    (52, 2, 2, 7, 3), (4, 1, 1, 8, 3), (256, 8, 8, 0, 4), (768, 7, 7, 1, 4),
    (640, 6, 6, 2, 4), (-64, 4, 7, 2, 4), (-192, 5, 7, 2, 4), (320, 5, 5, 3, 4),
    (-64, 3, 6, 3, 4), (-224, 4, 6, 3, 4), (176, 4, 4, 4, 4), (-16, 2, 5, 4, 4),
    (-112, 3, 5, 4, 4), (80, 3, 3, 5, 4), (-16, 1, 4, 5, 4), (-56, 2, 4, 5, 4),
    (40, 2, 2, 6, 4), (-4, 0, 3, 6, 4), (-12, 1, 3, 6, 4), (12, 1, 1, 7, 4),
    (1, 0, 0, 8, 4),)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0 < p <= 0.5:
        raise ValidationError(f"p={p} must satisfy 0 < p <= 1/2")
    return p


def quartic(p: float, lam: float, mu):
    """Kernel ``(q + p mu)^4 - mu^2 / lam`` in expanded form."""
    q = 1 - p
    return (p ** 4 * mu ** 4 + 4 * p ** 3 * q * mu ** 3 + 6 * p * p * q * q * mu * mu
            - mu * mu / lam + 4 * p * q ** 3 * mu + q ** 4)


@dataclass(frozen=True)
class QuarticZeros:
    p: float
    lam: float
    theta: float
    omega: float
    zeros: tuple
    residuals: tuple

    @property
    def scale(self) -> tuple:
        """Size of the largest term of the kernel at each zero (for relative residuals)."""
        p, q, lam = self.p, 1 - self.p, self.lam
        return tuple(max(abs(p * mu) ** 4, mu * mu / lam, q ** 4, 1.0) for mu in self.zeros)


def quartic_zeros(p: float, lam: float) -> QuarticZeros:
    """The four kernel zeros ``theta/2p^2, 2q^2/theta, omega/2p^2, 2q^2/omega``.

    Only the real branch ``4 p q sqrt(lam) < 1`` is supported.
    """
    p = _check_p(p)
    lam = float(lam)
    q = 1 - p
    if not lam > 0:
        raise ValidationError("lam must be positive")
    s = math.sqrt(lam)
    if 4 * p * q * s >= 1:
        raise ValidationError(f"4pq*sqrt(lam)={4 * p * q * s:.6g} >= 1: outside the real branch")
    theta = (1 - 2 * p * q * s - math.sqrt(1 - 4 * p * q * s)) / s
    omega = (-1 - 2 * p * q * s - math.sqrt(1 + 4 * p * q * s)) / s
    zeros = (theta / (2 * p * p), 2 * q * q / theta, omega / (2 * p * p), 2 * q * q / omega)
    residuals = tuple(quartic(p, lam, mu) for mu in zeros)
    return QuarticZeros(p, lam, theta, omega, zeros, residuals)


def delta1(p: float, t: float) -> float:
    q = 1 - p
    return (256 * p ** 8 * q ** 8 + 1024 * p ** 7 * q ** 7 * t
            + 64 * p ** 4 * q ** 6 * (22 * p * p - q - 3 * p * q) * t ** 2
            + 128 * p ** 3 * q ** 5 * (8 * p * p - q - 3 * p * q) * t ** 3
            + 16 * p * p * q ** 4 * (35 * p * p - 5 * q - 17 * p * q) * t ** 4
            + 32 * p * q ** 3 * (8 * p * p - q - 3 * p * q) * t ** 5
            + 4 * q * q * (22 * p * p - q - 3 * p * q) * t ** 6
            + 16 * p * q * t ** 7 + t ** 8)


def _pair(p: float, q: float, t: float) -> float:
    """``[t^2 + 2(2p-1)q t + 4p^2q^2][t^2 + 2(2p+1)q t + 4p^2q^2]``."""
    pq2 = 4 * p * p * q * q
    return (t * t + 2 * (2 * p - 1) * q * t + pq2) * (t * t + 2 * (2 * p + 1) * q * t + pq2)


def gamma(p: float, t: float, w: float) -> float:
    q = 1 - p
    quartic_t = (t ** 4 + 8 * p * q * t ** 3 + 36 * p * p * q * q * t * t
                 + 32 * p ** 3 * q ** 3 * t + 16 * p ** 4 * q ** 4)
    braces = (4 * p * p * q * q * (t + 2 * p * q) ** 4
              + 4 * p * q * (t + p * q) * (t + 4 * p * q) * (t * t - 2 * q * q * t + 4 * p * p * q * q) * w
              + (t ** 4 + 2 * (3 * p - 1) * q * t ** 3 - 8 * p * (1 + q) * q * q * t * t
                 + 8 * p * p * (3 * p - 1) * q ** 3 * t + 16 * p ** 4 * q ** 4) * w * w
              - 2 * (1 + p) * q * t * t * w ** 3)
    return _pair(p, q, t) * quartic_t * braces


def delta2(p: float, t: float, w: float) -> float:
    q = 1 - p
    return sum(c * p ** i * q ** j * t ** k * w ** m for c, i, j, k, m in DELTA2_TERMS)


def g00(p: float, lam: float) -> float:
    """``G(lam, 0, 0) = q^2 lam / (1 - q^2 lam)``: no car in any of the first n cycles."""
    q = 1 - p
    return q * q * lam / (1 - q * q * lam)


def printed_g02(p: float, lam: float) -> float:
    """``G(lam, 0, 2)`` exactly as printed, including its overall sign."""
    z = quartic_zeros(p, lam)
    q, t, w = 1 - z.p, z.theta, z.omega
    return (4 * p * p * q * q * (t + 2 * p * q) ** 2 * t * w * gamma(z.p, t, w)
            / ((1 - q * q * lam) * delta1(z.p, t) * delta2(z.p, t, w)))


def closed_form_g(p: float, lam: float, which: tuple) -> float:
    """Closed form of ``G(lam, x, a)`` for ``(x, a)`` in ``(0,1), (1,1), (0,2)``."""
    which = tuple(which)
    z = quartic_zeros(p, lam)
    p, q, t = z.p, 1 - z.p, z.theta
    if q * q * lam == 1:
        raise ValidationError("q^2 lam = 1 is a pole")
    if which == (0, 1):
        return (8 * p * (1 + p) * q * q * (t + 2 * p * q) ** 4 * t * t
                / ((1 - q * q * lam) * delta1(p, t)))
    if which == (1, 1):
        return 8 * p ** 3 * q * _pair(p, q, t) * t * t / ((1 - q * q * lam) * delta1(p, t))
    if which == (0, 2):
        # the printed expression is off by an overall factor -1 (checked against the walk)
        return -printed_g02(p, lam)
    raise ValidationError(f"no closed form for G(lam, {which[0]}, {which[1]})")


# --- appendix cascade ---------------------------------------------------

def _a_poly(p, q, mu):
    return p ** 4 * mu * mu + 2 * p ** 3 * q * mu + p * p * q * q


def _b_poly(p, q, mu):
    return 2 * p ** 3 * q * mu * mu + 4 * p * p * q * q * mu + 2 * p * q ** 3


def _bottom(p, q, mu):
    """Coefficient of ``G(lam, 0, a)``."""
    return -((1 + 3 * p) * q ** 3 * mu * mu - 4 * p * q ** 3 * mu - q ** 4)


def _top(p, q, mu):
    return p ** 4 * mu ** 3 + 4 * p ** 3 * q * mu * mu + 5 * p * p * q * q * mu + 2 * p * q ** 3


def _level_system(p, a, mus, known):
    """Rows ``M g = r`` of the level-``a`` equation at each ``mu`` in ``mus``."""
    q = 1 - p
    rows, rhs = [], []
    for mu in mus:
        A, B = _a_poly(p, q, mu), _b_poly(p, q, mu)
        if a == 1:
            rows.append([
                p ** 4 * mu ** 4 + 2 * p ** 3 * q * mu ** 3 + p * p * q * q * mu * mu
                - (1 + 3 * p) * q ** 3 * mu * mu + 4 * p * q ** 3 * mu + q ** 4,
                mu * (p ** 4 * mu ** 4 + 4 * p ** 3 * q * mu ** 3 + 5 * p * p * q * q * mu * mu
                      + 2 * p * q ** 3 * mu - q ** 4 * mu + q ** 4),
            ])
            rhs.append((2 * p ** 3 * q * mu + 2 * p * (1 + p) * q * q) * mu * mu
                       + (2 * p ** 3 * q * mu + 4 * p * p * q * q + 2 * p * q ** 3) * mu * mu * known[0, 0])
        elif a == 2:
            rows.append([
                _bottom(p, q, mu),
                mu * (p ** 4 * mu ** 4 + 2 * p ** 3 * q * mu ** 3 + p * p * q * q * mu * mu
                      - q ** 4 * mu + q ** 4),
                mu ** 3 * _top(p, q, mu),
            ])
            rhs.append(A * mu * mu * (1 + known[0, 0] + known[0, 1]) + B * mu * mu * known[1, 1])
        else:
            rows.append([
                _bottom(p, q, mu),
                -q ** 4 * (mu - 1) * mu,
                A * mu ** (a + 1),
                mu ** (a + 1) * _top(p, q, mu),
            ])
            rhs.append(A * mu ** a * (known[a - 2, a - 2] + known[a - 2, a - 1])
                       + B * mu ** a * known[a - 1, a - 1])
    return np.array(rows, dtype=float), np.array(rhs, dtype=float)


def level_unknowns(a: int) -> list:
    """Boundary entries the level-``a`` system solves for."""
    if a == 1:
        return [(0, 1), (1, 1)]
    if a == 2:
        return [(0, 2), (1, 2), (2, 2)]
    return [(0, a), (1, a), (a - 1, a), (a, a)]


def level_knowns(a: int) -> list:
    if a == 1:
        return [(0, 0)]
    return [(a - 2, a - 2), (a - 2, a - 1), (a - 1, a - 1)]


@dataclass(frozen=True)
class CascadeResult:
    p: float
    lam: float
    values: dict
    conditions: dict = field(default_factory=dict)
    open_entries: dict = field(default_factory=dict)

    def __contains__(self, key) -> bool:
        return tuple(key) in self.values

    def __getitem__(self, key) -> float:
        return self.values[tuple(key)]


def appendix_cascade(p: float, lam: float, a_max: int) -> CascadeResult:
    """Solve the boundary systems level by level up to ``a_max``.

    Level 1 is a 2x2 system, level 2 a 3x3 system and every later level a
    4x4 system; each uses entries produced by the levels below it.  Rows are
    scaled to unit max-norm before solving, and the condition number of the
    scaled matrix is recorded.  Interior entries ``2 <= x <= a-2`` are not
    determined by this procedure and are listed in ``open_entries``.
    """
    if a_max < 1:
        raise ValidationError("a_max must be >= 1")
    z = quartic_zeros(p, lam)
    p = z.p
    values = {(0, 0): g00(p, lam)}
    conditions, open_entries = {}, {}
    for a in range(1, a_max + 1):
        missing = [k for k in level_knowns(a) if k not in values]
        if missing:
            raise NumericFailure(f"level {a} needs {missing}, not produced by earlier levels")
        unknowns = level_unknowns(a)
        M, r = _level_system(p, a, z.zeros[: len(unknowns)], values)
        scale = np.abs(M).max(axis=1)
        M, r = M / scale[:, None], r / scale
        cond = float(np.linalg.cond(M))
        conditions[a] = cond
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise NumericFailure(
                f"level {a} system is ill-conditioned (cond={cond:.3g}) at p={p}, lam={lam}; "
                f"zeros={z.zeros}")
        sol = np.linalg.solve(M, r)
        values.update(zip(unknowns, (float(v) for v in sol)))
        open_entries[a] = [(x, a) for x in range(2, a - 1)]
    return CascadeResult(p, float(lam), values, conditions, open_entries)


# --- oracle ---------------------------------------------------------------

@lru_cache(maxsize=32)
def _dp_coefficients(p: float, n_terms: int) -> tuple:
    params = make_params(Fraction(p), 2, FLOAT)
    cap = arrival_count(4 * n_terms, 2)
    grids = []
    for table in iter_joint(params, 4 * n_terms, a_cap=cap):
        if table.n and table.n % 4 == 0:
            grids.append(table.grid)
    return tuple(grids)


def dp_partial_sum(p: float, lam: float, x: int, a: int, N: int) -> tuple:
    """``(sum_{n=1..N} lam^n P{S_4n=x, M_4n=a}, lam^(N+1)/(1-lam))`` from the walk."""
    p = _check_p(p)
    lam = float(lam)
    if not 0 < lam < 1:
        raise ValidationError("dp_partial_sum needs 0 < lam < 1")
    value = 0.0
    for n, grid in enumerate(_dp_coefficients(p, N), start=1):
        if 0 <= x <= a < grid.shape[0]:
            value += lam ** n * grid[x, a]
    return value, lam ** (N + 1) / (1 - lam)
