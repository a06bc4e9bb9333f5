"""Limiting distribution of the queue length when ``p < q``.

The generating function of the limit law is a rational function built from
the ``ell`` roots of ``z^ell = (q + p z)^(2 ell)`` in the closed unit disk and
a set of weights fixed by a Vandermonde-type system.  The roots inside the
disk cancel between numerator and denominator; they are divided out
explicitly so that the series expansion of ``H`` is numerically stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import NumericFailure, ValidationError
from .walk import FLOAT, DistVector, iter_joint, make_params, s_marginal

DISK_TOL = 1e-9
POLISH_TOL = 1e-13


def _pq(p) -> tuple[float, float]:
    p = float(p)
    q = 1.0 - p
    if p <= 0:
        raise ValidationError(f"p={p} violates p>0")
    if not p < q:
        raise ValidationError("stationary distribution requires p<q")
    return p, q


def char_poly(p, ell: int) -> np.ndarray:
    """Ascending coefficients of ``(q + p z)^(2 ell) - z^ell``."""
    p, q = _pq(p)
    c = npoly.polypow([q, p], 2 * ell)
    c[ell] -= 1.0
    return c


def _polish(c: np.ndarray, z: complex) -> complex:
    dc = npoly.polyder(c)
    for _ in range(50):
        f = npoly.polyval(z, c)
        if abs(f) <= POLISH_TOL:
            break
        step = f / npoly.polyval(z, dc)
        z -= step
        if abs(step) < 1e-17:
            break
    return complex(z)


def char_roots(p, ell: int) -> list[complex]:
    """The ``ell`` roots of ``z^ell = (q + p z)^(2 ell)`` with ``|z| <= 1``.

    ``z = 1`` is always a root and is returned first, exactly.  The rest are
    companion-matrix eigenvalues, polished by Newton's method.
    """
    if ell < 1:
        raise ValidationError("ell must be >= 1")
    c = char_poly(p, ell)
    raw = npoly.polyroots(c)
    one = int(np.argmin(np.abs(raw - 1)))
    others = [_polish(c, complex(z)) for i, z in enumerate(raw) if i != one]
    inside = [z for z in others if abs(z) <= 1 + DISK_TOL]
    roots = [complex(1.0)] + sorted(inside, key=lambda z: (-abs(z), z.imag))
    if len(roots) != ell:
        raise NumericFailure(
            f"found {len(roots)} roots in the closed unit disk, expected ell={ell}")
    for i, a in enumerate(roots):
        for b in roots[i + 1:]:
            if abs(a - b) < 1e-8:
                raise NumericFailure(f"near-coincident roots {a} and {b} make the weights singular")
    return roots


def solve_weights(p, ell: int, roots) -> np.ndarray:
    """Weights ``w_k`` with ``sum_k w_k r_j^k = (q-p) ell / q`` for ``j = 0``, else 0.

    Here ``r_j = z_j / (q + p z_j)``; ``r_0 = 1``.
    """
    p, q = _pq(p)
    r = np.array([z / (q + p * z) for z in roots], dtype=complex)
    V = np.vander(r, ell, increasing=True)
    rhs = np.zeros(ell, dtype=complex)
    rhs[0] = (q - p) * ell / q
    if ell > 1 and np.linalg.cond(V) > 1e12:
        raise NumericFailure("weight system is singular to working precision")
    return np.linalg.solve(V, rhs)


def _deflate(c: np.ndarray, root: complex) -> tuple[np.ndarray, complex]:
    """Divide ascending coefficients ``c`` by ``(z - root)``; return quotient, remainder."""
    desc = c[::-1]
    out = np.empty(len(desc) - 1, dtype=complex)
    acc = 0j
    for i, a in enumerate(desc[:-1]):
        acc = acc * root + a
        out[i] = acc
    rem = acc * root + desc[-1]
    return out[::-1], rem


def _realify(c: np.ndarray, what: str) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(c))))
    if np.max(np.abs(c.imag)) > 1e-10 * scale:
        raise NumericFailure(f"{what} has non-negligible imaginary part")
    return c.real.copy()


@dataclass(frozen=True)
class StationaryModel:
    p: float
    ell: int
    roots: tuple
    weights: tuple
    pgf_num: np.ndarray
    pgf_den: np.ndarray

    def H(self, z):
        return npoly.polyval(z, self.pgf_num) / npoly.polyval(z, self.pgf_den)


def build_pgf(p, ell: int, roots=None, weights=None) -> StationaryModel:
    """``H(z) = q (z - 1) P(z) / (z^ell - (q + p z)^(2 ell))`` in lowest terms.

    ``P(z) = sum_k w_k z^k (q + p z)^(ell-1-k)``.  Both sides are deflated
    by every root in the disk; the remainders must vanish.
    """
    p, q = _pq(p)
    if roots is None:
        roots = char_roots(p, ell)
    if weights is None:
        weights = solve_weights(p, ell, roots)
    P = np.zeros(ell, dtype=complex)
    for k, w in enumerate(weights):
        term = npoly.polymul(npoly.polypow([0.0, 1.0], k), npoly.polypow([q, p], ell - 1 - k))
        P[: len(term)] += w * term
    num = q * npoly.polymul([-1.0, 1.0], P).astype(complex)
    den = -char_poly(p, ell).astype(complex)
    for z in roots:
        num, rn = _deflate(num, z)
        den, rd = _deflate(den, z)
        if abs(rn) > 1e-8 or abs(rd) > 1e-8:
            raise NumericFailure(f"root {z} does not cancel (remainders {abs(rn):.2g}, {abs(rd):.2g})")
    model = StationaryModel(p, ell, tuple(roots), tuple(weights),
                            _realify(num, "numerator"), _realify(den, "denominator"))
    h1 = model.H(1.0)
    if abs(h1 - 1) > 1e-8:
        raise NumericFailure(f"H(1) = {h1!r}, expected 1")
    return model


def stationary_model(p, ell: int) -> StationaryModel:
    return build_pgf(p, ell)


def stationary_pmf(model: StationaryModel, x_max: int) -> DistVector:
    """``lim P{S_n = x}`` for ``x = 0..x_max`` by power-series division of ``H``."""
    num, den = model.pgf_num, model.pgf_den
    out = np.zeros(x_max + 1)
    for k in range(x_max + 1):
        acc = num[k] if k < len(num) else 0.0
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out[k] = acc / den[0]
    return DistVector(out.tolist(), "state", 0.0)


def stationary_moments(model: StationaryModel) -> tuple[float, float]:
    """``(H'(1), H''(1))``: the limiting mean and second factorial moment."""
    N, D = model.pgf_num, model.pgf_den
    n0, n1, n2 = (npoly.polyval(1.0, npoly.polyder(N, m)) for m in (0, 1, 2))
    d0, d1, d2 = (npoly.polyval(1.0, npoly.polyder(D, m)) for m in (0, 1, 2))
    h0 = n0 / d0
    h1 = (n1 - h0 * d1) / d0
    h2 = (n2 - 2 * h1 * d1 - h0 * d2) / d0
    return float(h1), float(h2)


# --- printed closed forms -------------------------------------------------

def ell1_pmf(p, x: int) -> float:
    p, q = _pq(p)
    return (q - p) * p ** (2 * x) / q ** (2 * x + 2)


def ell1_moments(p) -> tuple[float, float]:
    p, q = _pq(p)
    return p * p / (q - p), 2 * p ** 4 / (q - p) ** 2


def ell2_weights(p) -> tuple[float, float]:
    p, q = _pq(p)
    s = math.sqrt(1 + 4 * p * q)
    return 4 * (q - p) / (2 + (q - p) + s), 4 * p * (q - p) / (q * (-(q - p) + s))


def ell2_pgf(p, z):
    p, q = _pq(p)
    s = math.sqrt(1 + 4 * p * q)
    front = 4 * q * (q - p) * (q + p * z) / ((q * q - p * p * z) * (q * q + (1 + 2 * p * q) * z + p * p * z * z))
    return front * (1 / (2 + (q - p) + s) + p * z / (q * (q + p * z) * (-(q - p) + s)))


def ell2_pmf_printed(p) -> tuple[float, float]:
    """``lim P{S_n = 0}`` and ``lim P{S_n = 1}`` for the two-step light."""
    p, q = _pq(p)
    s = math.sqrt(1 + 4 * p * q)
    p0 = 4 * (q - p) / (q * q * (1 + 2 * q + s))
    p1 = (4 * (q - p) * (1 + 2 * p * q * (q - p) - (q - p + 2 * p * q) * s)
          / (q ** 4 * (-(q - p) + s) * (1 + 2 * q + s)))
    return p0, p1


def ell2_mean(p) -> float:
    p, q = _pq(p)
    return (-4 + 2 * (q - p) + 1 / (q - p) + math.sqrt(1 + 4 * p * q)) / 4


def total_variation(a, b) -> float:
    n = max(len(a), len(b))
    a = np.pad(np.asarray(a, dtype=float), (0, n - len(a)))
    b = np.pad(np.asarray(b, dtype=float), (0, n - len(b)))
    return 0.5 * float(np.abs(a - b).sum())


def phase_report(p, ell: int, n_cycles: int = 2000, x_max: int = 200) -> dict:
    """Distance between the walk's marginal and the limit law at each phase.

    The walk is run for ``2 ell n_cycles + 2 ell - 1`` steps; for each offset
    ``r`` in ``0..2ell-1`` the total-variation distance at step
    ``2 ell n_cycles + r`` is reported.
    """
    params = make_params(Fraction(p).limit_denominator(10 ** 9), ell, FLOAT)
    limit = stationary_pmf(stationary_model(p, ell), x_max).values
    base = 2 * ell * n_cycles
    out = {}
    for table in iter_joint(params, base + 2 * ell - 1):
        if table.n >= base:
            out[table.n - base] = total_variation(s_marginal(table).values, limit)
    return out
