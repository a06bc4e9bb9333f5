"""Scaling constants of the maximum at ``p = q = 1/2`` and convergence diagnostics.

``E(M_n)/sqrt(n) -> sqrt(pi/8)`` and ``E(M_n^2)/n -> G/2`` (``G`` Catalan's
constant) hold in the Abel sense.  :func:`convergence_report` measures the
ordinary finite-``n`` values by exact recursion or by simulation; a small
difference is *consistent with* the limits, nothing more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import NumericFailure, ResourceLimitError, ValidationError
from .montecarlo import SimConfig, estimate_moments
from .walk import FLOAT, joint_dist, make_params, max_dist, moment

#: Printed digits of Catalan's constant, used only as a cross-check.
CATALAN_DIGITS = 0.915965594177219015

#: Largest n for which method="dp" is attempted.
DP_MAX_N = 50_000

DP = "dp"
MC = "mc"


def catalan_constant(terms: int = 40) -> float:
    """Catalan's constant ``sum_k (-1)^k / (2k+1)^2``.

    Uses the Cohen-Rodriguez Villegas-Zagier acceleration of alternating
    series; 40 terms is far below double-precision resolution.
    """
    d = (3 + math.sqrt(8)) ** terms
    d = (d + 1 / d) / 2
    b, c, s = -1.0, -d, 0.0
    for k in range(terms):
        c = b - c
        s += c / (2 * k + 1) ** 2
        b = (k + terms) * (k - terms) * b / ((k + 0.5) * (k + 1))
    value = s / d
    if abs(value - CATALAN_DIGITS) > 1e-14:
        raise NumericFailure("Catalan constant series disagrees with stored digits")
    return value


def sech_sum(t: float, alpha: float = 0.0, beta: float = math.inf) -> float:
    """Riemann sum ``t * sum_a sech(a t)`` over ``ceil(alpha/t) <= a <= floor(beta/t)``, ``a >= 1``.

    Terms below ``1e-18`` are dropped.  As ``t -> 0`` the full sum tends to
    ``pi/2``.
    """
    if not t > 0:
        raise ValidationError("t must be positive")
    lo = max(1, math.ceil(alpha / t))
    cut = math.ceil(math.acosh(1e18) / t)
    hi = cut if beta == math.inf else min(cut, math.floor(beta / t))
    if hi < lo:
        return 0.0
    a = np.arange(lo, hi + 1, dtype=float)
    return float(t * np.sum(1 / np.cosh(a * t)))


def limit_constants() -> tuple[float, float]:
    """``(sqrt(pi/8), G/2)``."""
    return math.sqrt(math.pi / 8), catalan_constant() / 2


@dataclass(frozen=True)
class LimitRow:
    n: int
    estimate_first: float
    estimate_second: float
    method: str
    stderr_first: Optional[float] = None
    stderr_second: Optional[float] = None


@dataclass(frozen=True)
class LimitReport:
    p: str
    ell: int
    rows: tuple
    first: float
    second: float
    note: str = field(default=(
        "finite-n values compared with Abel limits; agreement is consistent with, "
        "not a proof of, ordinary convergence"))

    @property
    def comparable(self) -> bool:
        return Fraction(self.p) == Fraction(1, 2)

    def deltas(self) -> list[tuple[float, float]]:
        """Relative deviations from the two constants, row by row."""
        if not self.comparable:
            raise ValidationError("the limit constants are for p = 1/2 only")
        return [(abs(r.estimate_first - self.first) / self.first,
                 abs(r.estimate_second - self.second) / self.second) for r in self.rows]

    def shrinking(self, slack: float = 2.0) -> bool:
        """True if both deviations decrease along the rows (within ``slack`` stderrs)."""
        d = self.deltas()
        for (a, b), (c, e), row in zip(d, d[1:], self.rows[1:]):
            s1 = slack * (row.stderr_first or 0.0) / self.first
            s2 = slack * (row.stderr_second or 0.0) / self.second
            if not (c < a + s1 and e < b + s2):
                return False
        return True

    def to_rows(self) -> list[dict]:
        out = []
        for r, d in zip(self.rows, self.deltas() if self.comparable else [(None, None)] * len(self.rows)):
            out.append({"n": r.n, "method": r.method,
                        "estimate_first": r.estimate_first, "estimate_second": r.estimate_second,
                        "stderr_first": r.stderr_first, "stderr_second": r.stderr_second,
                        "rel_delta_first": d[0], "rel_delta_second": d[1]})
        return out


def _dp_row(params, n: int) -> LimitRow:
    if n > DP_MAX_N:
        raise ResourceLimitError(f"n={n} is too large for the exact recursion; use method='mc'")
    dist = max_dist(joint_dist(params, n))
    return LimitRow(n, float(moment(dist, 1)) / math.sqrt(n), float(moment(dist, 2)) / n, DP)


def _mc_row(params, n: int, reps: int, seed: int) -> LimitRow:
    r = estimate_moments(SimConfig(params, n, reps, seed))
    return LimitRow(n, r.scaled_first, r.scaled_second, MC,
                    r.stderr_mean / math.sqrt(n), r.stderr_sq / n)


def convergence_report(p, ell: int, n_list, method: str = DP, reps: int = 10_000,
                       seed: int = 0) -> LimitReport:
    """Scaled moments ``E(M_n)/sqrt(n)`` and ``E(M_n^2)/n`` for each ``n``."""
    if method not in (DP, MC):
        raise ValidationError(f"unknown method {method!r}")
    params = make_params(p, ell, FLOAT)
    rows = []
    for n in sorted(n_list):
        if n < 1:
            raise ValidationError("n must be >= 1")
        rows.append(_dp_row(params, n) if method == DP else _mc_row(params, n, reps, seed))
    first, second = limit_constants()
    return LimitReport(str(params.p), ell, tuple(rows), first, second)
