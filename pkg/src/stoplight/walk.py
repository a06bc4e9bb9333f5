"""Joint law of the queue length and its running maximum.

The queue evolves as a reflected walk driven by a periodic light: ``ell``
red steps, on which a car arrives with probability ``p``, followed by ``ell``
green steps, on which a car leaves with probability ``q = 1 - p`` (if one is
waiting).  ``F_n(x, a) = P{S_n = x, M_n = a}`` is propagated one step at a
time on a dense triangular grid ``grid[x, a]`` with ``0 <= x <= a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Union

import numpy as np

from .errors import ResourceLimitError, TruncationError, ValidationError

EXACT = "exact"
FLOAT = "float"

#: Largest number of grid cells (``(a_cap + 1) ** 2``) joint_dist will allocate.
MAX_STATES = 25_000_000

Number = Union[Fraction, float]


class PhaseKind(Enum):
    ARRIVAL = "arrival"
    DEPARTURE = "departure"


@dataclass(frozen=True)
class Params:
    p: Fraction
    q: Fraction
    ell: int
    mode: str = EXACT

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    def prob(self, value: Fraction) -> Number:
        """Convert an exact probability into this mode's number type."""
        return Fraction(value) if self.exact else float(value)


def validate_params(p_numerator: int, p_denominator: int, ell: int,
                    mode: str = EXACT) -> Params:
    """Build :class:`Params` from ``p = p_numerator / p_denominator``.

    Requires ``0 < p <= q`` and ``ell >= 1``; ``p = q = 1/2`` is allowed.
    """
    if p_denominator <= 0:
        raise ValidationError("denominator must be positive")
    if mode not in (EXACT, FLOAT):
        raise ValidationError(f"unknown arithmetic mode {mode!r}")
    if isinstance(ell, bool) or int(ell) != ell or ell < 1:
        raise ValidationError(f"ell={ell} violates ell>=1")
    p = Fraction(p_numerator, p_denominator)
    q = 1 - p
    if p <= 0:
        raise ValidationError(f"p={p} violates p>0")
    if p > q:
        raise ValidationError(f"p>q violates p<=q (p={p}, q={q})")
    return Params(p=p, q=q, ell=int(ell), mode=mode)


def make_params(p, ell: int = 1, mode: str = EXACT) -> Params:
    """Like :func:`validate_params` but takes ``p`` as a Fraction, int or string."""
    p = Fraction(p)
    return validate_params(p.numerator, p.denominator, ell, mode)


def phase_of(i: int, ell: int) -> PhaseKind:
    """Phase of step ``i`` (1-based): arrivals on ``i mod 2ell in 1..ell``."""
    if i < 1 or ell < 1:
        raise ValidationError("phase_of needs i >= 1 and ell >= 1")
    r = (i - 1) % (2 * ell) + 1
    return PhaseKind.ARRIVAL if r <= ell else PhaseKind.DEPARTURE


def arrival_count(n: int, ell: int) -> int:
    """Number of arrival phases among steps ``1..n``; an upper bound on ``M_n``."""
    return ell * (n // (2 * ell)) + min(n % (2 * ell), ell)


def default_a_cap(n: int, ell: int) -> int:
    return max(32, math.ceil(6 * math.sqrt(n / 2)) + ell)


@dataclass(frozen=True)
class JointTable:
    """Snapshot of ``F_n``.  ``grid[x, a]`` is zero below the diagonal."""

    n: int
    grid: np.ndarray = field(repr=False)
    exact: bool = True
    a_cap: Optional[int] = None
    lost_mass: Number = 0

    @property
    def size(self) -> int:
        return self.grid.shape[0]

    def __getitem__(self, key) -> Number:
        x, a = key
        if 0 <= x <= a < self.size:
            return self.grid[x, a]
        return Fraction(0) if self.exact else 0.0

    def entries(self) -> dict:
        """Nonzero entries as ``{(x, a): probability}``."""
        xs, as_ = np.nonzero(self.grid != 0)
        return {(int(x), int(a)): self.grid[x, a] for x, a in zip(xs, as_)}

    def total(self) -> Number:
        return sum(self.grid.ravel(), Fraction(0) if self.exact else 0.0)


@dataclass(frozen=True)
class DistVector:
    values: list
    label: str
    lost_mass: Number = 0

    def __getitem__(self, k: int) -> Number:
        return self.values[k] if 0 <= k < len(self.values) else type(self.values[0])(0)

    def __len__(self) -> int:
        return len(self.values)


def _zeros(size: int, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty((size, size), dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros((size, size))


def initial_table(params: Params, size: int = 1, a_cap: Optional[int] = None) -> JointTable:
    grid = _zeros(size, params.exact)
    grid[0, 0] = params.prob(Fraction(1))
    return JointTable(0, grid, params.exact, a_cap, params.prob(Fraction(0)))


def _grown(grid: np.ndarray, exact: bool) -> np.ndarray:
    size = grid.shape[0]
    out = _zeros(size + 1, exact)
    out[:size, :size] = grid
    return out


def dp_step(table: JointTable, kind: PhaseKind, params: Params) -> JointTable:
    """Advance ``table`` by one step of the given phase."""
    p, q = params.prob(params.p), params.prob(params.q)
    grid = table.grid
    lost = table.lost_mass
    if kind is PhaseKind.ARRIVAL:
        top = grid[-1, -1]
        if top != 0:
            cap = table.a_cap
            if cap is None or grid.shape[0] <= cap:
                grid = _grown(grid, params.exact)
            elif params.exact:
                raise TruncationError(
                    f"exact table would exceed a_cap={cap} at step {table.n + 1}")
            else:
                lost = lost + p * top
        size = grid.shape[0]
        new = q * grid
        new[1:, :] += p * grid[:-1, :]
        # x = a - 1 + 1 overshoots the maximum: move the sub-diagonal to the diagonal
        k = np.arange(1, size)
        new[k, k] += new[k, k - 1]
        new[k, k - 1] = 0
    else:
        new = p * grid
        new[0, :] += q * grid[0, :]
        new[:-1, :] += q * grid[1:, :]
    return JointTable(table.n + 1, new, table.exact, table.a_cap, lost)


def iter_joint(params: Params, n: int, a_cap: Optional[int] = None) -> Iterator[JointTable]:
    """Yield ``F_0, F_1, ..., F_n``."""
    if n < 0:
        raise ValidationError("n must be >= 0")
    reach = arrival_count(n, params.ell)
    if a_cap is None and not params.exact:
        a_cap = default_a_cap(n, params.ell)
    bound = reach if a_cap is None else min(reach, a_cap)
    if (bound + 1) ** 2 > MAX_STATES:
        raise ResourceLimitError(
            f"joint table of side {bound + 1} exceeds MAX_STATES={MAX_STATES}")
    table = initial_table(params, a_cap=a_cap)
    yield table
    for i in range(1, n + 1):
        table = dp_step(table, phase_of(i, params.ell), params)
        yield table


def joint_dist(params: Params, n: int, a_cap: Optional[int] = None) -> JointTable:
    """``F_n`` for the walk started empty.

    In float mode ``a_cap`` defaults to :func:`default_a_cap`; mass pushed above
    it is accumulated in ``lost_mass``.  Exact mode never truncates.
    """
    table = None
    for table in iter_joint(params, n, a_cap):
        pass
    return table


def max_dist(table: JointTable) -> DistVector:
    zero = Fraction(0) if table.exact else 0.0
    values = [sum(table.grid[:, a], zero) for a in range(table.size)]
    return DistVector(values, "max", table.lost_mass)


def s_marginal(table: JointTable) -> DistVector:
    zero = Fraction(0) if table.exact else 0.0
    values = [sum(table.grid[x, :], zero) for x in range(table.size)]
    return DistVector(values, "state", table.lost_mass)


def moment(dist: DistVector, k: int) -> Number:
    """``sum_a a**k * P{. = a}``; exact when the vector holds Fractions."""
    if k < 0:
        raise ValidationError("moment order must be >= 0")
    zero = type(dist.values[0])(0)
    return sum((v * a ** k for a, v in enumerate(dist.values)), zero)
