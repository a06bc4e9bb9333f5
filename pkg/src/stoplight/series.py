"""Truncated power series in ``lam`` with exact rational coefficients.

All generating functions for the one-red/one-green light live here.  Every
closed form is expanded to a fixed order and compared against the dynamic
program in :mod:`stoplight.walk`.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable

from .errors import SeriesMismatch, ValidationError

DEFAULT_ORDER = 40


class Series:
    """Power series ``c_0 + c_1 lam + ... + c_N lam^N + O(lam^(N+1))``.

    Binary operations truncate to the smaller order of the two operands.
    Reading a coefficient past the order raises ``IndexError``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [Fraction(c) for c in coeffs]
        if order is not None:
            if order < 0:
                raise ValidationError("order must be >= 0")
            cs = (cs + [Fraction(0)] * (order + 1))[: order + 1]
        if not cs:
            raise ValidationError("a series needs at least one coefficient")
        self.coeffs = tuple(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order: int) -> "Series":
        return cls([c], order)

    @classmethod
    def variable(cls, order: int) -> "Series":
        return cls([0, 1], order)

    @classmethod
    def geometric(cls, ratio, order: int) -> "Series":
        """``1 / (1 - ratio * lam)``."""
        ratio = Fraction(ratio)
        return cls([ratio ** k for k in range(order + 1)])

    def __getitem__(self, k: int) -> Fraction:
        if k < 0 or k > self.order:
            raise IndexError(f"coefficient {k} is beyond series order {self.order}")
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self) -> str:
        return f"Series({[str(c) for c in self.coeffs]})"

    def __eq__(self, other) -> bool:
        if isinstance(other, Series):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            return other
        return Series.constant(other, self.order)

    def __add__(self, other) -> "Series":
        other = self._coerce(other)
        n = min(self.order, other.order)
        return Series(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1]))

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series(-c for c in self.coeffs)

    def __sub__(self, other) -> "Series":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Series":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Series":
        if not isinstance(other, Series):
            c = Fraction(other)
            return Series(c * a for a in self.coeffs)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        # skip leading zeros; high powers of theta are mostly zeros
        va = next((i for i, c in enumerate(a) if c), n + 1)
        vb = next((i for i, c in enumerate(b) if c), n + 1)
        out = [Fraction(0)] * (n + 1)
        for i in range(va, n + 1 - vb):
            ai = a[i]
            if ai:
                for j in range(vb, n + 1 - i):
                    out[i + j] += ai * b[j]
        return Series(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Series":
        if not isinstance(other, Series):
            c = Fraction(other)
            return Series(a / c for a in self.coeffs)
        if other.coeffs[0] == 0:
            raise ZeroDivisionError("series division needs a nonzero constant term")
        n = min(self.order, other.order)
        b = other.coeffs
        inv0 = 1 / b[0]
        out = []
        for k in range(n + 1):
            acc = self.coeffs[k] - sum(out[j] * b[k - j] for j in range(max(0, k - len(b) + 1), k))
            out.append(acc * inv0)
        return Series(out)

    def __rtruediv__(self, other) -> "Series":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "Series":
        if not isinstance(k, int) or k < 0:
            raise ValidationError("only nonnegative integer powers are supported")
        result = Series.constant(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None for the zero series."""
        return next((i for i, c in enumerate(self.coeffs) if c), None)


def _pq(p) -> tuple[Fraction, Fraction]:
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValidationError(f"p={p} must lie strictly between 0 and 1")
    return p, 1 - p


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


def sqrt_one_minus_4u(u, order: int) -> Series:
    """``sqrt(1 - 4 u lam)`` through the Catalan expansion."""
    u = Fraction(u)
    return Series([1] + [-2 * catalan(m - 1) * u ** m for m in range(1, order + 1)])


def theta_series(p, order: int = DEFAULT_ORDER) -> Series:
    """``theta(lam) = (1 - 2pq lam - sqrt(1 - 4pq lam)) / lam``.

    ``[lam^m] theta = 2 C_m (pq)^(m+1)`` with ``C_m`` the Catalan numbers.
    """
    if order < 1:
        raise ValidationError("theta_series needs order >= 1")
    p, q = _pq(p)
    u = p * q
    return Series([0] + [2 * catalan(m) * u ** (m + 1) for m in range(1, order + 1)])


def lambda_from_theta(theta: Series, p) -> Series:
    """``2 t / (t + 2pq)^2`` evaluated at the series ``t``; gives back ``lam``."""
    p, q = _pq(p)
    return 2 * theta / (theta + 2 * p * q) ** 2


def g00_series(p, order: int = DEFAULT_ORDER) -> Series:
    """``G(lam, 0, 0) = q lam / (1 - q lam)``: the queue never grew over 2n steps."""
    p, q = _pq(p)
    return Series([0] + [q ** n for n in range(1, order + 1)])


def _denominator(theta: Series, p: Fraction, q: Fraction, a: int) -> Series:
    """``2^(2a) p^(2a-1) q^(2a+1) (t - 2p^2) + t^(2a) (t - 2q^2)``."""
    return (2 ** (2 * a) * p ** (2 * a - 1) * q ** (2 * a + 1)) * (theta - 2 * p * p) \
        + theta ** (2 * a) * (theta - 2 * q * q)


def g_aa_series(p, a: int, order: int = DEFAULT_ORDER, theta: Series | None = None) -> Series:
    """``G(lam, a, a)``: generating function of ``P{S_2n = a, M_2n = a}``, ``a >= 1``."""
    if a < 1:
        raise ValidationError("g_aa_series needs a >= 1")
    p, q = _pq(p)
    t = theta if theta is not None else theta_series(p, order)
    num = (2 ** a * p ** (2 * a)) * (t * t - 2 * (1 - 2 * p) * q * t + 4 * p * p * q * q) \
        * (t - 2 * p * q) * t ** a
    return Series.geometric(q, t.order) * num / _denominator(t, p, q, a + 1)


def bracket_series(p, a: int, order: int = DEFAULT_ORDER, theta: Series | None = None) -> Series:
    """Closed form for ``sum_n lam^n P{M_2n = a}`` as a difference of two level terms."""
    if a < 1:
        raise ValidationError("bracket_series needs a >= 1")
    p, q = _pq(p)
    t = theta if theta is not None else theta_series(p, order)
    first = (2 ** a * p ** (2 * a - 1)) * t ** a / _denominator(t, p, q, a)
    second = (2 ** (a + 1) * p ** (2 * a + 1)) * t ** (a + 1) / _denominator(t, p, q, a + 1)
    return (t - 2 * p * q) * Series.geometric(1, t.order) * (first - second)


def relation_series(p, a: int, order: int = DEFAULT_ORDER, theta: Series | None = None) -> Series:
    """``p lam / (1 - lam) * [G(lam, a-1, a-1) - G(lam, a, a)]`` (``a = 1`` uses ``G(lam, 0, 0)``)."""
    p, q = _pq(p)
    t = theta if theta is not None else theta_series(p, order)
    lower = g00_series(p, t.order) if a == 1 else g_aa_series(p, a - 1, theta=t)
    lam = Series.variable(t.order)
    return p * lam * Series.geometric(1, t.order) * (lower - g_aa_series(p, a, theta=t))


def a1_closed_series(p, order: int = DEFAULT_ORDER) -> Series:
    """``p lam (1 - pq lam) / ((1 - q lam)(p q^2 lam^2 - (1 + 2p) q lam + 1))``."""
    p, q = _pq(p)
    num = Series([0, p, -p * p * q], order)
    den = Series([1, -q], order) * Series([1, -(1 + 2 * p) * q, p * q * q], order)
    return num / den


def max_gf_coeffs(p, a: int, order: int = DEFAULT_ORDER) -> Series:
    """Series whose ``n``-th coefficient is ``P{M_2n = a}`` for the 1+1 light.

    Computed from the bracket closed form and cross-checked against a second
    closed form (the level-difference relation for ``a > 1``, the dedicated
    rational function for ``a = 1``); raises :class:`SeriesMismatch` if the two
    disagree anywhere through ``order``.
    """
    p, _ = _pq(p)
    t = theta_series(p, order)
    bracket = bracket_series(p, a, theta=t)
    other = a1_closed_series(p, order) if a == 1 else relation_series(p, a, theta=t)
    if bracket != other:
        bad = next(k for k in range(order + 1) if bracket[k] != other[k])
        raise SeriesMismatch(f"closed forms disagree at lam^{bad} for p={p}, a={a}")
    return bracket


def a1_consistency(p, order: int = DEFAULT_ORDER) -> dict:
    """Which closed forms coincide at level ``a = 1``.

    Returns booleans for bracket vs. dedicated a=1 form and bracket vs. the
    level-difference relation applied with ``G(lam, 0, 0)``.
    """
    t = theta_series(p, order)
    bracket = bracket_series(p, 1, theta=t)
    return {
        "bracket_vs_a1_closed": bracket == a1_closed_series(p, order),
        "bracket_vs_relation": bracket == relation_series(p, 1, theta=t),
    }


def em2n_gf(order: int = DEFAULT_ORDER) -> Series:
    """``sum_n lam^n E(M_2n)`` at ``p = q = 1/2``.

    Equal to ``1/(1 - lam) * sum_a 2 (2t)^a / (1 + (2t)^(2a))``; the sum is
    finite at fixed order because ``(2t)^a`` starts at ``lam^a``.
    """
    if order < 1:
        raise ValidationError("em2n_gf needs order >= 1")
    two_t = 2 * theta_series(Fraction(1, 2), order)
    total = Series.constant(0, order)
    power = Series.constant(1, order)
    for _ in range(1, order + 1):
        power = power * two_t
        total = total + 2 * power / (1 + power * power)
    return Series.geometric(1, order) * total

