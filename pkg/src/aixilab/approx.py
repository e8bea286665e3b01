"""Anytime reals: exact rationals, monotone lower approximations, interval enclosures.

An :class:`ApproxReal` is a budget-indexed sequence of nested enclosures
``[lo(k), hi(k)]`` with rational endpoints.  A missing upper bound is the
explicit :data:`INF` sentinel, never a large rational.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from typing import Callable, Union

from aixilab.errors import DivisorNotSeparated

K_MAX = 64


class Unbounded(enum.Enum):
    POS_INF = "+inf"

    def __repr__(self) -> str:
        return "+inf"


INF = Unbounded.POS_INF
Bound = Union[Fraction, Unbounded]


class Mode(enum.IntEnum):
    """Representation strength, weakest first."""

    LOWER = 0
    INTERVAL = 1
    EXACT = 2


class Ordering(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    WITHIN_TOL = "within-tol"
    UNRESOLVED = "unresolved"


def rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if any(c in s for c in ".eE"):
            raise ValueError(f"not an exact fraction: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot make an exact rational from {type(x).__name__}")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _lt(x: Bound, y: Bound) -> bool:
    if x is INF:
        return False
    if y is INF:
        return True
    return x < y


def _add(x: Bound, y: Bound) -> Bound:
    if x is INF or y is INF:
        return INF
    return x + y


def _mul_intervals(alo, ahi, blo, bhi) -> tuple[Fraction, Bound]:
    if ahi is not INF and bhi is not INF:
        products = (alo * blo, alo * bhi, ahi * blo, ahi * bhi)
        return min(products), max(products)
    if alo < 0 or blo < 0:
        raise ValueError("product of an unbounded enclosure with a possibly negative one")
    # an exact zero factor annihilates the unbounded side
    if (ahi is not INF and ahi == 0) or (bhi is not INF and bhi == 0):
        return Fraction(0), Fraction(0)
    return alo * blo, INF


class ApproxReal:
    """An anytime real number.

    ``refine(k)`` returns a raw enclosure ``(lo, hi)`` at budget ``k``.  Raw
    enclosures are intersected with all earlier ones, so the sequence seen
    through :meth:`interval` is always nested even if ``refine`` is sloppy.
    An empty intersection means ``refine`` was unsound and raises.
    """

    __slots__ = ("_refine", "mode", "_cache")

    def __init__(self, refine: Callable[[int], tuple[Fraction, Bound]], mode: Mode):
        self._refine = refine
        self.mode = Mode(mode)
        self._cache: list[tuple[Fraction, Bound]] = []

    @classmethod
    def exact(cls, q) -> ApproxReal:
        q = rational(q)
        return cls(lambda k: (q, q), Mode.EXACT)

    @classmethod
    def lower(cls, lo: Callable[[int], Fraction]) -> ApproxReal:
        return cls(lambda k: (rational(lo(k)), INF), Mode.LOWER)

    @classmethod
    def enclosure(cls, fn: Callable[[int], tuple]) -> ApproxReal:
        def refine(k):
            lo, hi = fn(k)
            return rational(lo), (INF if hi is INF else rational(hi))

        return cls(refine, Mode.INTERVAL)

    def interval(self, k: int) -> tuple[Fraction, Bound]:
        if k < 0:
            raise ValueError("budget must be nonnegative")
        cache = self._cache
        while len(cache) <= k:
            j = len(cache)
            lo, hi = self._refine(j)
            if self.mode is Mode.EXACT:
                cache.append((lo, hi))
                continue
            if cache:
                plo, phi = cache[-1]
                lo = max(lo, plo)
                hi = phi if _lt(phi, hi) else hi
            if _lt(hi, lo):
                raise ValueError(f"refinement {j} is inconsistent with earlier enclosures")
            cache.append((lo, hi))
        return cache[k]

    def lo(self, k: int) -> Fraction:
        return self.interval(k)[0]

    def hi(self, k: int) -> Bound:
        return self.interval(k)[1]

    def width(self, k: int) -> Bound:
        lo, hi = self.interval(k)
        return INF if hi is INF else hi - lo

    def is_exact_at(self, k: int) -> bool:
        lo, hi = self.interval(k)
        return hi is not INF and lo == hi

    @property
    def value(self) -> Fraction:
        if self.mode is not Mode.EXACT:
            raise ValueError("value is only defined for exact reals; use interval(k)")
        return self.interval(0)[0]

    def __repr__(self) -> str:
        if self.mode is Mode.EXACT:
            return f"ApproxReal.exact({self.value})"
        lo, hi = self.interval(0)
        return f"ApproxReal<{self.mode.name.lower()}>[{lo}, {hi!r}]@0"

    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)


def _coerce(x) -> ApproxReal:
    return x if isinstance(x, ApproxReal) else ApproxReal.exact(x)


def _combined_mode(a: ApproxReal, b: ApproxReal) -> Mode:
    return min(a.mode, b.mode)


def add(a: ApproxReal, b: ApproxReal) -> ApproxReal:
    def refine(k):
        alo, ahi = a.interval(k)
        blo, bhi = b.interval(k)
        return alo + blo, _add(ahi, bhi)

    return ApproxReal(refine, _combined_mode(a, b))


def sub(a: ApproxReal, b: ApproxReal) -> ApproxReal:
    if b.mode is Mode.LOWER:
        raise ValueError("cannot subtract a quantity without an upper bound")

    def refine(k):
        alo, ahi = a.interval(k)
        blo, bhi = b.interval(k)
        if bhi is INF:
            raise ValueError("cannot subtract a quantity without an upper bound")
        return alo - bhi, (INF if ahi is INF else ahi - blo)

    return ApproxReal(refine, _combined_mode(a, b))


def mul(a: ApproxReal, b: ApproxReal) -> ApproxReal:
    def refine(k):
        alo, ahi = a.interval(k)
        blo, bhi = b.interval(k)
        return _mul_intervals(alo, ahi, blo, bhi)

    return ApproxReal(refine, _combined_mode(a, b))


def separation_budget(b: ApproxReal, k_max: int = K_MAX) -> int:
    """Least budget ``k <= k_max`` at which ``b`` is certified positive."""
    for k in range(k_max + 1):
        if b.lo(k) > 0:
            return k
    raise DivisorNotSeparated(f"divisor not certified positive within {k_max} refinements")


def div(a: ApproxReal, b: ApproxReal, k_max: int = K_MAX) -> ApproxReal:
    """Interval quotient for a divisor certified positive within ``k_max``."""
    k0 = separation_budget(b, k_max)

    def refine(k):
        j = max(k, k0)
        alo, ahi = a.interval(j)
        blo, bhi = b.interval(j)
        rlo = Fraction(0) if bhi is INF else 1 / bhi
        return _mul_intervals(alo, ahi, rlo, 1 / blo)

    return ApproxReal(refine, _combined_mode(a, b))


def compare(a: ApproxReal, b: ApproxReal, tol, k_max: int = K_MAX) -> Ordering:
    tol = rational(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    for k in range(k_max + 1):
        alo, ahi = a.interval(k)
        blo, bhi = b.interval(k)
        if _lt(bhi, alo):
            return Ordering.GREATER
        if _lt(ahi, blo):
            return Ordering.LESS
        if ahi is not INF and bhi is not INF and max(ahi - blo, bhi - alo) < tol:
            return Ordering.WITHIN_TOL
    return Ordering.UNRESOLVED
