"""Summable discount functions with exact tail sums."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from aixilab.approx import format_rational, rational
from aixilab.errors import SpecError


@dataclass(frozen=True)
class Geometric:
    """``gamma_t = q^t``."""

    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", rational(self.q))
        if not 0 < self.q < 1:
            raise ValueError("geometric ratio must lie in (0, 1)")

    lifetime = None

    def gamma(self, t: int) -> Fraction:
        return self.q ** t if t >= 1 else Fraction(0)

    def Gamma(self, t: int) -> Fraction:
        t = max(t, 1)
        return self.q ** t / (1 - self.q)

    def __str__(self) -> str:
        return f"geometric:{format_rational(self.q)}"


@dataclass(frozen=True)
class FiniteLifetime:
    """Undiscounted rewards up to and including time ``m``."""

    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("lifetime must be nonnegative")

    @property
    def lifetime(self) -> int:
        return self.m

    def gamma(self, t: int) -> Fraction:
        return Fraction(int(1 <= t <= self.m))

    def Gamma(self, t: int) -> Fraction:
        return Fraction(max(0, self.m - max(t, 1) + 1))

    def __str__(self) -> str:
        return f"lt:{self.m}"


@dataclass(frozen=True)
class Tabular:
    """Listed discounts ``gamma_1..gamma_L``, then ``gamma_L * ratio^(t-L)``."""

    values: tuple[Fraction, ...]
    tail_ratio: Fraction = Fraction(0)

    def __post_init__(self):
        vals = tuple(rational(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "tail_ratio", rational(self.tail_ratio))
        if not vals or any(v < 0 for v in vals):
            raise ValueError("need at least one nonnegative discount")
        if not 0 <= self.tail_ratio < 1:
            raise ValueError("tail ratio must lie in [0, 1)")

    lifetime = None

    def gamma(self, t: int) -> Fraction:
        if t < 1:
            return Fraction(0)
        L = len(self.values)
        if t <= L:
            return self.values[t - 1]
        return self.values[-1] * self.tail_ratio ** (t - L)

    def Gamma(self, t: int) -> Fraction:
        t = max(t, 1)
        L = len(self.values)
        r = self.tail_ratio
        tail = self.values[-1] * r / (1 - r)
        if t > L:
            return self.values[-1] * r ** (t - L) / (1 - r)
        return sum(self.values[t - 1:], Fraction(0)) + tail

    def __str__(self) -> str:
        vals = ",".join(format_rational(v) for v in self.values)
        return f"table:{vals}" + (f";{format_rational(self.tail_ratio)}" if self.tail_ratio else "")


Discount = Union[Geometric, FiniteLifetime, Tabular]


def parse_discount(text: str) -> Discount:
    """``geometric:1/2``, ``lt:5`` or ``table:1/2,1/4[;RATIO]``."""
    kind, _, arg = text.strip().partition(":")
    try:
        if kind == "geometric":
            return Geometric(rational(arg))
        if kind == "lt":
            return FiniteLifetime(int(arg))
        if kind == "table":
            vals, _, ratio = arg.partition(";")
            return Tabular(tuple(rational(v) for v in vals.split(",")), rational(ratio or "0"))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SpecError(f"bad discount {text!r}: {exc}") from exc
    raise SpecError(f"unknown discount kind {kind!r}")


def effective_horizon(d: Discount, t: int, eps) -> int:
    """Least ``k`` with ``Gamma_k / Gamma_t < eps / 2``."""
    eps = rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    G = d.Gamma(t)
    if G <= 0:
        raise ValueError(f"Gamma_{t} is zero")
    k = t
    cap: Optional[int] = None if d.lifetime is None else d.lifetime + 1
    while d.Gamma(k) >= eps / 2 * G:
        k += 1
        if cap is not None and k >= cap:
            return cap
    return k
