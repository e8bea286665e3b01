from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aixilab.approx import (
    INF,
    ApproxReal,
    Mode,
    Ordering,
    add,
    compare,
    div,
    format_rational,
    mul,
    rational,
    sub,
)
from aixilab.errors import DivisorNotSeparated


def converging(x: F, width0: F = F(1)):
    """Enclosure of ``x`` whose width halves with each budget step."""
    return ApproxReal.enclosure(lambda k: (x - width0 / 2 ** (k + 1), x + width0 / 2 ** (k + 1)))


def test_rational_rejects_floats_and_decimal_strings():
    assert rational("3/6") == F(1, 2)
    assert format_rational(F(2, 4)) == "1/2"
    with pytest.raises(TypeError):
        rational(0.5)
    with pytest.raises(ValueError):
        rational("0.5")


def test_exact_addition():
    assert (ApproxReal.exact(F(1, 2)) + ApproxReal.exact(F(1, 3))).value == F(5, 6)


def test_adding_exact_zero_keeps_lower_sequence():
    lo = ApproxReal.lower(lambda k: 1 - F(1, 2 ** k))
    s = lo + 0
    assert s.mode is Mode.LOWER
    assert [s.lo(k) for k in range(5)] == [1 - F(1, 2 ** k) for k in range(5)]
    assert s.hi(3) is INF


def test_interval_sum_narrows():
    def leaf(k):
        return (F(0), F(1)) if k < 5 else (F(1, 2), F(1, 2))

    a, b = ApproxReal.enclosure(leaf), ApproxReal.enclosure(leaf)
    s = add(a, b)
    assert s.interval(0) == (0, 2)
    assert s.interval(5) == (1, 1)


def test_products_and_quotients():
    assert (ApproxReal.exact(F(3, 4)) * F(2, 3)).value == F(1, 2)
    assert div(ApproxReal.exact(1), ApproxReal.exact(2)).value == F(1, 2)
    assert (ApproxReal.exact(1) - F(1, 4)).value == F(3, 4)


def test_lower_monotone_product():
    a = ApproxReal.lower(lambda k: 1 - F(1, 2 ** k))
    p = mul(a, a)
    assert p.mode is Mode.LOWER
    assert [p.lo(k) for k in range(3)] == [0, F(1, 4), F(9, 16)]


def test_division_needs_separated_divisor():
    with pytest.raises(DivisorNotSeparated):
        div(ApproxReal.exact(1), ApproxReal.exact(0))
    late = ApproxReal.enclosure(lambda k: (F(0), F(1)) if k < 3 else (F(1, 2), F(1)))
    q = div(ApproxReal.exact(1), late, k_max=5)
    assert q.interval(0) == (1, 2)
    with pytest.raises(DivisorNotSeparated):
        div(ApproxReal.exact(1), late, k_max=2)


def test_subtracting_unbounded_is_refused():
    with pytest.raises(ValueError):
        sub(ApproxReal.exact(1), ApproxReal.lower(lambda k: F(0)))


def test_compare():
    half, third = ApproxReal.exact(F(1, 2)), ApproxReal.exact(F(1, 3))
    assert compare(half, third, F(1, 100)) is Ordering.GREATER
    assert compare(third, half, F(1, 100)) is Ordering.LESS
    assert compare(half, half, F(1, 100)) is Ordering.WITHIN_TOL
    lo = ApproxReal.lower(lambda k: 1 - F(1, 2 ** k))
    assert compare(lo, ApproxReal.exact(F(9, 10)), F(1, 100), k_max=4) is Ordering.GREATER
    assert compare(lo, ApproxReal.exact(F(9, 10)), F(1, 100), k_max=3) is Ordering.UNRESOLVED
    with pytest.raises(ValueError):
        compare(half, half, 0)


def test_sloppy_refinements_are_nested_and_unsound_ones_raise():
    wobbly = ApproxReal.enclosure(lambda k: (F(0), F(1)) if k % 2 else (F(1, 4), F(3, 4)))
    assert wobbly.interval(1) == (F(1, 4), F(3, 4))
    broken = ApproxReal.enclosure(lambda k: (F(0), F(1, 4)) if k == 0 else (F(1, 2), F(1)))
    with pytest.raises(ValueError):
        broken.interval(1)


fractions = st.fractions(min_value=-4, max_value=4, max_denominator=16)
positive = st.fractions(min_value=F(1, 8), max_value=4, max_denominator=16)
nonneg = st.fractions(min_value=0, max_value=4, max_denominator=16)


@st.composite
def expressions(draw, depth=3):
    """Random expression trees over exact leaves as (exact value, interval ApproxReal)."""
    if depth == 0 or draw(st.booleans()):
        x = draw(fractions)
        return x, converging(x)
    op = draw(st.sampled_from(["add", "sub", "mul", "div"]))
    xa, a = draw(expressions(depth=depth - 1))
    if op == "div":
        xb = draw(positive)
        return xa / xb, div(a, converging(xb, F(1, 16)))
    xb, b = draw(expressions(depth=depth - 1))
    fn = {"add": (add, xa + xb), "sub": (sub, xa - xb), "mul": (mul, xa * xb)}[op]
    return fn[1], fn[0](a, b)


@settings(max_examples=150, deadline=None)
@given(expressions())
def test_enclosure_soundness_and_nesting(expr):
    x, approx = expr
    prev = None
    for k in range(8):
        lo, hi = approx.interval(k)
        assert lo <= x <= hi
        if prev is not None:
            assert prev[0] <= lo and hi <= prev[1]
        prev = (lo, hi)


@settings(max_examples=100, deadline=None)
@given(expressions(depth=2))
def test_width_halves_with_leaf_width(expr):
    _, approx = expr
    # width * 2^k stays bounded: the expression inherits the leaves' rate
    scaled = [approx.width(k) * 2 ** k for k in range(4, 14)]
    assert scaled[-1] <= scaled[0]


@settings(max_examples=100, deadline=None)
@given(nonneg, nonneg, st.sampled_from(["add", "mul"]))
def test_lower_monotone_closure(x, y, op):
    a = ApproxReal.lower(lambda k: x - x / 2 ** k)
    b = ApproxReal.lower(lambda k: y - y / 2 ** k)
    c = add(a, b) if op == "add" else mul(a, b)
    assert c.mode is Mode.LOWER
    los = [c.lo(k) for k in range(10)]
    assert los == sorted(los)
    assert los[-1] <= (x + y if op == "add" else x * y)
