from fractions import Fraction as F

import pytest

from aixilab.discount import FiniteLifetime, Geometric, Tabular, effective_horizon, parse_discount
from aixilab.errors import SpecError


def test_geometric_normalizer():
    d = Geometric(F(1, 2))
    assert d.gamma(1) == F(1, 2) and d.Gamma(1) == 1 and d.Gamma(3) == F(1, 4)
    assert d.Gamma(1) == sum(d.gamma(t) for t in range(1, 60)) + d.Gamma(60)


def test_finite_lifetime():
    d = FiniteLifetime(5)
    assert [d.gamma(t) for t in range(1, 8)] == [1, 1, 1, 1, 1, 0, 0]
    assert [d.Gamma(t) for t in (1, 5, 6, 7)] == [5, 1, 0, 0]


def test_tabular_with_tail():
    d = Tabular((F(1, 2), F(1, 4)), F(1, 2))
    assert d.gamma(3) == F(1, 8)
    assert d.Gamma(1) == F(1)
    assert d.Gamma(2) == F(1, 2)
    assert d.Gamma(4) == F(1, 8)
    for t in range(1, 6):
        assert d.Gamma(t) == d.gamma(t) + d.Gamma(t + 1)


def test_effective_horizon():
    g = Geometric(F(1, 2))
    assert effective_horizon(g, 1, F(1, 8)) == 6
    assert effective_horizon(g, 3, F(1, 8)) - 3 == effective_horizon(g, 1, F(1, 8)) - 1
    assert effective_horizon(FiniteLifetime(5), 1, F(1, 100)) <= 6
    with pytest.raises(ValueError):
        effective_horizon(FiniteLifetime(2), 3, F(1, 2))


def test_parse_discount():
    assert parse_discount("geometric:1/2") == Geometric(F(1, 2))
    assert parse_discount("lt:4") == FiniteLifetime(4)
    assert parse_discount("table:1/2,1/4;1/2") == Tabular((F(1, 2), F(1, 4)), F(1, 2))
    for text in (str(Geometric(F(2, 3))), str(FiniteLifetime(3)), str(Tabular((F(1, 3),), F(1, 5)))):
        assert str(parse_discount(text)) == text
    for bad in ("geometric:0.5", "geometric:1", "hyperbolic:1", "lt:x"):
        with pytest.raises(SpecError):
            parse_discount(bad)
