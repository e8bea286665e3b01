"""Exact laboratory for universal reinforcement-learning agents over semimeasure environments."""
from aixilab.approx import ApproxReal, Mode, Ordering, compare, rational
from aixilab.discount import FiniteLifetime, Geometric, Tabular, effective_horizon, parse_discount
from aixilab.env import ALPHA, BETA, Environment, History, Percept, percept
from aixilab.value import Evaluator, ValueQuery, Variant

__all__ = [
    "ALPHA", "BETA", "ApproxReal", "Environment", "Evaluator", "FiniteLifetime", "Geometric",
    "History", "Mode", "Ordering", "Percept", "Tabular", "ValueQuery", "Variant", "compare",
    "effective_horizon", "parse_discount", "percept", "rational",
]
