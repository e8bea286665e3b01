"""Named environments and classes used by tests, scripts and the CLI."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable

from aixilab.env import (
    ALPHA,
    BETA,
    Environment,
    History,
    SearchRelation,
    TableEnv,
    make_adversarial_env,
    make_prop1_env,
    make_rho_family_env,
    percept,
)
from aixilab.mixture import WeightedClass


def constant_target(action):
    return lambda h: action


def alternating_target(h: History):
    return ALPHA if h.time % 2 else BETA


def coin_table() -> TableEnv:
    """Fair coin rewards at every step, independent of actions (a measure)."""
    return TableEnv("coin", (ALPHA, BETA), [0], [0, 1], 1,
                    [(("*",), (percept(0, r),), Fraction(1, 2)) for r in (0, 1)],
                    tail="uniform", is_measure=True)


def biased_table() -> TableEnv:
    """Action beta is a safer bet at step one; afterwards the last percept repeats."""
    h, z = percept(0, 1), percept(0, 0)
    rows = [
        ((ALPHA,), (h,), Fraction(3, 8)), ((ALPHA,), (z,), Fraction(5, 8)),
        ((BETA,), (h,), Fraction(1, 2)), ((BETA,), (z,), Fraction(1, 2)),
    ]
    for a in (ALPHA, BETA):
        for first in (h, z):
            rows.append((("*", a), (first, h), Fraction(1, 4) if a == ALPHA else Fraction(3, 4)))
            rows.append((("*", a), (first, z), Fraction(3, 4) if a == ALPHA else Fraction(1, 4)))
    return TableEnv("biased", (ALPHA, BETA), [0], [0, 1], 2, rows, tail="repeat-last", is_measure=True)


def leaky_table() -> TableEnv:
    """A semimeasure that loses 1/4 of its mass after alpha and ends after step two."""
    h, z = percept(0, 1), percept(0, 0)
    rows = [
        ((ALPHA,), (h,), Fraction(1, 2)), ((ALPHA,), (z,), Fraction(1, 4)),
        ((BETA,), (h,), Fraction(1, 4)), ((BETA,), (z,), Fraction(3, 4)),
        (("*", "*"), (h, h), Fraction(1, 2)), (("*", "*"), (z, h), Fraction(1, 4)),
        (("*", "*"), (z, z), Fraction(3, 4)),
    ]
    return TableEnv("leaky", (ALPHA, BETA), [0], [0, 1], 2, rows, tail="end", is_measure=False)


def tie_table() -> TableEnv:
    """Both actions pay the same expected reward through different distributions."""
    h, m, z = percept(0, 1), percept(0, Fraction(1, 2)), percept(0, 0)
    rows = [((ALPHA,), (m,), Fraction(1)), ((BETA,), (h,), Fraction(1, 2)), ((BETA,), (z,), Fraction(1, 2))]
    return TableEnv("tie", (ALPHA, BETA), [0], [0, Fraction(1, 2), 1], 1, rows, tail="repeat-last",
                    is_measure=True)


CORPUS: dict[str, Callable[[], Environment]] = {
    "prop1-1/4": lambda: make_prop1_env(Fraction(1, 4)),
    "prop1-1/2": lambda: make_prop1_env(Fraction(1, 2)),
    "adversarial-alpha": lambda: make_adversarial_env(constant_target(ALPHA), name="adversarial-alpha"),
    "adversarial-alternate": lambda: make_adversarial_env(alternating_target, name="adversarial-alternate"),
    "rho-true": lambda: make_rho_family_env(0, SearchRelation.always()),
    "rho-fails": lambda: make_rho_family_env(1, SearchRelation.fails_at(2)),
    "rho-mod": lambda: make_rho_family_env(2, SearchRelation.modular(3, 2)),
    "coin": coin_table,
    "biased": biased_table,
    "leaky": leaky_table,
    "tie": tie_table,
}


def corpus() -> dict[str, Environment]:
    return {name: make() for name, make in CORPUS.items()}


def measures() -> dict[str, Environment]:
    return {k: e for k, e in corpus().items() if e.is_measure}


def semimeasures() -> dict[str, Environment]:
    return {k: e for k, e in corpus().items() if not e.is_measure}


def rho_class(size: int = 4) -> WeightedClass:
    """``rho_0..rho_{size-1}`` with weights ``2^-(i+1)``; odd members lose their beta branch."""
    members = []
    for i in range(size):
        rel = SearchRelation.always() if i % 2 == 0 else SearchRelation.fails_at(2)
        members.append((make_rho_family_env(i, rel), Fraction(1, 2 ** (i + 1))))
    return WeightedClass(tuple(members))


def adversarial_class() -> WeightedClass:
    """An adversary against constant alpha next to a fair coin."""
    adv = make_adversarial_env(constant_target(ALPHA), name="adversarial-alpha")
    # the adversary pays 0/1, so give the coin the same percept alphabet
    return WeightedClass(((adv, Fraction(1, 2)), (coin_table(), Fraction(1, 4))))


def prop1_class() -> WeightedClass:
    """Prop1 (eps_r=1/4) next to a measure in which alpha pays 1 forever instead of ending."""
    base = make_prop1_env(Fraction(1, 4))
    h, e = percept(0, 1), percept(0, Fraction(1, 4))
    twin = TableEnv("prop1-twin", (ALPHA, BETA), [0], [0, Fraction(1, 4), 1], 1,
                    [((ALPHA,), (h,), 1), ((BETA,), (e,), 1)], tail="repeat-last", is_measure=True)
    return WeightedClass(((base, Fraction(1, 2)), (twin, Fraction(1, 2))))


CLASSES: dict[str, Callable[[], WeightedClass]] = {
    "rho": rho_class,
    "adversarial": adversarial_class,
    "prop1": prop1_class,
}
