"""Finite Bayesian mixtures over environment classes."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from aixilab.approx import rational
from aixilab.env import Environment, History
from aixilab.errors import AlphabetMismatch, ConditioningOnNull


@dataclass(frozen=True)
class WeightedClass:
    members: tuple[tuple[Environment, Fraction], ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("a class needs at least one member")
        members = tuple((env, rational(w)) for env, w in self.members)
        object.__setattr__(self, "members", members)
        if any(w <= 0 for _, w in members):
            raise ValueError("weights must be positive")
        if sum(w for _, w in members) > 1:
            raise ValueError("weights must sum to at most 1")
        first = members[0][0]
        for env, _ in members[1:]:
            if env.actions != first.actions or set(env.percepts) != set(first.percepts):
                raise AlphabetMismatch(f"{env.name} and {first.name} use different alphabets")
        names = [env.name for env, _ in members]
        if len(set(names)) != len(names):
            raise ValueError("member names must be distinct")

    @classmethod
    def of(cls, pairs: Sequence[tuple[Environment, object]]) -> WeightedClass:
        return cls(tuple((env, rational(w)) for env, w in pairs))

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, w in self.members), Fraction(0))

    def weight(self, name: str) -> Fraction:
        return self._lookup(name)[1]

    def _lookup(self, name: str):
        for env, w in self.members:
            if env.name == name:
                return env, w
        raise KeyError(name)


class MixtureEnv(Environment):
    """``sum_i w_i nu_i`` with exact and lower evaluations taken memberwise."""

    def __init__(self, cls: WeightedClass, name: str = "mixture"):
        self.cls = cls
        self.name = name
        first = cls.members[0][0]
        self.actions = first.actions
        self.percepts = first.percepts
        self.is_measure = all(env.is_measure for env, _ in cls.members) and cls.total_weight == 1

    def weighted_masses(self, actions, percepts) -> list[Fraction]:
        return [w * env.mass(actions, percepts) for env, w in self.cls.members]

    def _mass(self, actions, percepts):
        return sum(self.weighted_masses(actions, percepts), Fraction(0))

    def lower(self, actions, percepts, k):
        return sum((w * env.lower(actions, percepts, k) for env, w in self.cls.members), Fraction(0))

    def stationary(self, actions, percepts):
        found = None
        for env, w in self.cls.members:
            if env.mass(actions, percepts) == 0:
                continue
            p = env.stationary(actions, percepts)
            if p is None or (found is not None and p != found):
                return None
            found = p
        return found

    def tail_reward(self, actions, percepts):
        # every live member is a measure with the same per-step expectation,
        # so every posterior mixture of them is too
        found = None
        for env, _ in self.cls.members:
            if env.mass(actions, percepts) == 0:
                continue
            r = env.tail_reward(actions, percepts)
            if r is None or (found is not None and r != found):
                return None
            found = r
        return found

    def state_key(self, actions, percepts):
        masses = self.weighted_masses(actions, percepts)
        total = sum(masses)
        live = tuple(
            (j, env.state_key(actions, percepts), m / total)
            for j, ((env, _), m) in enumerate(zip(self.cls.members, masses)) if m > 0
        )
        return ("mix", live)


def mixture_env(cls: WeightedClass, name: str = "mixture") -> MixtureEnv:
    return MixtureEnv(cls, name)


def posterior(cls: WeightedClass, h: History) -> list[tuple[str, Fraction]]:
    """Bayes weights ``w_i nu_i(h) / xi(h)`` over completed steps of ``h``."""
    acts, pcs = h.actions, h.percepts
    masses = [(env.name, w * env.mass(acts, pcs)) for env, w in cls.members]
    total = sum(m for _, m in masses)
    if total == 0:
        raise ConditioningOnNull(f"history {h} has mixture mass zero")
    return [(name, m / total) for name, m in masses]


def dominance_bound(cls: WeightedClass, member: str, h: History, v_member) -> Fraction:
    """Lower bound on a policy's mixture value from its value in one member."""
    env, w = cls._lookup(member)
    acts, pcs = h.actions, h.percepts
    total = sum(wi * e.mass(acts, pcs) for e, wi in cls.members)
    if total == 0:
        raise ConditioningOnNull(f"history {h} has mixture mass zero")
    return w * env.mass(acts, pcs) / total * rational(v_member)
