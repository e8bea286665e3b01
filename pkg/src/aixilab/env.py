"""Chronological conditional semimeasure environments.

An environment assigns a mass ``nu(e_1..e_t || a_1..a_t)`` to every percept
sequence given the actions taken so far.  Mass may be lost from one step to
the next; lost mass is how an environment "ends".  Every environment here
is evaluated with exact rationals.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Iterator, NamedTuple, Optional, Sequence

from aixilab.approx import format_rational, rational
from aixilab.errors import (
    ConditioningOnNull,
    ExactUnavailable,
    NormalizationSingular,
    SearchBudgetExceeded,
)

Action = str
ALPHA: Action = "alpha"
BETA: Action = "beta"


class Percept(NamedTuple):
    obs: int
    reward: Fraction

    def __str__(self) -> str:
        return f"{self.obs}:{format_rational(self.reward)}"

    @classmethod
    def parse(cls, text: str) -> Percept:
        obs, _, reward = text.strip().partition(":")
        if not _:
            raise ValueError(f"percept must look like OBS:REWARD, got {text!r}")
        return cls(int(obs), rational(reward))


def percept(obs: int, reward) -> Percept:
    return Percept(obs, rational(reward))


@dataclass(frozen=True)
class History:
    """Alternating action/percept record, optionally ending in an action."""

    steps: tuple[tuple[Action, Percept], ...] = ()
    pending: Optional[Action] = None

    @property
    def actions(self) -> tuple[Action, ...]:
        return tuple(a for a, _ in self.steps)

    @property
    def percepts(self) -> tuple[Percept, ...]:
        return tuple(e for _, e in self.steps)

    @property
    def time(self) -> int:
        """Index of the next percept, i.e. completed steps + 1."""
        return len(self.steps) + 1

    def act(self, action: Action) -> History:
        if self.pending is not None:
            raise ValueError("history already ends in an action")
        return History(self.steps, action)

    def observe(self, e: Percept) -> History:
        if self.pending is None:
            raise ValueError("no pending action to attach the percept to")
        return History(self.steps + ((self.pending, e),))

    def then(self, action: Action, e: Percept) -> History:
        return self.act(action).observe(e)

    def completed(self) -> History:
        return History(self.steps)

    @classmethod
    def of(cls, actions: Sequence[Action], percepts: Sequence[Percept]) -> History:
        if len(actions) not in (len(percepts), len(percepts) + 1):
            raise ValueError("actions must match percepts, plus at most one pending action")
        steps = tuple(zip(actions, percepts))
        pending = actions[len(percepts)] if len(actions) > len(percepts) else None
        return cls(steps, pending)

    def __str__(self) -> str:
        parts = [f"{a}@{e}" for a, e in self.steps]
        if self.pending is not None:
            parts.append(self.pending)
        return ",".join(parts)

    @classmethod
    def parse(cls, text: str) -> History:
        """Inverse of ``str``: ``"beta@0:1/4,alpha"``."""
        steps, pending = [], None
        items = [s for s in (x.strip() for x in text.split(",")) if s]
        for j, item in enumerate(items):
            if "@" in item:
                a, _, e = item.partition("@")
                steps.append((a, Percept.parse(e)))
            elif j == len(items) - 1:
                pending = item
            else:
                raise ValueError(f"bare action {item!r} allowed only at the end")
        return cls(tuple(steps), pending)


class Environment:
    """Base class.  Subclasses implement ``_mass`` on chronologically sliced input.

    Optional hooks:

    ``stationary(actions, percepts)``
        a percept ``p`` if, from this prefix on and whatever the actions,
        ``p`` recurs with conditional probability 1 forever.
    ``tail_reward(actions, percepts)``
        a reward ``r`` if, from this prefix on and whatever the actions, the
        environment is a measure whose expected reward is ``r`` at every step.
        Defaults to the reward of the stationary percept.
    ``state_key(actions, percepts)``
        a hashable key; prefixes with equal keys at the same time index have
        identical conditional futures.
    """

    name: str = "env"
    actions: tuple[Action, ...] = (ALPHA, BETA)
    percepts: tuple[Percept, ...] = ()
    is_measure: bool = False
    has_exact: bool = True

    def mass(self, actions: Sequence[Action], percepts: Sequence[Percept]) -> Fraction:
        t = len(percepts)
        if len(actions) < t:
            raise ValueError("need an action for every percept")
        return self._mass(tuple(actions[:t]), tuple(percepts))

    def _mass(self, actions: tuple, percepts: tuple) -> Fraction:
        raise ExactUnavailable(f"{self.name} has no exact evaluation")

    def lower(self, actions: Sequence[Action], percepts: Sequence[Percept], k: int) -> Fraction:
        return self.mass(actions, percepts)

    def stationary(self, actions: tuple, percepts: tuple) -> Optional[Percept]:
        return None

    def tail_reward(self, actions: tuple, percepts: tuple) -> Optional[Fraction]:
        p = self.stationary(actions, percepts)
        return None if p is None else p.reward

    def state_key(self, actions: tuple, percepts: tuple) -> Hashable:
        return (actions, percepts)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def conditional(
    env: Environment,
    h: History,
    e_next: Sequence[Percept] = (),
    a_next: Sequence[Action] = (),
) -> Fraction:
    """``nu(e_next | history, a_next)``; a pending action in ``h`` comes first."""
    a_next = tuple(a_next)
    if h.pending is not None:
        a_next = (h.pending,) + a_next
    base = env.mass(h.actions, h.percepts)
    if base == 0:
        raise ConditioningOnNull(f"history {h} has measure zero in {env.name}")
    if not e_next:
        return Fraction(1)
    return env.mass(h.actions + a_next, h.percepts + tuple(e_next)) / base


def one_step(env: Environment, actions: tuple, percepts: tuple, action: Action) -> list[tuple[Percept, Fraction]]:
    """Unnormalized masses of every percept after ``action``."""
    acts = actions + (action,)
    return [(e, env.mass(acts, percepts + (e,))) for e in env.percepts]


# --- validity ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # range | root | superadditivity | chronology | measure
    actions: tuple
    percepts: tuple
    detail: str

    def __str__(self) -> str:
        h = History.of(self.actions, self.percepts) if len(self.actions) <= len(self.percepts) + 1 else self.actions
        return f"{self.kind} at [{h}]: {self.detail}"


@dataclass
class ValidityReport:
    env: str
    depth: int
    violations: list[Violation] = field(default_factory=list)
    deficits: list[tuple[tuple, tuple, Fraction]] = field(default_factory=list)
    prefixes_checked: int = 0

    @property
    def valid(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = [f"{self.env}: depth {self.depth}, {self.prefixes_checked} prefixes, "
               + ("valid" if self.valid else f"{len(self.violations)} violation(s)")]
        out.extend(f"  VIOLATION {v}" for v in self.violations)
        for acts, pcs, lost in self.deficits:
            out.append(f"  deficit {format_rational(lost)} at [{History.of(acts, pcs)}]")
        return out


def check_validity(env: Environment, max_depth: int, max_deficits: int = 50) -> ValidityReport:
    """Check the semimeasure axioms on every positive-mass prefix up to ``max_depth``.

    Superadditivity is checked for each continuation action; chronology by
    re-evaluating each prefix with every action appended.  Strict losses are
    reported as deficits, which are legal for semimeasures.
    """
    report = ValidityReport(env.name, max_depth)
    root = env.mass((), ())
    if not 0 <= root <= 1:
        report.violations.append(Violation("root", (), (), f"nu(empty) = {root}"))
    if env.is_measure and root != 1:
        report.violations.append(Violation("measure", (), (), f"nu(empty) = {root} != 1"))
    frontier = [((), (), root)]
    for depth in range(max_depth):
        nxt = []
        for acts, pcs, m in frontier:
            report.prefixes_checked += 1
            if m <= 0:
                continue
            for a in env.actions:
                if depth > 0:
                    again = env.mass(acts + (a,), pcs)
                    if again != m:
                        report.violations.append(Violation(
                            "chronology", acts + (a,), pcs, f"mass {again} != {m} with a later action appended"))
                total = Fraction(0)
                for e, me in one_step(env, acts, pcs, a):
                    if not 0 <= me <= 1:
                        report.violations.append(Violation("range", acts + (a,), pcs + (e,), f"mass {me}"))
                    total += me
                    if me > 0:
                        nxt.append((acts + (a,), pcs + (e,), me))
                if total > m:
                    report.violations.append(Violation(
                        "superadditivity", acts + (a,), pcs, f"children sum {total} > parent {m}"))
                elif total < m:
                    if env.is_measure:
                        report.violations.append(Violation(
                            "measure", acts + (a,), pcs, f"children sum {total} < parent {m}"))
                    elif len(report.deficits) < max_deficits:
                        report.deficits.append((acts + (a,), pcs, m - total))
        frontier = nxt
    report.prefixes_checked += len(frontier)
    return report


def iter_histories(env: Environment, depth: int) -> Iterator[History]:
    """Every positive-mass history with at most ``depth`` completed steps."""
    frontier = [History()]
    for d in range(depth + 1):
        nxt = []
        for h in frontier:
            yield h
            if d == depth:
                continue
            for a in env.actions:
                for e, m in one_step(env, h.actions, h.percepts, a):
                    if m > 0:
                        nxt.append(h.then(a, e))
        frontier = nxt


# --- Solomonoff normalization -------------------------------------------------


class NormalizedEnv(Environment):
    """Rescales each one-step conditional to sum to one.

    ``on_singular`` decides what happens at a positive-mass prefix whose
    continuations all have mass zero: ``"raise"`` (default) or ``"uniform"``,
    which completes the measure with equal conditionals.
    """

    is_measure = True

    def __init__(self, base: Environment, on_singular: str = "raise"):
        if on_singular not in ("raise", "uniform"):
            raise ValueError("on_singular must be 'raise' or 'uniform'")
        self.base = base
        self.on_singular = on_singular
        self.name = f"norm({base.name})"
        self.actions = base.actions
        self.percepts = base.percepts
        self._cond = lru_cache(maxsize=None)(self._conditional_step)

    def _conditional_step(self, actions: tuple, percepts: tuple) -> Fraction:
        # conditional of the last percept given everything before it
        t = len(percepts)
        prev = percepts[: t - 1]
        denom = sum(self.base.mass(actions, prev + (b,)) for b in self.percepts)
        if denom == 0:
            if self.on_singular == "raise":
                raise NormalizationSingular(
                    f"{self.base.name}: no continuation mass after [{History.of(actions, prev)}]")
            return Fraction(1, len(self.percepts))
        return self.base.mass(actions, percepts) / denom

    def _mass(self, actions, percepts):
        out = Fraction(1)
        for s in range(1, len(percepts) + 1):
            out *= self._cond(actions[:s], percepts[:s])
            if out == 0:
                break
        return out

    def stationary(self, actions, percepts):
        return self.base.stationary(actions, percepts)

    def tail_reward(self, actions, percepts):
        return self.base.tail_reward(actions, percepts)

    def state_key(self, actions, percepts):
        return ("norm", self.base.state_key(actions, percepts))


def normalize(env: Environment, on_singular: str = "raise") -> Environment:
    return NormalizedEnv(env, on_singular)


# --- the proof-construction corpus -------------------------------------------


class Prop1Env(Environment):
    """Action alpha pays reward 1 and ends; beta pays ``eps_r`` then zeros forever."""

    def __init__(self, eps_r):
        eps_r = rational(eps_r)
        if not 0 < eps_r < 1:
            raise ValueError("eps_r must lie strictly between 0 and 1")
        self.eps_r = eps_r
        self.name = f"prop1(eps_r={format_rational(eps_r)})"
        self.percepts = (percept(0, 0), percept(0, eps_r), percept(0, 1))

    def _mass(self, actions, percepts):
        t = len(percepts)
        if t == 0:
            return Fraction(1)
        if any(e.obs != 0 for e in percepts):
            return Fraction(0)
        rewards = [e.reward for e in percepts]
        if actions[0] == ALPHA:
            return Fraction(int(t == 1 and rewards[0] == 1))
        if actions[0] == BETA:
            return Fraction(int(rewards[0] == self.eps_r and all(r == 0 for r in rewards[1:])))
        return Fraction(0)

    def stationary(self, actions, percepts):
        if percepts and actions[0] == BETA and self.mass(actions, percepts) > 0:
            return percept(0, 0)
        return None


def make_prop1_env(eps_r) -> Prop1Env:
    return Prop1Env(eps_r)


class AdversarialEnv(Environment):
    """Rewards 0 while the agent follows ``target``, 1 forever from the first deviation."""

    is_measure = True

    def __init__(self, target: Callable[[History], Action], actions: Sequence[Action] = (ALPHA, BETA),
                 name: str = "adversarial"):
        self.target = lru_cache(maxsize=None)(target)
        self.actions = tuple(actions)
        self.name = name
        self.percepts = (percept(0, 0), percept(0, 1))

    def _deviation(self, actions, percepts) -> Optional[int]:
        """1-based index of the first deviation, or None; -1 if off both branches."""
        steps: tuple = ()
        for k, (a, e) in enumerate(zip(actions, percepts), start=1):
            if a != self.target(History(steps)):
                return k
            if e.reward != 0:
                return -1
            steps += ((a, e),)
        return None

    def _mass(self, actions, percepts):
        if any(e.obs != 0 for e in percepts):
            return Fraction(0)
        i = self._deviation(actions, percepts)
        if i is None:
            return Fraction(1)
        if i == -1:
            return Fraction(0)
        ok = all(e.reward == (1 if k >= i else 0) for k, e in enumerate(percepts, start=1))
        return Fraction(int(ok))

    def stationary(self, actions, percepts):
        i = self._deviation(actions, percepts)
        if i is not None and i > 0 and self._mass(actions, percepts) == 1:
            return percept(0, 1)
        return None

    def state_key(self, actions, percepts):
        i = self._deviation(actions, percepts)
        if i is not None and i > 0:
            return ("deviated",)
        return (actions, percepts)


def make_adversarial_env(target: Callable[[History], Action], actions=(ALPHA, BETA),
                         name: str = "adversarial") -> AdversarialEnv:
    return AdversarialEnv(target, actions, name)


@dataclass(frozen=True)
class SearchRelation:
    """A decidable stand-in for ``exists k. S(n, i, t, k)``.

    The witness search runs over ``k = 0..bound``.  If nothing is found and
    ``exhaustive`` is set the answer is False; otherwise the search budget is
    exceeded.  ``holds_from(n, i, t)``, when given, certifies that witnesses
    exist for every ``t' >= t``.
    """

    predicate: Callable[[int, int, int, int], bool]
    bound: int
    exhaustive: bool = False
    holds_from: Optional[Callable[[int, int, int], bool]] = None
    label: str = "S"

    def exists(self, n: int, i: int, t: int, budget: Optional[int] = None) -> bool:
        top = self.bound if budget is None else min(budget, self.bound)
        if any(self.predicate(n, i, t, k) for k in range(top + 1)):
            return True
        if budget is not None or self.exhaustive:
            return False
        raise SearchBudgetExceeded(f"{self.label}: no witness for (n={n}, i={i}, t={t}) within k <= {self.bound}")

    @classmethod
    def always(cls) -> SearchRelation:
        return cls(lambda n, i, t, k: True, 0, True, lambda n, i, t: True, "true")

    @classmethod
    def fails_at(cls, offset: int) -> SearchRelation:
        """No witness exactly at ``t = n + offset``; witnesses everywhere else."""
        return cls(lambda n, i, t, k: t != n + offset, 0, True,
                   lambda n, i, t: t > n + offset, f"fails-at:{offset}")

    @classmethod
    def modular(cls, period: int, bound: int) -> SearchRelation:
        """Witness at ``k = (n + i + t) mod period``; a real search when ``bound < period - 1``."""
        return cls(lambda n, i, t, k: k == (n + i + t) % period, bound, False,
                   (lambda n, i, t: True) if bound >= period - 1 else None, f"mod:{period}")


class RhoEnv(Environment):
    """Member ``rho_i`` of the environment class used for the hardness construction.

    Observations ``1^t`` arrive with probability ``2^-t``; after ``1^n 0``,
    action alpha yields zero rewards forever and action beta yields reward 1
    from time ``n+2`` for as long as the relation keeps finding witnesses.
    """

    def __init__(self, i: int, relation: SearchRelation):
        self.i = i
        self.relation = relation
        self.name = f"rho_{i}[{relation.label}]"
        self.percepts = tuple(percept(o, r) for o in (0, 1) for r in (0, 1))
        self.is_measure = relation.label == "true"

    @staticmethod
    def _split(percepts) -> Optional[int]:
        """n for observations 1^n 0 0..., -1 for all ones, None otherwise."""
        obs = [e.obs for e in percepts]
        if 0 not in obs:
            return -1
        n = obs.index(0)
        if any(o != 0 for o in obs[n:]):
            return None
        return n

    def _evaluate(self, actions, percepts, budget):
        t = len(percepts)
        rewards = [e.reward for e in percepts]
        n = self._split(percepts)
        if n is None:
            return Fraction(0)
        if n == -1:
            return Fraction(1, 2 ** t) if all(r == 0 for r in rewards) else Fraction(0)
        branch_mass = Fraction(1, 2 ** (n + 1))
        if t == n + 1:
            return branch_mass if all(r == 0 for r in rewards) else Fraction(0)
        choice = actions[n + 1]
        if choice == ALPHA:
            return branch_mass if all(r == 0 for r in rewards) else Fraction(0)
        if choice == BETA:
            if any(r != (1 if k > n + 1 else 0) for k, r in enumerate(rewards, start=1)):
                return Fraction(0)
            for tp in range(1, t + 1):
                if not self.relation.exists(n, self.i, tp, budget):
                    return Fraction(0)
            return branch_mass
        return Fraction(0)

    def _mass(self, actions, percepts):
        return self._evaluate(actions, percepts, None)

    def lower(self, actions, percepts, k):
        t = len(percepts)
        return self._evaluate(tuple(actions[:t]), tuple(percepts), k)

    def stationary(self, actions, percepts):
        n = self._split(percepts)
        t = len(percepts)
        if n is None or n == -1 or t < n + 2 or self.mass(actions, percepts) == 0:
            return None
        if actions[n + 1] == ALPHA:
            return percept(0, 0)
        holds = self.relation.holds_from
        if holds is not None and holds(n, self.i, t + 1):
            return percept(0, 1)
        return None

    def state_key(self, actions, percepts):
        n = self._split(percepts)
        t = len(percepts)
        if n is None:
            return ("void",)
        if n == -1:
            return ("spine",)
        if t == n + 1:
            return ("branch", n)
        return (actions[n + 1], n)


def make_rho_family_env(i: int, relation: SearchRelation) -> RhoEnv:
    return RhoEnv(i, relation)


# --- explicit tables ---------------------------------------------------------

TAILS = ("end", "repeat-last", "uniform")


class TableEnv(Environment):
    """One-step conditionals listed explicitly up to ``depth``, then a tail rule.

    ``rows`` maps ``(actions a_1..a_t, percepts e_1..e_t)`` to the conditional
    ``nu(e_t | e_<t || a_1..a_t)``; an action may be the wildcard ``"*"``.
    Missing rows have conditional 0.  After ``depth`` the tail applies:
    ``end`` loses all mass, ``repeat-last`` repeats the last percept forever,
    ``uniform`` draws percepts uniformly.
    """

    def __init__(self, name: str, actions: Sequence[Action], observations: Sequence[int],
                 rewards: Sequence, depth: int, rows: Iterable[tuple[tuple, tuple, Fraction]],
                 tail: str = "end", is_measure: bool = False):
        if tail not in TAILS:
            raise ValueError(f"tail must be one of {TAILS}")
        if tail == "repeat-last" and depth < 1:
            raise ValueError("repeat-last needs depth >= 1")
        self.name = name
        self.actions = tuple(actions)
        self.percepts = tuple(percept(o, r) for o in observations for r in rewards)
        self.depth = depth
        self.tail = tail
        self.is_measure = is_measure
        self._exact: dict[tuple, Fraction] = {}
        self._wild: dict[tuple, list[tuple[tuple, Fraction]]] = {}
        self.rows: list[tuple[tuple, tuple, Fraction]] = []
        for acts, pcs, p in rows:
            acts, pcs, p = tuple(acts), tuple(pcs), rational(p)
            if len(acts) != len(pcs) or not 1 <= len(pcs) <= depth:
                raise ValueError(f"row length must be within 1..{depth}: {acts} {pcs}")
            self.rows.append((acts, pcs, p))
            if "*" in acts:
                self._wild.setdefault(pcs, []).append((acts, p))
            else:
                self._exact.setdefault((acts, pcs), p)

    def row_conditional(self, actions: tuple, percepts: tuple) -> Fraction:
        key = (actions, percepts)
        if key in self._exact:
            return self._exact[key]
        for pattern, p in self._wild.get(percepts, ()):
            if all(x == "*" or x == a for x, a in zip(pattern, actions)):
                return p
        return Fraction(0)

    def _mass(self, actions, percepts):
        out = Fraction(1)
        for s in range(1, len(percepts) + 1):
            if s <= self.depth:
                out *= self.row_conditional(actions[:s], percepts[:s])
            elif self.tail == "end":
                return Fraction(0)
            elif self.tail == "repeat-last":
                if percepts[s - 1] != percepts[self.depth - 1]:
                    return Fraction(0)
            else:
                out *= Fraction(1, len(self.percepts))
            if out == 0:
                break
        return out

    def stationary(self, actions, percepts):
        if self.tail == "repeat-last" and len(percepts) >= self.depth and self.mass(actions, percepts) > 0:
            return percepts[self.depth - 1]
        return None

    def tail_reward(self, actions, percepts):
        if self.tail == "uniform" and len(percepts) >= self.depth and self.mass(actions, percepts) > 0:
            return sum((e.reward for e in self.percepts), Fraction(0)) / len(self.percepts)
        return super().tail_reward(actions, percepts)

    def state_key(self, actions, percepts):
        t = len(percepts)
        if self.tail == "uniform" and t >= self.depth:
            return ("uniform-tail",)
        if self.tail == "repeat-last" and t >= self.depth:
            return ("repeat", percepts[self.depth - 1])
        return (actions, percepts)


def _random_split(rng: random.Random, total: int, parts: int) -> list[int]:
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    edges = [0] + cuts + [total]
    return [edges[j + 1] - edges[j] for j in range(parts)]


def random_table_env(
    seed: int,
    n_percepts: int = 2,
    depth: int = 3,
    measure: bool = True,
    max_den: int = 8,
    actions: Sequence[Action] = (ALPHA, BETA),
    tail: Optional[str] = None,
    name: Optional[str] = None,
) -> TableEnv:
    """A full random table with rational conditionals of denominator ``<= max_den``.

    Observations are ``0..`` and rewards are multiples of ``1/(n_percepts-1)``
    (reward 0 when ``n_percepts == 1``), one observation per reward level.
    Non-measures lose a random share of mass at each row group.
    """
    rng = random.Random(seed)
    levels = [Fraction(0)] if n_percepts == 1 else [Fraction(j, n_percepts - 1) for j in range(n_percepts)]
    env_percepts = [percept(0, r) for r in levels]
    rows = []
    prefixes: list[tuple[tuple, tuple]] = [((), ())]
    for _ in range(depth):
        nxt = []
        for acts, pcs in prefixes:
            for a in actions:
                den = rng.randint(1, max_den)
                total = den if measure else rng.randint(0, den)
                split = _random_split(rng, total, n_percepts)
                for e, num in zip(env_percepts, split):
                    if num:
                        rows.append((acts + (a,), pcs + (e,), Fraction(num, den)))
                    nxt.append((acts + (a,), pcs + (e,)))
        prefixes = nxt
    if tail is None:
        tail = "uniform" if measure else "end"
    return TableEnv(name or f"table[{seed}]", actions, [0], levels, depth, rows, tail,
                    is_measure=measure and tail == "uniform")
