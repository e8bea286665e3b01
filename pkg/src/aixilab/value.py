"""Iterative (V) and recursive (W) value functions by exact expectimax.

Both are evaluated up to a horizon ``m``.  Subtrees past the horizon become
enclosures unless the environment certifies them: a prefix with no
continuation mass is *dead*, a prefix after which the environment is a
measure paying a fixed expected reward per step has a known *tail reward*.
When every leaf is certified, or a finite lifetime has been reached, the
result is exact.

Leaf enclosures for a live, uncertified prefix at time ``s`` with
accumulated reward ``acc`` (V only) are

* W: ``[0, Gamma_s]``; the lower bound grows with the horizon.
* V on a declared measure: ``[acc, acc + Gamma_s]``.
* V on a semimeasure: ``[0, acc + Gamma_s]``.  Survival is unknown, so a
  truncated V-sum does not bound the limit from below.

All internal quantities are conditional on the evaluated prefix and are not
yet divided by ``Gamma_t``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from aixilab.approx import ApproxReal, Mode
from aixilab.discount import Discount, FiniteLifetime, Geometric, Tabular, effective_horizon  # noqa: F401
from aixilab.env import Action, Environment, History
from aixilab.errors import ConditioningOnNull

Policy = Callable[[History], Action]


class Variant(enum.Enum):
    ITERATIVE = "iterative"
    RECURSIVE = "recursive"


@dataclass(frozen=True)
class ValueQuery:
    env: Environment
    discount: Discount
    history: History
    variant: Variant = Variant.RECURSIVE
    policy: Optional[Policy] = None
    horizon: Optional[int] = None


@dataclass(frozen=True)
class ValueTerms:
    """Unnormalized pieces of a value: ``value = numerator / (denominator * normalizer)``.

    ``numerator`` is the expectimax sum weighted by joint masses,
    ``denominator`` the mass of the conditioning history and ``normalizer``
    is ``Gamma_t``.  The numerator is an enclosure unless ``exact``.
    """

    numerator_lo: Fraction
    numerator_hi: Fraction
    denominator: Fraction
    normalizer: Fraction

    @property
    def exact(self) -> bool:
        return self.numerator_lo == self.numerator_hi

    @property
    def numerator(self) -> Fraction:
        if not self.exact:
            raise ValueError("numerator is only known up to an enclosure")
        return self.numerator_lo

    @property
    def branch_value(self) -> Fraction:
        """Conditional expected discounted reward from time t, before dividing by Gamma_t."""
        return self.numerator / self.denominator


def default_horizon(d: Discount, t: int) -> int:
    if d.lifetime is not None:
        return max(t, d.lifetime)
    return t


class Evaluator:
    """Expectimax for one (environment, discount, variant, policy) combination.

    The memo table lives as long as the evaluator.  Without a policy, entries
    are keyed by the environment's state key; with one, by the full prefix.
    ``raw`` disables certificates and leaf enclosures and returns plain
    truncated sums.
    """

    def __init__(self, env: Environment, discount: Discount, variant: Variant = Variant.RECURSIVE,
                 policy: Optional[Policy] = None, raw: bool = False):
        self.env = env
        self.discount = discount
        self.variant = variant
        self.policy = policy
        self.raw = raw
        self.iterative = variant is Variant.ITERATIVE
        self.memo: dict = {}

    # -- public -----------------------------------------------------------

    def conditional(self, h: History, horizon: int) -> tuple[Fraction, Fraction, Fraction]:
        """``(lo, hi, mass)``: conditional enclosure at ``horizon`` and the history mass."""
        acts, pcs = h.actions, h.percepts
        mass = self.env.mass(acts, pcs)
        if mass == 0:
            raise ConditioningOnNull(f"history [{h}] has measure zero in {self.env.name}")
        if horizon < h.time:
            raise ValueError(f"horizon {horizon} precedes the current time {h.time}")
        hist = h.completed() if self.policy is not None else None
        lo, hi = self._node(acts, pcs, mass, h.time, Fraction(0), horizon, h.pending, hist)
        return lo, hi, mass

    def value(self, h: History, horizon: Optional[int] = None) -> ApproxReal:
        """Normalized value; budget ``k`` evaluates at ``horizon + k``."""
        t = h.time
        G = self.discount.Gamma(t)
        if G == 0:
            return ApproxReal.exact(0)
        H0 = default_horizon(self.discount, t) if horizon is None else horizon
        first = self.conditional(h, H0)

        def refine(k):
            lo, hi, _ = first if k == 0 else self.conditional(h, H0 + k)
            return lo / G, hi / G

        lo, hi = refine(0)
        if lo == hi:
            return ApproxReal.exact(lo)
        return ApproxReal(refine, Mode.INTERVAL)

    def terms(self, h: History, horizon: Optional[int] = None) -> ValueTerms:
        t = h.time
        H0 = default_horizon(self.discount, t) if horizon is None else horizon
        G = self.discount.Gamma(t)
        if G == 0:
            mass = self.env.mass(h.actions, h.percepts)
            return ValueTerms(Fraction(0), Fraction(0), mass, G)
        lo, hi, mass = self.conditional(h, H0)
        return ValueTerms(lo * mass, hi * mass, mass, G)

    # -- expectimax -------------------------------------------------------

    def _node(self, acts, pcs, mass, s, acc, horizon, pending, hist):
        key = None
        if self.policy is None:
            key = (self.env.state_key(acts, pcs), s, acc, horizon, pending)
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        out = self._expand(acts, pcs, mass, s, acc, horizon, pending, hist)
        if key is not None:
            self.memo[key] = out
        return out

    def _expand(self, acts, pcs, mass, s, acc, horizon, pending, hist):
        env, d = self.env, self.discount
        life = d.lifetime
        if life is not None and s > life:
            return (acc, acc)
        if pending is None:
            if not self.raw:
                r = env.tail_reward(acts, pcs)
                if r is not None:
                    v = acc + r * d.Gamma(s)
                    return (v, v)
            if s > horizon:
                return self._leaf(acts, pcs, s, acc)
            choices = (self.policy(hist),) if self.policy is not None else env.actions
        else:
            choices = (pending,)
        best_lo = best_hi = None
        for a in choices:
            lo, hi = self._q(acts, pcs, mass, s, acc, horizon, a, hist)
            if best_lo is None or lo > best_lo:
                best_lo = lo
            if best_hi is None or hi > best_hi:
                best_hi = hi
        return best_lo, best_hi

    def _leaf(self, acts, pcs, s, acc):
        if self.raw:
            return (acc, acc)
        env = self.env
        dead = all(env.mass(acts + (a,), pcs + (e,)) == 0 for a in env.actions for e in env.percepts)
        if dead:
            # V counts only surviving timelines; W keeps what was collected
            return (Fraction(0), Fraction(0)) if self.iterative else (acc, acc)
        G = self.discount.Gamma(s)
        if self.iterative and not env.is_measure:
            return (Fraction(0), acc + G)
        return (acc, acc + G)

    def _q(self, acts, pcs, mass, s, acc, horizon, a, hist):
        env = self.env
        g = self.discount.gamma(s)
        acts2 = acts + (a,)
        lo_sum = hi_sum = Fraction(0)
        for e in env.percepts:
            pcs2 = pcs + (e,)
            m = env.mass(acts2, pcs2)
            if m == 0:
                continue
            p = m / mass
            child_hist = hist.then(a, e) if hist is not None else None
            gain = g * e.reward
            if self.iterative:
                lo, hi = self._node(acts2, pcs2, m, s + 1, acc + gain, horizon, None, child_hist)
            else:
                lo, hi = self._node(acts2, pcs2, m, s + 1, Fraction(0), horizon, None, child_hist)
                lo, hi = lo + gain, hi + gain
            lo_sum += p * lo
            hi_sum += p * hi
        return lo_sum, hi_sum


def evaluate(q: ValueQuery) -> ApproxReal:
    return Evaluator(q.env, q.discount, q.variant, q.policy).value(q.history, q.horizon)


def iterative_v_opt(q: ValueQuery) -> ApproxReal:
    if q.policy is not None:
        raise ValueError("optimal value queries take no policy; use policy_value")
    return Evaluator(q.env, q.discount, Variant.ITERATIVE).value(q.history, q.horizon)


def recursive_w_opt(q: ValueQuery) -> ApproxReal:
    if q.policy is not None:
        raise ValueError("optimal value queries take no policy; use policy_value")
    return Evaluator(q.env, q.discount, Variant.RECURSIVE).value(q.history, q.horizon)


def policy_value(q: ValueQuery) -> ApproxReal:
    if q.policy is None:
        raise ValueError("policy_value needs a policy")
    return evaluate(q)


def value_terms(q: ValueQuery) -> ValueTerms:
    return Evaluator(q.env, q.discount, q.variant, q.policy).terms(q.history, q.horizon)


def truncation_sequence(env: Environment, discount: Discount, h: History, horizons: Iterable[int],
                        variant: Variant = Variant.ITERATIVE, policy: Optional[Policy] = None) -> list[Fraction]:
    """Plain truncated sums at each horizon, normalized by ``Gamma_t``.

    No certificates and no tail bounds: this is the approximation sequence
    whose limit defines the value.
    """
    G = discount.Gamma(h.time)
    ev = Evaluator(env, discount, variant, policy, raw=True)
    out = []
    for m in horizons:
        if G == 0:
            out.append(Fraction(0))
            continue
        lo, _, _ = ev.conditional(h, m)
        out.append(lo / G)
    return out
