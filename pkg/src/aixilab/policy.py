"""Action selection: exact argmax with a tie order, grid-based eps-optimal choice, eps schedules."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

from aixilab.approx import INF, K_MAX, ApproxReal, Bound, rational
from aixilab.discount import Discount, effective_horizon
from aixilab.env import Action, Environment, History
from aixilab.errors import BudgetExhausted, SpecError, Unresolvable
from aixilab.value import Evaluator, Variant, default_horizon


@dataclass(frozen=True)
class Decision:
    action: Action
    enclosures: Mapping[Action, tuple[Fraction, Bound]] = field(default_factory=dict)
    tolerance: Optional[Fraction] = None
    grid: Mapping[Action, Fraction] = field(default_factory=dict)


def _tie_order(env: Environment, tie_order: Optional[Sequence[Action]]) -> tuple[Action, ...]:
    order = tuple(env.actions if tie_order is None else tie_order)
    if sorted(order) != sorted(env.actions) or len(set(order)) != len(order):
        raise ValueError(f"tie order {order} must list each action of {env.actions} exactly once")
    return order


def _evaluator(env, discount, variant, evaluator):
    if evaluator is None:
        return Evaluator(env, discount, variant)
    if evaluator.env is not env or evaluator.variant is not variant or evaluator.policy is not None:
        raise ValueError("evaluator does not match the requested environment and variant")
    return evaluator


def _q_values(ev: Evaluator, h: History, order, horizon, eval_order) -> dict[Action, ApproxReal]:
    q = {}
    for a in (eval_order or order):
        q[a] = ev.value(h.act(a), horizon)
    return {a: q[a] for a in order}


def _ahead(lo_a: Fraction, hi_b: Bound, strict: bool) -> bool:
    if hi_b is INF:
        return False
    return lo_a > hi_b if strict else lo_a >= hi_b


def decide_exact(env: Environment, discount: Discount, h: History, tie_order=None,
                 variant: Variant = Variant.RECURSIVE, k_max: int = K_MAX, *,
                 evaluator: Optional[Evaluator] = None, eval_order=None) -> Decision:
    """The unique action beating every preferred action strictly and every other weakly."""
    if h.pending is not None:
        raise ValueError("history must end in a percept")
    order = _tie_order(env, tie_order)
    t = h.time
    if discount.Gamma(t) == 0:
        return Decision(order[0])
    ev = _evaluator(env, discount, variant, evaluator)
    q = _q_values(ev, h, order, default_horizon(discount, t), eval_order)
    for k in range(k_max + 1):
        box = {a: q[a].interval(k) for a in order}
        for j, a in enumerate(order):
            lo_a = box[a][0]
            if all(_ahead(lo_a, box[b][1], True) for b in order[:j]) and \
                    all(_ahead(lo_a, box[b][1], False) for b in order[j + 1:]):
                return Decision(a, box)
    raise Unresolvable(f"enclosures at [{h}] still overlap after {k_max} refinements: {box}")


def act_exact(env, discount, h, tie_order=None, variant=Variant.RECURSIVE, k_max=K_MAX, **kw) -> Action:
    return decide_exact(env, discount, h, tie_order, variant, k_max, **kw).action


def unit_fraction(eps) -> Fraction:
    """Largest ``1/k`` not exceeding ``eps``."""
    eps = rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return Fraction(1, math.ceil(1 / eps))


def step_tolerance(discount: Discount, t: int, eps) -> Fraction:
    """Per-step tolerance ``eps * gamma_t / Gamma_t`` rounded down to ``1/k``.

    One-step losses below these tolerances add up to less than ``eps`` over
    any run, because ``sum_{s>=t} gamma_s = Gamma_t``.
    """
    g, G = discount.gamma(t), discount.Gamma(t)
    if G == 0:
        return unit_fraction(eps)
    if g == 0:
        raise ValueError(f"gamma_{t} = 0 < Gamma_{t}: no per-step tolerance splits eps")
    return unit_fraction(rational(eps) * g / G)


def grid_point(lo: Fraction, hi: Fraction, eps: Fraction) -> Fraction:
    """Least multiple ``q`` of ``eps/2`` with ``hi - eps/2 < q < lo + eps/2``."""
    step = eps / 2
    j = math.floor((hi - step) / step) + 1
    q = max(j, 0) * step
    assert hi - step < q < lo + step, (lo, hi, eps)
    return q


def decide_eps(env: Environment, discount: Discount, h: History, eps, tie_order=None,
               variant: Variant = Variant.RECURSIVE, k_max: int = K_MAX, *,
               evaluator: Optional[Evaluator] = None, eval_order=None) -> Decision:
    """Snap each action value to the eps/2 grid and take the tie-order-best maximum.

    The chosen action's value is within ``eps`` of the best action's value.
    """
    eps = rational(eps)
    if eps <= 0 or eps.numerator != 1:
        raise ValueError("eps must be 1/k for a natural k")
    if h.pending is not None:
        raise ValueError("history must end in a percept")
    order = _tie_order(env, tie_order)
    t = h.time
    if discount.Gamma(t) == 0:
        return Decision(order[0], tolerance=eps)
    ev = _evaluator(env, discount, variant, evaluator)
    if discount.lifetime is not None:
        horizon = default_horizon(discount, t)
    else:
        horizon = max(t, effective_horizon(discount, t, eps) - 1)
    q = _q_values(ev, h, order, horizon, eval_order)
    box, grid = {}, {}
    for a in order:
        for k in range(k_max + 1):
            w = q[a].width(k)
            if w is not INF and w < eps / 2:
                break
        else:
            raise BudgetExhausted(f"value of {a} at [{h}] not within eps/2 after {k_max} refinements")
        box[a] = q[a].interval(k)
        grid[a] = grid_point(box[a][0], box[a][1], eps)
    best = max(grid.values())
    chosen = next(a for a in order if grid[a] == best)
    return Decision(chosen, box, eps, grid)


def act_eps(env, discount, h, eps, tie_order=None, variant=Variant.RECURSIVE, k_max=K_MAX, **kw) -> Action:
    return decide_eps(env, discount, h, eps, tie_order, variant, k_max, **kw).action


@dataclass(frozen=True)
class Schedule:
    """Positive nonincreasing tolerance ``eps_at(t)``."""

    name: str
    eps_at: Callable[[int], Fraction]

    def __call__(self, t: int) -> Fraction:
        return rational(self.eps_at(t))


def parse_schedule(name: str) -> Schedule:
    """``harmonic`` (1/(t+1)), ``halving`` (2^-t) or ``const:FRACTION``."""
    if name == "harmonic":
        return Schedule(name, lambda t: Fraction(1, t + 1))
    if name == "halving":
        return Schedule(name, lambda t: Fraction(1, 2 ** t))
    if name.startswith("const:"):
        value = rational(name[len("const:"):])
        return Schedule(name, lambda t: value)
    raise SpecError(f"unknown schedule {name!r}")


def act_schedule(env, discount, h, schedule: Schedule, tie_order=None, variant=Variant.RECURSIVE,
                 k_max=K_MAX, **kw) -> Action:
    return decide_eps(env, discount, h, unit_fraction(schedule(h.time)), tie_order, variant, k_max, **kw).action


# --- policy specifications ---------------------------------------------------


@dataclass(frozen=True)
class ExactOptimal:
    tie_order: Optional[tuple[Action, ...]] = None
    variant: Variant = Variant.RECURSIVE
    k_max: int = K_MAX


@dataclass(frozen=True)
class EpsOptimal:
    """``stepwise`` splits ``eps`` over time steps so the whole run stays within ``eps``."""

    eps: Fraction
    tie_order: Optional[tuple[Action, ...]] = None
    variant: Variant = Variant.RECURSIVE
    k_max: int = K_MAX
    stepwise: bool = True

    def __post_init__(self):
        eps = rational(self.eps)
        if eps <= 0 or eps.numerator != 1:
            raise ValueError("eps must be 1/k for a natural k")
        object.__setattr__(self, "eps", eps)


@dataclass(frozen=True)
class Scheduled:
    schedule: Schedule
    tie_order: Optional[tuple[Action, ...]] = None
    variant: Variant = Variant.RECURSIVE
    k_max: int = K_MAX
    stepwise: bool = True


@dataclass(frozen=True)
class Constant:
    action: Action


@dataclass(frozen=True, eq=False)
class External:
    """Any computable rule ``History -> Action`` (e.g. a lookup table)."""

    rule: Callable[[History], Action]
    name: str = "external"

    @classmethod
    def table(cls, table: Mapping[History, Action], default: Optional[Action] = None) -> External:
        def rule(h):
            if h in table:
                return table[h]
            if default is None:
                raise KeyError(f"no action for history [{h}]")
            return default

        return cls(rule, "table")


PolicySpec = Union[ExactOptimal, EpsOptimal, Scheduled, Constant, External]


class Agent:
    """A policy spec bound to the environment it plans in.

    The agent keeps one evaluator for its lifetime, so value computations
    are shared between decisions.  Decisions are cached by history.
    """

    def __init__(self, spec: PolicySpec, env: Environment, discount: Discount):
        self.spec = spec
        self.env = env
        self.discount = discount
        variant = getattr(spec, "variant", None)
        self.evaluator = Evaluator(env, discount, variant) if variant is not None else None
        self._decisions: dict[History, Decision] = {}

    def tolerance(self, t: int) -> Optional[Fraction]:
        spec = self.spec
        if isinstance(spec, EpsOptimal):
            return step_tolerance(self.discount, t, spec.eps) if spec.stepwise else spec.eps
        if isinstance(spec, Scheduled):
            eps = spec.schedule(t)
            return step_tolerance(self.discount, t, eps) if spec.stepwise else unit_fraction(eps)
        return None

    def decide(self, h: History) -> Decision:
        h = h.completed() if h.pending is None else h
        hit = self._decisions.get(h)
        if hit is not None:
            return hit
        spec = self.spec
        if isinstance(spec, Constant):
            d = Decision(spec.action)
        elif isinstance(spec, External):
            d = Decision(spec.rule(h))
        elif isinstance(spec, ExactOptimal):
            d = decide_exact(self.env, self.discount, h, spec.tie_order, spec.variant, spec.k_max,
                             evaluator=self.evaluator)
        else:
            d = decide_eps(self.env, self.discount, h, self.tolerance(h.time), spec.tie_order,
                           spec.variant, spec.k_max, evaluator=self.evaluator)
        self._decisions[h] = d
        return d

    def __call__(self, h: History) -> Action:
        return self.decide(h).action
