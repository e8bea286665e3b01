"""Interaction runs with exact sampling and line-delimited JSON traces."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from aixilab.approx import INF, format_rational
from aixilab.discount import Discount, Geometric
from aixilab.env import Environment, History, Percept, make_prop1_env
from aixilab.errors import ConditioningOnNull
from aixilab.mixture import WeightedClass, mixture_env, posterior
from aixilab.policy import Agent, ExactOptimal, PolicySpec
from aixilab.specfiles import AgentAdversary, EnvSource
from aixilab.value import Evaluator, Variant

ENDED = "environment ended"
COMPLETED = "completed"


def sample_cell(rng: random.Random, probs: Sequence[Fraction]) -> int:
    """Exact draw from ``probs`` plus a final cell holding the missing mass.

    Random bits refine a dyadic interval ``[lo, lo + 2^-j)`` until it fits
    inside one cell of the partition of ``[0, 1)``, so every cell is hit
    with exactly its rational probability.  Returns ``len(probs)`` for the
    missing-mass cell.
    """
    edges = [Fraction(0)]
    for p in probs:
        edges.append(edges[-1] + p)
    if edges[-1] > 1:
        raise ValueError("probabilities sum above 1")
    edges.append(Fraction(1))
    lo, width = Fraction(0), Fraction(1)
    while True:
        for j in range(len(edges) - 1):
            if edges[j] <= lo and lo + width <= edges[j + 1]:
                return j
        width /= 2
        if rng.getrandbits(1):
            lo += width


@dataclass(frozen=True)
class RunConfig:
    """One interaction run.  With ``cls`` the agent plans in the class mixture."""

    env: EnvSource
    agent: PolicySpec
    discount: Discount
    steps: int
    seed: int = 0
    cls: Optional[WeightedClass] = None
    trace: Optional[Path] = None

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if isinstance(self.env, AgentAdversary) and self.cls is None:
            raise ValueError("an agent-targeted adversary needs a class for the agent to plan in")


@dataclass(frozen=True)
class TraceRecord:
    t: int
    action: str
    percept: Percept
    enclosure: Optional[tuple[Fraction, Fraction]]
    cumulative: Fraction
    posterior: Optional[list[tuple[str, Fraction]]] = None

    def to_json(self) -> dict:
        out = {
            "t": self.t,
            "action": self.action,
            "percept": {"obs": self.percept.obs, "reward": format_rational(self.percept.reward)},
            "value": None if self.enclosure is None else [format_rational(x) for x in self.enclosure],
            "cumulative": format_rational(self.cumulative),
        }
        if self.posterior is not None:
            out["posterior"] = [[name, format_rational(w)] for name, w in self.posterior]
        return out


@dataclass
class RunResult:
    records: list[TraceRecord] = field(default_factory=list)
    outcome: str = COMPLETED
    ended_at: Optional[int] = None
    total: Fraction = Fraction(0)
    summary: dict = field(default_factory=dict)

    @property
    def actions(self) -> list[str]:
        return [r.action for r in self.records]

    @property
    def rewards(self) -> list[Fraction]:
        return [r.percept.reward for r in self.records]

    def lines(self) -> list[str]:
        out = [json.dumps(r.to_json(), separators=(",", ":")) for r in self.records]
        out.append(json.dumps(self.summary, separators=(",", ":")))
        return out


def _describe(spec: PolicySpec) -> str:
    name = type(spec).__name__
    variant = getattr(spec, "variant", None)
    return name if variant is None else f"{name}/{variant.value}"


def simulate(config: RunConfig, agent: Optional[Agent] = None) -> RunResult:
    """Run the agent against the environment for ``config.steps`` steps.

    Percepts are drawn with :func:`sample_cell` from a ``random.Random``
    seeded with ``config.seed``.  When the environment's continuation mass
    falls short of the prefix mass, the shortfall is a separate outcome that
    ends the run.
    """
    plan_env = mixture_env(config.cls) if config.cls is not None else config.env
    if agent is None:
        agent = Agent(config.agent, plan_env, config.discount)
    env: Environment = config.env.bind(agent) if isinstance(config.env, AgentAdversary) else config.env
    rng = random.Random(config.seed)
    fallback = Evaluator(plan_env, config.discount, Variant.RECURSIVE)
    result = RunResult()
    h = History()
    mass = env.mass((), ())
    for t in range(1, config.steps + 1):
        decision = agent.decide(h)
        a = decision.action
        box = decision.enclosures.get(a)
        if box is None:
            try:
                box = fallback.value(h.act(a)).interval(0)
            except ConditioningOnNull:
                box = None
        acts = h.actions + (a,)
        probs = [env.mass(acts, h.percepts + (e,)) / mass for e in env.percepts]
        j = sample_cell(rng, probs)
        if j == len(env.percepts):
            result.outcome, result.ended_at = ENDED, t
            break
        e = env.percepts[j]
        mass *= probs[j]
        h = h.then(a, e)
        result.total += config.discount.gamma(t) * e.reward
        post = posterior(config.cls, h) if config.cls is not None else None
        enclosure = None if box is None or box[1] is INF else box
        result.records.append(TraceRecord(t, a, e, enclosure, result.total, post))
    result.summary = {
        "summary": True,
        "env": env.name,
        "agent": _describe(config.agent),
        "discount": str(config.discount),
        "seed": config.seed,
        "steps": len(result.records),
        "outcome": result.outcome,
        "ended_at": result.ended_at,
        "total": format_rational(result.total),
    }
    if config.trace is not None:
        Path(config.trace).write_text("\n".join(result.lines()) + "\n")
    return result


@dataclass(frozen=True)
class Prop41Comparison:
    """Totals of the W- and V-maximizing agents on the ending environment, with closed forms."""

    eps_r: Fraction
    discount: Discount
    recursive: RunResult
    iterative: RunResult
    expected_recursive: Fraction
    expected_iterative: Fraction

    @property
    def passed(self) -> bool:
        return (self.recursive.total == self.expected_recursive
                and self.iterative.total == self.expected_iterative)

    def lines(self) -> list[str]:
        f = format_rational
        return [
            f"environment: prop1 eps_r={f(self.eps_r)}, discount {self.discount}",
            f"recursive W agent: actions {self.recursive.actions}, outcome {self.recursive.outcome}, "
            f"total {f(self.recursive.total)} (expected gamma_1 = {f(self.expected_recursive)})",
            f"iterative V agent: actions {self.iterative.actions}, outcome {self.iterative.outcome}, "
            f"total {f(self.iterative.total)} (expected eps_r * gamma_1 = {f(self.expected_iterative)})",
            "PASS" if self.passed else "FAIL",
        ]


def compare_prop41(eps_r=Fraction(1, 4), discount: Discount = Geometric(Fraction(1, 2)), steps: int = 3,
                   seed: int = 0) -> Prop41Comparison:
    env = make_prop1_env(eps_r)
    runs = {}
    for variant in Variant:
        runs[variant] = simulate(RunConfig(env, ExactOptimal(variant=variant), discount, steps, seed))
    g1 = discount.gamma(1)
    return Prop41Comparison(env.eps_r, discount, runs[Variant.RECURSIVE], runs[Variant.ITERATIVE],
                            g1, env.eps_r * g1)
