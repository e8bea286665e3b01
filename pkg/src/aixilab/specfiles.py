"""Line-oriented ``key=value`` files describing environments and weighted classes.

Environment files::

    kind=table            # prop1 | adversarial | rho | table | corpus
    actions=alpha,beta
    observations=0
    rewards=0,1
    depth=1
    tail=uniform          # end | repeat-last | uniform
    measure=true
    row=*;0:1;1/2         # actions;percepts;conditional probability
    row=*;0:0;1/2

Other kinds take ``eps_r`` (prop1), ``target=const:ACTION|alternate|agent``
(adversarial), ``i``, ``relation=true|fails-at:K|mod:P`` and ``searchBound``
(rho), or ``name`` (corpus).  Any kind accepts ``normalize=raise|uniform``.

Class files list ``member=REF;WEIGHT`` lines, where ``REF`` is a path
relative to the class file or ``corpus:NAME``.

Blank lines and ``#`` comments are ignored.  Numbers are exact fractions.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from aixilab.approx import rational
from aixilab.corpus import CLASSES, CORPUS, alternating_target, constant_target
from aixilab.env import Environment, History, Percept, SearchRelation, TableEnv, make_adversarial_env, \
    make_prop1_env, make_rho_family_env, normalize
from aixilab.mixture import WeightedClass
from aixilab.errors import SpecError

SINGLE_KEYS = {"kind", "name", "eps_r", "target", "actions", "i", "relation", "searchBound",
               "observations", "rewards", "depth", "tail", "measure", "normalize"}


@dataclass(frozen=True)
class AgentAdversary:
    """Placeholder for an adversarial environment whose target is the running agent."""

    actions: tuple[str, ...]
    name: str = "adversary"

    def bind(self, agent) -> Environment:
        return make_adversarial_env(agent, self.actions, self.name)


EnvSource = Union[Environment, AgentAdversary]


def parse_lines(text: str, source: str = "<spec>") -> tuple[dict[str, str], list[str]]:
    """Single-valued keys and the repeated ``row``/``member`` values, in order."""
    keys: dict[str, str] = {}
    repeated: list[str] = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise SpecError(f"{source}:{n}: expected key=value, got {raw!r}")
        if key in ("row", "member"):
            repeated.append(value)
        elif key in SINGLE_KEYS:
            if key in keys:
                raise SpecError(f"{source}:{n}: duplicate key {key!r}")
            keys[key] = value
        else:
            raise SpecError(f"{source}:{n}: unknown key {key!r}")
    return keys, repeated


def _require(keys, name, source):
    if name not in keys:
        raise SpecError(f"{source}: missing key {name!r}")
    return keys[name]


def _relation(text: str, bound: Optional[int]) -> SearchRelation:
    if text == "true":
        return SearchRelation.always()
    kind, _, arg = text.partition(":")
    if kind == "fails-at":
        return SearchRelation.fails_at(int(arg))
    if kind == "mod":
        period = int(arg)
        return SearchRelation.modular(period, period - 1 if bound is None else bound)
    raise SpecError(f"unknown relation {text!r}")


def _flag(text: str) -> bool:
    if text not in ("true", "false"):
        raise SpecError(f"expected true or false, got {text!r}")
    return text == "true"


def _split(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _table(keys, rows, source) -> TableEnv:
    actions = _split(_require(keys, "actions", source))
    observations = [int(o) for o in _split(keys.get("observations", "0"))]
    rewards = [rational(r) for r in _split(_require(keys, "rewards", source))]
    depth = int(_require(keys, "depth", source))
    parsed = []
    for row in rows:
        parts = row.split(";")
        if len(parts) != 3:
            raise SpecError(f"{source}: row must be actions;percepts;probability, got {row!r}")
        acts = tuple(_split(parts[0]))
        pcs = tuple(Percept.parse(p) for p in _split(parts[1]))
        for a in acts:
            if a != "*" and a not in actions:
                raise SpecError(f"{source}: unknown action {a!r} in row {row!r}")
        parsed.append((acts, pcs, rational(parts[2].strip())))
    return TableEnv(keys.get("name", Path(source).stem), actions, observations, rewards, depth, parsed,
                    tail=keys.get("tail", "end"), is_measure=_flag(keys.get("measure", "false")))


def build_env(keys: dict[str, str], rows: list[str], source: str = "<spec>") -> EnvSource:
    kind = _require(keys, "kind", source)
    try:
        if kind == "prop1":
            env: EnvSource = make_prop1_env(rational(_require(keys, "eps_r", source)))
        elif kind == "adversarial":
            actions = tuple(_split(keys.get("actions", "alpha,beta")))
            target = keys.get("target", f"const:{actions[0]}")
            name = keys.get("name", "adversarial")
            if target == "agent":
                env = AgentAdversary(actions, name)
            elif target == "alternate":
                env = make_adversarial_env(alternating_target, actions, name)
            elif target.startswith("const:") and target[6:] in actions:
                env = make_adversarial_env(constant_target(target[6:]), actions, name)
            else:
                raise SpecError(f"{source}: bad adversarial target {target!r}")
        elif kind == "rho":
            bound = int(keys["searchBound"]) if "searchBound" in keys else None
            env = make_rho_family_env(int(_require(keys, "i", source)),
                                      _relation(keys.get("relation", "true"), bound))
        elif kind == "table":
            env = _table(keys, rows, source)
        elif kind == "corpus":
            name = _require(keys, "name", source)
            if name not in CORPUS:
                raise SpecError(f"{source}: unknown corpus environment {name!r}")
            env = CORPUS[name]()
        else:
            raise SpecError(f"{source}: unknown kind {kind!r}")
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"{source}: {exc}") from exc
    if kind != "table" and rows:
        raise SpecError(f"{source}: row lines are only valid for kind=table")
    if "normalize" in keys:
        if isinstance(env, AgentAdversary):
            raise SpecError(f"{source}: cannot normalize an agent-targeted adversary")
        if keys["normalize"] not in ("raise", "uniform"):
            raise SpecError(f"{source}: normalize must be raise or uniform")
        env = normalize(env, keys["normalize"])
    return env


def load_env(ref: str) -> EnvSource:
    """A path to an environment file, or ``corpus:NAME``."""
    if ref.startswith("corpus:"):
        name = ref[len("corpus:"):]
        if name not in CORPUS:
            raise SpecError(f"unknown corpus environment {name!r}")
        return CORPUS[name]()
    path = Path(ref)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {ref}: {exc}") from exc
    keys, rows = parse_lines(text, str(path))
    return build_env(keys, rows, str(path))


def load_class(ref: str) -> WeightedClass:
    """A path to a class file, or ``corpus:NAME`` for a built-in class."""
    if ref.startswith("corpus:"):
        name = ref[len("corpus:"):]
        if name not in CLASSES:
            raise SpecError(f"unknown corpus class {name!r}")
        return CLASSES[name]()
    path = Path(ref)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {ref}: {exc}") from exc
    keys, members = parse_lines(text, str(path))
    if keys:
        raise SpecError(f"{path}: class files only take member= lines")
    pairs = []
    for m in members:
        env_ref, sep, weight = m.rpartition(";")
        if not sep:
            raise SpecError(f"{path}: member must be REF;WEIGHT, got {m!r}")
        if not env_ref.startswith("corpus:"):
            env_ref = str(path.parent / env_ref)
        env = load_env(env_ref)
        if isinstance(env, AgentAdversary):
            raise SpecError(f"{path}: class members cannot target the agent")
        pairs.append((env, rational(weight)))
    try:
        return WeightedClass(tuple(pairs))
    except ValueError as exc:
        raise SpecError(f"{path}: {exc}") from exc


def parse_history(text: str) -> History:
    try:
        return History.parse(text)
    except ValueError as exc:
        raise SpecError(f"bad history {text!r}: {exc}") from exc
