"""Command line: ``python3 -m aixilab {check,value,simulate,compare-prop41}``.

Exit codes: 0 success, 1 validation failure or bad input, 2 unresolved tie
or exhausted budget.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from aixilab.approx import INF, K_MAX, format_rational, rational
from aixilab.discount import effective_horizon, parse_discount
from aixilab.env import check_validity
from aixilab.errors import AixiLabError, BudgetExhausted, SpecError, Unresolvable
from aixilab.harness import RunConfig, compare_prop41, simulate
from aixilab.mixture import mixture_env
from aixilab.policy import Constant, EpsOptimal, ExactOptimal, Scheduled, parse_schedule
from aixilab.specfiles import AgentAdversary, load_class, load_env, parse_history
from aixilab.value import Evaluator, Variant, default_horizon


def parse_agent(text: str, variant: Variant, tie_order: Optional[tuple[str, ...]], k_max: int):
    """``exact``, ``eps:1/8``, ``schedule:NAME`` or ``const:ACTION``."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "exact" and not arg:
            return ExactOptimal(tie_order, variant, k_max)
        if kind == "eps":
            return EpsOptimal(rational(arg), tie_order, variant, k_max)
        if kind == "schedule":
            return Scheduled(parse_schedule(arg), tie_order, variant, k_max)
        if kind == "const" and arg:
            return Constant(arg)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"bad agent {text!r}: {exc}") from exc
    raise SpecError(f"unknown agent {text!r}")


def _tie_order(text: Optional[str]):
    return None if text is None else tuple(x.strip() for x in text.split(",") if x.strip())


def _planning_env(args):
    if args.cls is not None:
        return mixture_env(load_class(args.cls))
    if args.env is None:
        raise SpecError("give --env or --class")
    env = load_env(args.env)
    if isinstance(env, AgentAdversary):
        raise SpecError("an agent-targeted adversary only makes sense in simulate")
    return env


def cmd_check(args) -> int:
    env = _planning_env(args)
    report = check_validity(env, args.depth)
    print("\n".join(report.lines()))
    return 0 if report.valid else 1


def _show(x) -> str:
    return "+inf" if x is INF else format_rational(x)


def cmd_value(args) -> int:
    env = _planning_env(args)
    h = parse_history(args.history)
    d = parse_discount(args.discount)
    variants = list(Variant) if args.variant == "both" else [Variant(args.variant)]
    horizon = args.horizon
    if horizon is None and args.eps is not None and d.Gamma(h.time) > 0 and d.lifetime is None:
        horizon = max(h.time, effective_horizon(d, h.time, rational(args.eps)) - 1)
    print(f"env {env.name}, history [{h}], discount {d}")
    for v in variants:
        ev = Evaluator(env, d, v)
        H = default_horizon(d, h.time) if horizon is None else horizon
        lo, hi = ev.value(h, H).interval(0)
        shown = _show(lo) if lo == hi else f"[{_show(lo)}, {_show(hi)}]"
        terms = ev.terms(h, H)
        num = _show(terms.numerator_lo) if terms.exact else f"[{_show(terms.numerator_lo)}, {_show(terms.numerator_hi)}]"
        print(f"{v.value}: {shown} (horizon {H}; numerator {num}, denominator {_show(terms.denominator)}, "
              f"Gamma_t {_show(terms.normalizer)})")
    return 0


def cmd_simulate(args) -> int:
    d = parse_discount(args.discount)
    spec = parse_agent(args.agent, Variant(args.variant), _tie_order(args.tie_order), args.kmax)
    cls = load_class(args.cls) if args.cls is not None else None
    if args.env is None:
        raise SpecError("simulate needs --env")
    env = load_env(args.env)
    try:
        config = RunConfig(env, spec, d, args.steps, args.seed, cls, Path(args.trace) if args.trace else None)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    result = simulate(config)
    if args.trace is None:
        print("\n".join(result.lines()))
    else:
        print(result.lines()[-1])
    return 0


def cmd_compare(args) -> int:
    cmp = compare_prop41(rational(args.eps_r), parse_discount(args.discount), args.steps, args.seed)
    print("\n".join(cmp.lines()))
    return 0 if cmp.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aixilab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, discount=True):
        sp.add_argument("--env", help="environment file or corpus:NAME")
        sp.add_argument("--class", dest="cls", help="class file or corpus:NAME (plan in the mixture)")
        if discount:
            sp.add_argument("--discount", default="geometric:1/2", help="geometric:Q | lt:M | table:G1,G2[;RATIO]")

    sp = sub.add_parser("check", help="check the semimeasure axioms to a depth")
    common(sp, discount=False)
    sp.add_argument("--depth", type=int, default=6)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("value", help="optimal value of a history")
    common(sp)
    sp.add_argument("--history", default="", help='e.g. "beta@0:1/4,alpha"')
    sp.add_argument("--variant", choices=["iterative", "recursive", "both"], default="both")
    sp.add_argument("--horizon", type=int, help="last time step expanded before tail bounds")
    sp.add_argument("--eps", help="choose the horizon from the effective horizon for this tolerance")
    sp.set_defaults(func=cmd_value)

    sp = sub.add_parser("simulate", help="run an agent against an environment")
    common(sp)
    sp.add_argument("--agent", default="exact", help="exact | eps:1/K | schedule:NAME | const:ACTION")
    sp.add_argument("--variant", choices=["iterative", "recursive"], default="recursive")
    sp.add_argument("--tie-order", help="comma-separated actions, most preferred first")
    sp.add_argument("--steps", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--kmax", type=int, default=K_MAX, help="refinement budget per decision")
    sp.add_argument("--trace", help="write JSON-lines trace here instead of stdout")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("compare-prop41", help="W- versus V-maximizer on the ending environment")
    sp.add_argument("--eps-r", default="1/4")
    sp.add_argument("--discount", default="geometric:1/2")
    sp.add_argument("--steps", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (Unresolvable, BudgetExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AixiLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
