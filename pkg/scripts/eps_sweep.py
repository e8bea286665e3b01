"""Regret of eps-optimal play against brute-force optima on random tables.

For each table the agent plays ``actEps`` at every step under a finite
lifetime; its exact value comes from the naive oracle in ``tests/oracles.py``.

    python3 scripts/eps_sweep.py --tables 100 --leaky-iterative
"""
import argparse
import sys
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
import oracles  # noqa: E402

from aixilab.discount import FiniteLifetime  # noqa: E402
from aixilab.env import History, random_table_env  # noqa: E402
from aixilab.policy import Agent, EpsOptimal  # noqa: E402
from aixilab.value import Variant  # noqa: E402


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--tables", type=int, default=100)
    p.add_argument("--seed", type=int, default=1000, help="first table seed")
    p.add_argument("--eps", nargs="+", default=["1/2", "1/4", "1/8"])
    p.add_argument("--per-step", action="store_true", help="use eps at every step instead of the stepwise split")
    p.add_argument("--leaky-iterative", action="store_true", help="also run iterative play on leaky tables")
    args = p.parse_args()
    combos = [(Variant.ITERATIVE, True), (Variant.RECURSIVE, True), (Variant.RECURSIVE, False)]
    if args.leaky_iterative:
        combos.append((Variant.ITERATIVE, False))
    misses, worst, total = Counter(), {}, Counter()
    start = time.perf_counter()
    for i in range(args.tables):
        n_percepts, m = 2 + i % 2, 1 + i % 4
        d = FiniteLifetime(m)
        for variant, measure in combos:
            env = random_table_env(args.seed + i, n_percepts=n_percepts, depth=4, measure=measure)
            iterative = variant is Variant.ITERATIVE
            best = oracles.value(env, m, History(), iterative)
            for text in args.eps:
                eps = Fraction(text)
                agent = Agent(EpsOptimal(eps, variant=variant, stepwise=not args.per_step), env, d)
                regret = best - oracles.value(env, m, History(), iterative, agent)
                key = (variant.value, "measure" if measure else "leaky")
                total[key] += 1
                misses[key] += regret >= eps
                worst[key] = max(worst.get(key, Fraction(0)), regret / eps)
                if regret >= eps:
                    print(f"  miss: seed {args.seed + i}, |E|={n_percepts}, m={m}, {key}, eps={text}, "
                          f"optimum {best}, achieved {best - regret}")
    for key in total:
        print(f"{key[0]:>9} on {key[1]:<7}: {misses[key]}/{total[key]} misses, worst regret/eps {worst[key]}")
    print(f"{time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
