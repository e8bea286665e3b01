"""Print truncated iterative and recursive values side by side for every corpus environment.

Recursive truncations only grow with the horizon; iterative ones can drop
when an environment ends, because the timelines that ended stop counting.

    python3 scripts/truncation_asymmetry.py --horizons 8
"""
import argparse

from aixilab.approx import format_rational
from aixilab.corpus import corpus
from aixilab.discount import parse_discount
from aixilab.env import History
from aixilab.value import Variant, truncation_sequence


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--horizons", type=int, default=6)
    p.add_argument("--discount", default="geometric:1/2")
    args = p.parse_args()
    d = parse_discount(args.discount)
    horizons = range(1, args.horizons + 1)
    for name, env in corpus().items():
        for a in env.actions:
            h = History(pending=a)
            rows = {v: truncation_sequence(env, d, h, horizons, v) for v in Variant}
            it = rows[Variant.ITERATIVE]
            drops = any(x > y for x, y in zip(it, it[1:]))
            print(f"{name} [{a}]{'  <- iterative drops' if drops else ''}")
            for v, seq in rows.items():
                print(f"  {v.value:>9}: " + " ".join(format_rational(x) for x in seq))


if __name__ == "__main__":
    main()
