"""Run both maximizers on the ending environment across several rewards and discounts.

    python3 scripts/ending_world.py
"""
import argparse
from fractions import Fraction

from aixilab.discount import parse_discount
from aixilab.harness import compare_prop41


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--eps-r", nargs="+", default=["1/8", "1/4", "1/2", "3/4"])
    p.add_argument("--discount", nargs="+", default=["geometric:1/2", "geometric:9/10", "lt:4"])
    p.add_argument("--steps", type=int, default=4)
    args = p.parse_args()
    failures = 0
    print(f"{'eps_r':>6} {'discount':>16} {'W total':>9} {'V total':>9}  result")
    for text in args.discount:
        d = parse_discount(text)
        for r in args.eps_r:
            cmp = compare_prop41(Fraction(r), d, args.steps)
            failures += not cmp.passed
            print(f"{r:>6} {text:>16} {str(cmp.recursive.total):>9} {str(cmp.iterative.total):>9}  "
                  f"{'PASS' if cmp.passed else 'FAIL'}")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
