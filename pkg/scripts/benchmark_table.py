"""Classify the benchmark surfaces and print a verdict table.

    python scripts/benchmark_table.py --depth 50
"""

import argparse

from pantslab.criteria import classify
from pantslab.surface import make_spec

BENCHMARKS = [
    ("cantor", "bhs", None),
    ("cantor", "power_over_exp", 3.0),
    ("cantor", "power_over_exp", 2.5),
    ("cantor", "power_over_exp", 2.0),
    ("cantor", "constant", None),
    ("grid", "constant", None),
    ("ladder", "constant", None),
]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--depth", type=int, default=50)
    args = p.parse_args(argv)

    print(f"{'family':<14}{'rule':<16}{'r':>5}  {'kind':<13}rule id")
    for family, rule, r in BENCHMARKS:
        v = classify(make_spec(family, rule, r=r), depth=args.depth)
        print(f"{family:<14}{rule:<16}{'' if r is None else r:>5}  {v.kind:<13}{v.rule}")


if __name__ == "__main__":
    main()
