"""Compare random-walk return fractions across families and step counts.

The probe is heuristic: it sees the pants graph, not the cuff lengths.

    python scripts/probe_compare.py --trials 1000 --seed 12345
"""

import argparse

from pantslab.probe import WalkConfig, run_walk
from pantslab.surface import make_spec


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--steps", type=int, nargs="+", default=[100, 1000, 10_000])
    args = p.parse_args(argv)

    print("HEURISTIC")
    print(f"{'family':<8}{'steps':>8}{'return':>9}{'+-se':>8}{'mean max level':>16}")
    for family in ("ladder", "grid", "cantor"):
        for steps in args.steps:
            rep = run_walk(WalkConfig(make_spec(family, "constant"), steps, args.trials, args.seed))
            print(f"{family:<8}{steps:>8}{rep.return_fraction:>9.3f}{rep.standard_error:>8.3f}"
                  f"{rep.mean_max_level:>16.1f}")


if __name__ == "__main__":
    main()
