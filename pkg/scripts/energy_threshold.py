"""Sweep the Cantor cuff exponent r and report the energy-series verdict.

    python scripts/energy_threshold.py --r-min 1.5 --r-max 3.5 --steps 21 --out threshold.csv
"""

import argparse
import csv
import sys

import numpy as np

from pantslab.foliation import cantor_energy_series


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--r-min", type=float, default=1.5)
    p.add_argument("--r-max", type=float, default=3.5)
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--n-max", type=int, default=400)
    p.add_argument("--mode", choices=("asymptotic", "exact"), default="asymptotic")
    p.add_argument("--out", help="CSV path (default: stdout)")
    args = p.parse_args(argv)

    rows = []
    for r in np.linspace(args.r_min, args.r_max, args.steps):
        s = cantor_energy_series(float(r), args.n_max, mode=args.mode)
        rows.append([f"{r:.17g}", s.verdict, f"{s.total:.17g}", f"{s.tail_bound:.17g}", s.witness_n or ""])

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["r", "verdict", "partial_sum", "tail_bound", "witness_n"])
    w.writerows(rows)
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
