"""Mean decoder ripple versus the design target when decoding with the expected symbol count.

    python3 scripts/ripple_check.py --k 256 --c1 1.7 --c2 2.5 --trials 2000
"""
import argparse
import csv
import math
from pathlib import Path

from ltripple.designer import RippleTarget, design
from ltripple.harness import DEFAULT_SEED, ripple_trajectory


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=256)
    ap.add_argument("--c1", type=float, default=1.7)
    ap.add_argument("--c2", type=float, default=2.5)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    target = RippleTarget(args.k, args.c1, args.c2)
    sol = design(target)
    n = math.ceil(sol.n_expected)
    traj = ripple_trajectory(args.k, sol.distribution, n, args.trials, args.seed)
    R = target.ripple_curve()
    print(f"n={n} ({n / args.k:.4f}k)  full-decode rate={traj.success_rate:.3f}")
    with open(args.out / f"ripple_k{args.k}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["L", "target", "mean_running", "mean_all", "reached"])
        for L in range(args.k + 1):
            w.writerow([L, repr(float(R[L])), repr(float(traj.mean_running[L])),
                        repr(float(traj.mean_all[L])), int(traj.reached[L])])


if __name__ == "__main__":
    main()
