"""Release-law curves at k=100: closed form against decoder histograms, plus the redundancy surface.

    python3 scripts/release_curves.py --decodes 100000 --out results/
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from ltripple.harness import DEFAULT_SEED, release_histogram
from ltripple.release import redundancy_surface, release_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=100)
    ap.add_argument("--degrees", type=int, nargs="+", default=[2, 4, 6, 10, 20])
    ap.add_argument("--decodes", type=int, default=100_000)
    ap.add_argument("--per-decode", type=int, default=10)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    with open(args.out / f"release_k{args.k}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "L", "release_prob", "empirical", "z"])
        for d in args.degrees:
            p = release_curve(args.k, d)
            counts = release_histogram(args.k, d, args.decodes, args.per_decode, args.seed)
            n = counts.sum()
            sd = np.sqrt(n * p * (1 - p))
            z = np.divide(counts - n * p, sd, out=np.zeros_like(p), where=sd > 0)
            for L in range(args.k + 1):
                w.writerow([d, L, repr(float(p[L])), repr(float(counts[L] / n)), f"{z[L]:.3f}"])
            print(f"d={d:3d}  samples={n}  max|z|={np.abs(z).max():.2f}  argmax L={int(np.argmax(p))}")

    surf = redundancy_surface(args.k)
    with open(args.out / f"redundancy_k{args.k}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "R", "r"])
        for d in range(2, args.k + 1):
            for R in range(1, args.k):
                v = surf[d, R]
                if not np.isnan(v):
                    w.writerow([d, R, repr(float(v))])


if __name__ == "__main__":
    main()
