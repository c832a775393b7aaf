"""Average-overhead grids over (c1, c2) for the designed family and (c, delta) for RSD.

    python3 scripts/sweep_tables.py --k 1024 --trials 5000 --out results/
"""
import argparse
import json
from pathlib import Path

import numpy as np

from ltripple.harness import DEFAULT_SEED, sweep

DESIGNED_C1 = [round(1.0 + 0.1 * i, 1) for i in range(13)]
DESIGNED_C2 = [round(2.2 + 0.1 * i, 1) for i in range(7)]
RSD_C = [round(0.01 * i, 2) for i in range(1, 11)]
RSD_DELTA = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=1024)
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--family", choices=["designed", "rsd", "both"], default="both")
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    grids = {"designed": (DESIGNED_C1, DESIGNED_C2), "rsd": (RSD_C, RSD_DELTA)}
    families = ["designed", "rsd"] if args.family == "both" else [args.family]
    for fam in families:
        res = sweep(args.k, fam, *grids[fam], trials=args.trials, seed=args.seed, workers=args.workers)
        stem = args.out / f"sweep_{fam}_k{args.k}_t{args.trials}"
        stem.with_suffix(".csv").write_text(res.to_csv())
        Path(f"{stem}_cells.csv").write_text(res.cells_csv())
        best = {"family": fam, "k": args.k, "argmin": res.argmin,
                "min_avg_overhead": float(np.nanmin(res.avg_overhead))}
        print(json.dumps(best))


if __name__ == "__main__":
    main()
