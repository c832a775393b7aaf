"""Average overhead and block error rate of designed and RSD distributions across k.

Each ``--designed`` / ``--rsd`` entry is ``k:a:b``; the pair applies at that k.

    python3 scripts/compare_overhead.py --designed 256:1.7:2.5 1024:1.9:2.6 \\
        --rsd 256:0.1:4 1024:0.07:4 --trials 5000 --out results/
"""
import argparse
from collections import defaultdict
from pathlib import Path

from ltripple.harness import DEFAULT_GRID, DEFAULT_SEED, DistSource, ExperimentConfig, compare_csv, run_experiment


def _parse(items, family):
    out = defaultdict(list)
    for item in items:
        k, a, b = item.split(":")
        out[int(k)].append(DistSource(family, float(a), float(b)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--designed", nargs="+", default=["256:1.7:2.5", "1024:1.9:2.6"])
    ap.add_argument("--rsd", nargs="+", default=["256:0.1:4", "1024:0.07:4", "1024:0.03:0.5"])
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    sources = _parse(args.designed, "designed")
    for k, srcs in _parse(args.rsd, "rsd").items():
        sources[k].extend(srcs)
    results = []
    for k in sorted(sources):
        for src in sources[k]:
            res = run_experiment(ExperimentConfig(k, src, args.trials, args.seed, DEFAULT_GRID), args.workers)
            print(f"k={k:5d} {src.label:24s} avg={res.avg_overhead:.4f} se={res.overhead_se:.4f}")
            results.append(res)
    (args.out / f"compare_t{args.trials}.csv").write_text(compare_csv(results))


if __name__ == "__main__":
    main()
