"""Command-line entry point: ``ltripple <subcommand> ...``.

Every data file is written next to a ``<file>.meta.json`` sidecar recording
the invocation, the seed and the file's SHA-256.  Data files contain no
timestamps, so identical invocations reproduce them byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .degree_dist import dumps as dist_dumps, load_distribution
from .designer import RippleTarget, design
from .errors import FormatError, InvalidParameter, SolverFailure, DegenerateDesign
from .harness import DEFAULT_GRID, DEFAULT_SEED, DistSource, ExperimentConfig, run_experiment, sweep
from .release import redundancy_surface, release_curve
from .walk import WalkConfig, fit_power_law, fit_sqrt_law, fit_window, walk_biased

ENV_OUT = "LTRIPPLE_OUT"
ENV_WORKERS = "LTRIPPLE_WORKERS"


class CliError(Exception):
    def __init__(self, kind, message, status=2):
        super().__init__(message)
        self.kind = kind
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message)


def parse_axis(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 10) for i in range(n)]
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise CliError("validation", f"bad axis specification {text!r}") from None
    if not vals:
        raise CliError("validation", f"empty axis specification {text!r}")
    return vals


def _table(header, rows, fmt) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> float:
    # str(float) is the shortest round-tripping repr, so CSV keeps full precision
    return float(x)


class Artifacts:
    """Collects outputs in memory; nothing touches disk until :meth:`commit`."""

    def __init__(self, out_dir, argv, seed):
        self.out_dir = out_dir
        self.argv = argv
        self.seed = seed
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str):
        self.files[name] = text

    def commit(self) -> list[str]:
        os.makedirs(self.out_dir, exist_ok=True)
        pending = {}
        for name, text in self.files.items():
            data = text.encode("utf-8")
            meta = {
                "file": name,
                "invocation": ["ltripple", *self.argv],
                "seed": self.seed,
                "sha256": hashlib.sha256(data).hexdigest(),
                "version": __version__,
            }
            pending[name] = data
            pending[name + ".meta.json"] = (json.dumps(meta, indent=1, sort_keys=True) + "\n").encode()
        written = []
        for name, data in pending.items():
            fd, tmp = tempfile.mkstemp(dir=self.out_dir, prefix=".tmp-")
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, os.path.join(self.out_dir, name))
            written.append(os.path.join(self.out_dir, name))
        return written


def _out_dir(args):
    out = args.out or os.environ.get(ENV_OUT)
    if not out:
        raise CliError("validation", f"no output directory: pass --out or set {ENV_OUT}")
    return out


def _workers(args):
    if args.workers is not None:
        w = args.workers
    else:
        try:
            w = int(os.environ.get(ENV_WORKERS, "1"))
        except ValueError:
            raise CliError("validation", f"{ENV_WORKERS} must be an integer") from None
    if w < 1:
        raise CliError("validation", "--workers must be >= 1")
    return w


def _fmt_float(x) -> str:
    return f"{x:g}"


# ---------------------------------------------------------------- subcommands

def cmd_design(args, arts):
    sol = design(RippleTarget(args.k, args.c1, args.c2))
    stem = f"design_k{args.k}_c1-{_fmt_float(args.c1)}_c2-{_fmt_float(args.c2)}"
    arts.add(stem + ".json", dist_dumps(sol.distribution))
    R = sol.target.ripple_curve()
    Ls = range(args.k, 0, -1)
    rows = [[L, _num(t), _num(a), _num(R[L])] for L, t, a in zip(Ls, sol.target_Q, sol.achieved_Q)]
    arts.add(stem + "_diagnostics." + args.format, _table(["L", "target_Q", "achieved_Q", "target_R"], rows, args.format))
    summary = {
        "k": args.k, "c1": args.c1, "c2": args.c2,
        "n_expected": sol.n_expected,
        "expected_overhead": sol.overhead_expected,
        "residual_sq_norm": sol.residual_sq_norm,
        "support": [int(d) for d in sol.distribution.support],
    }
    arts.add(stem + "_summary.json", json.dumps(summary, indent=1) + "\n")
    return summary


def cmd_analyze(args, arts):
    if args.k < 2:
        raise CliError("validation", "--k must be >= 2")
    if args.fig == "release":
        degrees = [int(d) for d in parse_axis(args.degrees)]
        if any(not 1 <= d <= args.k for d in degrees):
            raise CliError("validation", f"degrees must lie in 1..{args.k}")
        rows = []
        for d in degrees:
            curve = release_curve(args.k, d)
            rows += [[d, L, _num(p)] for L, p in enumerate(curve)]
        arts.add(f"release_k{args.k}." + args.format, _table(["d", "L", "value"], rows, args.format))
    else:
        surf = redundancy_surface(args.k)
        rows = [[d, R, _num(surf[d, R])] for d in range(2, args.k + 1) for R in range(1, args.k)
                if not np.isnan(surf[d, R])]
        arts.add(f"redundancy_k{args.k}." + args.format, _table(["d", "R", "value"], rows, args.format))
    return {"fig": args.fig, "k": args.k}


def _source(args) -> DistSource:
    if args.dist == "isd":
        return DistSource("isd")
    if args.dist == "rsd":
        if args.c is None or args.delta is None:
            raise CliError("validation", "--dist rsd needs --c and --delta")
        return DistSource.rsd(args.c, args.delta)
    if args.dist == "designed":
        if args.c1 is None or args.c2 is None:
            raise CliError("validation", "--dist designed needs --c1 and --c2")
        return DistSource.designed(args.c1, args.c2)
    if not args.file:
        raise CliError("validation", "--dist file needs --file")
    return DistSource("file", path=args.file)


def cmd_simulate(args, arts):
    grid = tuple(parse_axis(args.grid)) if args.grid else DEFAULT_GRID
    cfg = ExperimentConfig(args.k, _source(args), args.trials, args.seed, grid, args.cap_multiplier, args.discipline)
    res = run_experiment(cfg, _workers(args))
    stem = f"simulate_k{args.k}_{cfg.digest()}"
    rows = [[_num(a), _num(1 + a), _num(p), _num(se)] for a, p, se in zip(grid, res.ber, res.ber_se())]
    arts.add(stem + "_ber." + args.format, _table(["alpha", "overhead", "ber", "ber_se"], rows, args.format))
    arts.add(stem + "_nsuccess.csv", res.n_success_csv())
    rip = [[L, _num(v)] for L, v in enumerate(res.ripple_mean)]
    arts.add(stem + "_ripple." + args.format, _table(["L", "mean_ripple"], rip, args.format))
    summary = res.summary()
    arts.add(stem + "_summary.json", json.dumps(summary, indent=1, sort_keys=True) + "\n")
    return summary


def cmd_sweep(args, arts):
    if args.family == "designed":
        if args.c1 is None or args.c2 is None:
            raise CliError("validation", "--family designed needs --c1 and --c2 axes")
        ax1, ax2 = parse_axis(args.c1), parse_axis(args.c2)
    else:
        if args.c is None or args.delta is None:
            raise CliError("validation", "--family rsd needs --c and --delta axes")
        ax1, ax2 = parse_axis(args.c), parse_axis(args.delta)
    res = sweep(args.k, args.family, ax1, ax2, args.trials, args.seed, _workers(args), args.cap_multiplier)
    stem = f"sweep_{args.family}_k{args.k}_t{args.trials}_s{args.seed}"
    arts.add(stem + "_table.csv", res.to_csv())
    arts.add(stem + "_cells.csv", res.cells_csv())
    summary = {
        "k": args.k, "family": args.family, "trials": args.trials, "seed": args.seed,
        "argmin": list(res.argmin),
        "min_avg_overhead": float(np.nanmin(res.avg_overhead)),
        "failed_cells": len(res.errors),
    }
    arts.add(stem + "_summary.json", json.dumps(summary, indent=1) + "\n")
    return summary


def cmd_walk(args, arts):
    cfg = WalkConfig(args.k, args.r0, args.barrier, args.trials)
    rng = np.random.default_rng(args.seed)
    res = walk_biased(cfg, rng)
    lo, hi = fit_window(args.k)
    sel = (res.L >= lo) & (res.L <= hi)
    pw = fit_power_law(res.L[sel], res.rms[sel])
    sq = fit_sqrt_law(res.L[sel], res.rms[sel])
    rows = [[int(L), _num(r), _num(pw(L)), _num(sq(L))] for L, r in zip(res.L, res.rms)]
    stem = f"walk_k{args.k}_r0-{cfg.start}_{args.barrier}"
    arts.add(stem + "." + args.format, _table(["steps", "rms_empirical", "power_fit", "sqrt_fit"], rows, args.format))
    summary = {"k": args.k, "r0": cfg.start, "barrier": args.barrier, "trials": args.trials,
               "c1": pw.c1, "c2": pw.c2, "fit_error": pw.fit_error,
               "sqrt_c": sq.c1, "sqrt_fit_error": sq.fit_error}
    arts.add(stem + "_summary.json", json.dumps(summary, indent=1) + "\n")
    return summary


def cmd_info(args):
    dist = load_distribution(args.file)
    info = {
        "k": dist.k,
        "mean_degree": dist.mean_degree,
        "support_size": int(dist.support.size),
        "support": [int(d) for d in dist.support],
        "max_degree": int(dist.support.max()),
        "mass_sum": float(dist.mass.sum()),
    }
    print(json.dumps(info, indent=1))
    return info


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ltripple", description="LT codes with a decreasing ripple: design, analysis and simulation.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(sp, seeded=False, parallel=False):
        sp.add_argument("--out", help=f"output directory (default ${ENV_OUT})")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if seeded:
            sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if parallel:
            sp.add_argument("--workers", type=int, default=None, help=f"process count (default ${ENV_WORKERS} or 1)")

    sp = sub.add_parser("design", help="design a degree distribution for R(L) = c1 L^(1/c2)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--c1", type=float, required=True)
    sp.add_argument("--c2", type=float, required=True)
    common(sp)

    sp = sub.add_parser("analyze", help="release / redundancy probability tables")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--fig", choices=("release", "redundancy"), required=True)
    sp.add_argument("--degrees", default="2,4,6,10,20")
    common(sp)

    sp = sub.add_parser("simulate", help="Monte Carlo overhead and block error rate")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--dist", choices=("isd", "rsd", "designed", "file"), required=True)
    sp.add_argument("--c", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--c1", type=float)
    sp.add_argument("--c2", type=float)
    sp.add_argument("--file")
    sp.add_argument("--trials", type=int, default=5000)
    sp.add_argument("--grid", help="overhead values alpha, e.g. 0:0.5:0.01")
    sp.add_argument("--cap-multiplier", type=float, default=3.0)
    sp.add_argument("--discipline", choices=("fifo", "lifo", "random"), default="fifo")
    common(sp, seeded=True, parallel=True)

    sp = sub.add_parser("sweep", help="average overhead over a parameter grid")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--family", choices=("designed", "rsd"), required=True)
    sp.add_argument("--c1")
    sp.add_argument("--c2")
    sp.add_argument("--c")
    sp.add_argument("--delta")
    sp.add_argument("--trials", type=int, default=5000)
    sp.add_argument("--cap-multiplier", type=float, default=3.0)
    common(sp, seeded=True, parallel=True)

    sp = sub.add_parser("walk", help="biased random-walk RMS curve and power-law fit")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--r0", type=int)
    sp.add_argument("--barrier", choices=("none", "absorb", "clamp"), default="clamp")
    sp.add_argument("--trials", type=int, default=10_000)
    common(sp, seeded=True)

    sp = sub.add_parser("info", help="summarize a distribution file")
    sp.add_argument("file")
    return p


COMMANDS = {"design": cmd_design, "analyze": cmd_analyze, "simulate": cmd_simulate,
            "sweep": cmd_sweep, "walk": cmd_walk}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.cmd == "info":
            cmd_info(args)
            return 0
        arts = Artifacts(_out_dir(args), argv, getattr(args, "seed", None))
        summary = COMMANDS[args.cmd](args, arts)
        for path in arts.commit():
            print(path)
        if summary is not None:
            print(json.dumps(summary, sort_keys=True), file=sys.stderr)
        return 0
    except CliError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return exc.status
    except (InvalidParameter, FormatError) as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 2
    except (SolverFailure, DegenerateDesign) as exc:
        print(f"error: solver: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
