"""Command-line interface: ``sigtest gen | test | histogram``.

Exit codes: 0 success, 2 configuration or I/O error, 3 numerical failure.
The default seed is read from ``SIGTEST_SEED`` when ``--seed`` is omitted.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time

from .datagen import KINDS, DatasetConfig, downsample, generate
from .exceptions import ConvergenceError
from .experiments import PRESETS, PROBLEMS, derive_seed, histogram, make_kernel, run_test
from .io import read_dataset, result_payload, write_dataset, write_json
from .mmd import permutation_test

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _default_seed():
    raw = os.environ.get("SIGTEST_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"SIGTEST_SEED must be an integer, got {raw!r}") from None


def _dataset_args(p):
    p.add_argument("--length", type=int, default=101)
    p.add_argument("--w", type=int, default=3)
    p.add_argument("--k-spins", type=int, default=10)
    p.add_argument("--r", type=float, default=0.8)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--origin-std", type=float, default=5.0)
    p.add_argument("--downsample", type=int, nargs=2, metavar=("MIN", "MAX"),
                   help="keep between MIN and MAX ticks per path")


def _base_config(args, kind="random_walk", seed=0):
    return DatasetConfig(kind=kind, length=args.length, w=args.w, k_spins=args.k_spins,
                         r=args.r, sigma=args.sigma, origin_std=args.origin_std, seed=seed)


def build_parser():
    parser = argparse.ArgumentParser(prog="sigtest", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset as CSV")
    gen.add_argument("--kind", choices=KINDS, default="random_walk")
    gen.add_argument("--m", type=int, default=50, help="number of sample paths")
    gen.add_argument("--offset", type=int, default=0, help="index of the first sample")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", default="dataset.csv")
    _dataset_args(gen)

    for name, help_ in (("test", "run one two-sample test"),
                        ("histogram", "T_U^2 under H0 and H1 over repetitions")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--kernel", choices=PRESETS, default="sig-rbf")
        p.add_argument("--problem", choices=sorted(PROBLEMS), default="random_walk")
        p.add_argument("--m", type=int, default=50, help="samples per group")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=None)
        _dataset_args(p)
    test = sub.choices["test"]
    test.add_argument("--hypothesis", choices=("H0", "H1"), default="H1")
    test.add_argument("--x", help="CSV dataset for the first group")
    test.add_argument("--y", help="CSV dataset for the second group")
    test.add_argument("--n-perms", type=int, default=250)
    test.add_argument("--alpha", type=float, default=0.05)
    hist = sub.choices["histogram"]
    hist.add_argument("--repetitions", type=int, default=1000)
    return parser


def cmd_generate(args):
    seed = _default_seed() if args.seed is None else args.seed
    if args.m < 1:
        raise ValueError(f"--m must be >= 1, got {args.m}")
    cfg = _base_config(args, args.kind, seed)
    samples = generate(cfg, args.m, offset=args.offset)
    if args.downsample:
        lo, hi = args.downsample
        samples = [downsample(s, lo, hi, derive_seed(seed, 2, args.offset + i))
                   for i, s in enumerate(samples)]
    write_dataset(args.out, samples)
    print(f"kind={cfg.kind} m={args.m} length={cfg.length} seed={seed} -> {args.out}")


def cmd_test(args):
    seed = _default_seed() if args.seed is None else args.seed
    if args.m < 2:
        raise ValueError(f"--m must be >= 2, got {args.m}")
    keep = tuple(args.downsample) if args.downsample else None
    config = {k: v for k, v in vars(args).items() if k not in ("verbose",)}
    config["seed"] = seed
    if (args.x is None) != (args.y is None):
        raise ValueError("--x and --y must be given together")
    if args.x is not None:
        start = time.perf_counter()
        xs, ys = read_dataset(args.x), read_dataset(args.y)
        pooled = xs + ys
        kernel = make_kernel(args.kernel, n_jobs=args.threads)
        K = kernel.fit(pooled)(pooled)
        result = permutation_test(K, len(xs), len(ys), args.n_perms, seed, args.alpha)
        result.extra["wall_time_ms"] = 1e3 * (time.perf_counter() - start)
    else:
        result = run_test(args.problem, args.hypothesis, args.kernel, m=args.m,
                          n_perms=args.n_perms, alpha=args.alpha, seed=seed, keep_range=keep,
                          n_jobs=args.threads, base=_base_config(args))
    payload = result_payload(result, config)
    if args.out:
        write_json(args.out, payload)
    print(json.dumps({k: payload[k] for k in ("t_obs", "c_alpha", "p_value",
                                              "reject_threshold", "reject_permutation")}))


def cmd_histogram(args):
    seed = _default_seed() if args.seed is None else args.seed
    if args.repetitions < 1:
        raise ValueError(f"--repetitions must be >= 1, got {args.repetitions}")
    keep = tuple(args.downsample) if args.downsample else None
    rows = histogram(args.problem, args.kernel, m=args.m, repetitions=args.repetitions,
                     seed=seed, keep_range=keep, n_jobs=args.threads, base=_base_config(args))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(["repetition", "hypothesis", "t_u2"])
        for rep, hyp, t in rows:
            writer.writerow([rep, hyp, format(t, ".17g")])
    finally:
        if fh is not sys.stdout:
            fh.close()


COMMANDS = {"gen": cmd_generate, "test": cmd_test, "histogram": cmd_histogram}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
