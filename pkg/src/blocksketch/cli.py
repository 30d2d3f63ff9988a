"""Batch experiment runner.

Subcommands:
  ose           Monte-Carlo subspace-embedding sweeps.
  lowrank       Low-rank approximation error experiments over (l, k) grids.
  bench         Timing of structured vs unstructured sketch application.
  kernel-build  Build and cache an RBF kernel matrix from a CSV dataset.

Every command is deterministic under a fixed --seed and writes CSV with a
header row to stdout or --out.  Exit codes: 0 success, 1 runtime error,
2 usage error.
"""

import argparse
import csv
import sys
import time

import numpy as np

from . import data as datamod
from .lowrank import error_norm, nystrom, psd_trace_error, rsvd, single_view
from .ose import ose_monte_carlo
from .partition import RowBlocks, cost_report, distribute, sketch_rowwise
from .sketch import KINDS, apply_block_local, make_operator, min_rows_theorem1


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def _int_list(text):
    return [int(v) for v in text.split(",")]


def cmd_ose(args, out) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    writer = csv.writer(out)
    writer.writerow(["kind", "n", "p", "d", "l", "eps", "trials",
                     "failures", "failure_rate"])
    for kind in args.kind:
        for p in args.p:
            ls = args.l or [min(args.n, min_rows_theorem1(args.eps, args.delta,
                                                          args.d, args.n))]
            for l in ls:
                rate = ose_monte_carlo(kind, l, args.n, p, args.d,
                                       args.trials, args.eps, seed=args.seed)
                writer.writerow([kind, args.n, p, args.d, l, args.eps,
                                 args.trials, int(round(rate * args.trials)),
                                 f"{rate:.6f}"])
    return 0


def _build_input(args):
    if args.dataset:
        X = datamod.load_csv(args.dataset)
        if args.n and args.n < X.shape[0]:
            X = X[: args.n]
        return datamod.rbf_kernel(X, args.sigma), None
    n = args.n or 1024
    spectrum = args.rho ** np.arange(n) if args.rank is None else \
        np.concatenate([np.ones(args.rank), np.zeros(n - args.rank)])
    A, spec = datamod.synthetic_psd(n, spectrum, seed=args.seed)
    return A, spec


def cmd_lowrank(args, out) -> int:
    A, _ = _build_input(args)
    n = A.shape[0]
    if args.alg == "nystrom" and np.linalg.norm(A - A.T) > 1e-10 * np.linalg.norm(A):
        raise RuntimeError("nystrom needs a symmetric PSD input")
    writer = csv.writer(out)
    writer.writerow(["alg", "kind", "n", "l", "k", "rep", "rel_error",
                     "median", "band_lo", "band_hi"])
    rng = np.random.default_rng(args.seed)
    for kind in args.kind:
        for l in args.l:
            for k in args.k:
                errors = []
                for rep in range(args.reps):
                    seed = int(rng.integers(0, 2 ** 62))
                    op = make_operator(kind, l, n, args.p, seed=seed)
                    if args.alg == "rsvd":
                        fact = rsvd(A, op, k)
                        err = error_norm(A, fact, args.norm)
                        ref = error_norm(A, np.zeros_like(A), args.norm)
                    elif args.alg == "nystrom":
                        fact = nystrom(A, op, k)
                        if args.norm == "trace":
                            err = psd_trace_error(A, fact)
                        else:
                            err = error_norm(A, fact, args.norm)
                        ref = np.trace(A) if args.norm == "trace" else \
                            error_norm(A, np.zeros_like(A), args.norm)
                    else:  # single-view
                        s = 2 * l + 1
                        ops = [make_operator("gaussian", rows, dim, args.p,
                                             seed=seed + i)
                               for i, (rows, dim) in enumerate(
                                   [(l, n), (l, n), (s, n), (s, n)])]
                        fact = single_view(A, *ops, k)
                        err = error_norm(A, fact, args.norm)
                        ref = error_norm(A, np.zeros_like(A), args.norm)
                    errors.append(err / ref)
                med = float(np.median(errors))
                lo, hi = np.percentile(errors, [2.5, 97.5])
                for rep, err in enumerate(errors):
                    writer.writerow([args.alg, kind, n, l, k, rep,
                                     f"{err:.6e}", f"{med:.6e}",
                                     f"{lo:.6e}", f"{hi:.6e}"])
    return 0


def bench_local_times(kind, n, d, l, p, seed):
    """Per-block local apply times, measured sequentially to avoid contention."""
    op = make_operator(kind, l, n, p, seed=seed)
    rng = np.random.default_rng(seed + 1)
    block = rng.standard_normal((op.r, d))
    times = []
    for i in range(p):
        t0 = time.perf_counter()
        apply_block_local(op, i, block)
        times.append(time.perf_counter() - t0)
    return op, times


def cmd_bench(args, out) -> int:
    if args.n * args.d > args.memory_guard:
        raise RuntimeError(f"n*d = {args.n * args.d} exceeds the memory guard "
                           f"({args.memory_guard} elements)")
    writer = csv.writer(out)
    writer.writerow(["kind", "n", "d", "l", "p", "wall_seconds_total",
                     "wall_seconds_local_max", "modeled_flops",
                     "modeled_words", "modeled_operator_words"])
    rng = np.random.default_rng(args.seed)
    V = rng.standard_normal((args.n, args.d))
    for kind in args.kind:
        for p in args.p:
            Vd = distribute(V, RowBlocks(p))
            for l in args.l:
                op, local = bench_local_times(kind, args.n, args.d, l, p,
                                              args.seed)
                t0 = time.perf_counter()
                sketch_rowwise(op, Vd)
                total = time.perf_counter() - t0
                model = cost_report(op, args.d)
                writer.writerow([kind, args.n, args.d, l, p,
                                 f"{total:.6f}", f"{max(local):.6f}",
                                 f"{model['flops_per_worker']:.0f}",
                                 f"{model['words_reduced']:.0f}",
                                 f"{model['operator_words_per_worker']:.0f}"])
    return 0


def cmd_kernel_build(args, out) -> int:
    X = datamod.load_csv(args.dataset)
    if args.n and args.n < X.shape[0]:
        X = X[: args.n]
    A = datamod.rbf_kernel(X, args.sigma)
    datamod.save_matrix(args.cache, A)
    writer = csv.writer(out)
    writer.writerow(["rows", "sigma", "cache"])
    writer.writerow([A.shape[0], args.sigma, args.cache])
    return 0


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="blocksketch",
                                 description="Randomized sketching experiments")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="CSV output path (default stdout)")
    sub = ap.add_subparsers(dest="command", required=True)

    o = sub.add_parser("ose", help="Monte-Carlo embedding verification")
    o.add_argument("--kind", nargs="+", choices=KINDS, default=["bsrht"])
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--d", type=int, required=True)
    o.add_argument("--eps", type=float, required=True)
    o.add_argument("--delta", type=float, default=0.1)
    o.add_argument("--p", type=_int_list, default=[1])
    o.add_argument("--l", type=_int_list, default=None,
                   help="sketch sizes; default min(n, theorem bound)")
    o.add_argument("--trials", type=int, required=True)
    o.set_defaults(func=cmd_ose)

    r = sub.add_parser("lowrank", help="low-rank approximation errors")
    r.add_argument("--alg", choices=["rsvd", "nystrom", "single-view"],
                   required=True)
    r.add_argument("--dataset", default=None, help="CSV feature table")
    r.add_argument("--sigma", type=float, default=100.0)
    r.add_argument("--n", type=int, default=None)
    r.add_argument("--rho", type=float, default=0.9,
                   help="geometric spectrum ratio for synthetic input")
    r.add_argument("--rank", type=int, default=None,
                   help="exact rank for synthetic input (overrides --rho)")
    r.add_argument("--kind", nargs="+", choices=KINDS, default=["bsrht"])
    r.add_argument("--p", type=int, default=1)
    r.add_argument("--l", type=_int_list, required=True)
    r.add_argument("--k", type=_int_list, required=True)
    r.add_argument("--reps", type=int, default=20)
    r.add_argument("--norm", choices=["spectral", "trace", "fro"],
                   default="trace")
    r.set_defaults(func=cmd_lowrank)

    b = sub.add_parser("bench", help="sketch application timing")
    b.add_argument("--kind", nargs="+", choices=KINDS,
                   default=["gaussian", "bsrht"])
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--l", type=_int_list, required=True)
    b.add_argument("--p", type=_int_list, default=[1, 2, 4, 8])
    b.add_argument("--memory-guard", type=int, default=2 ** 28,
                   help="max n*d elements for the test matrix")
    b.set_defaults(func=cmd_bench)

    kb = sub.add_parser("kernel-build", help="build and cache an RBF kernel")
    kb.add_argument("--dataset", required=True)
    kb.add_argument("--sigma", type=float, default=100.0)
    kb.add_argument("--n", type=int, default=None)
    kb.add_argument("--cache", required=True)
    kb.set_defaults(func=cmd_kernel_build)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    out = _open_out(args.out)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        ap.print_usage(sys.stderr)
        return 2
    except Exception as exc:  # runtime failures: nonzero but distinct from usage
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
