"""Command-line front end: verify accuracy, benchmark throughput, and dump
plans or fragment maps as JSON.

CSV output uses the header ``kind,n,ny,batch,metric,value``. Exit status is
0 when all checks pass, 1 when a check fails, and 2 on usage errors.
"""

import argparse
import json
import sys
import time

import numpy as np

from .executor import BatchedTensor, execute, make_runner
from .fragments import default_map, replicated_map
from .oracle import CSV_HEADER, ErrorReport, PerfReport, reference_fft64, relative_error
from .plan import PlanArgumentError, UnsupportedSizeError, plan_1d, plan_2d

_NAIVE_LIMIT = 8192


class UsageError(Exception):
    pass


def _check_pow2_sizes(sizes):
    for n in sizes:
        if n < 2 or n & (n - 1):
            raise UsageError(f"sizes must be powers of two >= 2, got {n}")


def _make_plan(args, n):
    kwargs = {"continuous_size": args.continuous_size, "precision": args.mode}
    if args.dims == 2:
        return plan_2d(n, args.ny, args.batch, **kwargs)
    return plan_1d(n, args.batch, **kwargs)


def _random_inputs(rng, batch, total):
    re = rng.uniform(-1.0, 1.0, (batch, total))
    im = rng.uniform(-1.0, 1.0, (batch, total))
    return re + 1j * im


def _reference_spectra(z, dims, nx, ny, mode):
    """Double-precision spectra of what the pipeline actually consumed."""
    if mode == "half":
        zr = z.real.astype(np.float16).astype(np.float64)
        zi = z.imag.astype(np.float16).astype(np.float64)
        zh = zr + 1j * zi
    else:
        zh = z
    if dims == 1:
        return np.stack([reference_fft64(row) for row in zh])
    grids = zh.reshape(-1, nx, ny)
    return np.stack(
        [np.fft.fft2(g).reshape(-1) for g in grids]
    )


def cmd_verify(args, out):
    _check_pow2_sizes(args.sizes)
    if args.dims == 2:
        _check_pow2_sizes([args.ny])
    rng = np.random.default_rng(args.seed)
    print(CSV_HEADER, file=out)
    worst = 0.0
    for n in args.sizes:
        plan = _make_plan(args, n)
        total = n * (args.ny if args.dims == 2 else 1)
        z = _random_inputs(rng, args.batch, total)
        dtype = np.float16 if args.mode == "half" else np.float64
        data = BatchedTensor.from_complex(z, dtype=dtype)
        execute(plan, data)
        spectra = data.to_complex()
        refs = _reference_spectra(z, args.dims, n, args.ny, args.mode)
        errs = np.array(
            [relative_error(spectra[b], refs[b]) for b in range(args.batch)]
        )
        report = ErrorReport(args.dims, n, args.ny if args.dims == 2 else None,
                             args.batch, errs)
        print(report.csv_row(), file=out)
        worst = max(worst, report.mean)
    if worst > args.envelope / 100.0:
        print(f"error check failed: worst mean relative error "
              f"{100 * worst:.4f}% exceeds {args.envelope}%", file=sys.stderr)
        return 1
    return 0


def cmd_bench(args, out):
    _check_pow2_sizes(args.sizes)
    if args.dims == 2:
        _check_pow2_sizes([args.ny])
    rng = np.random.default_rng(args.seed)
    print(CSV_HEADER, file=out)
    for n in args.sizes:
        plan = _make_plan(args, n)
        total = n * (args.ny if args.dims == 2 else 1)
        z = _random_inputs(rng, args.batch, total)
        dtype = np.float16 if args.mode == "half" else np.float64
        pairs0 = BatchedTensor.from_complex(z, dtype=dtype).pairs.copy()
        repeats = 0
        elapsed = 0.0
        while elapsed < args.min_time or repeats == 0:
            data = BatchedTensor(pairs0.copy(), args.batch, total)
            t0 = time.perf_counter()
            execute(plan, data)
            elapsed += time.perf_counter() - t0
            repeats += 1
        report = PerfReport(args.dims, n, args.ny if args.dims == 2 else None,
                            args.batch, repeats, elapsed)
        print(report.csv_row(), file=out)
    return 0


def cmd_plan(args, out):
    _check_pow2_sizes(args.sizes)
    if args.dims == 2:
        _check_pow2_sizes([args.ny])
    for n in args.sizes:
        print(_make_plan(args, n).to_json(), file=out)
    return 0


def cmd_fragmap(args, out):
    fmap = replicated_map() if args.kind == "replicated" else default_map()
    print(json.dumps(fmap.to_json()), file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcfft",
        description="Emulated tensor-core FFT: verify, benchmark, inspect.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sizes_required=True):
        p.add_argument("--sizes", type=int, nargs="+", required=sizes_required,
                       help="transform lengths (nx), powers of two")
        p.add_argument("--ny", type=int, default=256,
                       help="second dimension length for --dims 2")
        p.add_argument("--batch", type=int, default=1)
        p.add_argument("--dims", type=int, choices=(1, 2), default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--continuous-size", type=int, default=32,
                       choices=(4, 8, 16, 32, 64))
        p.add_argument("--mode", choices=("half", "double"), default="half")
        p.add_argument("--out", default=None, help="write output to FILE")

    p_verify = sub.add_parser("verify", help="compare against the double oracle")
    common(p_verify)
    p_verify.add_argument("--envelope", type=float, default=3.5,
                          help="max allowed mean relative error, percent")
    p_verify.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="measure emulator throughput")
    common(p_bench)
    p_bench.add_argument("--min-time", type=float, default=2.0,
                         help="minimum wall time per size, seconds")
    p_bench.set_defaults(func=cmd_bench)

    p_plan = sub.add_parser("plan", help="dump plans as JSON")
    common(p_plan)
    p_plan.set_defaults(func=cmd_plan)

    p_map = sub.add_parser("fragmap", help="dump a fragment map as JSON")
    p_map.add_argument("--kind", choices=("default", "replicated"),
                       default="default")
    p_map.add_argument("--out", default=None)
    p_map.set_defaults(func=cmd_fragmap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.out:
            with open(args.out, "w") as out:
                return args.func(args, out)
        return args.func(args, sys.stdout)
    except (UsageError, UnsupportedSizeError, PlanArgumentError) as exc:
        print(f"tcfft: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"tcfft: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
