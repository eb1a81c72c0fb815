"""Compare the compiled and pure-numpy MMA backends on full transforms.

Runs the half-precision pipeline with each available backend and reports
wall time plus equivalent TFLOPS per size. Outputs are also cross-checked
bitwise between backends.
"""

import argparse
import sys
import time

import numpy as np

from tcfft import backend
from tcfft.executor import BatchedTensor, execute
from tcfft.oracle import radix2_equiv_tflops
from tcfft.plan import plan_1d


def time_backend(name, z, plan, repeats):
    backend.set_backend(name)
    best = float("inf")
    last = None
    for _ in range(repeats):
        data = BatchedTensor.from_complex(z)
        t0 = time.perf_counter()
        execute(plan, data)
        best = min(best, time.perf_counter() - t0)
        last = data.pairs.copy()
    return best, last


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[4096, 65536, 1 << 20])
    parser.add_argument("--batch", type=int, default=1)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    names = backend.available_backends()
    if "ext" not in names:
        print("note: compiled extension unavailable, timing py only")
    rng = np.random.default_rng(args.seed)

    print(f"{'n':>9} {'backend':>8} {'seconds':>10} {'tflops':>12}")
    for n in args.sizes:
        plan = plan_1d(n, args.batch)
        z = rng.uniform(-1, 1, (args.batch, n)) + 1j * rng.uniform(
            -1, 1, (args.batch, n)
        )
        outputs = {}
        for name in names:
            secs, pairs = time_backend(name, z, plan, args.repeats)
            outputs[name] = pairs
            tflops = radix2_equiv_tflops(n, args.batch, 1, secs)
            print(f"{n:>9} {name:>8} {secs:>10.4f} {tflops:>12.3e}")
        if len(outputs) == 2 and not np.array_equal(
            outputs["ext"].view(np.uint16), outputs["py"].view(np.uint16)
        ):
            print(f"MISMATCH: backends disagree at n={n}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
