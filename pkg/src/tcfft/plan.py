"""Plans: validated radix schedules and layout parameters.

A plan is created once per (size, batch) configuration and reused across
executions, in the style of FFTW/cuFFT handles. The schedule policy is
greedy largest-first: emit radix-8192 kernels while more than 8192 remains,
then one final kernel for the remainder. This maximizes the MMA-path share
per pass; a ``schedule`` override hook exists for experiments since the
selection rule is a stand-in policy, not a measured optimum.
"""

import json
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .kernels import KERNEL_CATALOG, VALID_CONT_SIZES, MergeKernel

MAX_KERNEL_RADIX = 8192


class UnsupportedSizeError(ValueError):
    pass


class PlanArgumentError(ValueError):
    pass


def _check_pow2(n: int, what: str) -> None:
    if n < 2 or n & (n - 1):
        raise UnsupportedSizeError(f"{what} must be a power of two >= 2, got {n}")


def schedule_radices(n: int):
    """Greedy kernel schedule for a length-n transform."""
    _check_pow2(n, "transform length")
    out = []
    rem = n
    while rem > MAX_KERNEL_RADIX:
        out.append(MAX_KERNEL_RADIX)
        rem //= MAX_KERNEL_RADIX
    out.append(rem)
    return tuple(out)


def _validate_schedule(schedule, n: int):
    schedule = tuple(int(r) for r in schedule)
    for r in schedule:
        if r not in KERNEL_CATALOG:
            raise UnsupportedSizeError(f"radix {r} not in the kernel catalog")
    if reduce(lambda a, b: a * b, schedule, 1) != n:
        raise UnsupportedSizeError(f"schedule {schedule} does not multiply to {n}")
    return schedule


@dataclass(frozen=True)
class Plan:
    """Immutable transform configuration, shareable across executions."""

    dims: int
    nx: int
    ny: int | None
    batch: int
    schedule_x: tuple
    schedule_y: tuple | None
    continuous_size: int = 32
    precision: str = "half"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def kernels(self, schedule) -> tuple:
        return tuple(MergeKernel.for_radix(r) for r in schedule)

    def sub_radix_list(self, schedule) -> tuple:
        subs = []
        for k in self.kernels(schedule):
            subs.extend(k.sub_radices)
        return tuple(subs)

    def to_json(self) -> str:
        return json.dumps(
            {
                "dims": self.dims,
                "nx": self.nx,
                "ny": self.ny,
                "batch": self.batch,
                "schedule_x": list(self.schedule_x),
                "schedule_y": list(self.schedule_y) if self.schedule_y else None,
                "continuous_size": self.continuous_size,
                "precision": self.precision,
            }
        )

    def permutation_cycles(self, schedule):
        """Digit-reversal permutation for one dimension, decomposed into
        cycles grouped by length. Cached: plan-owned configuration."""
        key = ("perm", schedule)
        if key not in self._cache:
            n = reduce(lambda a, b: a * b, schedule, 1)
            dest = digit_reversal_destinations(n, self.sub_radix_list(schedule))
            self._cache[key] = _cycles_by_length(dest)
        return self._cache[key]


def _common_checks(batch: int, continuous_size: int, precision: str):
    if batch < 1:
        raise PlanArgumentError(f"batch must be >= 1, got {batch}")
    if continuous_size not in VALID_CONT_SIZES:
        raise PlanArgumentError(
            f"continuous_size must be one of {VALID_CONT_SIZES}"
        )
    if precision not in ("half", "double"):
        raise PlanArgumentError(f"precision must be 'half' or 'double'")


def plan_1d(nx: int, batch: int, *, continuous_size: int = 32,
            precision: str = "half", schedule=None) -> Plan:
    """Plan a batch of 1D transforms of power-of-two length nx."""
    _check_pow2(nx, "nx")
    _common_checks(batch, continuous_size, precision)
    sched = schedule_radices(nx) if schedule is None else _validate_schedule(schedule, nx)
    return Plan(1, nx, None, batch, sched, None, continuous_size, precision)


def plan_2d(nx: int, ny: int, batch: int, *, continuous_size: int = 32,
            precision: str = "half") -> Plan:
    """Plan batched 2D transforms over row-major (nx, ny) data.

    Execution order: the contiguous dimension (ny, rows) first, then nx as
    a strided batched transform down the columns.
    """
    _check_pow2(nx, "nx")
    _check_pow2(ny, "ny")
    _common_checks(batch, continuous_size, precision)
    return Plan(
        2, nx, ny, batch, schedule_radices(nx), schedule_radices(ny),
        continuous_size, precision,
    )


def digit_reversal_destinations(n: int, sub_radices) -> np.ndarray:
    """dest[t] = position input element t occupies before the first merge.

    The last-executed radix is the outermost decimation: element t goes to
    block (t mod r_last), recursively. With the schedule's digit
    decomposition t = (d_m ... d_1), destination is (d_1 ... d_m).
    """
    subs = tuple(sub_radices)
    if reduce(lambda a, b: a * b, subs, 1) != n:
        raise ValueError(f"radices {subs} do not multiply to {n}")
    t = np.arange(n, dtype=np.int64)
    dest = np.zeros(n, dtype=np.int64)
    block = 1
    for r in reversed(subs):
        dest = dest * r + t % r
        t //= r
        block *= r
    return dest


def _cycles_by_length(dest: np.ndarray):
    """Decompose a permutation into cycles, grouped as {length: (num, L) array}."""
    n = len(dest)
    seen = np.zeros(n, dtype=bool)
    groups = {}
    for start in range(n):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = int(dest[start])
        while j != start:
            seen[j] = True
            cyc.append(j)
            j = int(dest[j])
        if len(cyc) > 1:
            groups.setdefault(len(cyc), []).append(cyc)
    return {
        length: np.array(cycs, dtype=np.int64) for length, cycs in groups.items()
    }
