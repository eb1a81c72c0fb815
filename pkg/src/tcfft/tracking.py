"""Accounting hook for auxiliary storage used during execution.

The executor and merge kernels register every data scratch buffer they
allocate (gather tiles, result tiles, permutation staging) in units of
complex elements. The in-place contract is that the tracked peak never
exceeds two kernel segments (2 * 8192 complex elements) per worker.
Plan-owned configuration tables (schedules, permutation cycles, DFT
matrices) are reusable across executions and are not scratch.
"""

from contextlib import contextmanager

# Complex elements per kernel segment; the largest single-kernel radix.
SEGMENT_ELEMS = 8192


class ScratchTracker:
    def __init__(self):
        self.current = 0
        self.peak = 0
        self.enabled = True

    def reset(self):
        self.current = 0
        self.peak = 0

    @contextmanager
    def borrow(self, n_elems: int):
        """Account for a scratch buffer of n_elems complex elements."""
        if not self.enabled:
            yield
            return
        self.current += n_elems
        if self.current > self.peak:
            self.peak = self.current
        try:
            yield
        finally:
            self.current -= n_elems


#: Process-wide tracker; each executor worker would own one of these, but
#: execution is single-threaded per buffer so a module instance suffices.
tracker = ScratchTracker()
