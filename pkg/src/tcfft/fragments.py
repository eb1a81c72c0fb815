"""Warp-level MMA emulation: fragments, ownership maps, and D = A*B + C.

A fragment is a 16x16 matrix tile distributed over the registers of 32
lanes. Which lane holds which tile element is a per-architecture ownership
map that the hardware does not document; everything here is parameterized
over a pluggable FragmentMap so maps can be probed, replaced, and checked.
The multiply itself is defined on the reassembled tiles, so results are
independent of the map by construction.

Matrix A and B fragments hold binary16 values; accumulator fragments hold
float32 and round to binary16 only when stored to half memory.
"""

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .half import round_to_half

TILE = 16
LANES = 32


class FragmentError(ValueError):
    """Contract violation on fragment kinds, shapes, or map consistency."""


class ProbeError(RuntimeError):
    """The probed observations do not form a consistent ownership map."""


class FragmentMap:
    """Lane -> ordered tile positions for one fragment flavor.

    ``lanes[l][i]`` is the (row, col) position of lane l's i-th stored
    element. Every tile position must be owned by at least one lane
    (replication is allowed) and all lanes store the same element count.
    """

    def __init__(self, lanes):
        if len(lanes) != LANES:
            raise FragmentError(f"expected {LANES} lanes, got {len(lanes)}")
        counts = {len(per_lane) for per_lane in lanes}
        if len(counts) != 1:
            raise FragmentError("per-lane element lists must have equal length")
        self.lanes = [[(int(r), int(c)) for r, c in per_lane] for per_lane in lanes]
        self.num_elements = counts.pop()

        self.row_idx = np.array([[p[0] for p in per_lane] for per_lane in self.lanes])
        self.col_idx = np.array([[p[1] for p in per_lane] for per_lane in self.lanes])
        if self.row_idx.size and (
            self.row_idx.min() < 0
            or self.row_idx.max() >= TILE
            or self.col_idx.min() < 0
            or self.col_idx.max() >= TILE
        ):
            raise FragmentError("tile positions out of range")

        covered = np.zeros((TILE, TILE), dtype=bool)
        covered[self.row_idx, self.col_idx] = True
        if not covered.all():
            raise FragmentError("some tile positions are owned by no lane")

        self._owners = {}
        for lane, per_lane in enumerate(self.lanes):
            for pos in per_lane:
                self._owners.setdefault(pos, []).append(lane)

    def calc_eid(self, lane: int, i: int):
        """Tile position of lane's i-th stored element."""
        if not 0 <= lane < LANES:
            raise IndexError(f"lane {lane} out of range")
        if not 0 <= i < self.num_elements:
            raise IndexError(f"element index {i} out of range")
        return self.lanes[lane][i]

    def owners(self, row: int, col: int):
        """Lanes holding tile position (row, col), in lane order."""
        return tuple(self._owners[(row, col)])

    def __eq__(self, other):
        return isinstance(other, FragmentMap) and self.lanes == other.lanes

    def to_json(self) -> dict:
        return {
            "lanes": [
                [{"row": r, "col": c} for r, c in per_lane] for per_lane in self.lanes
            ]
        }

    @classmethod
    def from_json(cls, obj) -> "FragmentMap":
        return cls(
            [[(e["row"], e["col"]) for e in per_lane] for per_lane in obj["lanes"]]
        )


def default_map() -> FragmentMap:
    """The synthetic default map: row-interleaved, 8 elements per lane.

    Lane (r mod 4)*8 + c//2 owns position (r, c); within a lane, elements
    are ordered by (r//4, c mod 2). Bijective, so lane 0 element 0 is (0, 0).
    """
    lanes = []
    for lane in range(LANES):
        r0, c0 = lane // 8, lane % 8
        lanes.append(
            [(r0 + 4 * (i // 2), 2 * c0 + (i % 2)) for i in range(8)]
        )
    return FragmentMap(lanes)


_REPL_GROUP_BASES = (0, 1, 2, 3, 16, 17, 18, 19, 8, 9, 10, 11, 24, 25, 26, 27)


def replicated_map() -> FragmentMap:
    """A map with two owners per tile position, 16 elements per lane.

    Position (r, c) belongs to owner group (r mod 4)*4 + (c mod 4); the
    group's two lanes are base and base+4. Element order within a lane is
    (r//4)*4 + c//4.
    """
    lanes = [[None] * 16 for _ in range(LANES)]
    for r in range(TILE):
        for c in range(TILE):
            base = _REPL_GROUP_BASES[(r % 4) * 4 + (c % 4)]
            eid = (r // 4) * 4 + (c // 4)
            lanes[base][eid] = (r, c)
            lanes[base + 4][eid] = (r, c)
    return FragmentMap(lanes)


def random_maps(count: int, seed: int = 0):
    """Random bijective maps (8 elements per lane), for invariance tests."""
    rng = np.random.default_rng(seed)
    maps = []
    for _ in range(count):
        order = rng.permutation(TILE * TILE)
        lanes = [
            [(int(p) // TILE, int(p) % TILE) for p in order[l * 8 : (l + 1) * 8]]
            for l in range(LANES)
        ]
        maps.append(FragmentMap(lanes))
    return maps


@dataclass
class Fragment:
    """One warp's view of a 16x16 tile, distributed per ``fmap``."""

    kind: str  # matrix_a | matrix_b | accumulator
    layout: str  # row | col
    fmap: FragmentMap
    lanes: np.ndarray = field(repr=False)  # (32, num_elements)

    def reassemble(self) -> np.ndarray:
        """The 16x16 tile this fragment holds.

        Raises if replicated owners disagree, which would mean the lanes
        were manipulated inconsistently.
        """
        tile = np.empty((TILE, TILE), dtype=self.lanes.dtype)
        tile[self.fmap.row_idx, self.fmap.col_idx] = self.lanes
        if not np.array_equal(
            tile[self.fmap.row_idx, self.fmap.col_idx],
            self.lanes,
            equal_nan=True,
        ):
            raise FragmentError("replicated lanes hold inconsistent values")
        if self.layout == "col":
            tile = tile.T.copy()
        return tile


_KINDS = ("matrix_a", "matrix_b", "accumulator")


class Warp:
    """Simulated warp: 32 lanes executing the *_sync operations in lockstep.

    Lanes are simulated, not threaded; one Warp instance is used from a
    single thread, while distinct Warp instances are independent.

    accumulate: "fp32" (default; round to half only on store) or "fp16"
    (round the accumulator after every k step, for error studies).
    """

    def __init__(self, accumulate: str = "fp32"):
        if accumulate not in ("fp32", "fp16"):
            raise ValueError(f"unknown accumulate mode {accumulate!r}")
        self.accumulate = accumulate
        self.mma_calls = 0

    @staticmethod
    def _check_tile(mem):
        mem = np.asarray(mem)
        if mem.shape != (TILE, TILE):
            raise FragmentError(f"expected a 16x16 tile view, got shape {mem.shape}")
        return mem

    def load_matrix_sync(self, mem, fmap: FragmentMap, kind: str = "matrix_b",
                         layout: str = "row") -> Fragment:
        if kind not in _KINDS:
            raise FragmentError(f"unknown fragment kind {kind!r}")
        tile = self._check_tile(mem)
        if layout == "col":
            tile = tile.T
        dtype = np.float32 if kind == "accumulator" else np.float16
        lanes = tile[fmap.row_idx, fmap.col_idx].astype(dtype)
        return Fragment(kind, layout, fmap, lanes)

    def store_matrix_sync(self, frag: Fragment, mem) -> None:
        mem = self._check_tile(mem)
        tile = frag.reassemble()
        # Accumulator lanes are float32; storing to half memory rounds once.
        mem[...] = tile

    def fill_fragment(self, frag: Fragment, value) -> None:
        if frag.kind == "accumulator":
            frag.lanes[...] = np.float32(value)
        else:
            frag.lanes[...] = round_to_half(value)

    def mma_sync(self, a: Fragment, b: Fragment, c: Fragment) -> Fragment:
        if a.kind != "matrix_a" or b.kind != "matrix_b" or c.kind != "accumulator":
            raise FragmentError(
                f"mma_sync needs (matrix_a, matrix_b, accumulator), got "
                f"({a.kind}, {b.kind}, {c.kind})"
            )
        at = a.reassemble().astype(np.float32)
        bt = b.reassemble().astype(np.float32)
        ct = c.reassemble().astype(np.float32)
        dt = np.empty((TILE, TILE), dtype=np.float32)
        if self.accumulate == "fp32":
            backend.mma16(at, bt, ct, dt)
        else:
            np.copyto(dt, round_to_half(ct).astype(np.float32))
            for k in range(TILE):
                dt += at[:, k, None] * bt[None, k, :]
                dt = round_to_half(dt).astype(np.float32)
        self.mma_calls += 1
        lanes = dt[c.fmap.row_idx, c.fmap.col_idx]
        return Fragment("accumulator", c.layout, c.fmap, lanes)


def probe_map(oracle) -> FragmentMap:
    """Recover a lane->element map from an opaque fragment-filling function.

    ``oracle`` takes a 16x16 binary16 tile and returns the per-lane storage
    as a (32, num_elements) array. A tile of 256 distinct sentinels makes
    every observation identify its tile position.
    """
    sentinels = np.arange(TILE * TILE, dtype=np.float16).reshape(TILE, TILE)
    observed = np.asarray(oracle(sentinels))
    if observed.ndim != 2 or observed.shape[0] != LANES:
        raise ProbeError(f"oracle returned shape {observed.shape}, expected (32, E)")
    values = observed.astype(np.float64)
    ids = values.astype(np.int64)
    if not np.array_equal(ids, values) or ids.min() < 0 or ids.max() >= TILE * TILE:
        raise ProbeError("oracle returned values outside the sentinel set")
    lanes = [
        [(int(v) // TILE, int(v) % TILE) for v in per_lane] for per_lane in ids
    ]
    try:
        return FragmentMap(lanes)
    except FragmentError as exc:
        raise ProbeError(f"observations do not form a valid map: {exc}") from exc
