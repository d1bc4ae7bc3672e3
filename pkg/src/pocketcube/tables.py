"""Exhaustive distance table, pattern databases and their binary persistence.

The full table holds the exact quarter-turn distance to solved for every
canonical state, filled by breadth-first search from the solved rank under
the six generalized moves.  The two pattern databases are exact distances
in the orientation-only (3^6 states) and permutation-only (7! states)
quotients; their pointwise max is an admissible IDA* heuristic.

Everything heavy is vectorized over rank space with numpy.  The rank
layout (lehmer * 729 + twist digits) makes both abstractions free:
ori index = rank % 729, perm index = rank // 729.

Binary format (one file per table):
  magic "CUBE2DT\\0" | version u32 LE = 1 | metric byte (0 = QTM)
  | kind byte (0 full, 1 ori PDB, 2 perm PDB) | entry count u32 LE
  | payload bytes | CRC32 of payload, u32 LE
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .cube import (
    GENERALIZED_MOVES,
    N_STATES,
    CanonicalState,
    CubeletState,
    _MOVE_TABLE,
    canonicalize,
)

MAGIC = b"CUBE2DT\0"
VERSION = 1
METRIC_QTM = 0

KIND_FULL = 0
KIND_ORI_PDB = 1
KIND_PERM_PDB = 2

N_ORI = 729
N_PERM = 5040

_FACT = np.array([720, 120, 24, 6, 2, 1, 1], dtype=np.int64)
_POW3 = np.array([1, 3, 9, 27, 81, 243], dtype=np.int64)

# per generalized move: source slot and twist delta over slots 0..6
# (the anchor slot never moves under these six)
_GEN_SRC = np.array([_MOVE_TABLE[m][0][:7] for m in GENERALIZED_MOVES], dtype=np.int64)
_GEN_DORI = np.array([_MOVE_TABLE[m][1][:7] for m in GENERALIZED_MOVES], dtype=np.int64)


class TableFormatError(Exception):
    """Base for persistence-format violations."""


class BadMagic(TableFormatError):
    pass


class BadVersion(TableFormatError):
    pass


class ChecksumMismatch(TableFormatError):
    pass


class TruncatedFile(TableFormatError):
    pass


# ---------------------------------------------------------------------------
# vectorized rank kernel
# ---------------------------------------------------------------------------

def perm_unrank_all(codes: np.ndarray) -> np.ndarray:
    """Lehmer codes (int64) -> permutations of 0..6, shape (n, 7)."""
    n = codes.shape[0]
    digits = np.empty((n, 7), dtype=np.int64)
    rem = codes.copy()
    for i in range(7):
        digits[:, i], rem = np.divmod(rem, _FACT[i])
    avail = np.tile(np.arange(7, dtype=np.int8), (n, 1))
    perm = np.empty((n, 7), dtype=np.int8)
    for i in range(7):
        d = digits[:, i]
        perm[:, i] = np.take_along_axis(avail, d[:, None], axis=1)[:, 0]
        width = avail.shape[1] - 1
        if width:
            idx = np.arange(width)[None, :] + (np.arange(width)[None, :] >= d[:, None])
            avail = np.take_along_axis(avail, idx, axis=1)
    return perm


def perm_rank_all(perm: np.ndarray) -> np.ndarray:
    """Permutations of 0..6, shape (n, 7) -> Lehmer codes (int64)."""
    p = perm.astype(np.int64)
    out = p[:, 0] * _FACT[0]
    for i in range(1, 7):
        smaller = (p[:, :i] < p[:, i:i + 1]).sum(axis=1)
        out += (p[:, i] - smaller) * _FACT[i]
    return out


def unrank_all(ranks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ranks -> (perm (n,7) int8, twist digits of slots 0..5 (n,6) int8)."""
    lehmer, twist = np.divmod(ranks.astype(np.int64), N_ORI)
    perm = perm_unrank_all(lehmer)
    digits = ((twist[:, None] // _POW3[None, :]) % 3).astype(np.int8)
    return perm, digits


def rank_all(perm: np.ndarray, digits: np.ndarray) -> np.ndarray:
    return perm_rank_all(perm) * N_ORI + digits.astype(np.int64) @ _POW3


def apply_move_all(perm: np.ndarray, digits: np.ndarray, move_index: int
                   ) -> tuple[np.ndarray, np.ndarray]:
    """One generalized move applied to every row of (perm, digits)."""
    src = _GEN_SRC[move_index]
    dori = _GEN_DORI[move_index].astype(np.int8)
    ori7 = np.empty((perm.shape[0], 7), dtype=np.int8)
    ori7[:, :6] = digits
    ori7[:, 6] = (-digits.sum(axis=1, dtype=np.int64)) % 3
    new_perm = perm[:, src]
    new_ori = (ori7[:, src] + dori) % 3
    return new_perm, new_ori[:, :6]


@lru_cache(maxsize=1)
def successor_matrix() -> np.ndarray:
    """Rank of each generalized-move successor, shape (N_STATES, 6) uint32.

    Built once per process (~100 MB); immutable after construction.
    """
    ranks = np.arange(N_STATES, dtype=np.int64)
    perm, digits = unrank_all(ranks)
    out = np.empty((N_STATES, 6), dtype=np.uint32)
    for mi in range(6):
        p2, d2 = apply_move_all(perm, digits, mi)
        out[:, mi] = rank_all(p2, d2)
    return out


def _bfs_distances(succ: np.ndarray, start: int = 0) -> np.ndarray:
    """Exact distances from `start` over an (n, 6) successor matrix."""
    dist = np.full(succ.shape[0], 0xFF, dtype=np.uint8)
    dist[start] = 0
    frontier = np.array([start], dtype=np.int64)
    depth = 0
    while frontier.size:
        depth += 1
        nxt = succ[frontier].ravel().astype(np.int64)
        nxt = np.unique(nxt[dist[nxt] == 0xFF])
        dist[nxt] = depth
        frontier = nxt
    return dist


# ---------------------------------------------------------------------------
# distance table
# ---------------------------------------------------------------------------

@dataclass
class DistanceTable:
    """Exact QTM distance per canonical rank, plus its depth histogram."""

    dist: np.ndarray
    metric: str = "QTM"
    _buckets: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.dist = np.ascontiguousarray(self.dist, dtype=np.uint8)
        if self.dist.shape != (N_STATES,):
            raise ValueError(f"distance table must have {N_STATES} entries")

    @property
    def histogram(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.bincount(self.dist, minlength=15))

    @property
    def max_depth(self) -> int:
        return int(self.dist.max())

    def distance(self, state: CubeletState | CanonicalState) -> int:
        """Exact optimal move count for `state` (canonicalized if raw)."""
        return int(self.dist[canonicalize(state).rank])

    def bucket(self, depth: int) -> np.ndarray:
        """Sorted ranks of every state at exactly `depth` moves."""
        if depth not in self._buckets:
            self._buckets[depth] = np.flatnonzero(self.dist == depth)
        return self._buckets[depth]

    def save(self, path) -> None:
        _write_table(path, KIND_FULL, self.dist.tobytes())

    @classmethod
    def load(cls, path) -> "DistanceTable":
        payload = _read_table(path, expect_kind=KIND_FULL)
        return cls(np.frombuffer(payload, dtype=np.uint8).copy())


def build_distance_table() -> DistanceTable:
    """BFS over the whole canonical space; seconds on one core."""
    return DistanceTable(_bfs_distances(successor_matrix()))


# ---------------------------------------------------------------------------
# pattern databases
# ---------------------------------------------------------------------------

def _ori_successors() -> np.ndarray:
    codes = np.arange(N_ORI, dtype=np.int64)
    digits = ((codes[:, None] // _POW3[None, :]) % 3).astype(np.int8)
    out = np.empty((N_ORI, 6), dtype=np.uint32)
    for mi in range(6):
        _, d2 = apply_move_all(np.tile(np.arange(7, dtype=np.int8), (N_ORI, 1)),
                               digits, mi)
        out[:, mi] = d2.astype(np.int64) @ _POW3
    return out


def _perm_successors() -> np.ndarray:
    perm = perm_unrank_all(np.arange(N_PERM, dtype=np.int64))
    out = np.empty((N_PERM, 6), dtype=np.uint32)
    for mi in range(6):
        out[:, mi] = perm_rank_all(perm[:, _GEN_SRC[mi]])
    return out


@dataclass
class PatternDB:
    """Orientation-only and permutation-only abstraction distances."""

    ori_db: np.ndarray
    perm_db: np.ndarray

    def __post_init__(self):
        self.ori_db = np.ascontiguousarray(self.ori_db, dtype=np.uint8)
        self.perm_db = np.ascontiguousarray(self.perm_db, dtype=np.uint8)
        if self.ori_db.shape != (N_ORI,) or self.perm_db.shape != (N_PERM,):
            raise ValueError("pattern database has wrong shape")
        self._dense: bytes | None = None

    def heuristic(self, rank: int) -> int:
        """Admissible lower bound on the distance of the state at `rank`."""
        return max(int(self.ori_db[rank % N_ORI]), int(self.perm_db[rank // N_ORI]))

    def heuristic_all(self) -> np.ndarray:
        ranks = np.arange(N_STATES, dtype=np.int64)
        return np.maximum(self.ori_db[ranks % N_ORI], self.perm_db[ranks // N_ORI])

    def dense_heuristic(self) -> bytes:
        """max(ori, perm) memoized over all ranks, as one byte per state."""
        if self._dense is None:
            self._dense = self.heuristic_all().tobytes()
        return self._dense

    def save(self, ori_path, perm_path) -> None:
        _write_table(ori_path, KIND_ORI_PDB, self.ori_db.tobytes())
        _write_table(perm_path, KIND_PERM_PDB, self.perm_db.tobytes())

    @classmethod
    def load(cls, ori_path, perm_path) -> "PatternDB":
        ori = _read_table(ori_path, expect_kind=KIND_ORI_PDB)
        perm = _read_table(perm_path, expect_kind=KIND_PERM_PDB)
        return cls(np.frombuffer(ori, dtype=np.uint8).copy(),
                   np.frombuffer(perm, dtype=np.uint8).copy())


def build_pattern_dbs() -> PatternDB:
    ori = _bfs_distances(_ori_successors())
    perm = _bfs_distances(_perm_successors())
    if (ori == 0xFF).any() or (perm == 0xFF).any():
        raise RuntimeError("abstract space not fully reachable")
    return PatternDB(ori, perm)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def _write_table(path, kind: int, payload: bytes) -> None:
    header = MAGIC + struct.pack("<I", VERSION) + bytes([METRIC_QTM, kind])
    header += struct.pack("<I", len(payload))
    crc = struct.pack("<I", zlib.crc32(payload))
    Path(path).write_bytes(header + payload + crc)


def _read_table(path, expect_kind: int | None = None) -> bytes:
    blob = Path(path).read_bytes()
    if len(blob) < len(MAGIC):
        raise TruncatedFile(f"{path}: shorter than the magic string")
    if blob[:len(MAGIC)] != MAGIC:
        raise BadMagic(f"{path}: not a cube table file")
    if len(blob) < len(MAGIC) + 10:
        raise TruncatedFile(f"{path}: header cut short")
    version, = struct.unpack_from("<I", blob, len(MAGIC))
    if version != VERSION:
        raise BadVersion(f"{path}: version {version}, expected {VERSION}")
    metric = blob[len(MAGIC) + 4]
    kind = blob[len(MAGIC) + 5]
    if metric != METRIC_QTM:
        raise TableFormatError(f"{path}: unknown metric byte {metric}")
    if kind not in (KIND_FULL, KIND_ORI_PDB, KIND_PERM_PDB):
        raise TableFormatError(f"{path}: unknown table kind {kind}")
    if expect_kind is not None and kind != expect_kind:
        raise TableFormatError(f"{path}: table kind {kind}, expected {expect_kind}")
    count, = struct.unpack_from("<I", blob, len(MAGIC) + 6)
    start = len(MAGIC) + 10
    if len(blob) < start + count + 4:
        raise TruncatedFile(f"{path}: payload cut short")
    if len(blob) > start + count + 4:
        raise TableFormatError(f"{path}: trailing bytes after checksum")
    payload = blob[start:start + count]
    stored_crc, = struct.unpack_from("<I", blob, start + count)
    if zlib.crc32(payload) != stored_crc:
        raise ChecksumMismatch(f"{path}: payload CRC mismatch")
    return payload


# ---------------------------------------------------------------------------
# exhaustive verification helpers (used by tests and the CLI verify command)
# ---------------------------------------------------------------------------

def check_state_count(table: DistanceTable) -> tuple[bool, str]:
    hist = table.histogram
    reached = int(np.count_nonzero(table.dist != 0xFF))
    ok = reached == N_STATES and sum(hist) == N_STATES and hist[0] == 1
    return ok, f"{reached} states reached, depth-0 count {hist[0]}"

def check_diameter(table: DistanceTable) -> tuple[bool, str]:
    return table.max_depth == 14, f"max depth {table.max_depth}"

def check_rank_roundtrip() -> tuple[bool, str]:
    ranks = np.arange(N_STATES, dtype=np.int64)
    perm, digits = unrank_all(ranks)
    ok = bool((rank_all(perm, digits) == ranks).all())
    return ok, "unrank/rank round-trip over the full space"

def check_admissibility(table: DistanceTable, pdb: PatternDB) -> tuple[bool, str]:
    h = pdb.heuristic_all()
    bad = int(np.count_nonzero(h > table.dist))
    return bad == 0, f"{bad} states with heuristic above the exact distance"

def check_neighbor_consistency(table: DistanceTable, sample: int | None = 1_000_000,
                               seed: int = 0) -> tuple[bool, str]:
    succ = successor_matrix()
    dist = table.dist.astype(np.int16)
    if sample is None:
        rows = np.arange(N_STATES, dtype=np.int64)
        what = "all"
    else:
        rng = np.random.default_rng(seed)
        rows = rng.integers(0, N_STATES, size=sample)
        what = f"{sample} sampled"
    for mi in range(6):
        gap = np.abs(dist[succ[rows, mi].astype(np.int64)] - dist[rows])
        if int(gap.max()) > 1:
            return False, f"move {mi}: distance gap {int(gap.max())}"
    return True, f"{what} states, all 6 moves within +-1"
