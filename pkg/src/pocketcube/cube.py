"""Exact model of the 2x2x2 cube: states, moves, canonicalization, indexing.

Conventions fixed here and relied on by every other module:

Faces are ordered U, D, R, L, F, B and carry the home colors white, yellow,
red, orange, green, blue (letters W Y R O G B).  The 24 stickers are
enumerated four per face in that face order; within a face they run
row-major from the upper-left of the face's standard unfolded ("cross")
view::

            U                 indices
          L F R B     U: 0-3   D: 4-7   R: 8-11
            D         L: 12-15 F: 16-19 B: 20-23

         +--+--+
         | 0| 1|            U viewed with B at the top,
         +--+--+            D viewed with F at the top,
         | 2| 3|            side faces viewed upright.
   +--+--+--+--+--+--+--+--+
   |12|13|16|17| 8| 9|20|21|
   +--+--+--+--+--+--+--+--+
   |14|15|18|19|10|11|22|23|
   +--+--+--+--+--+--+--+--+
         | 4| 5|
         +--+--+
         | 6| 7|
         +--+--+

Cubelets are named by their home corner and numbered

    0 URF   1 UFL   2 ULB   3 UBR   4 DFR   5 DLF   6 DRB   7 DLB

with DLB last: it is the anchor that canonicalization pins into slot 7.
Orientation of a cubelet counts clockwise twists (viewed from outside
along the corner diagonal) of its white/yellow sticker away from the
slot's U/D face; the total twist of a legal state is 0 mod 3.

A canonical state keeps cubelet 7 in slot 7 untwisted, which quotients
away the 24 whole-cube rotations and leaves 7! * 3^6 = 3,674,160 states.
Its rank is lehmer(perm of slots 0..6) * 729 + sum(ori[i] * 3^i, i<6);
the solved state ranks 0.  The six generalized moves U U' R R' F F' fix
the anchor and generate the whole canonical space.

Moves use standard quarter-turn notation (U D R L F B, primes for
counterclockwise); each is applied through a precomputed slot-permutation
/ twist-delta table derived once, at import, from the face geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

N_STATES = 3_674_160  # 7! * 3**6

FACES = ("U", "D", "R", "L", "F", "B")

CORNER_NAMES = ("URF", "UFL", "ULB", "UBR", "DFR", "DLF", "DRB", "DLB")
ANCHOR = 7  # DLB


class CubeError(ValueError):
    """Base for all cube-model errors."""


class IllegalColoring(CubeError):
    """A facelet vector does not use each color exactly four times."""


class IllegalCubelet(CubeError):
    """A corner's three colors do not form (exactly one) real cubelet."""


class IllegalTwist(CubeError):
    """Corner orientations sum to a nonzero value mod 3."""


class ParseError(CubeError):
    """Bad move text; `position` is the 1-based index of the bad token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (token {position})")
        self.position = position


class Color(Enum):
    WHITE = "W"
    YELLOW = "Y"
    RED = "R"
    ORANGE = "O"
    GREEN = "G"
    BLUE = "B"

    @property
    def letter(self) -> str:
        return self.value


# home color of each face, by face index
FACE_COLORS = (Color.WHITE, Color.YELLOW, Color.RED,
               Color.ORANGE, Color.GREEN, Color.BLUE)


class Move(Enum):
    U = "U"
    U_PRIME = "U'"
    D = "D"
    D_PRIME = "D'"
    R = "R"
    R_PRIME = "R'"
    L = "L"
    L_PRIME = "L'"
    F = "F"
    F_PRIME = "F'"
    B = "B"
    B_PRIME = "B'"

    @property
    def face(self) -> str:
        return self.value[0]

    @property
    def is_prime(self) -> bool:
        return self.value.endswith("'")

    @property
    def inverse(self) -> "Move":
        return Move(self.face if self.is_prime else self.face + "'")

    def __repr__(self) -> str:  # "Move.R_PRIME" is noise in test diffs
        return f"Move({self.value!r})"


# The reduced move set: the layers that never touch the DLB anchor.
# This tuple also fixes the solver's deterministic child order.
GENERALIZED_MOVES = (Move.U, Move.U_PRIME, Move.R, Move.R_PRIME,
                     Move.F, Move.F_PRIME)

GeneralizedMove = Move  # alias; members restricted to GENERALIZED_MOVES

MoveSeq = Sequence[Move]


# ---------------------------------------------------------------------------
# geometry: derive sticker enumeration and move tables from face vectors
# ---------------------------------------------------------------------------

_Vec = tuple[int, int, int]

_FACE_NORMAL: dict[str, _Vec] = {
    "U": (0, 1, 0), "D": (0, -1, 0), "R": (1, 0, 0),
    "L": (-1, 0, 0), "F": (0, 0, 1), "B": (0, 0, -1),
}
# "right" and "down" of each face in its unfolded view (see module docstring)
_FACE_RIGHT: dict[str, _Vec] = {
    "U": (1, 0, 0), "D": (1, 0, 0), "R": (0, 0, -1),
    "L": (0, 0, 1), "F": (1, 0, 0), "B": (-1, 0, 0),
}
_FACE_DOWN: dict[str, _Vec] = {
    "U": (0, 0, 1), "D": (0, 0, -1), "R": (0, -1, 0),
    "L": (0, -1, 0), "F": (0, -1, 0), "B": (0, -1, 0),
}

_FACE_OF_NORMAL = {v: k for k, v in _FACE_NORMAL.items()}


def _vadd(a: _Vec, b: _Vec, c: _Vec) -> _Vec:
    return (a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2])


def _vscale(a: _Vec, s: int) -> _Vec:
    return (a[0] * s, a[1] * s, a[2] * s)


def _rotation_matrix(axis: _Vec, degrees: float) -> tuple[_Vec, _Vec, _Vec]:
    """Integer rotation matrix (rows) about `axis` by `degrees`, right-handed."""
    n = math.sqrt(axis[0] ** 2 + axis[1] ** 2 + axis[2] ** 2)
    kx, ky, kz = (axis[0] / n, axis[1] / n, axis[2] / n)
    t = math.radians(degrees)
    c, s = math.cos(t), math.sin(t)
    m = [
        [c + kx * kx * (1 - c), kx * ky * (1 - c) - kz * s, kx * kz * (1 - c) + ky * s],
        [ky * kx * (1 - c) + kz * s, c + ky * ky * (1 - c), ky * kz * (1 - c) - kx * s],
        [kz * kx * (1 - c) - ky * s, kz * ky * (1 - c) + kx * s, c + kz * kz * (1 - c)],
    ]
    rows = tuple(tuple(round(x) for x in row) for row in m)
    assert all(x in (-1, 0, 1) for row in rows for x in row)
    return rows  # type: ignore[return-value]


def _mat_vec(m: tuple[_Vec, _Vec, _Vec], v: _Vec) -> _Vec:
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )


def _mat_mul(a, b):
    cols = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols)
                 for row in a)


def _corner_position(name: str) -> _Vec:
    return _vadd(*(_FACE_NORMAL[f] for f in name))


_CORNER_POS: tuple[_Vec, ...] = tuple(_corner_position(n) for n in CORNER_NAMES)
_SLOT_OF_POS = {p: i for i, p in enumerate(_CORNER_POS)}


def _corner_axes(slot: int) -> tuple[_Vec, _Vec, _Vec]:
    # a0 is the slot's U/D face normal; cw cycles the corner's three face
    # normals one clockwise twist (viewed from outside the corner).
    pos = _CORNER_POS[slot]
    cw = _rotation_matrix(pos, -120.0)
    a0: _Vec = (0, pos[1], 0)
    a1 = _mat_vec(cw, a0)
    a2 = _mat_vec(cw, a1)
    return (a0, a1, a2)


_AXES: tuple[tuple[_Vec, _Vec, _Vec], ...] = tuple(_corner_axes(i) for i in range(8))

# facelet index -> (slot, face normal) and the inverse map
_FACELET_SLOT: list[int] = []
_FACELET_AXIS: list[_Vec] = []
_FACELET_INDEX: dict[tuple[int, _Vec], int] = {}
for _face in FACES:
    _n, _r, _d = _FACE_NORMAL[_face], _FACE_RIGHT[_face], _FACE_DOWN[_face]
    for _row in (0, 1):
        for _col in (0, 1):
            _pos = _vadd(_n, _vscale(_r, 2 * _col - 1), _vscale(_d, 2 * _row - 1))
            _slot = _SLOT_OF_POS[_pos]
            _FACELET_INDEX[(_slot, _n)] = len(_FACELET_SLOT)
            _FACELET_SLOT.append(_slot)
            _FACELET_AXIS.append(_n)

SOLVED_FACELETS: tuple[Color, ...] = tuple(
    FACE_COLORS[FACES.index(_FACE_OF_NORMAL[a])] for a in _FACELET_AXIS
)

# home sticker colors of cubelet k along its axis cycle (axes of slot k)
_HOME_COLORS: tuple[tuple[Color, Color, Color], ...] = tuple(
    tuple(FACE_COLORS[FACES.index(_FACE_OF_NORMAL[a])] for a in _AXES[k])
    for k in range(8)
)

# color triple as laid out in a slot -> (cubelet id, twist)
_TRIPLE_TO_CUBELET: dict[tuple[Color, Color, Color], tuple[int, int]] = {}
for _k in range(8):
    for _t in range(3):
        _laid = tuple(_HOME_COLORS[_k][(j - _t) % 3] for j in range(3))
        _TRIPLE_TO_CUBELET[_laid] = (_k, _t)


Transform = tuple[tuple[int, ...], tuple[int, ...]]  # (src slot, twist delta)


def _transform_from_matrix(m, slots: Iterable[int]) -> Transform:
    src = list(range(8))
    dori = [0] * 8
    for j in slots:
        tgt = _SLOT_OF_POS[_mat_vec(m, _CORNER_POS[j])]
        src[tgt] = j
        dori[tgt] = _AXES[tgt].index(_mat_vec(m, _AXES[j][0]))
    return tuple(src), tuple(dori)


def _move_transform(move: Move) -> Transform:
    n = _FACE_NORMAL[move.face]
    # a quarter turn clockwise (viewed from outside the face) is -90 degrees
    # about the outward normal; a prime move is +90
    m = _rotation_matrix(n, 90.0 if move.is_prime else -90.0)
    layer = [i for i, p in enumerate(_CORNER_POS)
             if p[0] * n[0] + p[1] * n[1] + p[2] * n[2] == 1]
    return _transform_from_matrix(m, layer)


_MOVE_TABLE: dict[Move, Transform] = {mv: _move_transform(mv) for mv in Move}


def _whole_cube_rotations() -> tuple[Transform, ...]:
    gens = [_rotation_matrix(ax, deg)
            for ax in ((1, 0, 0), (0, 1, 0), (0, 0, 1)) for deg in (90.0, -90.0)]
    ident = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                q = _mat_mul(g, m)
                if q not in seen:
                    seen.add(q)
                    order.append(q)
                    nxt.append(q)
        frontier = nxt
    assert len(order) == 24
    return tuple(_transform_from_matrix(m, range(8)) for m in order)


ROTATIONS: tuple[Transform, ...] = _whole_cube_rotations()

# (slot holding the anchor, anchor twist) -> rotation putting it home
_ANCHOR_FIX: dict[tuple[int, int], Transform] = {}
for _rot in ROTATIONS:
    _src, _dori = _rot
    _ANCHOR_FIX[(_src[ANCHOR], (-_dori[ANCHOR]) % 3)] = _rot
assert len(_ANCHOR_FIX) == 24


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CubeletState:
    """Cube as slot->cubelet permutation plus per-slot twist counts."""

    perm: tuple[int, ...]
    ori: tuple[int, ...]

    def __post_init__(self):
        if len(self.perm) != 8 or sorted(self.perm) != list(range(8)):
            raise CubeError(f"perm is not a permutation of 0..7: {self.perm!r}")
        if len(self.ori) != 8 or any(o not in (0, 1, 2) for o in self.ori):
            raise CubeError(f"ori entries must be in 0..2: {self.ori!r}")
        if sum(self.ori) % 3 != 0:
            raise IllegalTwist(f"orientation sum {sum(self.ori)} != 0 mod 3")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CubeletState):
            return NotImplemented
        return self.perm == other.perm and self.ori == other.ori

    def __hash__(self) -> int:
        return hash((self.perm, self.ori))


@dataclass(frozen=True, eq=False)
class CanonicalState(CubeletState):
    """A CubeletState with the DLB anchor pinned: perm[7] == 7, ori[7] == 0."""

    def __post_init__(self):
        super().__post_init__()
        if self.perm[ANCHOR] != ANCHOR or self.ori[ANCHOR] != 0:
            raise CubeError("not canonical: anchor cubelet out of place")

    @cached_property
    def rank(self) -> int:
        return rank(self)

    @classmethod
    def from_rank(cls, index: int) -> "CanonicalState":
        return unrank(index)


SOLVED = CubeletState(tuple(range(8)), (0,) * 8)
CANONICAL_SOLVED = CanonicalState(tuple(range(8)), (0,) * 8)


def _apply_transform(state: CubeletState, tr: Transform) -> tuple[tuple[int, ...], tuple[int, ...]]:
    src, dori = tr
    perm = tuple(state.perm[src[i]] for i in range(8))
    ori = tuple((state.ori[src[i]] + dori[i]) % 3 for i in range(8))
    return perm, ori


def apply(state: CubeletState, move: Move) -> CubeletState:
    """Quarter-turn `move` applied to `state` (pure; total on valid states)."""
    perm, ori = _apply_transform(state, _MOVE_TABLE[move])
    return CubeletState(perm, ori)


def apply_seq(state: CubeletState, seq: MoveSeq) -> CubeletState:
    for move in seq:
        state = apply(state, move)
    return state


def apply_generalized(state: CanonicalState, move: GeneralizedMove) -> CanonicalState:
    """Quotient action: a reduced-set move on a canonical state stays canonical."""
    if move not in GENERALIZED_MOVES:
        raise CubeError(f"{move.value} is not in the generalized move set")
    perm, ori = _apply_transform(state, _MOVE_TABLE[move])
    return CanonicalState(perm, ori)


def rotate_state(state: CubeletState, rotation: Transform) -> CubeletState:
    """Whole-cube rotation (one of the 24 in ROTATIONS) applied to `state`."""
    perm, ori = _apply_transform(state, rotation)
    return CubeletState(perm, ori)


def canonicalize(state: CubeletState) -> CanonicalState:
    """Rotate the whole cube so the anchor sits home; idempotent."""
    slot = state.perm.index(ANCHOR)
    perm, ori = _apply_transform(state, _ANCHOR_FIX[(slot, state.ori[slot])])
    return CanonicalState(perm, ori)


def is_solved(state: CubeletState) -> bool:
    return canonicalize(state) == CANONICAL_SOLVED


def inverse_seq(seq: MoveSeq) -> list[Move]:
    return [m.inverse for m in reversed(seq)]


# ---------------------------------------------------------------------------
# move reduction (quotient equivalents of the anchored-layer moves)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _reduction_table() -> dict[Move, Move]:
    # Derived, not hard-coded: for each excluded move find the unique reduced
    # move acting identically on the quotient, witnessed on spread-out states.
    samples = [CANONICAL_SOLVED] + [
        unrank((k * 2654435761) % N_STATES) for k in range(1, 26)
    ]
    table: dict[Move, Move] = {}
    for move in Move:
        if move in GENERALIZED_MOVES:
            table[move] = move
            continue
        matches = [
            g for g in GENERALIZED_MOVES
            if all(canonicalize(apply(s, move)) == apply_generalized(s, g)
                   for s in samples)
        ]
        if len(matches) != 1:
            raise RuntimeError(f"move reduction for {move.value} is not unique: {matches}")
        table[move] = matches[0]
    return table


def reduce_move(move: Move) -> GeneralizedMove:
    """The generalized move equivalent to `move` on canonical states."""
    return _reduction_table()[move]


def reduce_seq(seq: MoveSeq) -> list[Move]:
    return [reduce_move(m) for m in seq]


# ---------------------------------------------------------------------------
# ranking
# ---------------------------------------------------------------------------

_FACTORIALS = (720, 120, 24, 6, 2, 1, 1)
_POW3 = (1, 3, 9, 27, 81, 243)


def rank(state: CubeletState) -> int:
    """Index of a canonical state in [0, 3,674,160); solved ranks 0."""
    if state.perm[ANCHOR] != ANCHOR or state.ori[ANCHOR] != 0:
        raise CubeError("rank is defined on canonical states only")
    perm = state.perm
    lehmer = 0
    for i in range(7):
        smaller = sum(1 for j in range(i) if perm[j] < perm[i])
        lehmer += (perm[i] - smaller) * _FACTORIALS[i]
    twist = sum(state.ori[i] * _POW3[i] for i in range(6))
    return lehmer * 729 + twist


def unrank(index: int) -> CanonicalState:
    """Inverse of rank; rejects indices outside [0, 3,674,160)."""
    if not 0 <= index < N_STATES:
        raise CubeError(f"rank {index} out of range [0, {N_STATES})")
    lehmer, twist = divmod(index, 729)
    avail = list(range(7))
    perm = []
    for i in range(7):
        digit, lehmer = divmod(lehmer, _FACTORIALS[i])
        perm.append(avail.pop(digit))
    perm.append(ANCHOR)
    ori = [(twist // _POW3[i]) % 3 for i in range(6)]
    ori.append((-sum(ori)) % 3)
    ori.append(0)
    return CanonicalState(tuple(perm), tuple(ori))


def random_state(rng) -> CubeletState:
    """Uniform random legal raw state; `rng` is a numpy Generator."""
    perm = tuple(int(x) for x in rng.permutation(8))
    ori = [int(x) for x in rng.integers(0, 3, size=7)]
    ori.append((-sum(ori)) % 3)
    return CubeletState(perm, tuple(ori))


def random_canonical(rng) -> CanonicalState:
    return unrank(int(rng.integers(0, N_STATES)))


# ---------------------------------------------------------------------------
# facelet conversions and notation
# ---------------------------------------------------------------------------

FaceletState = tuple[Color, ...]  # length 24, module-docstring enumeration


def to_facelets(state: CubeletState) -> FaceletState:
    stickers: list[Color | None] = [None] * 24
    for slot in range(8):
        cubelet, twist = state.perm[slot], state.ori[slot]
        for j in range(3):
            axis = _AXES[slot][(j + twist) % 3]
            stickers[_FACELET_INDEX[(slot, axis)]] = _HOME_COLORS[cubelet][j]
    return tuple(stickers)  # type: ignore[arg-type]


def from_facelets(facelets: Sequence[Color]) -> CubeletState:
    """Decode and validate a 24-sticker vector.

    Raises IllegalColoring (bad color counts), IllegalCubelet (a corner's
    colors match no real cubelet, or a cubelet appears twice) or
    IllegalTwist (total twist nonzero mod 3).
    """
    if len(facelets) != 24:
        raise IllegalColoring(f"expected 24 stickers, got {len(facelets)}")
    for color in Color:
        n = sum(1 for c in facelets if c is color)
        if n != 4:
            raise IllegalColoring(f"color {color.letter} appears {n} times, expected 4")
    perm: list[int] = []
    ori: list[int] = []
    for slot in range(8):
        triple = tuple(facelets[_FACELET_INDEX[(slot, a)]] for a in _AXES[slot])
        try:
            cubelet, twist = _TRIPLE_TO_CUBELET[triple]
        except KeyError:
            letters = "".join(c.letter for c in triple)
            raise IllegalCubelet(
                f"stickers {letters} at corner {CORNER_NAMES[slot]} form no cubelet"
            ) from None
        if cubelet in perm:
            raise IllegalCubelet(f"cubelet {CORNER_NAMES[cubelet]} appears twice")
        perm.append(cubelet)
        ori.append(twist)
    if sum(ori) % 3 != 0:
        raise IllegalTwist(f"total twist {sum(ori)} != 0 mod 3")
    return CubeletState(tuple(perm), tuple(ori))


_COLOR_BY_LETTER = {c.letter: c for c in Color}


def facelets_to_string(facelets: Sequence[Color]) -> str:
    return "".join(c.letter for c in facelets)


def string_to_facelets(text: str) -> FaceletState:
    text = text.strip().upper()
    bad = [ch for ch in text if ch not in _COLOR_BY_LETTER]
    if bad:
        raise IllegalColoring(f"unknown color letters {bad!r}")
    return tuple(_COLOR_BY_LETTER[ch] for ch in text)


_MOVE_BY_NOTATION = {m.value: m for m in Move}


def parse_moves(text: str) -> list[Move]:
    """Whitespace-separated quarter-turn tokens -> move list (case-sensitive)."""
    moves = []
    for i, token in enumerate(text.split(), start=1):
        try:
            moves.append(_MOVE_BY_NOTATION[token])
        except KeyError:
            raise ParseError(f"unknown move {token!r}", i) from None
    return moves


def format_moves(seq: MoveSeq) -> str:
    return " ".join(m.value for m in seq)
