"""Optimal planners: IDA* with the pattern-database heuristic, plus the
distance-table greedy oracle used to cross-check it.

Both operate on canonical ranks through the shared successor matrix and
return move lists over the generalized set.  Child order is fixed
(U, U', R, R', F, F'), so identical inputs always produce identical
solutions and node counts.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from functools import lru_cache

from .cube import GENERALIZED_MOVES, CanonicalState, CubeletState, Move, canonicalize
from .tables import DistanceTable, PatternDB, successor_matrix

MAX_DEPTH = 14  # quarter-turn diameter of the canonical space

# index of the inverse of each generalized move, in child order
_INV = (1, 0, 3, 2, 5, 4)

_FOUND = -1


@dataclass(frozen=True)
class SolveResult:
    solution: list[Move]
    nodes_expanded: int
    iterations: int
    bounds: tuple[int, ...] = ()  # one deepening bound per iteration


@lru_cache(maxsize=1)
def _flat_successors() -> array:
    # array('I') scalar indexing is ~3x faster than numpy scalars in the
    # depth-first inner loop
    return array("I", successor_matrix().tobytes())


def ida_star(state: CubeletState | CanonicalState, pdb: PatternDB) -> SolveResult:
    """One optimal solution for `state`, deterministic in path and node count.

    Iterative deepening with bound = g + max(ori, perm) abstraction
    distance; branches whose bound exceeds the current iteration limit are
    pruned, as are immediate undo moves and triple repeats of one move.
    """
    root = canonicalize(state).rank
    if root == 0:
        return SolveResult([], 0, 0)

    succ = _flat_successors()
    h = pdb.dense_heuristic()
    path: list[int] = []
    nodes = 0

    def dfs(r: int, g: int, bound: int, m1: int, m2: int) -> int:
        nonlocal nodes
        nodes += 1
        nxt = MAX_DEPTH + 1
        base = r * 6
        for mi in range(6):
            if m1 >= 0 and (mi == _INV[m1] or (mi == m1 and mi == m2)):
                continue
            child = succ[base + mi]
            f = g + 1 + h[child]
            if f > bound:
                if f < nxt:
                    nxt = f
                continue
            path.append(mi)
            if child == 0:
                return _FOUND
            t = dfs(child, g + 1, bound, mi, m1)
            if t == _FOUND:
                return _FOUND
            path.pop()
            if t < nxt:
                nxt = t
        return nxt

    bound = h[root]
    bounds: list[int] = []
    while True:
        bounds.append(bound)
        t = dfs(root, 0, bound, -1, -1)
        if t == _FOUND:
            moves = [GENERALIZED_MOVES[i] for i in path]
            return SolveResult(moves, nodes, len(bounds), tuple(bounds))
        if t > MAX_DEPTH:
            raise RuntimeError(f"no solution within depth {MAX_DEPTH}")
        bound = t


def oracle_solve(state: CubeletState | CanonicalState, table: DistanceTable) -> list[Move]:
    """Greedy descent on the exact table: always optimal, trivially correct.

    Independent of ida_star's search; serves as its oracle and as the
    executor's default planner.
    """
    succ = successor_matrix()
    dist = table.dist
    r = canonicalize(state).rank
    moves: list[Move] = []
    while r != 0:
        d = int(dist[r])
        for mi in range(6):
            child = int(succ[r, mi])
            if int(dist[child]) == d - 1:
                moves.append(GENERALIZED_MOVES[mi])
                r = child
                break
        else:
            raise RuntimeError("distance table is inconsistent")
    return moves
