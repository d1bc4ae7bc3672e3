import numpy as np

from pocketcube.cube import (
    CANONICAL_SOLVED,
    GENERALIZED_MOVES,
    N_STATES,
    apply_generalized,
    apply_seq,
    is_solved,
    random_canonical,
    unrank,
)
from pocketcube.solver import ida_star, oracle_solve


class TestIdaStar:
    def test_solved_needs_nothing(self, pdb):
        res = ida_star(CANONICAL_SOLVED, pdb)
        assert res.solution == []
        assert res.iterations == 0
        assert res.nodes_expanded == 0

    def test_distance_one_states(self, pdb):
        for m in GENERALIZED_MOVES:
            state = apply_generalized(CANONICAL_SOLVED, m)
            res = ida_star(state, pdb)
            assert res.solution == [m.inverse]

    def test_optimal_on_random_states(self, dist_table, pdb):
        rng = np.random.default_rng(31)
        for _ in range(300):
            s = random_canonical(rng)
            res = ida_star(s, pdb)
            assert len(res.solution) == dist_table.distance(s)
            assert is_solved(apply_seq(s, res.solution))

    def test_deterministic(self, pdb):
        s = unrank(1_234_567)
        a = ida_star(s, pdb)
        b = ida_star(s, pdb)
        assert a.solution == b.solution
        assert a.nodes_expanded == b.nodes_expanded
        assert a.iterations == b.iterations

    def test_monotone_deepening(self, dist_table, pdb):
        # first bound is h(root); bounds strictly increase up to the
        # exact distance (they may step by more than one: the quarter-turn
        # graph is bipartite, so no path can realize every f value)
        rng = np.random.default_rng(32)
        for _ in range(50):
            s = random_canonical(rng)
            res = ida_star(s, pdb)
            assert res.bounds[0] == pdb.heuristic(s.rank)
            assert list(res.bounds) == sorted(set(res.bounds))
            assert res.bounds[-1] == dist_table.distance(s)
            assert res.iterations == len(res.bounds)

    def test_antipode_solves_at_14(self, dist_table, pdb):
        r = int(dist_table.bucket(14)[0])
        res = ida_star(unrank(r), pdb)
        assert len(res.solution) == 14


class TestOracle:
    def test_solved(self, dist_table):
        assert oracle_solve(CANONICAL_SOLVED, dist_table) == []

    def test_distance_one(self, dist_table):
        for m in GENERALIZED_MOVES:
            state = apply_generalized(CANONICAL_SOLVED, m)
            sol = oracle_solve(state, dist_table)
            assert sol == [m.inverse]

    def test_length_matches_distance_at_every_depth(self, dist_table):
        rng = np.random.default_rng(33)
        for d in range(1, 15):
            bucket = dist_table.bucket(d)
            for i in rng.integers(0, bucket.size, size=5):
                s = unrank(int(bucket[i]))
                sol = oracle_solve(s, dist_table)
                assert len(sol) == d
                assert is_solved(apply_seq(s, sol))

    def test_agrees_with_ida_star_lengths(self, dist_table, pdb):
        rng = np.random.default_rng(34)
        for _ in range(100):
            s = unrank(int(rng.integers(0, N_STATES)))
            assert len(oracle_solve(s, dist_table)) == len(ida_star(s, pdb).solution)
