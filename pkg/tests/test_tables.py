import numpy as np
import pytest

from pocketcube import tables
from pocketcube.cube import (
    CANONICAL_SOLVED,
    GENERALIZED_MOVES,
    N_STATES,
    SOLVED,
    Move,
    apply,
    apply_generalized,
    apply_seq,
    canonicalize,
    unrank,
)
from pocketcube.tables import (
    BadMagic,
    BadVersion,
    ChecksumMismatch,
    DistanceTable,
    PatternDB,
    TableFormatError,
    TruncatedFile,
    successor_matrix,
)

# Depth histogram of the quarter-turn metric, pinned after the first
# verified exhaustive build as a regression artifact.
EXPECTED_HISTOGRAM = (1, 6, 27, 120, 534, 2256, 8969, 33058, 114149,
                      360508, 930588, 1350852, 782536, 90280, 276)


class TestBuild:
    def test_every_state_reached(self, dist_table):
        assert int(np.count_nonzero(dist_table.dist != 0xFF)) == N_STATES

    def test_histogram_sums_to_state_count(self, dist_table):
        assert sum(dist_table.histogram) == N_STATES

    def test_exactly_one_state_at_depth_zero(self, dist_table):
        assert dist_table.histogram[0] == 1
        assert dist_table.dist[0] == 0

    def test_max_depth_is_14(self, dist_table):
        assert dist_table.max_depth == 14

    def test_histogram_regression(self, dist_table):
        assert dist_table.histogram == EXPECTED_HISTOGRAM


class TestDistance:
    def test_solved_is_zero(self, dist_table):
        assert dist_table.distance(CANONICAL_SOLVED) == 0

    def test_one_turn_is_one(self, dist_table):
        assert dist_table.distance(apply(SOLVED, Move.U)) == 1

    def test_u_r_is_two(self, dist_table):
        # enumeration oracle: the state is neither solved nor any of the
        # six one-move states, and two moves reach it by construction
        state = canonicalize(apply_seq(SOLVED, [Move.U, Move.R]))
        depth_le_1 = {CANONICAL_SOLVED}
        depth_le_1 |= {apply_generalized(CANONICAL_SOLVED, m) for m in GENERALIZED_MOVES}
        assert state not in depth_le_1
        assert dist_table.distance(state) == 2

    def test_raw_states_are_canonicalized(self, dist_table):
        assert dist_table.distance(apply(SOLVED, Move.D)) == 1

    def test_neighbor_consistency_exhaustive(self, dist_table):
        ok, detail = tables.check_neighbor_consistency(dist_table, sample=None)
        assert ok, detail

    def test_buckets_partition_the_space(self, dist_table):
        total = sum(dist_table.bucket(d).size for d in range(1, 15))
        assert total + 1 == N_STATES


class TestRankKernel:
    def test_roundtrip_exhaustive(self):
        ok, detail = tables.check_rank_roundtrip()
        assert ok, detail

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(21)
        ranks = rng.integers(0, N_STATES, size=2000)
        perm, digits = tables.unrank_all(ranks)
        for row, r in enumerate(ranks):
            s = unrank(int(r))
            assert tuple(int(x) for x in perm[row]) == s.perm[:7]
            assert tuple(int(x) for x in digits[row]) == s.ori[:6]

    def test_successors_match_scalar_apply(self):
        succ = successor_matrix()
        rng = np.random.default_rng(22)
        for _ in range(300):
            r = int(rng.integers(0, N_STATES))
            s = unrank(r)
            for mi, m in enumerate(GENERALIZED_MOVES):
                assert int(succ[r, mi]) == apply_generalized(s, m).rank


class TestPatternDB:
    def test_heuristic_zero_at_solved(self, pdb):
        assert pdb.heuristic(0) == 0

    def test_admissible_everywhere(self, dist_table, pdb):
        ok, detail = tables.check_admissibility(dist_table, pdb)
        assert ok, detail

    def test_nonzero_on_abstractly_unsolved_states(self, pdb):
        state = apply(SOLVED, Move.R)  # both abstractions leave solved
        r = canonicalize(state).rank
        assert pdb.heuristic(r) >= 1

    def test_abstraction_projections_from_rank_layout(self, pdb, dist_table):
        rng = np.random.default_rng(23)
        for _ in range(200):
            r = int(rng.integers(0, N_STATES))
            assert pdb.heuristic(r) == max(int(pdb.ori_db[r % 729]),
                                           int(pdb.perm_db[r // 729]))
            assert pdb.heuristic(r) <= int(dist_table.dist[r])


class TestPersistence:
    def test_distance_table_roundtrip(self, dist_table, tmp_path):
        path = tmp_path / "full.bin"
        dist_table.save(path)
        loaded = DistanceTable.load(path)
        assert np.array_equal(loaded.dist, dist_table.dist)
        assert loaded.histogram == dist_table.histogram

    def test_pattern_db_roundtrip(self, pdb, tmp_path):
        pdb.save(tmp_path / "o.bin", tmp_path / "p.bin")
        loaded = PatternDB.load(tmp_path / "o.bin", tmp_path / "p.bin")
        assert np.array_equal(loaded.ori_db, pdb.ori_db)
        assert np.array_equal(loaded.perm_db, pdb.perm_db)

    def test_save_is_deterministic(self, pdb, tmp_path):
        pdb.save(tmp_path / "a.bin", tmp_path / "ap.bin")
        pdb.save(tmp_path / "b.bin", tmp_path / "bp.bin")
        assert (tmp_path / "a.bin").read_bytes() == (tmp_path / "b.bin").read_bytes()

    def test_truncated_file(self, pdb, tmp_path):
        path = tmp_path / "o.bin"
        pdb.save(path, tmp_path / "p.bin")
        blob = path.read_bytes()
        path.write_bytes(blob[:-10])
        with pytest.raises(TruncatedFile):
            PatternDB.load(path, tmp_path / "p.bin")

    def test_flipped_payload_byte(self, pdb, tmp_path):
        path = tmp_path / "o.bin"
        pdb.save(path, tmp_path / "p.bin")
        blob = bytearray(path.read_bytes())
        blob[40] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(ChecksumMismatch):
            PatternDB.load(path, tmp_path / "p.bin")

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.bin"
        path.write_bytes(b"NOTATABL" + b"\0" * 32)
        with pytest.raises(BadMagic):
            DistanceTable.load(path)

    def test_bad_version(self, pdb, tmp_path):
        path = tmp_path / "o.bin"
        pdb.save(path, tmp_path / "p.bin")
        blob = bytearray(path.read_bytes())
        blob[8] = 9  # version field
        path.write_bytes(bytes(blob))
        with pytest.raises(BadVersion):
            PatternDB.load(path, tmp_path / "p.bin")

    def test_wrong_kind(self, pdb, dist_table, tmp_path):
        dist_table.save(tmp_path / "full.bin")
        with pytest.raises(TableFormatError):
            PatternDB.load(tmp_path / "full.bin", tmp_path / "full.bin")

    def test_trailing_bytes(self, pdb, tmp_path):
        path = tmp_path / "o.bin"
        pdb.save(path, tmp_path / "p.bin")
        path.write_bytes(path.read_bytes() + b"junk")
        with pytest.raises(TableFormatError):
            PatternDB.load(path, tmp_path / "p.bin")
