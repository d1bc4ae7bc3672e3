import numpy as np
import pytest

from pocketcube import cli
from pocketcube.cube import SOLVED, facelets_to_string, parse_moves, to_facelets


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def tdir(table_dir):
    return str(table_dir)


class TestSolve:
    def test_single_turn(self, tdir, capsys):
        code, out, _ = run_cli(capsys, "--tables", tdir, "solve", "--scramble", "U")
        assert code == 0
        assert "solution: U'" in out
        assert "length: 1" in out

    def test_empty_scramble(self, tdir, capsys):
        code, out, _ = run_cli(capsys, "--tables", tdir, "solve", "--scramble", "")
        assert code == 0
        assert "length: 0" in out

    def test_long_scramble_stays_within_diameter(self, tdir, capsys):
        rng = np.random.default_rng(90)
        moves = "U U' D D' R R' L L' F F' B B'".split()
        scramble = " ".join(moves[i] for i in rng.integers(0, 12, size=30))
        for planner in ("ida", "oracle"):
            code, out, _ = run_cli(capsys, "--tables", tdir, "solve",
                                   "--scramble", scramble, "--planner", planner)
            assert code == 0
            length = int(out.splitlines()[-1].split()[-1])
            assert length <= 14

    def test_facelet_state_input(self, tdir, capsys):
        text = facelets_to_string(to_facelets(SOLVED))
        code, out, _ = run_cli(capsys, "--tables", tdir, "solve", "--state", text)
        assert code == 0
        assert "length: 0" in out

    def test_solution_actually_parses(self, tdir, capsys):
        code, out, _ = run_cli(capsys, "--tables", tdir, "solve",
                               "--scramble", "R U F' L D B")
        line = out.splitlines()[0].removeprefix("solution:").strip()
        assert code == 0
        parse_moves(line)

    def test_bad_token_fails(self, tdir, capsys):
        code, _, err = run_cli(capsys, "--tables", tdir, "solve", "--scramble", "U2")
        assert code == 1
        assert "token 1" in err

    def test_bad_facelets_fail(self, tdir, capsys):
        code, _, err = run_cli(capsys, "--tables", tdir, "solve", "--state", "W" * 24)
        assert code == 1
        assert "error" in err


class TestScramble:
    def test_exact_distance_and_count(self, tdir, capsys):
        code, out, _ = run_cli(capsys, "--tables", tdir, "scramble",
                               "--distance", "4", "--count", "3", "--seed", "5")
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 3
        for text in lines:
            code2, out2, _ = run_cli(capsys, "--tables", tdir, "solve", "--state", text)
            assert code2 == 0
            assert "length: 4" in out2

    def test_deterministic(self, tdir, capsys):
        a = run_cli(capsys, "--tables", tdir, "scramble", "--distance", "14",
                    "--count", "2", "--seed", "3")
        b = run_cli(capsys, "--tables", tdir, "scramble", "--distance", "14",
                    "--count", "2", "--seed", "3")
        assert a == b
        assert a[0] == 0 and a[1].strip()

    def test_range_check(self, tdir, capsys):
        with pytest.raises(SystemExit):
            cli.main(["--tables", tdir, "scramble", "--distance", "15"])
        capsys.readouterr()


class TestSimulate:
    def test_solved_input(self, tdir, capsys):
        text = facelets_to_string(to_facelets(SOLVED))
        code, out, _ = run_cli(capsys, "--tables", tdir, "simulate", "--state", text)
        assert code == 0
        assert "success: True" in out
        assert "atomic actions: 0" in out

    def test_perfect_override_gives_plan_length(self, tdir, capsys):
        code, out, _ = run_cli(capsys, "--tables", tdir, "simulate",
                               "--scramble", "R'", "--p-rot", "1", "--p-op", "1")
        assert code == 0
        assert "success: True" in out
        assert "atomic actions: 4" in out  # undoing R' takes R: rotate + 3 twists

    def test_same_seed_same_trace(self, tdir, capsys):
        argv = ["--tables", tdir, "simulate", "--scramble", "R U F'",
                "--seed", "11", "--trace"]
        a = run_cli(capsys, *argv)
        b = run_cli(capsys, *argv)
        assert a == b

    def test_open_mode(self, tdir, capsys):
        code, out, _ = run_cli(capsys, "--tables", tdir, "simulate",
                               "--scramble", "R U", "--mode", "open", "--seed", "2")
        assert code == 0
        assert "mode: open_loop" in out


class TestEval:
    def test_writes_csv_and_reports(self, tdir, capsys, tmp_path):
        out_csv = tmp_path / "r.csv"
        code, out, _ = run_cli(capsys, "--tables", tdir, "eval", "--trials", "2",
                               "--out", str(out_csv), "--quiet",
                               "--p-rot", "1", "--p-op", "1")
        assert code == 0
        assert "average SR (rollback): 1.0000" in out
        lines = out_csv.read_text().splitlines()
        assert len(lines) == 29

    def test_single_mode(self, tdir, capsys, tmp_path):
        out_csv = tmp_path / "r.csv"
        code, out, _ = run_cli(capsys, "--tables", tdir, "eval", "--trials", "1",
                               "--modes", "rollback", "--out", str(out_csv), "--quiet")
        assert code == 0
        assert len(out_csv.read_text().splitlines()) == 15


class TestVerify:
    def test_passes_on_good_tables(self, tdir, capsys):
        code, out, _ = run_cli(capsys, "--tables", tdir, "verify")
        assert code == 0
        assert "FAIL" not in out
        for name in ("state count", "diameter", "rank round-trip",
                     "pdb admissibility", "move reduction", "neighbor consistency"):
            assert f"PASS  {name}" in out

    def test_corrupted_table_reports_checksum(self, table_dir, tmp_path, capsys):
        bad = tmp_path / "bad"
        bad.mkdir()
        for name in ("distance_qtm.bin", "pdb_ori.bin", "pdb_perm.bin"):
            bad.joinpath(name).write_bytes(table_dir.joinpath(name).read_bytes())
        blob = bytearray((bad / "distance_qtm.bin").read_bytes())
        blob[1000] ^= 0x55
        (bad / "distance_qtm.bin").write_bytes(bytes(blob))
        code, out, _ = run_cli(capsys, "--tables", str(bad), "verify")
        assert code == 1
        assert "FAIL  table files" in out
        assert "ChecksumMismatch" in out

    def test_missing_tables_fail(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "--tables", str(tmp_path), "verify")
        assert code == 1
        assert "FAIL" in out


class TestBuildTables:
    def test_build_reports_and_matches_session_tables(self, table_dir, tmp_path, capsys):
        out_dir = tmp_path / "fresh"
        code, out, _ = run_cli(capsys, "build-tables", "--out", str(out_dir))
        assert code == 0
        assert "states: 3674160" in out
        assert "max depth: 14" in out
        for name in ("distance_qtm.bin", "pdb_ori.bin", "pdb_perm.bin"):
            assert out_dir.joinpath(name).read_bytes() == \
                table_dir.joinpath(name).read_bytes()

    def test_env_var_table_dir(self, tdir, capsys, monkeypatch):
        monkeypatch.setenv(cli.TABLE_DIR_ENV, tdir)
        code, out, _ = run_cli(capsys, "solve", "--scramble", "F")
        assert code == 0
        assert "solution: F'" in out

    def test_missing_tables_hint(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as err:
            cli.main(["--tables", str(tmp_path), "solve", "--scramble", "U"])
        assert "build-tables" in str(err.value)
        capsys.readouterr()
