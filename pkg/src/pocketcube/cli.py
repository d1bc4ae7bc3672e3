"""Command-line front door.

    pocketcube build-tables --out DIR
    pocketcube solve --scramble "R U F'" [--planner ida|oracle]
    pocketcube scramble --distance 7 --count 5 --seed 1
    pocketcube simulate --scramble "R U" --mode rollback --seed 1 [--trace]
    pocketcube eval --trials 100 --modes both --out results.csv
    pocketcube verify [--full]

Table files are looked up in --tables DIR, else $POCKETCUBE_TABLES, else
the current directory.  Every subcommand is deterministic given its flags
and seed, and exits 0 only on full success.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import cube, evaluate, solver, tables
from .cube import (
    GENERALIZED_MOVES,
    CubeError,
    Move,
    apply_seq,
    canonicalize,
    facelets_to_string,
    format_moves,
    from_facelets,
    parse_moves,
    reduce_move,
    string_to_facelets,
    to_facelets,
)
from .executor import ActuationModel, ExecutionMode, ExecutorConfig, execute_episode, format_trace_entry
from .tables import DistanceTable, PatternDB, TableFormatError

TABLE_DIR_ENV = "POCKETCUBE_TABLES"

DIST_FILE = "distance_qtm.bin"
ORI_PDB_FILE = "pdb_ori.bin"
PERM_PDB_FILE = "pdb_perm.bin"


def _table_dir(args) -> Path:
    if args.tables:
        return Path(args.tables)
    return Path(os.environ.get(TABLE_DIR_ENV, "."))


def _load_distance_table(args) -> DistanceTable:
    path = _table_dir(args) / DIST_FILE
    if not path.exists():
        raise SystemExit(f"error: {path} not found; run 'pocketcube build-tables' first")
    return DistanceTable.load(path)


def _load_pattern_db(args) -> PatternDB:
    d = _table_dir(args)
    for name in (ORI_PDB_FILE, PERM_PDB_FILE):
        if not (d / name).exists():
            raise SystemExit(f"error: {d / name} not found; run 'pocketcube build-tables' first")
    return PatternDB.load(d / ORI_PDB_FILE, d / PERM_PDB_FILE)


def _parse_state(args) -> cube.CanonicalState:
    if args.scramble is not None:
        seq = parse_moves(args.scramble)
        return canonicalize(apply_seq(cube.SOLVED, seq))
    return canonicalize(from_facelets(string_to_facelets(args.state)))


def _actuation_model(args) -> ActuationModel:
    model = ActuationModel()
    for name in ("p_rot", "p_op", "p_restore"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(model, name, value)
    model.__post_init__()  # re-validate after overrides
    return model


def _executor_config(args) -> ExecutorConfig:
    config = ExecutorConfig()
    for flag in ("delta_x", "delta_q", "delta_theta"):
        value = getattr(args, flag, None)
        if value is not None:
            if value <= 0:
                raise SystemExit(f"error: --{flag.replace('_', '-')} must be positive")
            setattr(config, flag, value)
    return config


def _add_state_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--state", help="24-letter facelet string (WYROGB)")
    group.add_argument("--scramble", help="move sequence applied to solved, e.g. \"R U F'\"")


def _add_actuator_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-rot", dest="p_rot", type=float, help="re-pose success rate")
    p.add_argument("--p-op", dest="p_op", type=float, help="twist success rate")
    p.add_argument("--p-restore", dest="p_restore", type=float, help="restore success rate")
    p.add_argument("--delta-x", dest="delta_x", type=float, help="position threshold, m")
    p.add_argument("--delta-q", dest="delta_q", type=float, help="orientation threshold, rad")
    p.add_argument("--delta-theta", dest="delta_theta", type=float, help="twist threshold, rad")


def cmd_build_tables(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    table = tables.build_distance_table()
    pdb = tables.build_pattern_dbs()
    table.save(out / DIST_FILE)
    pdb.save(out / ORI_PDB_FILE, out / PERM_PDB_FILE)
    print(f"states: {sum(table.histogram)}")
    print(f"max depth: {table.max_depth}")
    print("histogram:", " ".join(f"{d}:{n}" for d, n in enumerate(table.histogram)))
    print(f"wrote {out / DIST_FILE}, {out / ORI_PDB_FILE}, {out / PERM_PDB_FILE} "
          f"in {time.time() - t0:.1f}s")
    return 0


def cmd_solve(args) -> int:
    state = _parse_state(args)
    if args.planner == "oracle":
        solution = solver.oracle_solve(state, _load_distance_table(args))
    else:
        solution = solver.ida_star(state, _load_pattern_db(args)).solution
    print(f"solution: {format_moves(solution)}" if solution else "solution:")
    print(f"length: {len(solution)}")
    return 0


def cmd_scramble(args) -> int:
    if not 1 <= args.distance <= 14:
        raise SystemExit("error: --distance must be in 1..14")
    if args.count < 1:
        raise SystemExit("error: --count must be >= 1")
    table = _load_distance_table(args)
    rng = np.random.default_rng(args.seed)
    for state in evaluate.sample_at_distance(args.distance, args.count, table, rng):
        print(facelets_to_string(to_facelets(state)))
    return 0


def cmd_simulate(args) -> int:
    state = _parse_state(args)
    table = _load_distance_table(args)
    mode = ExecutionMode.ROLLBACK if args.mode == "rollback" else ExecutionMode.OPEN_LOOP
    model = _actuation_model(args)
    config = _executor_config(args)
    rng = np.random.default_rng(args.seed)
    report = execute_episode(state, mode, lambda s: solver.oracle_solve(s, table),
                             model, config, rng)
    print(f"scramble distance: {table.distance(state)}")
    print(f"mode: {mode.value}")
    print(f"success: {report.success}")
    print(f"atomic actions: {report.atomic_actions}")
    print(f"moves attempted: {report.moves_attempted}")
    print(f"replans: {report.replans}")
    if args.trace:
        for entry in report.trace:
            print(format_trace_entry(entry))
    return 0


def cmd_eval(args) -> int:
    table = _load_distance_table(args)
    if args.modes == "both":
        modes = (ExecutionMode.ROLLBACK, ExecutionMode.OPEN_LOOP)
    elif args.modes == "rollback":
        modes = (ExecutionMode.ROLLBACK,)
    else:
        modes = (ExecutionMode.OPEN_LOOP,)
    config = evaluate.ExperimentConfig(
        trials_per_distance=args.trials,
        modes=modes,
        model=_actuation_model(args),
        executor=_executor_config(args),
        master_seed=args.seed,
    )
    result = evaluate.run_experiment(config, table, progress=not args.quiet)
    evaluate.export_csv(result, args.out)
    for mode in modes:
        print(f"average SR ({mode.value}): {result.overall_sr(mode):.4f}")
    print(f"wrote {args.out}")
    return 0


def cmd_verify(args) -> int:
    checks: list[tuple[str, bool, str]] = []

    def run(name, fn, *fn_args, **kw):
        try:
            ok, detail = fn(*fn_args, **kw)
        except Exception as err:  # a corrupt file must report, not crash
            ok, detail = False, f"{type(err).__name__}: {err}"
        checks.append((name, ok, detail))

    table = pdb = None
    d = _table_dir(args)
    try:
        table = DistanceTable.load(d / DIST_FILE)
        pdb = PatternDB.load(d / ORI_PDB_FILE, d / PERM_PDB_FILE)
        checks.append(("table files", True, f"loaded from {d}"))
    except (TableFormatError, OSError) as err:
        checks.append(("table files", False, f"{type(err).__name__}: {err}"))

    if table is not None and pdb is not None:
        run("state count", tables.check_state_count, table)
        run("diameter 14", tables.check_diameter, table)
        run("rank round-trip", tables.check_rank_roundtrip)
        run("pdb admissibility", tables.check_admissibility, table, pdb)
        run("move reduction", _check_move_reduction)
        sample = None if args.full else 1_000_000
        run("neighbor consistency", tables.check_neighbor_consistency, table,
            sample=sample)

    failed = 0
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


def _check_move_reduction(samples: int = 100, seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    states = [cube.random_canonical(rng) for _ in range(samples)]
    for move in Move:
        reduced = reduce_move(move)
        if reduced not in GENERALIZED_MOVES:
            return False, f"{move.value} reduced outside the generalized set"
        for s in states:
            if canonicalize(cube.apply(s, move)) != cube.apply_generalized(s, reduced):
                return False, f"{move.value} -> {reduced.value} fails the equivalence"
    return True, f"all 12 moves on {samples} canonical states"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pocketcube", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--tables", help=f"table directory (default ${TABLE_DIR_ENV} or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-tables", help="build and save the distance table and PDBs")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_build_tables)

    p = sub.add_parser("solve", help="print an optimal solution")
    _add_state_args(p)
    p.add_argument("--planner", choices=("ida", "oracle"), default="ida")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("scramble", help="print states at an exact move distance")
    p.add_argument("--distance", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_scramble)

    p = sub.add_parser("simulate", help="run one execution episode")
    _add_state_args(p)
    p.add_argument("--mode", choices=("rollback", "open"), default="rollback")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="print one line per atomic action")
    _add_actuator_args(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("eval", help="run the SR/AN experiment over distances 1..14")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--modes", choices=("both", "rollback", "open"), default="both")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true")
    _add_actuator_args(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("verify", help="run the exhaustive self-checks")
    p.add_argument("--full", action="store_true",
                   help="neighbor consistency over all states instead of a sample")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CubeError, TableFormatError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
