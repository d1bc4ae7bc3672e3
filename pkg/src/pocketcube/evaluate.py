"""Scramble sampling by exact move distance and the SR/AN experiment.

Scrambles are drawn uniformly, with replacement, from the distance
table's depth buckets, so every sample sits at its exact advertised
distance.  The experiment runs a block of episodes per (distance, mode),
aggregates success rate and action-number statistics, and writes one CSV
row per cell.  All randomness is derived from the master seed, episode
by episode, so a repeated run reproduces the CSV byte for byte (within
one build; cross-build PRNG stability is not promised).
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass, field

import numpy as np

from .cube import CanonicalState, unrank
from .executor import (
    ActuationModel,
    ExecutionMode,
    ExecutorConfig,
    Planner,
    execute_episode,
)
from .solver import oracle_solve
from .tables import DistanceTable

MIN_DISTANCE = 1
MAX_DISTANCE = 14


@dataclass
class ExperimentConfig:
    distances: tuple[int, ...] = tuple(range(MIN_DISTANCE, MAX_DISTANCE + 1))
    trials_per_distance: int = 100
    modes: tuple[ExecutionMode, ...] = (ExecutionMode.ROLLBACK, ExecutionMode.OPEN_LOOP)
    model: ActuationModel = field(default_factory=ActuationModel)
    executor: ExecutorConfig = field(default_factory=ExecutorConfig)
    master_seed: int = 0

    def __post_init__(self):
        if self.trials_per_distance < 1:
            raise ValueError("trials_per_distance must be >= 1")
        bad = [d for d in self.distances if not MIN_DISTANCE <= d <= MAX_DISTANCE]
        if bad:
            raise ValueError(f"distances outside 1..14: {bad}")


@dataclass(frozen=True)
class ResultRow:
    distance: int
    mode: ExecutionMode
    trials: int
    sr: float
    an_mean: float
    an_std: float


@dataclass
class ExperimentResult:
    rows: list[ResultRow]

    def row(self, distance: int, mode: ExecutionMode) -> ResultRow:
        for r in self.rows:
            if r.distance == distance and r.mode is mode:
                return r
        raise KeyError((distance, mode))

    def overall_sr(self, mode: ExecutionMode) -> float:
        srs = [r.sr for r in self.rows if r.mode is mode]
        if not srs:
            raise KeyError(mode)
        return float(np.mean(srs))


def sample_at_distance(distance: int, n: int, table: DistanceTable, rng
                       ) -> list[CanonicalState]:
    """n states drawn uniformly with replacement from the exact-depth bucket."""
    if not MIN_DISTANCE <= distance <= MAX_DISTANCE:
        raise ValueError(f"distance {distance} outside 1..14")
    bucket = table.bucket(distance)
    if bucket.size == 0:
        raise ValueError(f"no states at distance {distance}")
    picks = rng.integers(0, bucket.size, size=n)
    return [unrank(int(bucket[i])) for i in picks]


def run_experiment(config: ExperimentConfig, table: DistanceTable,
                   planner: Planner | None = None, progress: bool = False
                   ) -> ExperimentResult:
    """Monte Carlo SR/AN per (distance, mode), deterministic in master_seed."""
    if planner is None:
        planner = lambda s: oracle_solve(s, table)  # noqa: E731
    rows: list[ResultRow] = []
    for distance in sorted(config.distances):
        # stream tag 99 keeps scramble draws apart from episode draws
        scramble_rng = np.random.default_rng((config.master_seed, distance, 99))
        scrambles = sample_at_distance(distance, config.trials_per_distance,
                                       table, scramble_rng)
        for mode_index, mode in enumerate(config.modes):
            successes = 0
            counts = np.empty(config.trials_per_distance, dtype=np.float64)
            for trial, scramble in enumerate(scrambles):
                rng = np.random.default_rng(
                    (config.master_seed, distance, mode_index + 1, trial))
                report = execute_episode(scramble, mode, planner,
                                         config.model, config.executor, rng)
                successes += report.success
                counts[trial] = report.atomic_actions
            rows.append(ResultRow(
                distance=distance,
                mode=mode,
                trials=config.trials_per_distance,
                sr=successes / config.trials_per_distance,
                an_mean=float(counts.mean()),
                an_std=float(counts.std()),
            ))
            if progress:
                r = rows[-1]
                print(f"distance {distance:2d} {mode.value:<9s} "
                      f"sr={r.sr:.4f} an={r.an_mean:.2f}", file=sys.stderr)
    rows.sort(key=lambda r: (r.distance, r.mode is not ExecutionMode.ROLLBACK))
    return ExperimentResult(rows)


CSV_HEADER = ("distance", "mode", "trials", "sr", "an_mean", "an_std")


def export_csv(result: ExperimentResult, path) -> None:
    """Header plus one row per (distance, mode); floats to 4 decimals."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for r in result.rows:
                writer.writerow([r.distance, r.mode.value, r.trials,
                                 f"{r.sr:.4f}", f"{r.an_mean:.4f}", f"{r.an_std:.4f}"])
    except OSError as err:
        raise OSError(f"writing experiment CSV to {path!r} failed: {err}") from err


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
