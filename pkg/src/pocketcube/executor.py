"""Stochastic execution of compiled plans: parameterized actuators, the
closed-loop rollback workflow, and an open-loop baseline.

The two actuators are Bernoulli gates with configured success rates (the
defaults are the measured rates of the trained hand policies, entering
here purely as parameters).  On success the actuator lands inside its
goal tolerance; on failure it lands in an explicitly invented, fully
configurable failure distribution -- the underlying physics is out of
scope, so failure shapes are modeling choices, not measurements.

Logical bookkeeping: the cube's logical state only ever changes when a
top-layer twist commits.  A committed twist performs the prime move of
whichever body face is up (nearest face axis to the hand up axis, ties
broken in face order U D R L F B), folded through reduce_move when that
layer contains the anchor piece; in that case the body frame rotates
with the layer, so the tracked orientation advances by the twist.

Rollback workflow per move (the open-loop baseline skips every check):
  Stage 1  attempt the re-pose; if the pose check fails, randomize the
           pose and retry, at most r1_max rotate attempts.
  Stage 2  attempt the 1 or 3 twists; after each, if the layers are
           misaligned, attempt restore randomizations (Bernoulli
           p_restore, snapping to the nearest alignment -- which can
           itself commit the move) up to r2_max times.
  Finally  compare the logical state against the expected one; a
           mismatch asks the episode driver to re-plan.

Every attempt of rotate, twist, randomize and restore counts one atomic
action toward the episode budget and the reported action number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

from .actions import (
    DELTA_Q,
    DELTA_THETA,
    DELTA_X,
    PALM_CENTER,
    TWIST_TARGET,
    Pose,
    PoseGoal,
    Quaternion,
    Rotate,
    Vector3,
    compile_moves,
    goal_orientation,
    orientation_distance,
    pose_goal_reached,
)
from .cube import (
    CanonicalState,
    Move,
    apply_generalized,
    is_solved,
    reduce_move,
)

CHAMFER_TOLERANCE = math.radians(5.0)  # layer slack that still permits a twist

HAND_UP: Vector3 = (0.0, 0.0, 1.0)

# body-frame outward normals of the six faces (see actions.py for the frame)
_FACE_NORMALS: tuple[tuple[str, Vector3], ...] = (
    ("U", (0.0, 0.0, 1.0)),
    ("D", (0.0, 0.0, -1.0)),
    ("R", (1.0, 0.0, 0.0)),
    ("L", (-1.0, 0.0, 0.0)),
    ("F", (0.0, -1.0, 0.0)),
    ("B", (0.0, 1.0, 0.0)),
)

# faces whose layer contains the DLB anchor piece
_ANCHOR_FACES = frozenset("DLB")

_PRIME_OF_FACE = {f: Move(f + "'") for f in "UDRLFB"}

_TWIST_ROTATION = Quaternion.from_axis_angle(HAND_UP, math.pi / 2)


class ExecutionMode(Enum):
    ROLLBACK = "rollback"
    OPEN_LOOP = "open_loop"


class MoveOutcome(Enum):
    COMPLETED = "completed"
    NEEDS_REPLAN = "needs_replan"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class ActuationModel:
    """Actuator success rates and failure-shape parameters.

    p_rot and p_op default to the measured success rates of the two
    trained hand skills (95.2% re-pose, 92.3% twist).  Everything about
    what a *failed* attempt looks like is invented and configurable.
    """

    p_rot: float = 0.952
    p_op: float = 0.923
    p_restore: float = 0.95
    failure_pos_radius: float = 0.05   # m, uniform ball around the palm point
    failure_angle_low: float = -math.pi / 2   # residual twist angle range
    failure_angle_high: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("p_rot", "p_op", "p_restore"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")


@dataclass
class ExecutorConfig:
    delta_x: float = DELTA_X
    delta_q: float = DELTA_Q
    delta_theta: float = DELTA_THETA
    chamfer: float = CHAMFER_TOLERANCE
    r1_max: int = 10
    r2_max: int = 10
    action_budget: int = 200
    x_target: Vector3 = PALM_CENTER


@dataclass
class PhysicalCube:
    """Logical state plus tracked pose and layer misalignment."""

    logical: CanonicalState
    pose: Pose
    layer_misalignment: float = 0.0  # rad; 0 when the halves are aligned

    @classmethod
    def at_rest(cls, logical: CanonicalState) -> "PhysicalCube":
        return cls(logical, Pose(PALM_CENTER, Quaternion.identity()))


@dataclass(frozen=True)
class TraceEntry:
    index: int
    kind: str            # rotate | twist | randomize | restore
    success: bool
    pos_err: float | None
    ang_err: float | None
    rank: int            # logical rank after the action


def format_trace_entry(e: TraceEntry) -> str:
    pos = "-" if e.pos_err is None else f"{e.pos_err:.4f}"
    ang = "-" if e.ang_err is None else f"{e.ang_err:.4f}"
    ok = "ok" if e.success else "fail"
    return f"{e.index:4d} {e.kind:<9s} {ok:<4s} pos_err={pos} ang_err={ang} rank={e.rank}"


@dataclass
class EpisodeReport:
    success: bool
    atomic_actions: int
    moves_attempted: int
    replans: int
    trace: list[TraceEntry]

    @property
    def all_actions_succeeded(self) -> bool:
        return all(e.success for e in self.trace)


@dataclass
class _ActionLog:
    budget: int
    entries: list[TraceEntry] = field(default_factory=list)

    @property
    def exhausted(self) -> bool:
        return len(self.entries) >= self.budget

    def record(self, kind: str, success: bool, cube: PhysicalCube,
               pos_err: float | None, ang_err: float | None) -> None:
        self.entries.append(TraceEntry(len(self.entries) + 1, kind, success,
                                       pos_err, ang_err, cube.logical.rank))


# ---------------------------------------------------------------------------
# pose and commit mechanics
# ---------------------------------------------------------------------------

def up_face(orientation: Quaternion) -> str:
    """Body face whose outward normal points closest to the hand up axis."""
    best, best_dot = "U", -2.0
    for face, normal in _FACE_NORMALS:
        v = orientation.rotate(normal)
        if v[2] > best_dot:
            best, best_dot = face, v[2]
    return best


def committed_move(orientation: Quaternion) -> Move:
    """Generalized move a -90 degree top twist performs in this pose."""
    return reduce_move(_PRIME_OF_FACE[up_face(orientation)])


def _commit_twist(cube: PhysicalCube) -> None:
    face = up_face(cube.pose.orientation)
    cube.logical = apply_generalized(cube.logical, reduce_move(_PRIME_OF_FACE[face]))
    cube.layer_misalignment = 0.0
    if face in _ANCHOR_FACES:
        # anchor piece rides the twisted layer: the body frame turns with it
        cube.pose = Pose(cube.pose.position,
                         (_TWIST_ROTATION * cube.pose.orientation).normalized())


def _sample_in_ball(rng, center: Vector3, radius: float) -> Vector3:
    v = rng.standard_normal(3)
    n = math.sqrt(float(v @ v))
    while n < 1e-12:
        v = rng.standard_normal(3)
        n = math.sqrt(float(v @ v))
    r = radius * float(rng.random()) ** (1.0 / 3.0)
    return (center[0] + v[0] / n * r, center[1] + v[1] / n * r, center[2] + v[2] / n * r)


def _sample_pose_near(rng, goal: PoseGoal, delta_x: float, delta_q: float) -> Pose:
    # volume-uniform inside the tolerance region: cube-root radii
    position = _sample_in_ball(rng, goal.x_target, delta_x)
    axis = rng.standard_normal(3)
    n = math.sqrt(float(axis @ axis))
    while n < 1e-12:
        axis = rng.standard_normal(3)
        n = math.sqrt(float(axis @ axis))
    angle = delta_q * float(rng.random()) ** (1.0 / 3.0)
    wobble = Quaternion.from_axis_angle((axis[0] / n, axis[1] / n, axis[2] / n), angle)
    return Pose(position, (wobble * goal.q_target).normalized())


def _sample_failure_pose(rng, model: ActuationModel) -> Pose:
    return Pose(_sample_in_ball(rng, PALM_CENTER, model.failure_pos_radius),
                Quaternion.random_uniform(rng))


# ---------------------------------------------------------------------------
# atomic actions
# ---------------------------------------------------------------------------

def attempt_rotate(cube: PhysicalCube, goal: PoseGoal, model: ActuationModel, rng,
                   delta_x: float = DELTA_X, delta_q: float = DELTA_Q) -> bool:
    """One re-pose attempt.  Mutates the pose only; never the logical state.

    Returns the actuator's Bernoulli outcome; the pose lands inside the
    goal tolerance on success and in the failure distribution otherwise.
    """
    success = float(rng.random()) < model.p_rot
    cube.pose = (_sample_pose_near(rng, goal, delta_x, delta_q) if success
                 else _sample_failure_pose(rng, model))
    return success


def attempt_twist(cube: PhysicalCube, model: ActuationModel, rng,
                  delta_theta: float = DELTA_THETA,
                  chamfer: float = CHAMFER_TOLERANCE) -> bool:
    """One -90 degree top-layer twist attempt.

    Misalignment beyond the chamfer tolerance jams the layer: automatic
    failure with no state change.  A successful attempt lands within
    delta_theta of -90 degrees, snaps the layers into alignment and
    commits the move of the face currently up.  A failed attempt leaves a
    residual angle from the failure distribution, snapping to the nearest
    alignment when within 5 degrees of 0 or -90 (the latter still
    commits the move).
    """
    if abs(cube.layer_misalignment) > chamfer:
        return False
    if float(rng.random()) < model.p_op:
        _commit_twist(cube)
        return True
    residual = float(rng.uniform(model.failure_angle_low, model.failure_angle_high))
    if abs(residual - TWIST_TARGET) <= chamfer:
        _commit_twist(cube)  # slipped through to the next detent
    elif abs(residual) <= chamfer:
        cube.layer_misalignment = 0.0
    else:
        cube.layer_misalignment = residual
    return False


def attempt_restore(cube: PhysicalCube, model: ActuationModel, rng) -> bool:
    """Randomization attempt to re-align a misaligned layer.

    On success the layer snaps to the nearest alignment; snapping to -90
    degrees commits the pending move.  On failure nothing moves.
    """
    if float(rng.random()) < model.p_restore:
        if cube.layer_misalignment < TWIST_TARGET / 2.0:
            _commit_twist(cube)
        else:
            cube.layer_misalignment = 0.0
        return True
    return False


def randomize_pose(cube: PhysicalCube, model: ActuationModel, rng) -> None:
    """Shake the cube to a random pose to escape a bad re-pose basin."""
    cube.pose = _sample_failure_pose(rng, model)


def _pose_errors(cube: PhysicalCube, goal: PoseGoal) -> tuple[float, float]:
    return (math.dist(cube.pose.position, goal.x_target),
            orientation_distance(cube.pose.orientation, goal.q_target))


# ---------------------------------------------------------------------------
# rollback state machine
# ---------------------------------------------------------------------------

def execute_move_rollback(cube: PhysicalCube, move: Move, model: ActuationModel,
                          config: ExecutorConfig, rng,
                          log: _ActionLog | None = None) -> MoveOutcome:
    if log is None:
        log = _ActionLog(config.action_budget)
    expected = apply_generalized(cube.logical, move)
    goal = PoseGoal(config.x_target, goal_orientation(move))
    twists = 1 if move.is_prime else 3

    posed = False
    for attempt in range(config.r1_max):
        if log.exhausted:
            return MoveOutcome.BUDGET_EXHAUSTED
        ok = attempt_rotate(cube, goal, model, rng, config.delta_x, config.delta_q)
        log.record("rotate", ok, cube, *_pose_errors(cube, goal))
        if pose_goal_reached(cube.pose, goal, config.delta_x, config.delta_q):
            posed = True
            break
        if attempt + 1 < config.r1_max:
            if log.exhausted:
                return MoveOutcome.BUDGET_EXHAUSTED
            randomize_pose(cube, model, rng)
            log.record("randomize", True, cube, *_pose_errors(cube, goal))

    if posed:
        for _ in range(twists):
            if log.exhausted:
                return MoveOutcome.BUDGET_EXHAUSTED
            ok = attempt_twist(cube, model, rng, config.delta_theta, config.chamfer)
            log.record("twist", ok, cube, None, abs(cube.layer_misalignment))
            restores = 0
            while cube.layer_misalignment != 0.0 and restores < config.r2_max:
                if log.exhausted:
                    return MoveOutcome.BUDGET_EXHAUSTED
                rok = attempt_restore(cube, model, rng)
                log.record("restore", rok, cube, None, abs(cube.layer_misalignment))
                restores += 1
            if cube.layer_misalignment != 0.0:
                break  # layer stuck beyond the restore budget; give up on this move

    return (MoveOutcome.COMPLETED if cube.logical == expected
            else MoveOutcome.NEEDS_REPLAN)


Planner = Callable[[CanonicalState], Sequence[Move]]


def execute_episode(scramble: CanonicalState, mode: ExecutionMode, planner: Planner,
                    model: ActuationModel, config: ExecutorConfig, rng) -> EpisodeReport:
    """Run one solve episode and report SR bookkeeping.

    Rollback mode re-plans from the current logical state whenever a move
    fails its completion check; open-loop mode plans once and fires every
    compiled action with no checks at all.  Success is judged only on the
    final logical state.
    """
    cube = PhysicalCube.at_rest(scramble)
    log = _ActionLog(config.action_budget)
    moves_attempted = 0
    replans = 0

    if mode is ExecutionMode.ROLLBACK:
        while not is_solved(cube.logical) and not log.exhausted:
            plan = planner(cube.logical)
            aborted = False
            for move in plan:
                moves_attempted += 1
                outcome = execute_move_rollback(cube, move, model, config, rng, log)
                if outcome is MoveOutcome.NEEDS_REPLAN:
                    replans += 1
                    aborted = True
                    break
                if outcome is MoveOutcome.BUDGET_EXHAUSTED:
                    aborted = True
                    break
            if not plan and not aborted:
                break
    elif mode is ExecutionMode.OPEN_LOOP:
        plan = compile_moves(planner(cube.logical), config.x_target)
        for _move, acts in plan.steps:
            if log.exhausted:
                break
            moves_attempted += 1
            for action in acts:
                if log.exhausted:
                    break
                if isinstance(action, Rotate):
                    ok = attempt_rotate(cube, action.goal, model, rng,
                                        config.delta_x, config.delta_q)
                    log.record("rotate", ok, cube, *_pose_errors(cube, action.goal))
                else:
                    ok = attempt_twist(cube, model, rng,
                                       config.delta_theta, config.chamfer)
                    log.record("twist", ok, cube, None, abs(cube.layer_misalignment))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    return EpisodeReport(
        success=is_solved(cube.logical),
        atomic_actions=len(log.entries),
        moves_attempted=moves_attempted,
        replans=replans,
        trace=log.entries,
    )
