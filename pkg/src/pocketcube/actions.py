"""Compile generalized moves into the two-stage atomic hand actions.

Each move becomes: re-pose the whole cube so a twistable layer faces up
(Rotate, with a goal pose from a fixed three-row orientation table), then
twist the top layer by -90 degrees (Twist), three times when the
clockwise variant of the move is needed.

Frames.  The hand frame is z-up.  The cube's body frame is the canonical
frame of the anchored bottom piece: body +x is the canonical R-face
normal, body +y the B-face normal, body +z the U-face normal.  With that
binding the goal table reads

    U, U'  ->  identity          (U face up)
    R, R'  ->  90 deg about -y   (R face up)
    F, F'  ->  90 deg about +x   (B face up; turning the counter face the
                                  same way has the same quotient effect)

and a single -90 degree top twist in each pose commits exactly the prime
move of that class, so primes cost one twist and non-primes three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .cube import GENERALIZED_MOVES, CubeError, Move

# goal-check thresholds: 0.01 m position, 0.1 rad orientation and twist angle
DELTA_X = 0.01
DELTA_Q = 0.1
DELTA_THETA = 0.1

TWIST_TARGET = -math.pi / 2

Vector3 = tuple[float, float, float]

PALM_CENTER: Vector3 = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Quaternion:
    """Unit rotation quaternion, w first; q and -q are the same rotation."""

    w: float
    x: float
    y: float
    z: float

    @classmethod
    def identity(cls) -> "Quaternion":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis: Vector3, angle: float) -> "Quaternion":
        n = math.sqrt(axis[0] ** 2 + axis[1] ** 2 + axis[2] ** 2)
        s = math.sin(angle / 2.0) / n
        return cls(math.cos(angle / 2.0), axis[0] * s, axis[1] * s, axis[2] * s)

    @classmethod
    def random_uniform(cls, rng) -> "Quaternion":
        while True:
            q = rng.standard_normal(4)
            n = math.sqrt(float(q @ q))
            if n > 1e-9:
                return cls(*(float(v / n) for v in q))

    @property
    def norm(self) -> float:
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def normalized(self) -> "Quaternion":
        n = self.norm
        return Quaternion(self.w / n, self.x / n, self.y / n, self.z / n)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __mul__(self, o: "Quaternion") -> "Quaternion":
        a, b = self, o
        return Quaternion(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y + a.y * b.w + a.z * b.x - a.x * b.z,
            a.w * b.z + a.z * b.w + a.x * b.y - a.y * b.x,
        )

    def rotate(self, v: Vector3) -> Vector3:
        p = self * Quaternion(0.0, v[0], v[1], v[2]) * self.conjugate()
        return (p.x, p.y, p.z)


_SQ2 = math.sqrt(0.5)  # exact 1/sqrt(2); the table's 0.707 is its rounding

_GOAL_BY_FACE = {
    "U": Quaternion(1.0, 0.0, 0.0, 0.0),
    "R": Quaternion(_SQ2, 0.0, -_SQ2, 0.0),
    "F": Quaternion(_SQ2, _SQ2, 0.0, 0.0),
}


def goal_orientation(move: Move) -> Quaternion:
    """Re-pose target for `move`; one row per move class U/R/F."""
    if move not in GENERALIZED_MOVES:
        raise CubeError(f"{move.value} is not in the generalized move set")
    return _GOAL_BY_FACE[move.face]


def orientation_distance(q: Quaternion, q_target: Quaternion) -> float:
    """Rotation angle between two unit quaternions, double-cover safe.

    2*arccos(Real(q_target * conj(q))), with the real part taken in
    absolute value so that q and -q compare as identical.
    """
    real = abs((q_target * q.conjugate()).w)
    return 2.0 * math.acos(min(1.0, real))


@dataclass(frozen=True)
class Pose:
    position: Vector3
    orientation: Quaternion


@dataclass(frozen=True)
class PoseGoal:
    x_target: Vector3
    q_target: Quaternion


def pose_goal_reached(pose: Pose, goal: PoseGoal,
                      delta_x: float = DELTA_X, delta_q: float = DELTA_Q) -> bool:
    dx = math.dist(pose.position, goal.x_target)
    return dx < delta_x and orientation_distance(pose.orientation, goal.q_target) < delta_q


def twist_goal_reached(theta: float, theta_target: float = TWIST_TARGET,
                       delta_theta: float = DELTA_THETA) -> bool:
    return abs(theta - theta_target) < delta_theta


@dataclass(frozen=True)
class Rotate:
    goal: PoseGoal


@dataclass(frozen=True)
class Twist:
    theta_target: float = TWIST_TARGET


AtomicAction = Rotate | Twist


@dataclass(frozen=True)
class ExecutionPlan:
    """Per-move atomic action lists, in move order."""

    steps: tuple[tuple[Move, tuple[AtomicAction, ...]], ...]

    @property
    def atomic_count(self) -> int:
        return sum(len(actions) for _, actions in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def compile_moves(seq: Sequence[Move], x_target: Vector3 = PALM_CENTER) -> ExecutionPlan:
    """Generalized move sequence -> [Rotate, Twist] or [Rotate, Twist x3] each."""
    steps = []
    for move in seq:
        rotate = Rotate(PoseGoal(x_target, goal_orientation(move)))
        twists = 1 if move.is_prime else 3
        steps.append((move, (rotate,) + (Twist(),) * twists))
    return ExecutionPlan(tuple(steps))
