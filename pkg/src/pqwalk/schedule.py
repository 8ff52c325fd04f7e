"""Coin schedules and the multi-step evolution driver.

A schedule assigns a coin angle (or a split-step pair) to every step index.
Step indices are 1-based: for an n-periodic schedule the second angle is
applied at steps n, 2n, 3n, ... and the first angle everywhere else, so a
two-period run realizes the operator sequence ... W(theta2) W(theta1).
This off-by-one convention decides which coin ends a run; when the step
count is not a multiple of n the schedule simply truncates mid-period.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .state import (InitialCoinState, PositionProfile, WalkerState,
                    WindowOverflowError, make_state)


class ScheduleError(ValueError):
    """Invalid schedule definition or step lookup."""


@dataclass(frozen=True)
class CoinSchedule:
    """One of: homogeneous(theta), n_period(n, theta1, theta2),
    explicit(angle list), split_step(theta1, theta2)."""

    kind: str
    theta1: float = 0.0
    theta2: float = 0.0
    n: int = 0
    angles: tuple[float, ...] = ()

    @classmethod
    def homogeneous(cls, theta: float) -> "CoinSchedule":
        return cls(kind="homogeneous", theta1=float(theta))

    @classmethod
    def n_period(cls, n: int, theta1: float, theta2: float) -> "CoinSchedule":
        if n < 2:
            raise ScheduleError(f"n-period schedule needs n >= 2, got n={n}")
        return cls(kind="n_period", theta1=float(theta1),
                   theta2=float(theta2), n=int(n))

    @classmethod
    def two_period(cls, theta1: float, theta2: float) -> "CoinSchedule":
        return cls.n_period(2, theta1, theta2)

    @classmethod
    def explicit(cls, angles) -> "CoinSchedule":
        return cls(kind="explicit", angles=tuple(float(a) for a in angles))

    @classmethod
    def split_step(cls, theta1: float, theta2: float) -> "CoinSchedule":
        return cls(kind="split_step", theta1=float(theta1), theta2=float(theta2))

    @property
    def is_split(self) -> bool:
        return self.kind == "split_step"

    @property
    def period_steps(self) -> int:
        """Walk steps spanned by one effective (repeating) step."""
        if self.kind == "homogeneous":
            return 1
        if self.kind == "n_period":
            return self.n
        if self.kind == "split_step":
            return 1
        raise ScheduleError(f"{self.kind} schedule has no period")

    def coin_for_step(self, s: int) -> float:
        """Coin angle applied at 1-based step s."""
        if s < 1:
            raise ScheduleError(f"step index must be >= 1, got {s}")
        if self.kind == "homogeneous":
            return self.theta1
        if self.kind == "n_period":
            return self.theta2 if s % self.n == 0 else self.theta1
        if self.kind == "explicit":
            if s > len(self.angles):
                raise ScheduleError(
                    f"explicit schedule has {len(self.angles)} angles, "
                    f"step {s} requested")
            return self.angles[s - 1]
        raise ScheduleError("split-step schedules use a coin pair per step; "
                            "see coin_pair")

    @property
    def coin_pair(self) -> tuple[float, float]:
        if not self.is_split:
            raise ScheduleError("coin_pair is only defined for split-step schedules")
        return self.theta1, self.theta2

    def angle_table(self, t: int) -> np.ndarray:
        """Angles for steps 1..t of a full-step schedule."""
        if self.is_split:
            raise ScheduleError("split-step schedules have no angle table")
        if self.kind == "explicit" and len(self.angles) < t:
            raise ScheduleError(
                f"explicit schedule has {len(self.angles)} angles, "
                f"{t} steps requested")
        return np.array([self.coin_for_step(s) for s in range(1, t + 1)])

    def describe(self) -> str:
        if self.kind == "homogeneous":
            return f"homogeneous(theta={self.theta1:.6g})"
        if self.kind == "n_period":
            return (f"n_period(n={self.n}, theta1={self.theta1:.6g}, "
                    f"theta2={self.theta2:.6g})")
        if self.kind == "split_step":
            return (f"split_step(theta1={self.theta1:.6g}, "
                    f"theta2={self.theta2:.6g})")
        return f"explicit({len(self.angles)} angles)"


def coin_for_step(schedule: CoinSchedule, s: int) -> float:
    return schedule.coin_for_step(s)


@dataclass
class Trajectory:
    """Full-state snapshots of one evolution, keyed by step count."""

    schedule: CoinSchedule
    initial: InitialCoinState
    profile: PositionProfile
    snapshots: dict[int, WalkerState] = field(default_factory=dict)

    @property
    def steps(self) -> list[int]:
        return sorted(self.snapshots)

    def state_at(self, s: int) -> WalkerState:
        try:
            return self.snapshots[s]
        except KeyError:
            raise KeyError(f"no snapshot recorded at step {s}") from None

    @property
    def final(self) -> WalkerState:
        return self.snapshots[self.steps[-1]]


def evolve(initial: InitialCoinState, profile: PositionProfile,
           schedule: CoinSchedule, t: int, record_at=()) -> Trajectory:
    """Run t steps of the scheduled walk, snapshotting at record_at and t.

    Snapshots are independent copies; identical inputs give bit-identical
    trajectories.
    """
    if t < 0:
        raise ScheduleError(f"step count must be >= 0, got {t}")
    record = {s for s in record_at if 0 <= s <= t}
    record.add(t)

    state = make_state(initial, profile, t)
    traj = Trajectory(schedule=schedule, initial=initial, profile=profile)
    if 0 in record:
        traj.snapshots[0] = state.copy()

    if schedule.is_split:
        c1, s1 = math.cos(schedule.theta1), math.sin(schedule.theta1)
        c2, s2 = math.cos(schedule.theta2), math.sin(schedule.theta2)
    else:
        table = schedule.angle_table(t)
        cos_table = np.cos(table)
        sin_table = np.sin(table)

    done = 0
    for stop in sorted(record - {0}):
        nsteps = stop - done
        if schedule.is_split:
            code = kernels.run_split_steps(state.down, state.up,
                                           c1, s1, c2, s2, nsteps)
        else:
            code = kernels.run_full_steps(state.down, state.up,
                                          cos_table[done:stop],
                                          sin_table[done:stop], nsteps)
        if code:
            edge = state.x_min if code == 1 else state.x_max
            raise WindowOverflowError(
                f"window overflow at x={edge} between steps {done} and {stop}")
        done = stop
        state.step_count = stop
        traj.snapshots[stop] = state.copy()
    return traj
