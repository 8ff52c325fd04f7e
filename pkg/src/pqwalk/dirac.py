"""Verification layer: exact step recurrences, discretized continuum
equations, and the Dirac-equation configurations of the two-period /
split-step walk.

Recurrence residuals evaluate the defining update equations of each walk
family directly on recorded trajectories; a correct engine gives residuals
at rounding level (<= 1e-13), and a deliberately mismatched coin angle
gives O(angle error) residuals, which is what makes the check sensitive.

Differential residuals discretize the continuum equations at unit lattice
spacing and time step (forward difference in t, central difference in x)
and report norms normalized by the field norm.  They need smooth packets:
point-localized trajectories are rejected.  hbar = 1 throughout.
"""

import math
from dataclasses import dataclass

import numpy as np

from .schedule import Trajectory

GAPLESS_TOL = 1e-10
_EXACT_GAPLESS_TOL = 1e-12


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    l2: float
    location: tuple[int, int]  # (x, t) of the largest residual


@dataclass(frozen=True)
class DiracConfig:
    """Continuum-limit regime of the two-period / split-step walk."""

    regime: str  # gapped | gapless_general | gapless_diagonal
    theta1: float
    theta2: float
    mass_coefficient: float
    velocity_matrix: np.ndarray


def _pair_fields(traj: Trajectory, s0: int, s1: int):
    a = traj.state_at(s0)
    b = traj.state_at(s1)
    if a.x_min != b.x_min or len(a.down) != len(b.down):
        raise ValueError("snapshots live on different windows")
    return a, b


def _collect(pairs):
    """Reduce per-pair residual fields to a ResidualReport."""
    worst = 0.0
    loc = (0, 0)
    sq_sum = 0.0
    count = 0
    for res_d, res_u, x_lo, t_val in pairs:
        stack = np.abs(np.concatenate([res_d, res_u]))
        m = float(np.max(stack, initial=0.0))
        if m >= worst:
            half = len(res_d)
            i = int(np.argmax(stack))
            worst = m
            loc = (x_lo + (i if i < half else i - half), t_val)
        sq_sum += float(np.sum(stack ** 2))
        count += stack.size
    return ResidualReport(max_abs=worst, l2=math.sqrt(sq_sum), location=loc)


def _one_step_residual(prev, nxt, c1, s1, c2=None, s2=None):
    """Residual of the one-coin (or combined two-coin) single-step update.

    With c2/s2 given this is the combined update
      d(x, t+1) = c2 [c1 d(x+1) - i s1 u(x+1)] - i s2 [-i s1 d(x) + c1 u(x)]
      u(x, t+1) = -i s2 [c1 d(x) - i s1 u(x)] + c2 [-i s1 d(x-1) + c1 u(x-1)]
    which the split-step walk satisfies exactly; without c2/s2 it reduces to
    the plain coin-then-shift update.
    """
    d0, u0 = prev.down, prev.up
    d1, u1 = nxt.down, nxt.up
    if c2 is None:
        pred_d = c1 * d0[2:] - 1j * s1 * u0[2:]
        pred_u = -1j * s1 * d0[:-2] + c1 * u0[:-2]
    else:
        pred_d = (c2 * (c1 * d0[2:] - 1j * s1 * u0[2:])
                  - 1j * s2 * (-1j * s1 * d0[1:-1] + c1 * u0[1:-1]))
        pred_u = (-1j * s2 * (c1 * d0[1:-1] - 1j * s1 * u0[1:-1])
                  + c2 * (-1j * s1 * d0[:-2] + c1 * u0[:-2]))
    return d1[1:-1] - pred_d, u1[1:-1] - pred_u


def _pair_step_residual(prev, nxt, c1, s1, c2, s2):
    """Residual of the two-step update (t-1 -> t+1) of the alternating walk:
    coin 1 then coin 2, positions moving by 0 or +-2 sites."""
    d0, u0 = prev.down, prev.up
    d1, u1 = nxt.down, nxt.up
    pred_d = (c2 * (c1 * d0[4:] - 1j * s1 * u0[4:])
              - 1j * s2 * (-1j * s1 * d0[2:-2] + c1 * u0[2:-2]))
    pred_u = (-1j * s2 * (c1 * d0[2:-2] - 1j * s1 * u0[2:-2])
              + c2 * (-1j * s1 * d0[:-4] + c1 * u0[:-4]))
    return d1[2:-2] - pred_d, u1[2:-2] - pred_u


def recurrence_residual(traj: Trajectory, family: str, theta: float | None = None,
                        theta1: float | None = None,
                        theta2: float | None = None) -> ResidualReport:
    """Evaluate a walk family's exact update equations on a trajectory.

    family: 'one_period' (needs theta, consecutive snapshots),
    'split_step' or 'combined_step' (needs theta1/theta2, consecutive
    snapshots; the two names share one recurrence), or
    'two_period_pairstep' (needs theta1/theta2 and snapshot pairs two steps
    apart ending on even steps).
    """
    steps = traj.steps
    pairs = []
    if family == "one_period":
        if theta is None:
            raise ValueError("one_period family needs theta")
        c, s = math.cos(theta), math.sin(theta)
        for s0, s1 in zip(steps, steps[1:]):
            if s1 - s0 != 1:
                continue
            prev, nxt = _pair_fields(traj, s0, s1)
            rd, ru = _one_step_residual(prev, nxt, c, s)
            pairs.append((rd, ru, prev.x_min + 1, s1))
    elif family in ("split_step", "combined_step"):
        if theta1 is None or theta2 is None:
            raise ValueError(f"{family} family needs theta1 and theta2")
        c1, s1_ = math.cos(theta1), math.sin(theta1)
        c2, s2_ = math.cos(theta2), math.sin(theta2)
        for s0, s1 in zip(steps, steps[1:]):
            if s1 - s0 != 1:
                continue
            prev, nxt = _pair_fields(traj, s0, s1)
            rd, ru = _one_step_residual(prev, nxt, c1, s1_, c2, s2_)
            pairs.append((rd, ru, prev.x_min + 1, s1))
    elif family == "two_period_pairstep":
        if theta1 is None or theta2 is None:
            raise ValueError("two_period_pairstep family needs theta1 and theta2")
        c1, s1_ = math.cos(theta1), math.sin(theta1)
        c2, s2_ = math.cos(theta2), math.sin(theta2)
        recorded = set(steps)
        for s1 in steps:
            if s1 % 2 == 0 and s1 >= 2 and (s1 - 2) in recorded:
                prev, nxt = _pair_fields(traj, s1 - 2, s1)
                rd, ru = _pair_step_residual(prev, nxt, c1, s1_, c2, s2_)
                pairs.append((rd, ru, prev.x_min + 2, s1))
    else:
        raise ValueError(f"unknown recurrence family {family!r}")
    if not pairs:
        raise ValueError(
            f"trajectory snapshots {steps} have no pair with the spacing "
            f"required by family {family!r}")
    return _collect(pairs)


def _pde_matrices(config: str, theta: float | None, theta1: float | None,
                  theta2: float | None):
    if config == "one_period_pde":
        if theta is None:
            raise ValueError("one_period_pde needs theta")
        c, s = math.cos(theta), math.sin(theta)
        drift = np.array([[c, -1j * s], [1j * s, -c]])
        local = np.array([[c - 1.0, -1j * s], [-1j * s, c - 1.0]])
        return drift, local
    if config == "two_period_pde":
        if theta1 is None or theta2 is None:
            raise ValueError("two_period_pde needs theta1 and theta2")
        c1, s1 = math.cos(theta1), math.sin(theta1)
        c2 = math.cos(theta2)
        tot = theta1 + theta2
        drift = c2 * np.array([[c1, -1j * s1], [1j * s1, -c1]])
        local = np.array([[math.cos(tot) - 1.0, -1j * math.sin(tot)],
                          [-1j * math.sin(tot), math.cos(tot) - 1.0]])
        return drift, local
    raise ValueError(f"unknown differential config {config!r}")


def differential_residual(traj: Trajectory, config: str, theta: float | None = None,
                          theta1: float | None = None,
                          theta2: float | None = None) -> ResidualReport:
    """Discretized continuum-equation residual on a smooth-packet trajectory.

    d_t psi is a forward difference across one step, d_x psi a central
    difference; the reported norms are divided by the field l2 norm.  The
    one_period_pde form matches homogeneous trajectories, the
    two_period_pde form matches split-step trajectories (whose single step
    realizes the combined two-coin update at unit spacing).
    """
    if traj.profile.kind == "point":
        raise ValueError("differential residuals need a smooth (gaussian) "
                         "packet; point-localized trajectories are rejected")
    drift, local = _pde_matrices(config, theta, theta1, theta2)
    steps = traj.steps
    pairs = []
    norm_sq = 0.0
    count = 0
    for s0, s1 in zip(steps, steps[1:]):
        if s1 - s0 != 1:
            continue
        prev, nxt = _pair_fields(traj, s0, s1)
        if len(prev.down) < 5:
            raise ValueError("window too small for central differences")
        fields = np.stack([prev.down, prev.up])
        dt = np.stack([nxt.down, nxt.up])[:, 1:-1] - fields[:, 1:-1]
        dx = (fields[:, 2:] - fields[:, :-2]) / 2.0
        rhs = drift @ dx + local @ fields[:, 1:-1]
        res = dt - rhs
        pairs.append((res[0], res[1], prev.x_min + 1, s1))
        norm_sq += float(np.sum(np.abs(fields[:, 1:-1]) ** 2))
        count += 1
    if not pairs:
        raise ValueError("trajectory has no consecutive snapshot pair")
    rep = _collect(pairs)
    scale = math.sqrt(norm_sq / count) if norm_sq > 0 else 1.0
    return ResidualReport(max_abs=rep.max_abs / scale,
                          l2=rep.l2 / (scale * math.sqrt(count)),
                          location=rep.location)


def dirac_config(kind: str, theta1: float = 0.0,
                 theta2: float = 0.0) -> DiracConfig:
    """Classify coin angles into a Dirac regime and its coefficients.

    gapped: theta1 = 0, mass theta2, velocities +-(1 - theta2^2/2);
    gapless_general: cos(theta1 + theta2) = 1, massless, Hermitian velocity
    matrix cos(t2) [[cos t1, -i sin t1], [i sin t1, -cos t1]];
    gapless_diagonal: theta2 = -theta1, massless, velocity cos(t2) diag(1, -1).
    Regime preconditions are enforced to 1e-10.
    """
    if kind == "gapped":
        if abs(theta1) > GAPLESS_TOL:
            raise ValueError(
                f"gapped regime requires theta1 = 0, got {theta1}")
        speed = 1.0 - theta2 ** 2 / 2.0
        return DiracConfig(
            regime="gapped", theta1=0.0, theta2=theta2,
            mass_coefficient=theta2,
            velocity_matrix=np.array([[speed, 0.0], [0.0, -speed]],
                                     dtype=np.complex128),
        )
    if kind == "gapless_general":
        if abs(math.cos(theta1 + theta2) - 1.0) > GAPLESS_TOL:
            raise ValueError(
                "gapless_general regime requires cos(theta1 + theta2) = 1; "
                f"got theta1={theta1}, theta2={theta2}")
        c1, s1 = math.cos(theta1), math.sin(theta1)
        c2 = math.cos(theta2)
        vel = c2 * np.array([[c1, -1j * s1], [1j * s1, -c1]])
        return DiracConfig(regime="gapless_general", theta1=theta1,
                           theta2=theta2, mass_coefficient=0.0,
                           velocity_matrix=vel)
    if kind == "gapless_diagonal":
        if abs(theta1 + theta2) > GAPLESS_TOL:
            raise ValueError(
                "gapless_diagonal regime requires theta2 = -theta1; "
                f"got theta1={theta1}, theta2={theta2}")
        c2 = math.cos(theta2)
        vel = np.array([[c2, 0.0], [0.0, -c2]], dtype=np.complex128)
        return DiracConfig(regime="gapless_diagonal", theta1=theta1,
                           theta2=theta2, mass_coefficient=0.0,
                           velocity_matrix=vel)
    raise ValueError(f"unknown Dirac regime {kind!r}")


def is_gapless(theta1: float, theta2: float) -> bool:
    """Exact massless condition cos(theta1 + theta2) = 1 (within 1e-12)."""
    return abs(math.cos(theta1 + theta2) - 1.0) < _EXACT_GAPLESS_TOL


def dirac_spread_check(config: DiracConfig, t: float) -> float:
    """Light-cone radius after t steps implied by the regime's velocities.

    Gapless regimes use the continuum cone t |cos t1 cos t2|; the gapped
    regime (theta1 = 0) uses t |cos t2|, with the mass slowing the interior
    bulk rather than the cone edge.
    """
    if config.regime == "gapped":
        return t * abs(math.cos(config.theta2))
    return t * abs(math.cos(config.theta1) * math.cos(config.theta2))
