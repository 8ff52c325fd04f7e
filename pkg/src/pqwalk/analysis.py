"""Observables: position distributions, spread measures, and coin-position
entanglement.

The standard deviation is computed about the distribution mean; the second
moment about the walk origin is exposed separately for cross-checks on
asymmetric states.  Spread radii are measured from the walk origin: the
quantile radius is the smallest radius holding a given probability mass
(default 0.99) and the support radius is the farthest site whose
probability exceeds a threshold (default 1e-10).  Exact parity zeros are
kept in the distribution.
"""

from dataclasses import dataclass

import numpy as np

from .schedule import Trajectory
from .state import WalkerState

DEFAULT_QUANTILE_MASS = 0.99
DEFAULT_SUPPORT_EPS = 1e-10


@dataclass
class Distribution:
    """Probability per site over a window at a given step count."""

    x_min: int
    p: np.ndarray
    t: int
    origin: int = 0

    def sites(self) -> np.ndarray:
        return np.arange(self.x_min, self.x_min + len(self.p))

    def total(self) -> float:
        return float(np.sum(self.p))


@dataclass(frozen=True)
class WalkSummary:
    mean: float
    sigma: float
    quantile_radius: int
    support_radius: int


@dataclass(frozen=True)
class EntropyTrace:
    """Coin-position entanglement entropy (bits) per recorded step."""

    steps: np.ndarray
    entropy: np.ndarray


def probability_distribution(state: WalkerState) -> Distribution:
    """P(x) = |psi_down(x)|^2 + |psi_up(x)|^2."""
    p = np.abs(state.down) ** 2 + np.abs(state.up) ** 2
    return Distribution(state.x_min, p, state.step_count, state.origin)


def mean_position(dist: Distribution) -> float:
    return float(np.sum(dist.p * dist.sites()))


def standard_deviation(dist: Distribution) -> float:
    """sqrt(<x^2> - <x>^2), moments taken against P(x)."""
    x = dist.sites().astype(float)
    m1 = float(np.sum(dist.p * x))
    m2 = float(np.sum(dist.p * x * x))
    return float(np.sqrt(max(m2 - m1 * m1, 0.0)))


def rms_displacement(dist: Distribution, center: float | None = None) -> float:
    """Root mean square displacement about `center` (default: walk origin)."""
    c = dist.origin if center is None else center
    x = dist.sites().astype(float)
    return float(np.sqrt(np.sum(dist.p * (x - c) ** 2)))


def quantile_radius(dist: Distribution, mass: float = DEFAULT_QUANTILE_MASS) -> int:
    """Smallest r with sum of P over |x - origin| <= r at least `mass`."""
    if not 0.0 < mass <= 1.0:
        raise ValueError(f"mass must be in (0, 1], got {mass}")
    r = np.abs(dist.sites() - dist.origin)
    order = np.argsort(r, kind="stable")
    acc = np.cumsum(dist.p[order])
    # guard against total probability a hair under `mass` from rounding
    target = min(mass, acc[-1])
    idx = int(np.searchsorted(acc, target - 1e-15))
    return int(r[order][min(idx, len(r) - 1)])


def support_radius(dist: Distribution, eps: float = DEFAULT_SUPPORT_EPS) -> int:
    """Largest |x - origin| with P(x) > eps, or 0 if none."""
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    r = np.abs(dist.sites() - dist.origin)
    hit = dist.p > eps
    if not np.any(hit):
        return 0
    return int(np.max(r[hit]))


def summarize(dist: Distribution, mass: float = DEFAULT_QUANTILE_MASS,
              eps: float = DEFAULT_SUPPORT_EPS) -> WalkSummary:
    return WalkSummary(
        mean=mean_position(dist),
        sigma=standard_deviation(dist),
        quantile_radius=quantile_radius(dist, mass),
        support_radius=support_radius(dist, eps),
    )


def reduced_coin_density(state: WalkerState) -> np.ndarray:
    """2x2 coin density matrix: trace out position, rho[i, j] = sum_x psi_i psi_j*."""
    d, u = state.down, state.up
    rho = np.array(
        [[np.vdot(d, d), np.vdot(u, d)],
         [np.vdot(d, u), np.vdot(u, u)]],
        dtype=np.complex128,
    )
    return rho


def entanglement_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy -sum(lam log2 lam) in bits, with 0 log 0 = 0.

    Eigenvalues are clipped to [0, 1] to absorb -1e-16 level round-off.
    """
    lam = np.linalg.eigvalsh(rho)
    lam = np.clip(lam.real, 0.0, 1.0)
    nz = lam[lam > 0]
    return float(-np.sum(nz * np.log2(nz)))


def entanglement_of_state(state: WalkerState) -> float:
    return entanglement_entropy(reduced_coin_density(state))


def entropy_trace(traj: Trajectory) -> EntropyTrace:
    steps = np.array(traj.steps)
    values = np.array([entanglement_of_state(traj.snapshots[s]) for s in steps])
    return EntropyTrace(steps=steps, entropy=values)
