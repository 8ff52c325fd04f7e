"""Exact state-vector representation of a two-component walker on the line.

The walker state is a pair of complex amplitude arrays (spin-down, spin-up)
over a bounded window of lattice sites.  The elementary unitaries are the
single-parameter coin

    C(theta) = [[cos(theta), -i sin(theta)],
                [-i sin(theta), cos(theta)]],

the spin-conditioned full shift S (down component one site left, up
component one site right) and the two half shifts used by split-step walks.
One full walk step is S (C x I); one split step is
S+ (C(theta2) x I) S- (C(theta1) x I).

All operations are functional: they return a new state and never mutate
their input.  Windows are pre-allocated for a planned number of steps; an
amplitude reaching the window edge raises WindowOverflowError rather than
wrapping around.
"""

import math
from dataclasses import dataclass

import numpy as np


class WindowOverflowError(RuntimeError):
    """An amplitude would be shifted past the allocated window edge."""


@dataclass(frozen=True)
class InitialCoinState:
    """Internal (coin) state cos(delta)|0> + exp(-i eta) sin(delta)|1>."""

    delta: float
    eta: float = 0.0

    def spinor(self) -> np.ndarray:
        return np.array(
            [math.cos(self.delta),
             np.exp(-1j * self.eta) * math.sin(self.delta)],
            dtype=np.complex128,
        )


@dataclass(frozen=True)
class PositionProfile:
    """Initial position wavefunction: a point site or a Gaussian packet.

    Gaussian amplitudes follow exp(-(x - center)^2 / (4 width^2)), truncated
    where they underflow and renormalized numerically.
    """

    kind: str = "point"
    center: int = 0
    width: float | None = None

    def __post_init__(self):
        if self.kind not in ("point", "gaussian"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == "gaussian":
            if self.width is None or self.width <= 0:
                raise ValueError("gaussian profile needs a positive width")

    def truncation_radius(self) -> int:
        if self.kind == "point":
            return 0
        # exp(-r^2 / 4w^2) < 1e-18 beyond the cut; the tail mass is negligible
        return int(math.ceil(2.0 * self.width * math.sqrt(math.log(1e18)))) + 1


@dataclass
class WalkerState:
    """Amplitudes over the window [x_min, x_min + len - 1] after `step_count` steps."""

    x_min: int
    down: np.ndarray
    up: np.ndarray
    step_count: int = 0
    origin: int = 0

    @property
    def x_max(self) -> int:
        return self.x_min + len(self.down) - 1

    def sites(self) -> np.ndarray:
        return np.arange(self.x_min, self.x_min + len(self.down))

    def index(self, x: int) -> int:
        if not self.x_min <= x <= self.x_max:
            raise IndexError(f"site {x} outside window [{self.x_min}, {self.x_max}]")
        return x - self.x_min

    def amplitudes_at(self, x: int) -> tuple[complex, complex]:
        i = self.index(x)
        return complex(self.down[i]), complex(self.up[i])

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.down) ** 2)
                             + np.sum(np.abs(self.up) ** 2)))

    def copy(self) -> "WalkerState":
        return WalkerState(self.x_min, self.down.copy(), self.up.copy(),
                           self.step_count, self.origin)


def make_coin(theta: float) -> np.ndarray:
    """2x2 coin matrix C(theta)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def make_state(initial: InitialCoinState, profile: PositionProfile,
               max_steps: int) -> WalkerState:
    """Encode the initial product state on a window sized for `max_steps` steps.

    The window is [center - R - max_steps - 1, center + R + max_steps + 1]
    where R is the profile truncation radius, so `max_steps` applications of
    any step operator never reach the edge.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    radius = profile.truncation_radius() + max_steps + 1
    n = 2 * radius + 1
    x_min = profile.center - radius
    down = np.zeros(n, dtype=np.complex128)
    up = np.zeros(n, dtype=np.complex128)
    spin = initial.spinor()
    if profile.kind == "point":
        down[radius] = spin[0]
        up[radius] = spin[1]
    else:
        r = profile.truncation_radius()
        x = np.arange(-r, r + 1, dtype=float)
        g = np.exp(-(x ** 2) / (4.0 * profile.width ** 2))
        g /= np.sqrt(np.sum(g ** 2))
        sl = slice(radius - r, radius + r + 1)
        down[sl] = g * spin[0]
        up[sl] = g * spin[1]
    return WalkerState(x_min, down, up, step_count=0, origin=profile.center)


def apply_coin(state: WalkerState, theta: float) -> WalkerState:
    """Rotate the spinor at every site by C(theta); position untouched."""
    c, s = math.cos(theta), math.sin(theta)
    mis = -1j * s
    down = c * state.down + mis * state.up
    up = mis * state.down + c * state.up
    return WalkerState(state.x_min, down, up, state.step_count, state.origin)


def _shift_down_left(state: WalkerState) -> np.ndarray:
    if state.down[0] != 0:
        raise WindowOverflowError(
            f"down amplitude at window edge x={state.x_min} after step "
            f"{state.step_count}; allocate a larger window")
    down = np.empty_like(state.down)
    down[:-1] = state.down[1:]
    down[-1] = 0
    return down


def _shift_up_right(state: WalkerState) -> np.ndarray:
    if state.up[-1] != 0:
        raise WindowOverflowError(
            f"up amplitude at window edge x={state.x_max} after step "
            f"{state.step_count}; allocate a larger window")
    up = np.empty_like(state.up)
    up[1:] = state.up[:-1]
    up[0] = 0
    return up


def apply_shift(state: WalkerState) -> WalkerState:
    """Full conditional shift: psi_down(x) <- psi_down(x+1), psi_up(x) <- psi_up(x-1)."""
    return WalkerState(state.x_min, _shift_down_left(state),
                       _shift_up_right(state), state.step_count, state.origin)


def apply_half_shift_minus(state: WalkerState) -> WalkerState:
    """Half shift S-: moves only the down component one site left."""
    return WalkerState(state.x_min, _shift_down_left(state), state.up.copy(),
                       state.step_count, state.origin)


def apply_half_shift_plus(state: WalkerState) -> WalkerState:
    """Half shift S+: moves only the up component one site right."""
    return WalkerState(state.x_min, state.down.copy(), _shift_up_right(state),
                       state.step_count, state.origin)


def full_step(state: WalkerState, theta: float) -> WalkerState:
    """One walk step: coin C(theta), then the full shift; step_count += 1."""
    out = apply_shift(apply_coin(state, theta))
    out.step_count = state.step_count + 1
    return out


def split_step(state: WalkerState, theta1: float, theta2: float) -> WalkerState:
    """One split step: C(theta1), S-, C(theta2), S+; step_count += 1."""
    out = apply_half_shift_minus(apply_coin(state, theta1))
    out = apply_half_shift_plus(apply_coin(out, theta2))
    out.step_count = state.step_count + 1
    return out
