"""Momentum-space (Bloch) analysis of one effective step of a schedule.

Momentum convention: psi(k) = sum_x exp(-i k x) psi(x), so the left-moving
down component picks up exp(+ik) and the up component exp(-ik); with the
eigenvalue written exp(-i omega) a zero coin angle gives omega = -k and
omega = +k on the two branches.

For every supported schedule the product of per-step factors has unit
determinant and a real trace T(k), so the eigenphases are
omega_plus = arccos(T/2) in [0, pi] and omega_minus = -omega_plus; this
labeling is continuous in k and satisfies omega_minus(k) = -omega_plus(-k).
Group velocities come from the analytic derivative of the trace,
d omega/dk = -T'(k) / (2 sin omega), with band touchings (gap below 1e-9)
flagged since the branch derivative is ambiguous there.

The continuum_* functions expose the closed-form continuum-limit dispersion
and group velocities for comparison; they are approximations, and the exact
Bloch light-cone speed can exceed them substantially (the toolkit reports
the measured gap rather than assuming it is zero).
"""

import math
from dataclasses import dataclass

import numpy as np

from .schedule import CoinSchedule, ScheduleError

GAP_FLAG_THRESHOLD = 1e-9
DEFAULT_K_POINTS = 4097

_Mat = tuple  # (m00, m01, m10, m11) complex arrays over a k grid


def _mat_mul(a: _Mat, b: _Mat) -> _Mat:
    a00, a01, a10, a11 = a
    b00, b01, b10, b11 = b
    return (a00 * b00 + a01 * b10, a00 * b01 + a01 * b11,
            a10 * b00 + a11 * b10, a10 * b01 + a11 * b11)


def _mat_add(a: _Mat, b: _Mat) -> _Mat:
    return tuple(x + y for x, y in zip(a, b))


def _factors(schedule: CoinSchedule, k: np.ndarray):
    """Per-step momentum factors (and k-derivatives) in application order."""
    ep, em = np.exp(1j * k), np.exp(-1j * k)
    zero = np.zeros_like(ep)

    def full(theta):
        c, s = math.cos(theta), math.sin(theta)
        f = (c * ep, -1j * s * ep, -1j * s * em, c * em)
        df = (1j * c * ep, s * ep, -s * em, -1j * c * em)
        return f, df

    if schedule.kind == "homogeneous":
        return [full(schedule.theta1)]
    if schedule.kind == "n_period":
        steps = [full(schedule.theta1)] * (schedule.n - 1)
        steps.append(full(schedule.theta2))
        return steps
    if schedule.kind == "split_step":
        c1, s1 = math.cos(schedule.theta1), math.sin(schedule.theta1)
        c2, s2 = math.cos(schedule.theta2), math.sin(schedule.theta2)
        one = np.ones_like(ep)
        f1 = (c1 * ep, -1j * s1 * ep, -1j * s1 * one, c1 * one)
        df1 = (1j * c1 * ep, s1 * ep, zero, zero)
        f2 = (c2 * one, -1j * s2 * one, -1j * s2 * em, c2 * em)
        df2 = (zero, zero, -s2 * em, -1j * c2 * em)
        return [(f1, df1), (f2, df2)]
    raise ScheduleError(
        f"no momentum-space form for schedule kind {schedule.kind!r}")


def _matrix_and_derivative(schedule: CoinSchedule, k: np.ndarray):
    """One effective step M(k) and dM/dk, vectorized over k."""
    one = np.ones_like(k, dtype=np.complex128)
    zero = np.zeros_like(one)
    m = (one, zero, zero, one)
    dm = (zero, zero, zero, zero)
    for f, df in _factors(schedule, k):
        dm = _mat_add(_mat_mul(df, m), _mat_mul(f, dm))
        m = _mat_mul(f, m)
    return m, dm


def _trace_series(schedule: CoinSchedule, k: np.ndarray):
    """Real trace T(k) of the effective step and its derivative T'(k)."""
    m, dm = _matrix_and_derivative(schedule, k)
    tr = m[0] + m[3]
    dtr = dm[0] + dm[3]
    if np.max(np.abs(tr.imag)) > 1e-10:
        raise AssertionError("effective-step trace is not real; "
                             "unsupported schedule structure")
    return tr.real, dtr.real


@dataclass(frozen=True)
class BlochMatrix:
    """One effective step in momentum space at wavenumber k."""

    k: float
    m: np.ndarray
    period_steps: int


@dataclass
class SpectralCurve:
    """Eigenphase bands and group velocities sampled on a momentum grid.

    Velocities are per effective step; one effective step spans
    `period_steps` walk steps.  `gap_flag` marks samples where the band gap
    is below the tracking threshold and the branch derivative is ambiguous
    (those v entries are NaN).
    """

    k: np.ndarray
    omega_plus: np.ndarray
    omega_minus: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray
    gap_flag: np.ndarray
    period_steps: int


def bloch_matrix(schedule: CoinSchedule, k: float) -> BlochMatrix:
    """Momentum-space matrix of one effective step of the schedule."""
    ka = np.array([float(k)])
    m, _ = _matrix_and_derivative(schedule, ka)
    mat = np.array([[m[0][0], m[1][0]], [m[2][0], m[3][0]]])
    return BlochMatrix(k=float(k), m=mat, period_steps=schedule.period_steps)


def exact_dispersion(schedule: CoinSchedule, k_grid) -> SpectralCurve:
    """Exact eigenphase bands omega(k) and group velocities on a k grid."""
    k = np.asarray(k_grid, dtype=float)
    tr, dtr = _trace_series(schedule, k)
    cw = np.clip(tr / 2.0, -1.0, 1.0)
    omega = np.arccos(cw)
    sin_w = np.sqrt(np.clip(1.0 - cw * cw, 0.0, None))
    gap = 2.0 * sin_w  # chord distance between the two unit-circle eigenvalues
    flagged = gap < GAP_FLAG_THRESHOLD
    with np.errstate(divide="ignore", invalid="ignore"):
        v = -dtr / (2.0 * sin_w)
    v = np.where(flagged, np.nan, v)
    return SpectralCurve(
        k=k, omega_plus=omega, omega_minus=-omega,
        v_plus=v, v_minus=-v, gap_flag=flagged,
        period_steps=schedule.period_steps,
    )


# Guard for the maximizer: |d omega/dk| = |T'| / (2 sin w) loses precision as
# sin w -> 0 (T carries ~1e-16 absolute error), so the search skips a small
# neighborhood of band touchings.  Where the supremum sits at a touching it
# is approached quadratically, so the skipped neighborhood costs O(1e-7).
_SPEED_GUARD_SIN = 1e-3


def _guarded_speeds(schedule: CoinSchedule, k: np.ndarray) -> np.ndarray:
    tr, dtr = _trace_series(schedule, k)
    cw = np.clip(tr / 2.0, -1.0, 1.0)
    sin_w = np.sqrt(np.clip(1.0 - cw * cw, 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.abs(dtr) / (2.0 * sin_w)
    return np.where(sin_w < _SPEED_GUARD_SIN, -math.inf, v)


def _abs_speed(schedule: CoinSchedule, k: float) -> float:
    return float(_guarded_speeds(schedule, np.array([k]))[0])


def max_group_speed(schedule: CoinSchedule, k_points: int = DEFAULT_K_POINTS) -> float:
    """Exact light-cone speed per walk step: sup_k |d omega/dk| / period_steps.

    Grid scan plus golden-section refinement around the maximizer; samples
    flagged at band touchings are skipped (the one-sided limit is still
    approached by the neighboring refinement points).
    """
    k = np.linspace(-math.pi, math.pi, k_points)
    speed = _guarded_speeds(schedule, k)
    i = int(np.argmax(speed))
    best = speed[i]

    lo = k[max(i - 1, 0)]
    hi = k[min(i + 1, k_points - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = _abs_speed(schedule, c), _abs_speed(schedule, d)
    for _ in range(70):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = _abs_speed(schedule, c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = _abs_speed(schedule, d)
        best = max(best, fc, fd)
    return float(best) / schedule.period_steps


def continuum_group_velocity(kind: str, theta1: float, theta2: float | None = None,
                             n: int | None = None):
    """Closed-form continuum-limit group velocities (per walk step).

    one -> cos(t1); two -> cos(t1) cos(t2); three and n -> the branch set
    obtained by extrapolating the one- and two-period velocities.
    """
    c1 = math.cos(theta1)
    if kind == "one":
        return c1
    if theta2 is None:
        raise ValueError(f"kind {kind!r} needs theta2")
    c12 = c1 * math.cos(theta2)
    if kind == "two":
        return c12
    if kind == "three":
        vals = {(c1 + c12) / 2.0, (c1 - c12) / 2.0,
                -(c1 + c12) / 2.0, -(c1 - c12) / 2.0}
        return tuple(sorted(vals))
    if kind == "n":
        if n is None or n < 2:
            raise ValueError("kind 'n' needs n >= 2")
        vals = {((n - 2) * c1 + c12) / (n - 1.0),
                ((n - 2) * c1 - c12) / (n - 1.0),
                -((n - 2) * c1 + c12) / (n - 1.0),
                -((n - 2) * c1 - c12) / (n - 1.0)}
        return tuple(sorted(vals))
    raise ValueError(f"unknown kind {kind!r}")


def continuum_dispersion(kind: str, k, theta1: float, theta2: float | None = None):
    """Continuum-limit dispersion branches omega(k) = -+ k V + i (cos(T) - 1).

    Returns (minus branch, plus branch); V and T are (cos t1, t1) for the
    one-period walk and (cos t1 cos t2, t1 + t2) for the two-period walk.
    The imaginary constant is an artifact of the continuum approximation;
    the exact eigenphases are real (see exact_dispersion).
    """
    k = np.asarray(k, dtype=float)
    if kind == "one":
        vel, total = math.cos(theta1), theta1
    elif kind == "two":
        if theta2 is None:
            raise ValueError("kind 'two' needs theta2")
        vel, total = math.cos(theta1) * math.cos(theta2), theta1 + theta2
    else:
        raise ValueError(f"unknown kind {kind!r}")
    shift = 1j * (math.cos(total) - 1.0)
    return -k * vel + shift, k * vel + shift


def spread_bound(kind: str, theta1: float, theta2: float | None = None,
                 t: float = 0.0, n: int | None = None) -> float:
    """Predicted spread radius after t steps from the continuum velocities.

    two -> t |c1 c2|; three -> (t/2)(|c1| + |c1 c2|);
    n -> (t/(n-1)) ((n-2)|c1| + |c1 c2|).
    """
    if theta2 is None:
        raise ValueError("spread_bound needs theta2")
    a1 = abs(math.cos(theta1))
    a12 = abs(math.cos(theta1) * math.cos(theta2))
    if kind == "two":
        return t * a12
    if kind == "three":
        return 0.5 * t * (a1 + a12)
    if kind == "n":
        if n is None or n < 2:
            raise ValueError("kind 'n' needs n >= 2")
        return (t / (n - 1.0)) * ((n - 2) * a1 + a12)
    raise ValueError(f"unknown kind {kind!r}")
