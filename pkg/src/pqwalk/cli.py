"""Command-line front end: single runs, parameter sweeps, preset figure
data, dispersion tables, and a self-check battery.

Outputs are CSV files (one header line, LF endings, 17-significant-digit
floats, rows in deterministic order) plus a sidecar meta.json echoing the
resolved configuration.  Identical configs produce byte-identical data
files; meta.json additionally carries the wall time, which varies.

Exit codes: 0 success, 2 configuration error, 3 numeric invariant
violation, 4 I/O failure.
"""

import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import click
import numpy as np

from . import __version__, analysis, dirac, dispersion
from .backend import BACKEND
from .schedule import CoinSchedule, ScheduleError, evolve
from .state import InitialCoinState, PositionProfile, WindowOverflowError


class ConfigError(ValueError):
    """Invalid run configuration."""


class NumericInvariantError(RuntimeError):
    """A numeric invariant (norm conservation, probability sum) failed."""


NORM_TOL = 1e-10


def parse_angle(value) -> float:
    """Parse an angle given in radians or as a multiple of pi ('0.25pi')."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower().replace(" ", "")
    try:
        if text.endswith("pi"):
            head = text[:-2]
            if head in ("", "+"):
                return math.pi
            if head == "-":
                return -math.pi
            return float(head) * math.pi
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle {value!r}; use radians or a "
                          "'0.25pi' style literal") from None


def parse_profile(value) -> PositionProfile:
    """Parse 'point' or 'gaussian:WIDTH'."""
    text = str(value).strip().lower()
    if text == "point":
        return PositionProfile("point", 0)
    if text.startswith("gaussian:"):
        try:
            width = float(text.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad gaussian width in {value!r}") from None
        try:
            return PositionProfile("gaussian", 0, width)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown profile {value!r}; use point or gaussian:W")


def parse_record(value, t: int):
    if value is None:
        return ()
    text = str(value).strip().lower()
    if text == "all":
        return range(t + 1)
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(int(part))
        except ValueError:
            raise ConfigError(f"bad record step {part!r}") from None
    return out


@dataclass
class RunConfig:
    schedule: CoinSchedule
    initial: InitialCoinState
    profile: PositionProfile
    steps: int
    record: tuple = ()
    mass: float = analysis.DEFAULT_QUANTILE_MASS
    eps: float = analysis.DEFAULT_SUPPORT_EPS
    amplitudes: bool = False

    def echo(self) -> dict:
        return {
            "schedule": {
                "kind": self.schedule.kind,
                "theta1": self.schedule.theta1,
                "theta2": self.schedule.theta2,
                "n": self.schedule.n,
                "angles": list(self.schedule.angles),
            },
            "initial": {"delta": self.initial.delta, "eta": self.initial.eta},
            "profile": {"kind": self.profile.kind,
                        "center": self.profile.center,
                        "width": self.profile.width},
            "steps": self.steps,
            "record": sorted(set(self.record)),
            "mass": self.mass,
            "eps": self.eps,
        }


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc


def _build_schedule(doc: dict, theta1, theta2, period, split) -> CoinSchedule:
    sched = doc.get("schedule", {})
    if theta1 is not None:
        sched["theta1"] = theta1
    if theta2 is not None:
        sched["theta2"] = theta2
    if period is not None:
        sched["n"] = period
        sched.setdefault("kind", "n_period")
    if split:
        sched["kind"] = "split_step"
    t1 = parse_angle(sched.get("theta1", 0.0))
    t2 = parse_angle(sched.get("theta2", 0.0))
    kind = sched.get("kind")
    if kind is None:
        kind = "n_period" if "n" in sched else "homogeneous"
    try:
        if kind == "homogeneous":
            return CoinSchedule.homogeneous(t1)
        if kind == "n_period":
            return CoinSchedule.n_period(int(sched.get("n", 2)), t1, t2)
        if kind == "split_step":
            return CoinSchedule.split_step(t1, t2)
        if kind == "explicit":
            return CoinSchedule.explicit(
                [parse_angle(a) for a in sched.get("angles", [])])
    except ScheduleError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown schedule kind {kind!r}")


def _build_run_config(config_path, theta1, theta2, period, split, delta, eta,
                      profile, steps, record, mass, eps,
                      amplitudes=False) -> RunConfig:
    doc = _load_config(config_path)
    schedule = _build_schedule(doc, theta1, theta2, period, split)
    init_doc = doc.get("initial", {})
    d = parse_angle(delta if delta is not None else init_doc.get("delta", math.pi / 4))
    e = parse_angle(eta if eta is not None else init_doc.get("eta", 0.0))
    prof_value = profile if profile is not None else doc.get("profile", "point")
    prof = prof_value if isinstance(prof_value, PositionProfile) \
        else parse_profile(prof_value)
    t = steps if steps is not None else doc.get("steps")
    if t is None:
        raise ConfigError("number of steps not given (--steps or config)")
    t = int(t)
    if t < 0:
        raise ConfigError(f"steps must be >= 0, got {t}")
    rec = parse_record(record, t) if record is not None \
        else doc.get("record", ())
    m = float(mass if mass is not None else doc.get("mass",
                                                    analysis.DEFAULT_QUANTILE_MASS))
    if not 0.0 < m <= 1.0:
        raise ConfigError(f"quantile mass must be in (0, 1], got {m}")
    ep = float(eps if eps is not None else doc.get("eps",
                                                   analysis.DEFAULT_SUPPORT_EPS))
    if ep <= 0:
        raise ConfigError(f"support eps must be > 0, got {ep}")
    return RunConfig(schedule=schedule, initial=InitialCoinState(d, e),
                     profile=prof, steps=t, record=tuple(rec), mass=m, eps=ep,
                     amplitudes=amplitudes)


# ---------------------------------------------------------------------------
# output helpers

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v == 0.0:
            v = 0.0  # normalize -0.0
        return format(v, ".17g")
    return str(value)


def _write_table(out_dir, name, header, rows, fmt):
    if fmt == "json":
        path = os.path.join(out_dir, f"{name}.json")
        doc = [dict(zip(header, row)) for row in rows]
        payload = json.dumps(doc, default=float, sort_keys=False)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload + "\n")
        return path
    path = os.path.join(out_dir, f"{name}.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def _write_meta(out_dir, command, config_echo, started):
    meta = {
        "command": command,
        "config": config_echo,
        "version": __version__,
        "backend": BACKEND,
        "wall_time_s": round(time.monotonic() - started, 6),
    }
    path = os.path.join(out_dir, "meta.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ensure_out(out_dir):
    os.makedirs(out_dir, exist_ok=True)


def _check_norm(state):
    drift = abs(state.norm() - 1.0)
    if drift > NORM_TOL:
        raise NumericInvariantError(
            f"norm drifted by {drift:.3e} after step {state.step_count}")


def _interior(state):
    """Window trimmed of the +-1 guard cells."""
    return slice(1, len(state.down) - 1)


# ---------------------------------------------------------------------------
# commands

@click.group(name="pqwalk")
@click.version_option(version=__version__, prog_name="pqwalk")
def cli():
    """Periodic and split-step discrete-time quantum walks on the line."""


def _schedule_options(f):
    for opt in reversed([
        click.option("--theta1", type=str, default=None,
                     help="First coin angle (radians or '0.25pi')."),
        click.option("--theta2", type=str, default=None,
                     help="Second coin angle."),
        click.option("--period", type=int, default=None,
                     help="Schedule period n (coin 2 every n-th step)."),
        click.option("--split-step", "split", is_flag=True,
                     help="Use the split-step walk with theta1/theta2."),
    ]):
        f = opt(f)
    return f


def _run_options(f):
    for opt in reversed([
        click.option("--config", "config_path",
                     type=click.Path(exists=True, dir_okay=False),
                     default=None, help="JSON config; flags override it."),
        click.option("--delta", type=str, default=None,
                     help="Initial coin angle delta (default 0.25pi)."),
        click.option("--eta", type=str, default=None,
                     help="Initial coin phase eta (default 0)."),
        click.option("--profile", type=str, default=None,
                     help="Initial position profile: point or gaussian:W."),
        click.option("--steps", type=int, default=None, help="Walk steps."),
        click.option("--record", type=str, default=None,
                     help="Snapshot steps: comma list or 'all'."),
        click.option("--mass", type=float, default=None,
                     help="Quantile mass for the quantile radius (0.99)."),
        click.option("--eps", type=float, default=None,
                     help="Probability threshold for the support radius (1e-10)."),
        click.option("--seed", type=int, default=None,
                     help="Reserved; the dynamics is deterministic."),
    ]):
        f = opt(f)
    return f


def _output_options(f):
    for opt in reversed([
        click.option("--out", required=True,
                     type=click.Path(file_okay=False), help="Output directory."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                     default="csv", help="Output table format."),
    ]):
        f = opt(f)
    return f


def _run_walk(cfg: RunConfig):
    traj = evolve(cfg.initial, cfg.profile, cfg.schedule, cfg.steps,
                  record_at=cfg.record)
    dist_rows = []
    summary_rows = []
    for s in traj.steps:
        state = traj.snapshots[s]
        _check_norm(state)
        sl = _interior(state)
        dist = analysis.probability_distribution(state)
        x = dist.sites()[sl]
        p = dist.p[sl]
        if cfg.amplitudes:
            for xi, pi, dn, up in zip(x, p, state.down[sl], state.up[sl]):
                dist_rows.append((s, int(xi), float(pi), dn.real, dn.imag,
                                  up.real, up.imag))
        else:
            for xi, pi in zip(x, p):
                dist_rows.append((s, int(xi), float(pi)))
        summary_rows.append((
            s,
            analysis.mean_position(dist),
            analysis.standard_deviation(dist),
            analysis.quantile_radius(dist, cfg.mass),
            analysis.support_radius(dist, cfg.eps),
            analysis.entanglement_of_state(state),
            state.norm(),
        ))
    header = ["step", "x", "p"]
    if cfg.amplitudes:
        header += ["psi_down_re", "psi_down_im", "psi_up_re", "psi_up_im"]
    summary_header = ["step", "mean", "sigma", "quantile_radius",
                      "support_radius", "entropy", "norm"]
    return (header, dist_rows), (summary_header, summary_rows)


@cli.command()
@_schedule_options
@_run_options
@_output_options
@click.option("--amplitudes", is_flag=True,
              help="Also emit real/imag amplitude columns.")
def walk(theta1, theta2, period, split, config_path, delta, eta, profile,
         steps, record, mass, eps, seed, out, fmt, amplitudes):
    """Run one walk and emit distribution and summary tables."""
    started = time.monotonic()
    cfg = _build_run_config(config_path, theta1, theta2, period, split, delta,
                            eta, profile, steps, record, mass, eps, amplitudes)
    _ensure_out(out)
    (dh, drows), (sh, srows) = _run_walk(cfg)
    _write_table(out, "distribution", dh, drows, fmt)
    _write_table(out, "summary", sh, srows, fmt)
    _write_meta(out, "walk", cfg.echo(), started)


def _grid(spec_text, doc_grid):
    """Parse a 'start:stop:count' grid (angles accept 'pi' literals)."""
    if spec_text is None and doc_grid is None:
        return None
    if spec_text is not None:
        parts = str(spec_text).split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {spec_text!r} must be start:stop:count")
        start, stop = parse_angle(parts[0]), parse_angle(parts[1])
        try:
            count = int(parts[2])
        except ValueError:
            raise ConfigError(f"bad grid count in {spec_text!r}") from None
    else:
        start = parse_angle(doc_grid.get("start", 0.0))
        stop = parse_angle(doc_grid.get("stop", 0.0))
        count = int(doc_grid.get("count", 1))
    if count < 1:
        raise ConfigError(f"grid count must be >= 1, got {count}")
    return np.linspace(start, stop, count)


def _sweep_point(payload):
    """One sweep grid point; module-level so process pools can pickle it."""
    (kind, n, t1, t2, delta, eta, prof_kind, prof_width, t, mass, eps) = payload
    if kind == "homogeneous":
        sched = CoinSchedule.homogeneous(t1)
        bound = t * abs(math.cos(t1))
        continuum = abs(math.cos(t1))
    elif kind == "split_step":
        sched = CoinSchedule.split_step(t1, t2)
        bound = dispersion.spread_bound("two", t1, t2, t=t)
        continuum = abs(math.cos(t1) * math.cos(t2))
    else:
        sched = CoinSchedule.n_period(n, t1, t2)
        bound = dispersion.spread_bound("n", t1, t2, t=t, n=n)
        continuum = max(abs(v) for v in
                        dispersion.continuum_group_velocity("n", t1, t2, n=n))
    profile = PositionProfile(prof_kind, 0, prof_width)
    traj = evolve(InitialCoinState(delta, eta), profile, sched, t)
    state = traj.final
    _check_norm(state)
    dist = analysis.probability_distribution(state)
    return (
        t1, t2,
        analysis.standard_deviation(dist),
        analysis.mean_position(dist),
        analysis.quantile_radius(dist, mass),
        analysis.support_radius(dist, eps),
        bound,
        dispersion.max_group_speed(sched),
        continuum,
        analysis.entanglement_of_state(state),
    )


SWEEP_HEADER = ["theta1", "theta2", "sigma", "mean", "quantile_radius",
                "support_radius", "spread_bound", "max_group_speed",
                "continuum_speed", "entropy"]


def _run_grid(kind, n, theta1s, theta2s, cfg, threads):
    payloads = [
        (kind, n, float(a), float(b), cfg.initial.delta, cfg.initial.eta,
         cfg.profile.kind, cfg.profile.width, cfg.steps, cfg.mass, cfg.eps)
        for a in theta1s for b in theta2s
    ]
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(payloads) == 1:
        return [_sweep_point(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_sweep_point, payloads, chunksize=8))


@cli.command()
@_schedule_options
@_run_options
@_output_options
@click.option("--theta1-grid", type=str, default=None,
              help="theta1 grid as start:stop:count ('pi' literals ok).")
@click.option("--theta2-grid", type=str, default=None,
              help="theta2 grid as start:stop:count.")
@click.option("--threads", type=int, default=None,
              help="Worker processes (default: machine parallelism).")
def sweep(theta1, theta2, period, split, config_path, delta, eta, profile,
          steps, record, mass, eps, seed, out, fmt, theta1_grid, theta2_grid,
          threads):
    """Sweep coin angles over a grid; one row per grid point."""
    started = time.monotonic()
    doc = _load_config(config_path)
    cfg = _build_run_config(config_path, theta1, theta2, period, split, delta,
                            eta, profile, steps, record, mass, eps)
    g1 = _grid(theta1_grid, doc.get("theta1_grid"))
    g2 = _grid(theta2_grid, doc.get("theta2_grid"))
    if g1 is None:
        g1 = np.array([cfg.schedule.theta1])
    if g2 is None:
        g2 = np.array([cfg.schedule.theta2])
    if np.min(g1) < 0 or np.max(g1) > math.pi or np.min(g2) < 0 or np.max(g2) > math.pi:
        raise ConfigError("grid bounds must lie within [0, pi]")
    kind = cfg.schedule.kind
    if kind == "explicit":
        raise ConfigError("sweeps need a homogeneous, n-period or split-step "
                          "schedule")
    _ensure_out(out)
    rows = _run_grid(kind, cfg.schedule.n or 2, g1, g2, cfg, threads)
    _write_table(out, "sweep", SWEEP_HEADER, rows, fmt)
    echo = cfg.echo()
    echo["theta1_grid"] = [float(v) for v in g1]
    echo["theta2_grid"] = [float(v) for v in g2]
    _write_meta(out, "sweep", echo, started)


@cli.command()
@_schedule_options
@_output_options
@click.option("--k-count", type=int, default=dispersion.DEFAULT_K_POINTS,
              show_default=True, help="Momentum grid points on [-pi, pi].")
def dispersion_cmd(theta1, theta2, period, split, out, fmt, k_count):
    """Tabulate exact eigenphase bands, group velocities, and the
    continuum-limit dispersion for one schedule."""
    started = time.monotonic()
    sched = _build_schedule({}, theta1, theta2, period, split)
    if sched.kind == "explicit":
        raise ConfigError("dispersion needs a periodic schedule")
    if k_count < 2:
        raise ConfigError("k-count must be >= 2")
    k = np.linspace(-math.pi, math.pi, k_count)
    curve = dispersion.exact_dispersion(sched, k)
    if sched.kind == "homogeneous":
        ckind, t1, t2 = "one", sched.theta1, None
        v_cont = math.cos(sched.theta1)
    else:
        ckind, t1, t2 = "two", sched.theta1, sched.theta2
        v_cont = math.cos(sched.theta1) * math.cos(sched.theta2)
    minus, plus = dispersion.continuum_dispersion(ckind, k, t1, t2)
    rows = []
    for i in range(k_count):
        rows.append((
            float(k[i]), float(curve.omega_plus[i]), float(curve.omega_minus[i]),
            float(curve.v_plus[i]), float(curve.v_minus[i]),
            float(plus[i].real), float(minus[i].real), float(plus[i].imag),
            v_cont, bool(curve.gap_flag[i]),
        ))
    header = ["k", "omega_plus", "omega_minus", "v_plus", "v_minus",
              "omega_continuum_re_plus", "omega_continuum_re_minus",
              "omega_continuum_im", "v_continuum", "band_touching"]
    _ensure_out(out)
    _write_table(out, "dispersion", header, rows, fmt)
    _write_meta(out, "dispersion",
                {"schedule": sched.describe(), "k_count": k_count}, started)


# --------------------------------------------------------------------------
# figure presets

FIGURE_PAIRS = [(math.pi / 4, math.pi / 3), (math.pi / 3, math.pi / 12)]
PAIR_LABELS = ["pi4_pi3", "pi3_pi12"]


def _sigma_trace(sched, t, cfg):
    traj = evolve(cfg.initial, cfg.profile, sched, t, record_at=range(t + 1))
    sig = []
    dist_final = None
    for s in traj.steps:
        dist = analysis.probability_distribution(traj.snapshots[s])
        sig.append((s, analysis.standard_deviation(dist)))
        if s == t:
            dist_final = dist
    return sig, dist_final, traj


def _figure_distribution_rows(label, series, dist, state):
    sl = _interior(state)
    return [(label, series, int(x), float(p))
            for x, p in zip(dist.sites()[sl], dist.p[sl])]


def _default_cfg(t):
    return RunConfig(schedule=CoinSchedule.homogeneous(0.0),
                     initial=InitialCoinState(math.pi / 4, 0.0),
                     profile=PositionProfile("point", 0), steps=t)


def _fig_series(pair, kinds):
    t1, t2 = pair
    series = []
    for kind in kinds:
        if kind == "one_period_theta1":
            series.append((kind, CoinSchedule.homogeneous(t1)))
        elif kind == "one_period_theta2":
            series.append((kind, CoinSchedule.homogeneous(t2)))
        elif kind == "two_period":
            series.append((kind, CoinSchedule.two_period(t1, t2)))
        elif kind == "three_period":
            series.append((kind, CoinSchedule.n_period(3, t1, t2)))
        elif kind == "fifty_period":
            series.append((kind, CoinSchedule.n_period(50, t1, t2)))
    return series


def _figure_traces(fig, t, kinds, out, fmt):
    cfg = _default_cfg(t)
    dist_rows, sigma_rows = [], []
    for label, pair in zip(PAIR_LABELS, FIGURE_PAIRS):
        for series, sched in _fig_series(pair, kinds):
            sig, dist, traj = _sigma_trace(sched, t, cfg)
            dist_rows += _figure_distribution_rows(label, series, dist,
                                                   traj.final)
            sigma_rows += [(label, series, s, v) for s, v in sig]
    _write_table(out, f"figure{fig}_distribution",
                 ["pair", "series", "x", "p"], dist_rows, fmt)
    _write_table(out, f"figure{fig}_sigma",
                 ["pair", "series", "step", "sigma"], sigma_rows, fmt)


def _figure_surface(fig, name, kind, n, t, points, out, fmt, threads,
                    extra=()):
    cfg = _default_cfg(t)
    grid = np.linspace(0, math.pi / 2, points)
    rows = _run_grid(kind, n, grid, grid, cfg, threads)
    _write_table(out, f"figure{fig}_{name}", SWEEP_HEADER, rows, fmt)
    return rows


def _figure_1(t, out, fmt, threads):
    _figure_traces(1, t, ["one_period_theta1", "one_period_theta2",
                          "two_period"], out, fmt)


def _figure_2(t, out, fmt, threads):
    theta2 = math.pi / 4
    rows = []
    cfg = _default_cfg(t)
    sig2 = None
    for t1 in np.linspace(0, math.pi / 2, 51):
        _, dist, _ = _sigma_trace(CoinSchedule.two_period(t1, theta2), t, cfg)
        _, dist1, _ = _sigma_trace(CoinSchedule.homogeneous(t1), t, cfg)
        if sig2 is None:
            _, dist2, _ = _sigma_trace(CoinSchedule.homogeneous(theta2), t, cfg)
            sig2 = analysis.standard_deviation(dist2)
        s12 = analysis.standard_deviation(dist)
        s1 = analysis.standard_deviation(dist1)
        rows.append((float(t1), theta2, s12, s1, sig2, min(s1, sig2)))
    _write_table(out, "figure2_sigma_vs_theta1",
                 ["theta1", "theta2", "sigma_two_period",
                  "sigma_homog_theta1", "sigma_homog_theta2", "min_homog"],
                 rows, fmt)


def _figure_3(t, out, fmt, threads):
    _figure_surface(3, "sigma_surface", "n_period", 2, t, 51, out, fmt, threads)


def _figure_4(t, out, fmt, threads):
    rows = []
    for a in np.linspace(0, math.pi / 2, 51):
        for b in np.linspace(0, math.pi / 2, 51):
            exact = dispersion.max_group_speed(CoinSchedule.two_period(a, b))
            rows.append((float(a), float(b), math.cos(a) * math.cos(b), exact))
    _write_table(out, "figure4_group_velocity",
                 ["theta1", "theta2", "v_continuum", "v_exact"], rows, fmt)


def _figure_5(t, out, fmt, threads):
    _figure_traces(5, t, ["one_period_theta1", "one_period_theta2",
                          "three_period"], out, fmt)


def _figure_6(t, out, fmt, threads):
    _figure_surface(6, "sigma_surface", "n_period", 3, t, 51, out, fmt, threads)


def _figure_7(t, out, fmt, threads):
    cfg = _default_cfg(t)
    grid = np.linspace(0, math.pi / 2, 21)
    rows = _run_grid("n_period", 3, grid, grid, cfg, threads)
    table = [(r[0], r[1], r[5],
              dispersion.spread_bound("three", r[0], r[1], t=t),
              t * r[7]) for r in rows]
    _write_table(out, "figure7_spread",
                 ["theta1", "theta2", "support_radius", "spread_bound",
                  "exact_cone"], table, fmt)


def _figure_8(t, out, fmt, threads):
    t1, t2 = FIGURE_PAIRS[0]
    cfg = _default_cfg(t)
    dist_rows, sigma_rows, summary = [], [], []
    series = [("three_period", CoinSchedule.n_period(3, t1, t2), 3),
              ("four_period", CoinSchedule.n_period(4, t1, t2), 4),
              ("fifty_period", CoinSchedule.n_period(50, t1, t2), 50),
              ("one_period_theta1", CoinSchedule.homogeneous(t1), None),
              ("one_period_theta2", CoinSchedule.homogeneous(t2), None),
              ("two_period", CoinSchedule.two_period(t1, t2), 2)]
    for name, sched, n in series:
        sig, dist, traj = _sigma_trace(sched, t, cfg)
        dist_rows += _figure_distribution_rows(PAIR_LABELS[0], name, dist,
                                               traj.final)
        sigma_rows += [(PAIR_LABELS[0], name, s, v) for s, v in sig]
        if n is not None:
            bound = dispersion.spread_bound("n", t1, t2, t=t, n=n)
        else:
            theta = t1 if name.endswith("theta1") else t2
            bound = t * abs(math.cos(theta))
        summary.append((name, analysis.support_radius(dist), bound,
                        t * dispersion.max_group_speed(sched)))
    _write_table(out, "figure8_distribution", ["pair", "series", "x", "p"],
                 dist_rows, fmt)
    _write_table(out, "figure8_sigma", ["pair", "series", "step", "sigma"],
                 sigma_rows, fmt)
    _write_table(out, "figure8_summary",
                 ["series", "support_radius", "spread_bound", "exact_cone"],
                 summary, fmt)


def _figure_9(t, out, fmt, threads):
    t1, t2 = FIGURE_PAIRS[0]
    cfg = _default_cfg(t)
    rows = []
    for name, sched in _fig_series((t1, t2),
                                   ["one_period_theta1", "one_period_theta2",
                                    "two_period", "three_period",
                                    "fifty_period"]):
        traj = evolve(cfg.initial, cfg.profile, sched, t,
                      record_at=range(t + 1))
        trace = analysis.entropy_trace(traj)
        rows += [(PAIR_LABELS[0], name, int(s), float(v))
                 for s, v in zip(trace.steps, trace.entropy)]
    _write_table(out, "figure9_entropy", ["pair", "series", "step", "entropy"],
                 rows, fmt)


FIGURES = {
    1: (_figure_1, 200, "one- vs two-period distributions and sigma traces"),
    2: (_figure_2, 100, "two-period sigma versus theta1 at fixed theta2"),
    3: (_figure_3, 25, "two-period sigma surface"),
    4: (_figure_4, None, "two-period group-velocity surface"),
    5: (_figure_5, 200, "one- vs three-period distributions and sigma traces"),
    6: (_figure_6, 45, "three-period sigma surface"),
    7: (_figure_7, 100, "three-period spread surface with bound"),
    8: (_figure_8, 200, "n-period distributions, sigma, and bounds"),
    9: (_figure_9, 200, "entanglement entropy traces"),
}


@cli.command()
@click.argument("fig_id", type=click.IntRange(1, 9))
@_output_options
@click.option("--steps", type=int, default=None,
              help="Override the preset step count.")
@click.option("--threads", type=int, default=None,
              help="Worker processes for surface figures.")
def figure(fig_id, out, fmt, steps, threads):
    """Emit plot-ready data for preset figure FIG_ID (1-9).

    Where the source experiment left coin angles unspecified the presets
    use (theta1, theta2) = (pi/4, pi/3) and (pi/3, pi/12).
    """
    started = time.monotonic()
    builder, preset_t, desc = FIGURES[fig_id]
    t = steps if steps is not None else preset_t
    if t is not None and t < 0:
        raise ConfigError("steps must be >= 0")
    _ensure_out(out)
    builder(t, out, fmt, threads)
    _write_meta(out, f"figure{fig_id}",
                {"description": desc, "steps": t,
                 "preset_pairs": [list(p) for p in FIGURE_PAIRS]}, started)


# ---------------------------------------------------------------------------
# selfcheck

def _selfchecks():
    rng = np.random.default_rng(20260809)
    init = InitialCoinState(math.pi / 4, 0.0)
    point = PositionProfile("point", 0)

    def random_state(n=41):
        from .state import WalkerState
        down = rng.normal(size=n) + 1j * rng.normal(size=n)
        up = rng.normal(size=n) + 1j * rng.normal(size=n)
        down[0] = up[0] = down[-1] = up[-1] = 0
        norm = math.sqrt(float(np.sum(np.abs(down) ** 2 + np.abs(up) ** 2)))
        return WalkerState(-(n // 2), down / norm, up / norm)

    def check_norm():
        for sched in (CoinSchedule.homogeneous(math.pi / 4),
                      CoinSchedule.two_period(math.pi / 4, math.pi / 3),
                      CoinSchedule.split_step(math.pi / 3, math.pi / 12)):
            final = evolve(init, point, sched, 300).final
            if abs(final.norm() - 1.0) > 1e-12:
                return f"norm drift {abs(final.norm() - 1.0):.2e}"
        return None

    def check_half_shifts():
        from .state import apply_half_shift_minus, apply_half_shift_plus, apply_shift
        st = random_state()
        a = apply_half_shift_plus(apply_half_shift_minus(st))
        b = apply_shift(st)
        err = max(np.max(np.abs(a.down - b.down)), np.max(np.abs(a.up - b.up)))
        return None if err <= 1e-15 else f"S+ S- vs S error {err:.2e}"

    def check_parity():
        final = evolve(InitialCoinState(0.3, 0.7), point,
                       CoinSchedule.homogeneous(math.pi / 5), 7).final
        x = final.sites()
        odd = (np.abs(x - 7) % 2) == 1
        amp = np.abs(final.down[odd]).max(initial=0.0) \
            + np.abs(final.up[odd]).max(initial=0.0)
        return None if amp == 0.0 else f"parity leak {amp:.2e}"

    def check_two_period_explicit():
        a = evolve(init, point, CoinSchedule.two_period(0.6, 1.1), 40).final
        b = evolve(init, point,
                   CoinSchedule.explicit([0.6, 1.1] * 20), 40).final
        err = max(np.max(np.abs(a.down - b.down)), np.max(np.abs(a.up - b.up)))
        return None if err == 0.0 else f"explicit mismatch {err:.2e}"

    def check_split_equivalence():
        t = 6
        ss = evolve(init, point, CoinSchedule.split_step(0.7, 0.4), t).final
        tp = evolve(init, point, CoinSchedule.two_period(0.7, 0.4), 2 * t).final
        err = max(abs(ss.amplitudes_at(x)[c] - tp.amplitudes_at(2 * x)[c])
                  for x in range(-t, t + 1) for c in (0, 1))
        return None if err <= 1e-12 else f"split-step equivalence error {err:.2e}"

    def check_bloch_unitarity():
        for _ in range(200):
            kind = rng.integers(3)
            if kind == 0:
                sched = CoinSchedule.homogeneous(rng.uniform(0, math.pi))
            elif kind == 1:
                sched = CoinSchedule.n_period(int(rng.integers(2, 7)),
                                              rng.uniform(0, math.pi),
                                              rng.uniform(0, math.pi))
            else:
                sched = CoinSchedule.split_step(rng.uniform(0, math.pi),
                                                rng.uniform(0, math.pi))
            m = dispersion.bloch_matrix(sched, rng.uniform(-math.pi, math.pi)).m
            err = np.max(np.abs(m @ m.conj().T - np.eye(2)))
            if err > 1e-13:
                return f"bloch unitarity error {err:.2e}"
        return None

    def check_group_speed():
        for theta in np.linspace(0, math.pi / 2, 5):
            got = dispersion.max_group_speed(CoinSchedule.homogeneous(theta))
            if abs(got - abs(math.cos(theta))) > 1e-9:
                return f"homogeneous speed off by {abs(got - math.cos(theta)):.2e}"
        return None

    def check_recurrences():
        traj = evolve(init, point, CoinSchedule.homogeneous(math.pi / 4), 40,
                      record_at=range(41))
        r1 = dirac.recurrence_residual(traj, "one_period", theta=math.pi / 4)
        trajss = evolve(init, point, CoinSchedule.split_step(0.9, 0.3), 40,
                        record_at=range(41))
        r2 = dirac.recurrence_residual(trajss, "split_step", theta1=0.9,
                                       theta2=0.3)
        worst = max(r1.max_abs, r2.max_abs)
        return None if worst <= 1e-13 else f"recurrence residual {worst:.2e}"

    def check_entropy():
        final = evolve(init, point, CoinSchedule.homogeneous(0.0), 5).final
        e = analysis.entanglement_of_state(final)
        if abs(e - 1.0) > 1e-10:
            return f"maximal entanglement case off: {e}"
        for _ in range(20):
            e = analysis.entanglement_of_state(random_state())
            if not -1e-12 <= e <= 1.0 + 1e-12:
                return f"entropy out of range: {e}"
        return None

    def check_probability():
        final = evolve(init, point,
                       CoinSchedule.two_period(math.pi / 4, math.pi / 3),
                       200).final
        total = analysis.probability_distribution(final).total()
        return None if abs(total - 1.0) <= 1e-12 else f"sum(P) - 1 = {total - 1:.2e}"

    return [
        ("norm conservation (300 steps, 3 schedules)", check_norm),
        ("half-shift composition equals full shift", check_half_shifts),
        ("parity zeros are exact", check_parity),
        ("two-period equals explicit alternating schedule", check_two_period_explicit),
        ("split-step matches two-period on the doubled lattice", check_split_equivalence),
        ("momentum-space step unitarity (200 random)", check_bloch_unitarity),
        ("homogeneous light-cone speed equals |cos theta|", check_group_speed),
        ("exact step recurrences at rounding level", check_recurrences),
        ("entropy bounds and maximal case", check_entropy),
        ("probability normalization after 200 steps", check_probability),
    ]


@cli.command()
def selfcheck():
    """Run the fast invariant battery; exit 3 on any failure."""
    failures = 0
    for name, fn in _selfchecks():
        problem = fn()
        if problem is None:
            click.echo(f"ok   {name}")
        else:
            failures += 1
            click.echo(f"FAIL {name}: {problem}")
    if failures:
        raise NumericInvariantError(f"{failures} selfcheck(s) failed")
    click.echo("all selfchecks passed")


cli.add_command(dispersion_cmd, name="dispersion")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.Abort:
        sys.exit(2)
    except (ConfigError, ScheduleError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except NumericInvariantError as exc:
        click.echo(f"numeric invariant violated: {exc}", err=True)
        sys.exit(3)
    except WindowOverflowError as exc:
        click.echo(f"numeric invariant violated: {exc}", err=True)
        sys.exit(3)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(4)
    return 0


if __name__ == "__main__":
    main()
