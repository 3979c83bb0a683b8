"""Scenario runners: theta and Theta sweeps on one segment, distance profiles,
and Monte-Carlo averages over independent fibers."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .config import ScenarioConfig
from .estimators import Scheme, estimate_traces, observe_fiber
from .fiber import FiberRealization, SegmentParams, attenuation, backscatter_matrix, round_trip_delay, sample_fiber
from .metrics import aggregate_mean, stdv_profile
from .noise import laser_walk, theta_trajectory
from .seeding import split_seeds, stream

LOW_BACKSCATTER_PERCENTILE = 10.0


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def where(self, **match):
        idx = [self.columns.index(k) for k in match]
        vals = list(match.values())
        return Table(self.columns, [r for r in self.rows if all(r[i] == v for i, v in zip(idx, vals))])


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    tables: dict
    profiles: dict = field(default_factory=dict)
    realization: FiberRealization | None = None
    notes: list = field(default_factory=list)


@dataclass
class FiberRun:
    run_index: int
    realization: FiberRealization
    theta0: float
    profiles: dict


# --- single-segment sweeps -------------------------------------------------

def sweep_segment(cfg, theta_cap, beta, gamma):
    """Unit-reflectivity segment at ``cfg.segment_z_m``."""
    z = cfg.segment_z_m
    return SegmentParams(
        theta_cap=float(theta_cap),
        beta=float(beta),
        gamma=float(gamma),
        attenuation=float(attenuation(z, cfg.fiber.alpha_db_per_km)),
        phasor=1.0 + 0j,
        z_m=float(z),
        tau_s=float(round_trip_delay(z, cfg.fiber.group_index)),
    )


def segment_stdv(cfg, seg, theta0, schemes=None):
    """StDv per scheme for one segment at misalignment ``theta0``.

    Laser, receiver noise and theta jitter come from run 0 of
    ``cfg.master_seed`` on every call, so sweeps use common random numbers.
    """
    schemes = schemes or cfg.schemes
    seeds = split_seeds(cfg.master_seed, 0)
    walk = laser_walk(
        cfg.noise.linewidth_hz, cfg.noise.dt_s, cfg.noise.n_samples, stream(seeds.laser), max_delay_s=seg.tau_s
    )
    thetas = theta_trajectory(theta0, cfg.noise, stream(seeds.theta, 1))
    real = FiberRealization.from_segments(cfg.fiber, [seg], seed=seeds.fiber)
    traces = estimate_traces(real, walk, thetas, cfg.noise, schemes, seeds.noise, cfg.simo_column)
    return {
        s: float(stdv_profile(traces[s], cfg.diff_mode, cfg.exclude_flagged).per_segment_stdv[0])
        for s in schemes
    }


def column_sum(seg, theta_mis, column=0):
    """Noiseless h_xx + h_yx (or the y-launch column) of H R(theta)."""
    h = backscatter_matrix(seg, theta_mis)
    return h[..., 0, column] + h[..., 1, column]


def _local_minima(y):
    y = np.asarray(y)
    return [i for i in range(1, len(y) - 1) if y[i] < y[i - 1] and y[i] <= y[i + 1]]


def _local_maxima(y):
    y = np.asarray(y)
    return [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] >= y[i + 1]]


def _scan_axis(n, lo, hi):
    # open interval, avoids the degenerate endpoints
    return lo + (hi - lo) * (np.arange(n) + 0.5) / n


def scan_theta_mis_preset(cfg, n=16):
    """(Theta, beta, gamma) whose SIMO column sum comes closest to zero on the theta grid."""
    grid = np.asarray(cfg.sweep_grid)
    tc, b, g = (a.ravel() for a in np.meshgrid(
        _scan_axis(n, 0, np.pi / 2), _scan_axis(n, -np.pi, np.pi), _scan_axis(n, -np.pi, np.pi), indexing="ij"
    ))
    thetas = np.broadcast_to(grid, (len(tc), len(grid)))
    depth = np.abs(column_sum(SegmentParams(tc, b, g), thetas, cfg.simo_column)).min(axis=1)
    k = int(np.argmin(depth))
    return (float(tc[k]), float(b[k]), float(g[k])), float(depth[k])


def scan_theta_cap_preset(cfg, n=36):
    """(beta, gamma) giving the deepest SIMO fade over the Theta grid, restricted
    to candidates where every interior minimum of |sum| sits within one grid
    step of a minimum of |Re(sum)|."""
    grid = np.asarray(cfg.sweep_grid)
    b, g = (a.ravel() for a in np.meshgrid(_scan_axis(n, -np.pi, np.pi), _scan_axis(n, -np.pi, np.pi), indexing="ij"))
    shape = (len(b), len(grid))
    seg = SegmentParams(np.broadcast_to(grid, shape), np.broadcast_to(b[:, None], shape), np.broadcast_to(g[:, None], shape))
    sums = column_sum(seg, np.full(shape, cfg.theta_mis), cfg.simo_column)
    best, best_depth = None, np.inf
    for k, s in enumerate(sums):
        mag = np.abs(s)
        mins = _local_minima(mag)
        if not mins:
            continue
        re_mins = _local_minima(np.abs(s.real))
        if not all(any(abs(m - r) <= 1 for r in re_mins) for m in mins):
            continue
        depth = mag.min() / mag.max()
        if depth < best_depth:
            best, best_depth = (float(b[k]), float(g[k])), float(depth)
    if best is None:
        raise RuntimeError("no Theta-sweep preset found on the scan grid")
    return best, best_depth


def run_theta_mis_sweep(cfg):
    notes = []
    if cfg.has_preset:
        tc, b, g = cfg.preset_theta_cap, cfg.preset_beta, cfg.preset_gamma
    else:
        (tc, b, g), depth = scan_theta_mis_preset(cfg)
        notes.append(f"preset scanned: min |h_xx + h_yx| over theta grid = {depth!r}")
        cfg = replace(cfg, preset_theta_cap=tc, preset_beta=b, preset_gamma=g)
    seg = sweep_segment(cfg, tc, b, g)
    table = Table(("theta_rad", "scheme", "stdv_rad"))
    for theta in cfg.sweep_grid:
        st = segment_stdv(cfg, seg, theta)
        for s in cfg.schemes:
            table.rows.append((float(theta), s.value, st[s]))
    return ScenarioResult(cfg, {"theta_sweep": table}, notes=notes)


def run_theta_cap_sweep(cfg):
    notes = []
    if cfg.preset_beta is not None and cfg.preset_gamma is not None:
        b, g = cfg.preset_beta, cfg.preset_gamma
    else:
        (b, g), depth = scan_theta_cap_preset(cfg)
        notes.append(f"preset scanned: min/max |h_xx + h_yx| over Theta grid = {depth!r}")
    # Theta is the swept quantity; the preset field records the grid start
    cfg = replace(cfg, preset_theta_cap=float(cfg.sweep_grid[0]), preset_beta=b, preset_gamma=g)
    table = Table(("theta_cap_rad", "re_sum", "im_sum", "stdv_simo_rad"))
    for tc in cfg.sweep_grid:
        seg = sweep_segment(cfg, tc, b, g)
        s = complex(column_sum(seg, cfg.theta_mis, cfg.simo_column))
        st = segment_stdv(cfg, seg, cfg.theta_mis, schemes=(Scheme.SIMO,))
        table.rows.append((float(tc), s.real, s.imag, st[Scheme.SIMO]))
    return ScenarioResult(cfg, {"theta_cap_sweep": table}, notes=notes)


# --- whole fibers ------------------------------------------------------------

def _fiber_setup(cfg, run_index):
    seeds = split_seeds(cfg.master_seed, run_index)
    real = sample_fiber(cfg.fiber, seeds.fiber)
    theta0 = float(stream(seeds.theta, 0).uniform(-np.pi, np.pi))
    thetas = theta_trajectory(theta0, cfg.noise, stream(seeds.theta, 1))
    walk = laser_walk(
        cfg.noise.linewidth_hz,
        cfg.noise.dt_s,
        cfg.noise.n_samples,
        stream(seeds.laser),
        max_delay_s=float(real.tau_s.max()),
    )
    return seeds, real, theta0, thetas, walk


def run_fiber(cfg, run_index):
    seeds, real, theta0, thetas, walk = _fiber_setup(cfg, run_index)
    traces = estimate_traces(real, walk, thetas, cfg.noise, cfg.schemes, seeds.noise, cfg.simo_column)
    profiles = {s: stdv_profile(traces[s], cfg.diff_mode, cfg.exclude_flagged) for s in cfg.schemes}
    return FiberRun(run_index, real, theta0, profiles)


def observe_run(cfg, run_index=0):
    """The noisy ``(N, T, 2, 2)`` channel estimates behind ``run_fiber(cfg, run_index)``."""
    seeds, real, _, thetas, walk = _fiber_setup(cfg, run_index)
    return real, observe_fiber(real, walk, thetas, cfg.noise, seeds.noise)


def _run_fiber_args(args):
    return run_fiber(*args)


def run_fibers(cfg, n_fibers):
    jobs = [(cfg, r) for r in range(n_fibers)]
    if cfg.workers > 1 and n_fibers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map yields in submission order whatever the completion order
            return list(pool.map(_run_fiber_args, jobs))
    return [run_fiber(*job) for job in jobs]


def low_backscatter_mask(realization, percentile=LOW_BACKSCATTER_PERCENTILE):
    amp = np.abs(realization.attenuation * realization.phasor)
    return amp < np.percentile(amp, percentile)


def profile_table(profiles, z_m, value_name="stdv_rad"):
    table = Table(("segment", "z_m", "scheme", value_name, "unreliable"))
    for s, prof in profiles.items():
        for i, (z, v, u) in enumerate(zip(z_m, prof.per_segment_stdv, prof.unreliable_mask)):
            table.rows.append((i, float(z), s.value, float(v), int(bool(u))))
    return table


def run_distance_profile(cfg):
    run = run_fiber(cfg, 0)
    notes = [f"run 0 seeds: {split_seeds(cfg.master_seed, 0)._asdict()}", f"theta0 = {run.theta0!r}"]
    table = profile_table(run.profiles, run.realization.z_m)
    return ScenarioResult(cfg, {"profile": table}, profiles=run.profiles, realization=run.realization, notes=notes)


def run_monte_carlo(cfg):
    runs = run_fibers(cfg, cfg.n_fibers)
    means = {s: aggregate_mean([r.profiles[s] for r in runs]) for s in cfg.schemes}
    notes = [f"run {r.run_index} seeds: {split_seeds(cfg.master_seed, r.run_index)._asdict()} theta0 = {r.theta0!r}"
             for r in runs]
    table = profile_table(means, runs[0].realization.z_m, "mean_stdv_rad")
    return ScenarioResult(cfg, {"monte_carlo": table}, profiles=means, realization=runs[0].realization, notes=notes)


RUNNERS = {
    "theta_mis": run_theta_mis_sweep,
    "theta_cap": run_theta_cap_sweep,
    "distance_profile": run_distance_profile,
    "monte_carlo": run_monte_carlo,
}


def run_scenario(cfg):
    return RUNNERS[cfg.sweep](cfg)
