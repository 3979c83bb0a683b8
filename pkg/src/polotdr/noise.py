"""Time-varying impairments: laser phase walk, receiver noise, drifting misalignment."""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseConfig:
    linewidth_hz: float = 75.0
    dt_s: float = 160e-6
    n_samples: int = 12_500
    snr_db: float = 30.0
    theta_jitter_rad_per_sqrt_s: float = 0.0

    def __post_init__(self):
        if not self.linewidth_hz >= 0:
            raise ValueError(f"linewidth_hz must be >= 0, got {self.linewidth_hz}")
        if not self.dt_s > 0:
            raise ValueError(f"dt_s must be > 0, got {self.dt_s}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ValueError(f"n_samples must be an integer >= 2, got {self.n_samples}")
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")
        if not self.theta_jitter_rad_per_sqrt_s >= 0:
            raise ValueError("theta_jitter_rad_per_sqrt_s must be >= 0")

    @property
    def noise_variance(self):
        """Per-entry E|W|^2 against a unit-amplitude signal."""
        return 10.0 ** (-self.snr_db / 10.0)


class LaserWalk:
    """Wiener phase walk stored on a grid ``oversample`` times finer than dt_s.

    Sample 0 sits at ``t = 0`` with phase exactly 0; the walk extends
    backwards far enough to be read at ``t - tau`` for every delay requested.
    """

    def __init__(self, fine_phases, dt_s, oversample, n_before):
        self.fine_phases = fine_phases
        self.dt_s = dt_s
        self.oversample = oversample
        self.n_before = n_before

    @property
    def phases(self):
        """Phase at each estimation instant t = 0, dt, 2dt, ..."""
        return self.fine_phases[self.n_before :: self.oversample]

    def phase_at(self, t, tau_s=0.0):
        t = np.asarray(t, dtype=float)
        pos = (t * self.dt_s - np.asarray(tau_s)) * (self.oversample / self.dt_s) + self.n_before
        if np.any(pos < 0) or np.any(pos > len(self.fine_phases) - 1):
            raise ValueError("requested time lies outside the stored walk")
        return np.interp(pos, np.arange(len(self.fine_phases)), self.fine_phases)

    def heterodyne(self, t, tau_s):
        """walk(t) - walk(t - tau)."""
        return self.phase_at(t) - self.phase_at(t, tau_s)


def laser_walk(linewidth_hz, dt_s, n_samples, rng, max_delay_s=0.0, oversample=16):
    fine_dt = dt_s / oversample
    n_before = int(math.ceil(max_delay_s / fine_dt)) + 1 if max_delay_s > 0 else 0
    n_fine = n_before + (n_samples - 1) * oversample + 1
    sigma = math.sqrt(2 * math.pi * linewidth_hz * fine_dt)
    steps = rng.standard_normal(n_fine - 1) * sigma
    walk = np.concatenate(([0.0], np.cumsum(steps)))
    walk -= walk[n_before]
    return LaserWalk(walk, dt_s, oversample, n_before)


def theta_trajectory(theta0, cfg, rng):
    n = cfg.n_samples
    step = cfg.theta_jitter_rad_per_sqrt_s * math.sqrt(cfg.dt_s)
    if step == 0:
        return np.full(n, float(theta0))
    incr = rng.standard_normal(n - 1) * step
    return float(theta0) + np.concatenate(([0.0], np.cumsum(incr)))


def receiver_noise(shape, cfg, rng):
    if math.isinf(cfg.snr_db) and cfg.snr_db > 0:
        return np.zeros(shape, dtype=complex)
    sigma = math.sqrt(cfg.noise_variance / 2)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * sigma


def observe_channel(h_true, seg, walk, t, cfg, rng):
    """What the receiver estimates for segment ``seg`` at sample(s) ``t``.

    ``h_true`` is ``(2, 2)`` or ``(T, 2, 2)`` matching ``t``.
    """
    h_true = np.asarray(h_true)
    if np.any(np.asarray(t) >= cfg.n_samples):
        raise ValueError("sample index beyond n_samples")
    if seg.tau_s == 0:
        rotated = h_true
    else:
        drift = walk.heterodyne(t, seg.tau_s)
        rotated = np.exp(1j * drift)[..., None, None] * h_true
    return rotated + receiver_noise(rotated.shape, cfg, rng)
