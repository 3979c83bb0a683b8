"""Phase estimators for the three probing schemes, unwrapping, trace assembly."""

import enum
from dataclasses import dataclass

import numpy as np

from . import jones
from .fiber import backscatter_matrix
from .noise import observe_channel
from .seeding import stream

DEFAULT_FLOOR = 1e-3
UNRELIABLE_FRACTION = 0.5


class Scheme(str, enum.Enum):
    SISO = "SISO"
    SIMO = "SIMO"
    MIMO = "MIMO"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise ValueError(f"unknown probing scheme {value!r}; expected SISO, SIMO or MIMO") from None

    @property
    def modulus(self):
        # the half-angle in the MIMO estimate leaves a pi ambiguity
        return np.pi if self is Scheme.MIMO else 2 * np.pi

    @property
    def required_entries(self):
        return {
            Scheme.SISO: ("h_xx",),
            Scheme.SIMO: ("h_xx", "h_yx"),
            Scheme.MIMO: ("h_xx", "h_xy", "h_yx", "h_yy"),
        }[self]


def phase_mimo(h, floor=DEFAULT_FLOOR):
    """Half the angle of det H, in (-pi/2, pi/2]. Returns ``(phase, flagged)``.

    ``floor`` is an amplitude scale; the determinant is compared with its square.
    """
    det = jones.determinant(h)
    return 0.5 * np.angle(det), np.abs(det) <= np.asarray(floor) ** 2


def phase_simo(h_xx, h_yx, floor=DEFAULT_FLOOR):
    total = np.asarray(h_xx) + np.asarray(h_yx)
    return np.arctan2(total.imag, total.real), np.abs(total) <= floor


def phase_siso(h_xx, floor=DEFAULT_FLOOR):
    h_xx = np.asarray(h_xx, dtype=complex)
    return np.arctan2(h_xx.imag, h_xx.real), np.abs(h_xx) <= floor


def simo_closed_form(seg, floor=DEFAULT_FLOOR):
    """Published closed form of the SIMO phase, evaluated as written."""
    tc, b, g = (np.asarray(x, dtype=float) for x in (seg.theta_cap, seg.beta, seg.gamma))
    e = np.exp(2j * g)
    inner = e * np.cos(2 * b) - 1j * np.sin(2 * b) * (e * np.cos(2 * tc) + np.sin(2 * tc))
    operand = np.asarray(seg.phasor) * inner
    return np.angle(operand), np.abs(operand) <= floor


def simo_expanded(seg, floor=DEFAULT_FLOOR):
    """SIMO phase from the entry-wise expansion of the mirrored round trip."""
    tc, b, g = (np.asarray(x, dtype=float) for x in (seg.theta_cap, seg.beta, seg.gamma))
    c2b = np.cos(2 * b)
    inner = np.exp(2j * g) * (c2b * np.cos(2 * tc) + 1j * np.sin(2 * b)) - c2b * np.sin(2 * tc)
    operand = np.asarray(seg.phasor) * inner
    return np.angle(operand), np.abs(operand) <= floor


def estimate(h, scheme, floor=DEFAULT_FLOOR, simo_column=0):
    """Apply one scheme's estimator to matrices of shape ``(..., 2, 2)``."""
    scheme = Scheme.parse(scheme)
    h = np.asarray(h)
    if scheme is Scheme.MIMO:
        return phase_mimo(h, floor)
    if scheme is Scheme.SIMO:
        return phase_simo(h[..., 0, simo_column], h[..., 1, simo_column], floor)
    return phase_siso(h[..., 0, 0], floor)


def unwrap(values, modulus=2 * np.pi, axis=-1):
    """Remove jumps so each consecutive step lies in (-modulus/2, modulus/2].

    The first element along ``axis`` is kept as is.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[axis] == 0:
        raise ValueError("cannot unwrap an empty series")
    d = np.diff(values, axis=axis)
    correction = -modulus * np.ceil(d / modulus - 0.5)
    zero = np.zeros_like(np.take(values, [0], axis=axis))
    return values + np.cumsum(np.concatenate((zero, correction), axis=axis), axis=axis)


@dataclass
class PhaseTrace:
    scheme: Scheme
    values: np.ndarray  # [segment, time], radians
    dt_s: float
    fading_flags: np.ndarray
    z_m: np.ndarray | None = None

    @property
    def unreliable(self):
        return self.fading_flags.mean(axis=1) > UNRELIABLE_FRACTION

    @property
    def shape(self):
        return self.values.shape


def trace_from_observed(observed, scheme, dt_s, floors=DEFAULT_FLOOR, z_m=None, simo_column=0):
    """Estimate, then unwrap along time. ``observed`` is ``(N, T, 2, 2)``."""
    scheme = Scheme.parse(scheme)
    floors = np.asarray(floors, dtype=float)
    if floors.ndim == 1:
        floors = floors[:, None]
    phase, flags = estimate(observed, scheme, floors, simo_column)
    return PhaseTrace(scheme, unwrap(phase, scheme.modulus, axis=1), dt_s, flags, z_m)


def observed_segments(realization, walk, thetas, cfg, noise_seed):
    """Yield ``(index, observed)`` with ``observed`` of shape ``(T, 2, 2)``.

    ``thetas`` is one trajectory ``(T,)`` shared by all segments, or ``(N, T)``.
    Segment i draws its receiver noise from ``stream(noise_seed, i)``.
    """
    thetas = np.asarray(thetas, dtype=float)
    t = np.arange(cfg.n_samples)
    for i, seg in enumerate(realization.segments):
        theta_i = thetas[i] if thetas.ndim == 2 else thetas
        h_true = backscatter_matrix(seg, theta_i)
        yield i, observe_channel(h_true, seg, walk, t, cfg, stream(noise_seed, i))


def observe_fiber(realization, walk, thetas, cfg, noise_seed):
    out = np.empty((len(realization), cfg.n_samples, 2, 2), dtype=complex)
    for i, obs in observed_segments(realization, walk, thetas, cfg, noise_seed):
        out[i] = obs
    return out


def estimate_traces(realization, walk, thetas, cfg, schemes, noise_seed, simo_column=0, floor=DEFAULT_FLOOR):
    """Phase traces for several schemes from one shared set of observations."""
    schemes = [Scheme.parse(s) for s in schemes]
    n, n_t = len(realization), cfg.n_samples
    floors = floor * np.asarray(realization.attenuation)
    values = {s: np.empty((n, n_t)) for s in schemes}
    flags = {s: np.empty((n, n_t), dtype=bool) for s in schemes}
    for i, obs in observed_segments(realization, walk, thetas, cfg, noise_seed):
        for s in schemes:
            values[s][i], flags[s][i] = estimate(obs, s, floors[i], simo_column)
    return {
        s: PhaseTrace(s, unwrap(values[s], s.modulus, axis=1), cfg.dt_s, flags[s], realization.z_m)
        for s in schemes
    }


def estimate_trace(realization, walk, thetas, cfg, scheme, noise_seed, simo_column=0):
    return estimate_traces(realization, walk, thetas, cfg, [scheme], noise_seed, simo_column)[Scheme.parse(scheme)]
