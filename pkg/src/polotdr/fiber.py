"""Random fiber realizations and per-segment round-trip Jones matrices."""

from dataclasses import dataclass, field

import numpy as np

from . import jones
from .seeding import stream

C_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class FiberSpec:
    length_m: float
    segment_length_m: float = 10.0
    alpha_db_per_km: float = 0.2
    scatterers_per_segment: int = 20
    group_index: float = 1.468

    def __post_init__(self):
        if not self.length_m > 0:
            raise ValueError(f"length_m must be > 0, got {self.length_m}")
        if not self.segment_length_m > 0:
            raise ValueError(f"segment_length_m must be > 0, got {self.segment_length_m}")
        if self.length_m < self.segment_length_m:
            raise ValueError("length_m must be >= segment_length_m")
        if not self.alpha_db_per_km >= 0:
            raise ValueError(f"alpha_db_per_km must be >= 0, got {self.alpha_db_per_km}")
        if int(self.scatterers_per_segment) != self.scatterers_per_segment or self.scatterers_per_segment < 1:
            raise ValueError("scatterers_per_segment must be an integer >= 1")
        if not self.group_index > 1:
            raise ValueError(f"group_index must be > 1, got {self.group_index}")

    @property
    def n_segments(self):
        # tolerate float noise such as 25000 / 25 -> 999.9999
        return int(np.floor(self.length_m / self.segment_length_m + 1e-9))

    def positions(self):
        """Segment centers in meters."""
        return (np.arange(self.n_segments) + 0.5) * self.segment_length_m


@dataclass(frozen=True)
class SegmentParams:
    theta_cap: float
    beta: float
    gamma: float
    attenuation: float = 1.0
    phasor: complex = 1.0 + 0j
    z_m: float = 0.0
    tau_s: float = 0.0


@dataclass(frozen=True, eq=False)
class FiberRealization:
    """Struct-of-arrays view of N segments.

    Attribute names mirror :class:`SegmentParams`, so functions written for a
    single segment broadcast over a whole realization.
    """

    spec: FiberSpec
    seed: int
    theta_cap: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    attenuation: np.ndarray
    phasor: np.ndarray
    z_m: np.ndarray
    tau_s: np.ndarray
    segments: list = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("theta_cap", "beta", "gamma", "attenuation", "phasor", "z_m", "tau_s"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        segs = [
            SegmentParams(
                float(self.theta_cap[i]),
                float(self.beta[i]),
                float(self.gamma[i]),
                float(self.attenuation[i]),
                complex(self.phasor[i]),
                float(self.z_m[i]),
                float(self.tau_s[i]),
            )
            for i in range(len(self.z_m))
        ]
        object.__setattr__(self, "segments", segs)

    def __len__(self):
        return len(self.z_m)

    def subset(self, index):
        idx = np.atleast_1d(index)
        return FiberRealization(
            self.spec,
            self.seed,
            self.theta_cap[idx],
            self.beta[idx],
            self.gamma[idx],
            self.attenuation[idx],
            self.phasor[idx],
            self.z_m[idx],
            self.tau_s[idx],
        )

    @classmethod
    def from_segments(cls, spec, segments, seed=0):
        cols = {
            name: np.array([getattr(s, name) for s in segments])
            for name in ("theta_cap", "beta", "gamma", "attenuation", "z_m", "tau_s")
        }
        phasor = np.array([complex(s.phasor) for s in segments], dtype=complex)
        return cls(spec, int(seed), phasor=phasor, **cols)

    def __eq__(self, other):
        if not isinstance(other, FiberRealization):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.seed == other.seed
            and all(
                np.array_equal(getattr(self, n), getattr(other, n))
                for n in ("theta_cap", "beta", "gamma", "attenuation", "phasor", "z_m", "tau_s")
            )
        )


def attenuation(z_m, alpha_db_per_km):
    """Round-trip field amplitude after travelling to ``z_m`` and back."""
    return 10.0 ** (-alpha_db_per_km * (2.0 * np.asarray(z_m) / 1000.0) / 20.0)


def round_trip_delay(z_m, group_index=1.468):
    return 2.0 * np.asarray(z_m) * group_index / C_LIGHT


def theta_cap_from_uniform(xi):
    return np.arcsin(np.sqrt(xi))


def phasor_from_scatterers(amplitudes, phases):
    amplitudes = np.asarray(amplitudes, dtype=float)
    phases = np.asarray(phases, dtype=float)
    return np.sum(amplitudes * np.exp(1j * phases), axis=-1) / np.sqrt(amplitudes.shape[-1])


def sample_phasor(k, rng):
    """Normalized sum of ``k`` Rayleigh-amplitude, uniform-phase scatterers.

    Amplitudes have E[a^2] = 1, so E[|p|^2] = 1 for any ``k``.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"scatterer count must be an integer >= 1, got {k}")
    k = int(k)
    amps = rng.rayleigh(scale=1 / np.sqrt(2), size=k)
    phases = rng.uniform(-np.pi, np.pi, size=k)
    return complex(phasor_from_scatterers(amps, phases))


def _draw_segment(seed, index, k):
    rng = stream(seed, index)
    xi, beta, gamma = rng.random(), rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi)
    return theta_cap_from_uniform(xi), beta, gamma, sample_phasor(k, rng)


def sample_fiber(spec, seed):
    n = spec.n_segments
    z = spec.positions()
    draws = [_draw_segment(seed, i, spec.scatterers_per_segment) for i in range(n)]
    theta_cap, beta, gamma, phasor = (np.array(col) for col in zip(*draws))
    return FiberRealization(
        spec=spec,
        seed=int(seed),
        theta_cap=theta_cap,
        beta=beta,
        gamma=gamma,
        attenuation=attenuation(z, spec.alpha_db_per_km),
        phasor=phasor.astype(complex),
        z_m=z,
        tau_s=round_trip_delay(z, spec.group_index),
    )


def forward_unitary(theta_cap, beta, gamma):
    return jones.retarder(beta) @ jones.rotation(theta_cap) @ jones.retarder(gamma)


def backscatter_matrix(seg, theta_mis=0.0):
    """A p U^T M U R(theta_mis) for a segment or a whole realization.

    ``theta_mis`` broadcasts against the segment axis; pass shape ``(N, T)``
    with a realization of N segments to get ``(N, T, 2, 2)``.
    """
    seg_shape = np.broadcast_shapes(
        *(np.shape(getattr(seg, n)) for n in ("theta_cap", "beta", "gamma", "attenuation", "phasor"))
    )
    u = forward_unitary(*(np.broadcast_to(getattr(seg, n), seg_shape) for n in ("theta_cap", "beta", "gamma")))
    core = jones.transpose(u) @ jones.mirror() @ u
    amp = np.broadcast_to(np.asarray(seg.attenuation) * np.asarray(seg.phasor), seg_shape)
    theta_mis = np.asarray(theta_mis, dtype=float)
    if theta_mis.ndim > len(seg_shape):
        core = core[..., None, :, :]
        amp = amp[..., None]
    return jones.scale(core, amp) @ jones.rotation(theta_mis)


def expanded_matrix(seg):
    """Hand expansion of A p U^T M U (no misalignment), entry by entry.

    Independent of the matrix products in :func:`backscatter_matrix`.
    """
    tc, b, g = (np.asarray(x, dtype=float) for x in (seg.theta_cap, seg.beta, seg.gamma))
    c2b, s2b = np.cos(2 * b), np.sin(2 * b)
    c2t, s2t = np.cos(2 * tc), np.sin(2 * tc)
    amp = np.asarray(seg.attenuation) * np.asarray(seg.phasor)
    out = np.empty(np.shape(amp) + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(2j * g) * (c2b * c2t + 1j * s2b)
    out[..., 0, 1] = -c2b * s2t
    out[..., 1, 0] = -c2b * s2t
    out[..., 1, 1] = np.exp(-2j * g) * (-c2b * c2t + 1j * s2b)
    return out * amp[..., None, None]


def closed_form_matrix(seg):
    """The published expanded backscatter matrix, evaluated literally.

    Its determinant is +A^2 p^2, so it is A p U^T U rather than the mirrored
    product; it equals ``j * expanded_matrix`` with beta shifted by -pi/4.
    """
    tc, b, g = (np.asarray(x, dtype=float) for x in (seg.theta_cap, seg.beta, seg.gamma))
    c2b, s2b = np.cos(2 * b), np.sin(2 * b)
    c2t, s2t = np.cos(2 * tc), np.sin(2 * tc)
    amp = np.asarray(seg.attenuation) * np.asarray(seg.phasor)
    out = np.empty(np.shape(amp) + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(2j * g) * (c2b + 1j * s2b * c2t)
    out[..., 0, 1] = -1j * s2b * s2t
    out[..., 1, 0] = -1j * s2b * s2t
    out[..., 1, 1] = np.exp(-2j * g) * (c2b - 1j * s2b * c2t)
    return out * amp[..., None, None]
