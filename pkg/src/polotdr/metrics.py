"""Temporal standard deviation of the estimated phase, per segment."""

import enum
from dataclasses import dataclass, replace

import numpy as np

from .estimators import PhaseTrace, Scheme


class DiffMode(str, enum.Enum):
    TEMPORAL = "temporal"
    SPATIAL = "spatial"
    NONE = "none"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown diff mode {value!r}; expected temporal, spatial or none") from None


@dataclass
class StdvProfile:
    scheme: Scheme
    per_segment_stdv: np.ndarray
    diff_mode: DiffMode
    unreliable_mask: np.ndarray
    z_m: np.ndarray | None = None

    def __len__(self):
        return len(self.per_segment_stdv)


def differential(trace, mode=DiffMode.TEMPORAL):
    mode = DiffMode.parse(mode)
    v, f = trace.values, trace.fading_flags
    if mode is DiffMode.NONE:
        return trace
    if mode is DiffMode.TEMPORAL:
        if v.shape[1] < 2:
            raise ValueError("temporal differencing needs at least 2 time samples")
        values = v[:, 1:] - v[:, :-1]
        flags = f[:, 1:] | f[:, :-1]
    else:
        if v.shape[0] < 2:
            raise ValueError("spatial differencing needs at least 2 segments")
        # first segment has no predecessor; it is kept as its own reference
        values = np.concatenate((v[:1], v[1:] - v[:-1]))
        flags = np.concatenate((f[:1], f[1:] | f[:-1]))
    return replace(trace, values=values, fading_flags=flags)


def temporal_stdv(trace, exclude_flagged=False):
    """Sample std (ddof=1) over time per segment, of the trace as given.

    With ``exclude_flagged`` the std is taken over unflagged samples only;
    segments left with fewer than two samples report 0 and are marked
    unreliable.
    """
    v, f = trace.values, trace.fading_flags
    if v.shape[1] < 2:
        raise ValueError("need at least 2 time samples for a standard deviation")
    unreliable = trace.unreliable
    if exclude_flagged:
        count = np.sum(~f, axis=1)
        std = np.zeros(len(v))
        ok = count >= 2
        if np.any(ok):
            std[ok] = np.nanstd(np.where(f[ok], np.nan, v[ok]), axis=1, ddof=1)
        unreliable = unreliable | ~ok
    else:
        std = np.std(v, axis=1, ddof=1)
    return StdvProfile(trace.scheme, std, DiffMode.NONE, np.asarray(unreliable), trace.z_m)


def stdv_profile(trace, diff_mode=DiffMode.TEMPORAL, exclude_flagged=False):
    """Difference the trace, then take the temporal std; the reported metric."""
    mode = DiffMode.parse(diff_mode)
    prof = temporal_stdv(differential(trace, mode), exclude_flagged)
    return replace(prof, diff_mode=mode, unreliable_mask=prof.unreliable_mask | trace.unreliable)


def aggregate_mean(profiles):
    profiles = list(profiles)
    if not profiles:
        raise ValueError("no profiles to aggregate")
    first = profiles[0]
    for p in profiles[1:]:
        if p.scheme != first.scheme or p.diff_mode != first.diff_mode:
            raise ValueError("cannot average profiles of different schemes or diff modes")
        if len(p) != len(first):
            raise ValueError("profiles differ in length")
    stack = np.stack([p.per_segment_stdv for p in profiles])
    mask = np.logical_or.reduce([p.unreliable_mask for p in profiles])
    return StdvProfile(first.scheme, stack.mean(axis=0), first.diff_mode, mask, first.z_m)
