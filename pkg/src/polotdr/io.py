"""CSV schemas for realizations, traces, profiles, tables and measured records.

Floats are written with ``repr`` so every value reads back bit-exactly.
Complex values are split into ``<name>_re`` / ``<name>_im`` columns.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .estimators import Scheme, trace_from_observed
from .fiber import FiberRealization
from .metrics import DiffMode, StdvProfile, stdv_profile

FIBER_COLUMNS = ("index", "z_m", "theta_cap", "beta", "gamma", "attenuation", "phasor_re", "phasor_im", "tau_s")
TRACE_COLUMNS = ("segment", "time", "value", "flag")
PROFILE_COLUMNS = ("segment", "z_m", "stdv_rad", "unreliable")
ENTRIES = {"h_xx": (0, 0), "h_xy": (0, 1), "h_yx": (1, 0), "h_yy": (1, 1)}


class DataError(ValueError):
    pass


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_rows(path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def write_table(path, table):
    write_rows(path, table.columns, table.rows)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        rows = [r for r in reader if r]
    return header, rows


def write_realization(path, real):
    rows = (
        (i, real.z_m[i], real.theta_cap[i], real.beta[i], real.gamma[i], real.attenuation[i],
         real.phasor[i].real, real.phasor[i].imag, real.tau_s[i])
        for i in range(len(real))
    )
    write_rows(path, FIBER_COLUMNS, rows)


def read_realization(path, spec, seed=0):
    header, rows = read_rows(path)
    if tuple(header or ()) != FIBER_COLUMNS:
        raise DataError(f"{path}: expected header {','.join(FIBER_COLUMNS)}")
    a = np.array(rows, dtype=float)
    return FiberRealization(
        spec, int(seed),
        theta_cap=a[:, 2], beta=a[:, 3], gamma=a[:, 4], attenuation=a[:, 5],
        phasor=a[:, 6] + 1j * a[:, 7], z_m=a[:, 1], tau_s=a[:, 8],
    )


def write_trace(path, trace):
    n, t = trace.values.shape
    seg, tim = np.divmod(np.arange(n * t), t)
    rows = zip(seg, tim, trace.values.ravel(), trace.fading_flags.ravel())
    write_rows(path, TRACE_COLUMNS, rows)


def write_profile(path, profile):
    z = profile.z_m if profile.z_m is not None else np.full(len(profile), np.nan)
    rows = zip(range(len(profile)), z, profile.per_segment_stdv, profile.unreliable_mask)
    write_rows(path, PROFILE_COLUMNS, rows)


def read_profile(path, scheme, diff_mode=DiffMode.TEMPORAL):
    header, rows = read_rows(path)
    if tuple(header or ()) != PROFILE_COLUMNS:
        raise DataError(f"{path}: expected header {','.join(PROFILE_COLUMNS)}")
    a = np.array(rows, dtype=float)
    return StdvProfile(Scheme.parse(scheme), a[:, 2], DiffMode.parse(diff_mode), a[:, 3].astype(bool), a[:, 1])


# --- measured records ----------------------------------------------------------

@dataclass
class MeasuredData:
    """Dense ``[segment, time, 2, 2]`` channel estimates; absent entries are NaN."""

    values: np.ndarray
    present: tuple

    @property
    def n_segments(self):
        return self.values.shape[0]

    @property
    def n_samples(self):
        return self.values.shape[1]

    def supports(self, scheme, simo_column=0):
        return set(required_entries(scheme, simo_column)) <= set(self.present)

    def compatible_schemes(self, simo_column=0):
        return tuple(s for s in Scheme if self.supports(s, simo_column))

    def require(self, scheme, simo_column=0):
        needed = required_entries(scheme, simo_column)
        if not set(needed) <= set(self.present):
            missing = sorted(set(needed) - set(self.present))
            raise DataError(
                f"scheme {Scheme.parse(scheme).value} needs {', '.join(needed)}; "
                f"file lacks {', '.join(missing)}"
            )

    def amplitude_scale(self):
        """Per-segment RMS column norm, the A|p| of a simulated segment."""
        cols = [self.values[:, :, i, j] for i, j in (ENTRIES[e] for e in self.present)]
        power = np.mean([np.mean(np.abs(c) ** 2, axis=1) for c in cols], axis=0)
        return np.sqrt(2 * power)


def required_entries(scheme, simo_column=0):
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.SIMO and simo_column == 1:
        return ("h_xy", "h_yy")
    return scheme.required_entries


def measured_columns(entries):
    cols = ["segment", "time"]
    for e in entries:
        cols += [f"{e}_re", f"{e}_im"]
    return tuple(cols)


def write_measured(path, observed, entries=tuple(ENTRIES)):
    """Export ``(N, T, 2, 2)`` channel estimates as measured records."""
    for e in entries:
        if e not in ENTRIES:
            raise ValueError(f"unknown coefficient {e!r}")
    observed = np.asarray(observed)
    n, t = observed.shape[:2]

    def rows():
        for i in range(n):
            for k in range(t):
                row = [i, k]
                for e in entries:
                    v = observed[i, k][ENTRIES[e]]
                    row += [float(v.real), float(v.imag)]
                yield row

    write_rows(path, measured_columns(entries), rows())


def ingest_measured(path):
    try:
        header, rows = read_rows(path)
    except (UnicodeDecodeError, csv.Error) as exc:
        raise DataError(f"{path}: unreadable CSV ({exc})") from None
    if not header:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in header]
    if header[:2] != ["segment", "time"]:
        raise DataError(f"{path}: first columns must be segment,time")
    present = []
    rest = header[2:]
    if len(rest) % 2 or not rest:
        raise DataError(f"{path}: coefficient columns must come in _re/_im pairs")
    for re_name, im_name in zip(rest[::2], rest[1::2]):
        name = re_name[:-3]
        if not (re_name.endswith("_re") and im_name == f"{name}_im" and name in ENTRIES):
            raise DataError(f"{path}: bad coefficient columns {re_name},{im_name}")
        if name in present:
            raise DataError(f"{path}: coefficient {name} appears twice")
        present.append(name)
    if not rows:
        raise DataError(f"{path}: no records")
    try:
        a = np.array(rows, dtype=float)
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric value ({exc})") from None
    if a.ndim != 2 or a.shape[1] != len(header):
        raise DataError(f"{path}: rows do not match the header width")
    seg = a[:, 0].astype(np.int64)
    tim = a[:, 1].astype(np.int64)
    if np.any(seg != a[:, 0]) or np.any(tim != a[:, 1]) or np.any(seg < 0) or np.any(tim < 0):
        raise DataError(f"{path}: segment and time must be non-negative integers")
    n, t = int(seg.max()) + 1, int(tim.max()) + 1
    seen = np.zeros((n, t), dtype=np.int64)
    np.add.at(seen, (seg, tim), 1)
    if np.any(seen > 1):
        dup = np.argwhere(seen > 1)[:5]
        raise DataError(f"{path}: duplicate (segment, time) records, e.g. {[tuple(map(int, d)) for d in dup]}")
    ragged = np.flatnonzero(np.any(seen == 0, axis=1))
    if len(ragged):
        raise DataError(f"{path}: ragged time axes; incomplete segments {ragged.tolist()}")
    values = np.full((n, t, 2, 2), np.nan + 0j, dtype=complex)
    for j, name in enumerate(present):
        r, c = ENTRIES[name]
        values[seg, tim, r, c] = a[:, 2 + 2 * j] + 1j * a[:, 3 + 2 * j]
    return MeasuredData(values, tuple(present))


def process_measured(data, scheme, dt_s=160e-6, diff_mode=DiffMode.TEMPORAL, exclude_flagged=False,
                     simo_column=0, floor=1e-3, z_m=None):
    data.require(scheme, simo_column)
    trace = trace_from_observed(
        data.values, scheme, dt_s, floors=floor * data.amplitude_scale(), z_m=z_m, simo_column=simo_column
    )
    return stdv_profile(trace, diff_mode, exclude_flagged)
