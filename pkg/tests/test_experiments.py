import time

import numpy as np
import pytest

from polotdr.config import parse_config_text, with_overrides
from polotdr.estimators import Scheme
from polotdr.experiments import (
    _local_maxima, _local_minima, column_sum, low_backscatter_mask, run_distance_profile, run_fibers,
    run_monte_carlo, run_scenario, run_theta_cap_sweep, run_theta_mis_sweep, sweep_segment,
)
from polotdr.fiber import SegmentParams

def cfg_of(text, **kw):
    return parse_config_text(text, {k: v if isinstance(v, str) else repr(v) for k, v in kw.items()})


def theta_cfg(**kw):
    return cfg_of("sweep = theta_mis\nlength_m = 10\nn_samples = 1000\nsweep_grid = " +
                  ",".join(repr(float(x)) for x in np.linspace(0, np.pi, 24)) + "\n", **kw)


def cap_cfg(**kw):
    return cfg_of("sweep = theta_cap\nlength_m = 10\nn_samples = 1000\n", **kw)


def rows(table, scheme):
    return np.array(table.where(scheme=scheme).column("stdv_rad"))


def test_theta_sweep_mimo_flat_and_others_not():
    res = run_theta_mis_sweep(theta_cfg())
    t = res.tables["theta_sweep"]
    mimo, simo, siso = rows(t, "MIMO"), rows(t, "SIMO"), rows(t, "SISO")
    assert np.all(np.abs(mimo - mimo.mean()) <= 0.05 * mimo.mean())
    assert simo.max() >= 2 * mimo.max() and siso.max() >= 2 * mimo.max()
    assert simo.std() > 0.1 * simo.mean() and siso.std() > 0.1 * siso.mean()
    assert res.config.has_preset and res.notes


def test_theta_sweep_without_noise_is_zero():
    t = run_theta_mis_sweep(theta_cfg(linewidth_hz=0, snr_db="inf")).tables["theta_sweep"]
    assert all(v == 0 for v in t.column("stdv_rad"))


def test_theta_sweep_uses_given_preset():
    res = run_theta_mis_sweep(theta_cfg(preset_theta_cap=0.3, preset_beta=0.1, preset_gamma=-0.2))
    assert (res.config.preset_theta_cap, res.config.preset_beta) == (0.3, 0.1)
    assert not res.notes


def test_theta_cap_sums_periodic_in_theta_cap():
    seg = SegmentParams(0.37, -1.2, 0.8)
    a = column_sum(seg, 0.0)
    b = column_sum(SegmentParams(0.37 + np.pi, -1.2, 0.8), 0.0)
    assert abs(a - b) < 1e-12


@pytest.mark.xfail(strict=True, reason="flat Theta response needs sin2b = 0 in the display; with the mirror it is cos2b = 0")
def test_theta_cap_flat_for_beta_zero():
    t = run_theta_cap_sweep(cap_cfg(preset_beta=0, preset_gamma=0.4)).tables["theta_cap_sweep"]
    assert np.ptp(t.column("re_sum")) < 1e-12 and np.ptp(t.column("im_sum")) < 1e-12


def test_theta_cap_flat_for_beta_quarter():
    t = run_theta_cap_sweep(cap_cfg(preset_beta=np.pi / 4, preset_gamma=0.4)).tables["theta_cap_sweep"]
    assert np.ptp(t.column("re_sum")) < 1e-12 and np.ptp(t.column("im_sum")) < 1e-12
    st = np.array(t.column("stdv_simo_rad"))
    assert np.ptp(st) <= 0.05 * st.mean()


def test_theta_cap_peaks_at_real_part_zero():
    res = run_theta_cap_sweep(cap_cfg())
    t = res.tables["theta_cap_sweep"]
    st, re = np.array(t.column("stdv_simo_rad")), np.abs(t.column("re_sum"))
    maxima, minima = _local_maxima(st), _local_minima(re)
    assert maxima
    assert all(any(abs(m - r) <= 1 for r in minima) for m in maxima)
    # the table sums agree with the direct matrix evaluation
    seg = sweep_segment(res.config, t.rows[5][0], res.config.preset_beta, res.config.preset_gamma)
    assert complex(column_sum(seg, 0.0)) == complex(t.rows[5][1], t.rows[5][2])


def profile_cfg(**kw):
    return cfg_of("sweep = distance_profile\nlength_m = 2000\nsegment_length_m = 25\nn_samples = 400\n", **kw)


def test_profile_without_noise_is_flat_zero():
    res = run_distance_profile(profile_cfg(linewidth_hz=0, snr_db="inf"))
    for prof in res.profiles.values():
        assert np.all(prof.per_segment_stdv == 0)


def test_profile_grows_with_distance():
    res = run_distance_profile(profile_cfg(snr_db=60))
    mimo = res.profiles[Scheme.MIMO].per_segment_stdv
    assert mimo[-10:].mean() > 2 * mimo[:10].mean()


def test_low_backscatter_mask_is_bottom_decile():
    real = run_distance_profile(profile_cfg()).realization
    mask = low_backscatter_mask(real)
    assert mask.sum() == pytest.approx(0.1 * len(real), abs=1)
    amp = np.abs(real.attenuation * real.phasor)
    assert amp[mask].max() < amp[~mask].min()


def mc_cfg(**kw):
    return cfg_of("sweep = monte_carlo\nlength_m = 500\nsegment_length_m = 25\nn_samples = 200\nn_fibers = 3\n", **kw)


def test_single_fiber_monte_carlo_equals_profile():
    mc = run_monte_carlo(mc_cfg(n_fibers=1))
    prof = run_distance_profile(with_overrides(mc_cfg(n_fibers=1), sweep="distance_profile"))
    for s in Scheme:
        np.testing.assert_array_equal(mc.profiles[s].per_segment_stdv, prof.profiles[s].per_segment_stdv)


def test_monte_carlo_deterministic_and_parallel_safe():
    a = run_scenario(mc_cfg())
    b = run_scenario(mc_cfg())
    c = run_scenario(mc_cfg(workers=2))
    assert a.tables["monte_carlo"].rows == b.tables["monte_carlo"].rows == c.tables["monte_carlo"].rows


def test_fibers_are_distinct_runs():
    runs = run_fibers(mc_cfg(), 3)
    assert [r.run_index for r in runs] == [0, 1, 2]
    assert runs[0].realization != runs[1].realization
    assert runs[0].theta0 != runs[1].theta0


def _best_time(cfg, reps=3):
    best = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        run_monte_carlo(cfg)
        best = min(best, time.perf_counter() - t0)
    return best


def test_runtime_scales_linearly():
    base = mc_cfg(n_fibers=2, n_samples=1000, length_m=1000)
    t1 = _best_time(base)
    assert _best_time(with_overrides(base, n_fibers=4)) <= 2.3 * t1
    assert _best_time(with_overrides(base, n_samples=2000)) <= 2.3 * t1
