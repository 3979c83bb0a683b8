import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polotdr.config import ConfigError, config_items, format_config, parse_config, parse_config_text, with_overrides
from polotdr.estimators import Scheme
from polotdr.metrics import DiffMode


def test_minimal_file_gets_defaults():
    cfg = parse_config_text("sweep = distance_profile\nlength_m = 2000\n")
    assert cfg.fiber.segment_length_m == 10.0
    assert cfg.fiber.alpha_db_per_km == 0.2
    assert cfg.fiber.scatterers_per_segment == 20
    assert cfg.fiber.group_index == 1.468
    assert cfg.noise.linewidth_hz == 75.0 and cfg.noise.dt_s == 160e-6
    assert cfg.noise.n_samples == 12_500 and cfg.noise.snr_db == 30.0
    assert cfg.noise.theta_jitter_rad_per_sqrt_s == 0.0
    assert cfg.schemes == (Scheme.SISO, Scheme.SIMO, Scheme.MIMO)
    assert cfg.diff_mode is DiffMode.TEMPORAL
    assert cfg.n_fibers == 1 and cfg.master_seed == 1 and cfg.workers == 1
    assert cfg.name == "distance_profile" and cfg.simo_launch == "x" and not cfg.exclude_flagged


def test_sweep_dependent_defaults():
    assert parse_config_text("sweep=monte_carlo\nlength_m=100").n_fibers == 50
    th = parse_config_text("sweep=theta_mis\nlength_m=10")
    assert len(th.sweep_grid) == 64 and th.sweep_grid[0] == 0 and th.sweep_grid[-1] == pytest.approx(math.pi)
    tc = parse_config_text("sweep=theta_cap\nlength_m=10")
    assert tc.sweep_grid[-1] == pytest.approx(math.pi / 2)
    assert th.segment_z_m == 5.0 and not th.has_preset


def test_negative_linewidth_names_key_and_line():
    with pytest.raises(ConfigError) as err:
        parse_config_text("sweep = theta_mis\nlength_m = 10\nlinewidth_hz = -1\n")
    assert err.value.key == "linewidth_hz" and err.value.line == 3
    assert "linewidth_hz" in str(err.value) and ">= 0" in str(err.value)


@pytest.mark.parametrize("text, key, line", [
    ("sweep = theta_mis\nlength_m = 10\ncolour = red\n", "colour", 3),
    ("sweep = theta_mis\nlength_m = ten\n", "length_m", 2),
    ("sweep = theta_mis\n", "length_m", None),
    ("length_m = 10\nsweep = sideways\n", "sweep", 2),
    ("sweep = theta_mis\nlength_m = 10\nlength_m = 20\n", "length_m", 3),
    ("sweep = theta_mis\nlength_m = 10\nsegment_length_m = 0\n", "segment_length_m", 3),
    ("sweep = distance_profile\nlength_m = 10\nn_fibers = 3\n", "n_fibers", 3),
    ("sweep = theta_mis\nlength_m = 10\nschemes = SISO,MISO\n", "schemes", 3),
    ("sweep = theta_mis\nlength_m = 10\nn_samples = 1\n", "n_samples", 3),
    ("sweep = theta_mis\nlength_m = 10\nmaster_seed = -4\n", "master_seed", 3),
    ("sweep = theta_mis\nlength_m = nan\n", "length_m", 2),
])
def test_errors_name_key_and_line(text, key, line):
    with pytest.raises(ConfigError) as err:
        parse_config_text(text)
    assert err.value.key == key and err.value.line == line


def test_line_without_equals():
    with pytest.raises(ConfigError) as err:
        parse_config_text("sweep = theta_mis\nlength_m 10\n")
    assert err.value.line == 2


def test_comments_and_overrides(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("# scenario\nsweep = theta_mis   # inline\n\nlength_m = 10\nmaster_seed = 5\n")
    cfg = parse_config(path, {"master_seed": "9", "schemes": "mimo"})
    assert cfg.master_seed == 9 and cfg.schemes == (Scheme.MIMO,)
    with pytest.raises(ConfigError):
        parse_config(path, {"bogus": "1"})


def test_manifest_round_trip():
    cfg = parse_config_text("sweep = theta_cap\nlength_m = 10\npreset_beta = 0.3\nsnr_db = inf\nsweep_grid = 0.1, 0.2\n")
    assert parse_config_text(format_config(cfg)) == cfg
    assert dict(config_items(cfg))["preset_gamma"] == "auto"


def test_with_overrides():
    cfg = parse_config_text("sweep = monte_carlo\nlength_m = 500\n")
    assert with_overrides(cfg, n_fibers=3, master_seed=7).n_fibers == 3
    with pytest.raises(ConfigError):
        with_overrides(cfg, shape="round")


@settings(max_examples=60)
@given(
    st.sampled_from(["theta_mis", "theta_cap", "distance_profile", "monte_carlo"]),
    st.floats(10, 1e5),
    st.floats(0, 1.0),
    st.floats(-20, 60),
    st.integers(0, 2**64 - 1),
    st.lists(st.sampled_from(list(Scheme)), min_size=1, max_size=3, unique=True),
    st.sampled_from(list(DiffMode)),
)
def test_round_trip_property(sweep, length, alpha, snr, seed, schemes, mode):
    text = (f"sweep={sweep}\nlength_m={length!r}\nalpha_db_per_km={alpha!r}\nsnr_db={snr!r}\n"
            f"master_seed={seed}\nschemes={','.join(s.value for s in schemes)}\ndiff_mode={mode.value}\n")
    cfg = parse_config_text(text)
    assert parse_config_text(format_config(cfg)) == cfg
