import numpy as np
import pytest
from hypothesis import strategies as st

from polotdr.fiber import SegmentParams

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
theta_caps = st.floats(0, np.pi / 2)
amplitudes = st.floats(1e-3, 10.0)


@st.composite
def segments(draw):
    p = draw(amplitudes) * np.exp(1j * draw(angles))
    return SegmentParams(draw(theta_caps), draw(angles), draw(angles), draw(st.floats(0.01, 1.0)), p)


def random_segments(rng, n):
    """Array-valued SegmentParams with random geometry, loss and reflectivity."""
    return SegmentParams(
        theta_cap=np.arcsin(np.sqrt(rng.random(n))),
        beta=rng.uniform(-np.pi, np.pi, n),
        gamma=rng.uniform(-np.pi, np.pi, n),
        attenuation=rng.uniform(0.05, 1.0, n),
        phasor=(rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2),
    )


def wrap(x, modulus=2 * np.pi):
    """Signed residue in [-modulus/2, modulus/2)."""
    return (np.asarray(x) + modulus / 2) % modulus - modulus / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
