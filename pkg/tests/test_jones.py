import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polotdr import jones
from conftest import angles

I2 = np.eye(2)


def unit_disk(rng, shape):
    r = np.sqrt(rng.random(shape))
    return r * np.exp(1j * rng.uniform(-np.pi, np.pi, shape))


def test_rotation_examples():
    np.testing.assert_array_equal(jones.rotation(0.0), I2)
    np.testing.assert_allclose(jones.rotation(np.pi / 2), [[0, -1], [1, 0]], atol=1e-15)
    np.testing.assert_allclose(jones.rotation(0.7) @ jones.rotation(-0.7), I2, atol=1e-12)


def test_retarder_examples():
    np.testing.assert_array_equal(jones.retarder(0.0), I2)
    np.testing.assert_allclose(jones.retarder(np.pi / 2), np.diag([1j, -1j]), atol=1e-15)
    assert abs(jones.determinant(jones.retarder(1.234)) - 1) < 1e-12


def test_mirror_examples():
    m = jones.mirror()
    np.testing.assert_array_equal(m, [[1, 0], [0, -1]])
    assert jones.determinant(m) == -1
    np.testing.assert_array_equal(m @ m, I2)


def test_determinant_examples(rng):
    assert jones.determinant(jones.IDENTITY) == 1
    assert jones.determinant(np.array([[1, 0], [0, -1]])) == -1
    j = unit_disk(rng, (100, 2, 2))
    r = jones.rotation(rng.uniform(-np.pi, np.pi, 100))
    lhs, rhs = jones.determinant(j @ r), jones.determinant(j)
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * np.maximum(np.abs(rhs), 1e-300))


def test_determinant_matches_numpy(rng):
    m = unit_disk(rng, (50, 2, 2))
    np.testing.assert_allclose(jones.determinant(m), np.linalg.det(m), atol=1e-14)


def test_small_helpers():
    b = np.array([[1 + 2j, 3], [4j, -5]])
    np.testing.assert_array_equal(jones.matmul(jones.IDENTITY, b), b)
    np.testing.assert_array_equal(jones.transpose(np.array([[1, 2j], [3, 4]])), [[1, 3], [2j, 4]])
    np.testing.assert_array_equal(jones.scale(jones.IDENTITY, 2j), np.diag([2j, 2j]))
    # transpose must not conjugate
    assert jones.transpose(b)[0, 1] == 4j


def test_broadcasting_shapes():
    th = np.zeros((3, 5))
    assert jones.rotation(th).shape == (3, 5, 2, 2)
    assert jones.retarder(th).shape == (3, 5, 2, 2)
    assert jones.determinant(jones.rotation(th)).shape == (3, 5)


@pytest.mark.parametrize("fn", [jones.rotation, jones.retarder])
def test_non_finite_angle_rejected(fn):
    with pytest.raises(ValueError):
        fn(np.nan)


def _is_unitary(j):
    dag = np.conj(jones.transpose(j))
    return np.allclose(dag @ j, I2, atol=1e-12)


@given(angles)
def test_rotation_and_retarder_unitary(a):
    assert _is_unitary(jones.rotation(a))
    assert _is_unitary(jones.retarder(a))


@given(angles, angles)
def test_rotation_composes(a, b):
    np.testing.assert_allclose(jones.rotation(a) @ jones.rotation(b), jones.rotation(a + b), atol=1e-12)


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_determinant_multiplicative(seed):
    rng = np.random.default_rng(seed)
    a, b = unit_disk(rng, (2, 2)), unit_disk(rng, (2, 2))
    lhs = jones.determinant(a @ b)
    rhs = jones.determinant(a) * jones.determinant(b)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), 1.0)
