"""2x2 complex Jones algebra.

Matrices are numpy arrays of shape ``(..., 2, 2)`` stored row-major as
``[[h_xx, h_xy], [h_yx, h_yy]]``, so column 0 is the response to an X launch.
Every function broadcasts over leading axes.
"""

import numpy as np

IDENTITY = np.eye(2, dtype=complex)


def _check_finite(name, value):
    arr = np.asarray(value)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return arr


def rotation(theta):
    """Real rotation [[cos, -sin], [sin, cos]]; det = 1."""
    theta = _check_finite("theta", theta).astype(float)
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def retarder(delta):
    """Diagonal phase retarder diag(e^{j delta}, e^{-j delta})."""
    delta = _check_finite("delta", delta).astype(float)
    out = np.zeros(delta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(1j * delta)
    out[..., 1, 1] = np.exp(-1j * delta)
    return out


def mirror():
    """Lossless reflection without polarization transfer."""
    return np.array([[1, 0], [0, -1]], dtype=complex)


def determinant(m):
    m = np.asarray(m)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def matmul(a, b):
    return np.matmul(a, b)


def transpose(m):
    # plain transpose, no conjugation
    return np.swapaxes(np.asarray(m), -1, -2)


def scale(m, s):
    return np.asarray(s)[..., None, None] * np.asarray(m)


def dagger(m):
    return np.conj(transpose(m))
