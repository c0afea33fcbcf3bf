"""Shared test utilities: finite-difference oracles."""

import numpy as np


def central_diff(f, x, step=1e-6):
    """Central finite-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for j in range(x.size):
        h = step * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        grad[j] = (f(xp) - f(xm)) / (2.0 * h)
    return grad


def rel_err(a, b, floor=1e-8):
    """Elementwise |a-b| over a magnitude scale that never vanishes."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    scale = np.maximum.reduce([np.abs(a), np.abs(b), np.full_like(a, floor)])
    return np.abs(a - b) / scale
