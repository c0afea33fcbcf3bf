"""Coefficients of the ARCH(infinity) representation and their gradients.

The conditional scale at a search point u = (x, s, t) is a linear
functional of past squared observations with weights c_0(u), c_1(u), ...
The weights obey a single unified recursion

    c_0 = x / (1 - sum(t))
    c_i = s_i * [i <= p]  +  sum_{l=1..min(i-1, q)} t_l * c_{i-l},   i >= 1

which reproduces both order regimes (q >= p and q < p) of the defining
initial-condition blocks and the generic q-term recursion beyond
R = max(p, q).  Gradients are propagated through the same recursion by
forward accumulation, so they are exact up to floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import EstimationPoint, GarchOrder

__all__ = ["CoeffTable", "coeff_sequence", "coeff_gradients"]


@dataclass(frozen=True)
class CoeffTable:
    """Weights c_0..c_m and, optionally, the (m+1) x (p+q+1) Jacobian."""

    c: np.ndarray
    grad: np.ndarray | None
    m: int


@njit(cache=True)
def _coeff_values(x, s, t, m):
    p = s.shape[0]
    q = t.shape[0]
    c = np.zeros(m + 1)
    c[0] = x / (1.0 - t.sum())
    for i in range(1, m + 1):
        acc = s[i - 1] if i <= p else 0.0
        lmax = min(i - 1, q)
        for l in range(1, lmax + 1):
            acc += t[l - 1] * c[i - l]
        c[i] = acc
    return c


@njit(cache=True)
def _coeff_table(x, s, t, m):
    p = s.shape[0]
    q = t.shape[0]
    d = p + q + 1
    c = np.zeros(m + 1)
    grad = np.zeros((m + 1, d))
    f = 1.0 / (1.0 - t.sum())
    c[0] = x * f
    grad[0, 0] = f
    for l in range(q):
        grad[0, 1 + p + l] = x * f * f
    for i in range(1, m + 1):
        acc = 0.0
        if i <= p:
            acc = s[i - 1]
            grad[i, i] = 1.0
        lmax = min(i - 1, q)
        for l in range(1, lmax + 1):
            tl = t[l - 1]
            cl = c[i - l]
            acc += tl * cl
            grad[i, p + l] += cl
            for j in range(d):
                grad[i, j] += tl * grad[i - l, j]
        c[i] = acc
    return c, grad


def _split(u: EstimationPoint, order: GarchOrder):
    if u.order != order:
        raise ValueError(f"point order {u.order} does not match requested order {order}")
    tsum = u.t.sum()
    if tsum >= 1.0:
        raise ValueError(f"sum of t-block is {tsum} >= 1; c_0 undefined")
    return float(u.x), np.ascontiguousarray(u.s), np.ascontiguousarray(u.t)


def coeff_sequence(u: EstimationPoint, order: GarchOrder, m: int) -> CoeffTable:
    """Weights c_0(u)..c_m(u)."""
    x, s, t = _split(u, order)
    if m < 0:
        raise ValueError("m must be nonnegative")
    return CoeffTable(c=_coeff_values(x, s, t, int(m)), grad=None, m=int(m))


def coeff_gradients(u: EstimationPoint, order: GarchOrder, m: int) -> CoeffTable:
    """Weights plus the exact Jacobian d c_i / d u_j (forward accumulation)."""
    x, s, t = _split(u, order)
    if m < 0:
        raise ValueError("m must be nonnegative")
    c, grad = _coeff_table(x, s, t, int(m))
    return CoeffTable(c=c, grad=grad, m=int(m))
