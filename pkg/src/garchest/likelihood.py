"""Score families, the truncated conditional scale, and the sample objective.

A score family wraps a positive function h through

    g(y, t) = log(t * h(y*t)),   t > 0,

with g1, g2 its first two t-derivatives.  The objective maximized by the
estimator is

    L_n(u) = (1/n) * sum_{k=2..n} g(y_k, w_k(u)^(-1/2)),

where w_k(u) = c_0(u) + sum_{1<=i<k} c_i(u) y_{k-i}^2 is the conditional
scale truncated to the observed past.  The identity log((1/sqrt(w)) *
h(y/sqrt(w))) = g(y, w^(-1/2)) makes the two forms of the summand equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import signal

from .coeffs import _coeff_table, _coeff_values
from .innovations import (
    FIRST_ABS_MOMENT_ONE,
    SECOND_MOMENT_ONE,
    ScalingConvention,
    poly_ratio,
)
from .model import EstimationPoint, TimeSeries, as_series

__all__ = [
    "ScoreFamily",
    "ScaleVector",
    "gaussian_family",
    "laplace_family",
    "polytail_family",
    "get_family",
    "score_eval",
    "conditional_scale",
    "objective",
    "objective_gradient",
]

# below this many multiply-adds the direct convolution is used; above it,
# FFT overlap-add (identical values to ~1e-14 relative, both deterministic)
_DIRECT_CONV_LIMIT = 200_000


@dataclass(frozen=True)
class ScoreFamily:
    """h-based score: g, g1, g2 plus the scaling convention that makes the
    parameters identifiable under this h."""

    name: str
    g: Callable
    g1: Callable
    g2: Callable
    log_h: Callable
    convention: ScalingConvention
    theta: Optional[float] = None  # tail exponent, polytail family only


_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def gaussian_family() -> ScoreFamily:
    """Standard-normal h: the classical quasi-maximum likelihood score."""
    return ScoreFamily(
        name="gaussian",
        g=lambda y, t: np.log(t) - _LOG_SQRT_2PI - 0.5 * (y * t) ** 2,
        g1=lambda y, t: (1.0 - y**2 * t**2) / t,
        g2=lambda y, t: -(1.0 + y**2 * t**2) / t**2,
        log_h=lambda z: -_LOG_SQRT_2PI - 0.5 * z**2,
        convention=SECOND_MOMENT_ONE,
    )


def laplace_family() -> ScoreFamily:
    """Two-sided exponential h."""
    return ScoreFamily(
        name="laplace",
        g=lambda y, t: np.log(t) - math.log(2.0) - np.abs(y) * t,
        g1=lambda y, t: (1.0 - np.abs(y) * t) / t,
        g2=lambda y, t: -1.0 / t**2 + 0.0 * np.asarray(y),
        log_h=lambda z: -math.log(2.0) - np.abs(z),
        convention=FIRST_ABS_MOMENT_ONE,
    )


def polytail_family(theta: float) -> ScoreFamily:
    """Polynomial-tail h(t) = ((theta-1)/2) (1+|t|)^(-theta), theta > 1.

    g2 here is the derivative of g1, i.e. -1/t^2 + theta*y^2/(1+|y|t)^2
    (verified against finite differences of g)."""
    if not theta > 1:
        raise ValueError(f"polytail family needs theta > 1, got {theta}")
    lc = math.log((theta - 1.0) / 2.0)
    return ScoreFamily(
        name="polytail",
        g=lambda y, t: np.log(t) + lc - theta * np.log1p(np.abs(y) * t),
        g1=lambda y, t: 1.0 / t - theta * np.abs(y) / (1.0 + np.abs(y) * t),
        g2=lambda y, t: -1.0 / t**2 + theta * y**2 / (1.0 + np.abs(y) * t) ** 2,
        log_h=lambda z: lc - theta * np.log1p(np.abs(z)),
        convention=poly_ratio(theta),
        theta=float(theta),
    )


def get_family(name: str, theta: float | None = None) -> ScoreFamily:
    if name == "gaussian":
        return gaussian_family()
    if name == "laplace":
        return laplace_family()
    if name == "polytail":
        if theta is None:
            raise ValueError("polytail family needs a tail exponent")
        return polytail_family(theta)
    raise ValueError(f"unknown score family {name!r}")


def score_eval(family: ScoreFamily, y, t, deriv: int = 0):
    """g, g1 or g2 of the family at (y, t)."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("score functions are defined for t > 0 only")
    if deriv == 0:
        return family.g(np.asarray(y, float), t)
    if deriv == 1:
        return family.g1(np.asarray(y, float), t)
    if deriv == 2:
        return family.g2(np.asarray(y, float), t)
    raise ValueError(f"deriv must be 0, 1 or 2, got {deriv}")


@dataclass(frozen=True)
class ScaleVector:
    """w_k(u) for k = 2..n and, optionally, the rows of its u-gradient."""

    w_hat: np.ndarray
    w_hat_grad: np.ndarray | None


def _conv_head(a: np.ndarray, z: np.ndarray, length: int) -> np.ndarray:
    """First `length` entries of the full convolution a * z."""
    if a.size * z.size <= _DIRECT_CONV_LIMIT:
        return np.convolve(a, z)[:length]
    return signal.fftconvolve(a, z)[:length]


def _scale_flat(x: float, s: np.ndarray, t: np.ndarray, y: np.ndarray, with_grad: bool):
    """w (and rows of w') for k = 2..n at the flattened point (x, s, t)."""
    n = y.size
    m = n - 1
    z = y[:-1] ** 2  # y_1^2 .. y_{n-1}^2
    if with_grad:
        c, G = _coeff_table(x, s, t, m)
        w = c[0] + _conv_head(c[1:], z, n - 1)
        d = G.shape[1]
        if (m * n) * d <= _DIRECT_CONV_LIMIT:
            W = np.empty((n - 1, d))
            for j in range(d):
                W[:, j] = G[0, j] + np.convolve(G[1:, j], z)[: n - 1]
        else:
            W = G[0] + signal.fftconvolve(G[1:], z[:, None], axes=0)[: n - 1]
        return w, W
    c = _coeff_values(x, s, t, m)
    w = c[0] + _conv_head(c[1:], z, n - 1)
    return w, None


def _split_flat(u: EstimationPoint):
    tsum = u.t.sum()
    if tsum >= 1.0:
        raise ValueError(f"sum of t-block is {tsum} >= 1; conditional scale undefined")
    return float(u.x), np.ascontiguousarray(u.s), np.ascontiguousarray(u.t)


def conditional_scale(u: EstimationPoint, series: TimeSeries, with_grad: bool = False) -> ScaleVector:
    """Truncated conditional scale w_k(u), k = 2..n (n-1 entries)."""
    series = as_series(series)
    x, s, t = _split_flat(u)
    w, W = _scale_flat(x, s, t, series.values, with_grad)
    return ScaleVector(w_hat=w, w_hat_grad=W)


def conditional_scale_reference(u: EstimationPoint, series: TimeSeries) -> np.ndarray:
    """O(n^2) direct-sum evaluation of w_k(u); oracle for the fast path."""
    series = as_series(series)
    x, s, t = _split_flat(u)
    y = series.values
    n = y.size
    c = _coeff_values(x, s, t, n - 1)
    w = np.empty(n - 1)
    for k in range(2, n + 1):
        acc = c[0]
        for i in range(1, k):
            acc += c[i] * y[k - i - 1] ** 2
        w[k - 2] = acc
    return w


def objective(u: EstimationPoint, series: TimeSeries, family: ScoreFamily) -> float:
    """Sample objective (1/n) sum_{k=2..n} g(y_k, w_k(u)^(-1/2)).

    Returns -inf when any summand is non-finite, which the optimizer
    treats as a rejected step."""
    series = as_series(series)
    x, s, t = _split_flat(u)
    w, _ = _scale_flat(x, s, t, series.values, False)
    if np.any(w <= 0):
        return -np.inf
    vals = family.g(series.values[1:], w**-0.5)
    total = vals.sum()
    if not np.isfinite(total):
        return -np.inf
    return float(total / series.n)


def objective_gradient(u: EstimationPoint, series: TimeSeries, family: ScoreFamily) -> np.ndarray:
    """Exact gradient of `objective` in u (chain rule through w_k)."""
    val, grad = objective_value_and_gradient(u, series, family)
    if not np.all(np.isfinite(grad)):
        raise FloatingPointError(f"non-finite objective gradient at u = {u.flatten()}")
    return grad


def objective_value_and_gradient(u: EstimationPoint, series: TimeSeries, family: ScoreFamily):
    """(L_n(u), grad L_n(u)) in one pass; shared by the optimizer."""
    series = as_series(series)
    x, s, t = _split_flat(u)
    w, W = _scale_flat(x, s, t, series.values, True)
    if np.any(w <= 0):
        return -np.inf, np.full(u.order.dim, np.nan)
    tvec = w**-0.5
    y_tail = series.values[1:]
    vals = family.g(y_tail, tvec)
    total = vals.sum()
    if not np.isfinite(total):
        return -np.inf, np.full(u.order.dim, np.nan)
    # d/du g(y, w^(-1/2)) = g1(y, w^(-1/2)) * (-1/2) w^(-3/2) * w'
    coef = family.g1(y_tail, tvec) * (-0.5) * w**-1.5
    grad = W.T @ coef / series.n
    return float(total / series.n), grad
