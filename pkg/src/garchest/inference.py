"""Asymptotic inference around the fitted parameters.

The limit covariance of sqrt(n)(theta_hat - theta) is 4 * tau^2 * A^{-1},
where A is the information-style matrix built from the relative gradient
of the conditional scale and tau^2 = E g1^2(eps, 1) / (E g2(eps, 1))^2
depends only on the score family and the innovation law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .innovations import (
    FIRST_ABS_MOMENT_ONE,
    SECOND_MOMENT_ONE,
    InnovationDist,
    moment,
    rescale_to,
)
from .likelihood import ScoreFamily, conditional_scale
from .model import GarchParams, TimeSeries, as_series

__all__ = [
    "InferenceResult",
    "SingularInformationError",
    "information_matrix",
    "tau_sq_empirical",
    "tau_sq_analytic",
    "full_inference",
    "rescale_estimate",
]

_COND_LIMIT = 1e12


class SingularInformationError(RuntimeError):
    pass


@dataclass(frozen=True)
class InferenceResult:
    A_hat: np.ndarray
    tau_sq_hat: float
    covariance: np.ndarray  # covariance of sqrt(n)(theta_hat - theta)
    std_errors: np.ndarray
    residuals: np.ndarray
    d_hat: float


def _relative_scale_gradients(series: TimeSeries, theta_hat: GarchParams):
    sv = conditional_scale(theta_hat.as_point(), series, with_grad=True)
    return sv.w_hat, sv.w_hat_grad / sv.w_hat[:, None]


def information_matrix(series: TimeSeries, theta_hat: GarchParams) -> np.ndarray:
    """Sample average of the outer products (w'_k/w_k)^T (w'_k/w_k)."""
    series = as_series(series)
    if series.n < theta_hat.order.dim + 1:
        raise ValueError("series too short for the information matrix")
    _, rel = _relative_scale_gradients(series, theta_hat)
    a = rel.T @ rel / rel.shape[0]
    a = 0.5 * (a + a.T)
    eig = np.linalg.eigvalsh(a)
    if eig[0] < 1e-12 * eig[-1]:
        raise SingularInformationError(
            "information matrix is numerically singular; the parameters are "
            "likely not identifiable (e.g. overlapping lag-polynomial roots "
            "or degenerate data)"
        )
    return a


def tau_sq_empirical(series: TimeSeries, theta_hat: GarchParams, family: ScoreFamily) -> float:
    """Plug-in tau^2 from the fitted residuals y_k / sqrt(w_k(theta_hat))."""
    series = as_series(series)
    w = conditional_scale(theta_hat.as_point(), series).w_hat
    resid = series.values[1:] / np.sqrt(w)
    g1m = float(np.mean(family.g1(resid, 1.0) ** 2))
    g2m = float(np.mean(family.g2(resid, np.ones_like(resid))))
    if abs(g2m) < 1e-12:
        raise ValueError(
            "mean of g2 at the residuals is numerically zero; tau^2 undefined"
        )
    return g1m / g2m**2


def tau_sq_analytic(family: ScoreFamily, dist: InnovationDist) -> float:
    """Closed-form tau^2 for the built-in (family, innovation law) pairs.

    The law is first rescaled to the family's convention.  For the
    gaussian score tau^2 = (E eps^4 - 1)/4, for the two-sided exponential
    score tau^2 = E eps^2 - 1; no closed form ships for the polynomial-tail
    score."""
    if dist.kind == "table":
        raise ValueError("no analytic tau^2 for empirical tables; use tau_sq_empirical")
    if family.name == "gaussian":
        scaled = rescale_to(dist, SECOND_MOMENT_ONE)
        return (moment(scaled, "fourth") - 1.0) / 4.0
    if family.name == "laplace":
        scaled = rescale_to(dist, FIRST_ABS_MOMENT_ONE)
        return moment(scaled, "square") - 1.0
    raise ValueError(
        f"no closed-form tau^2 for the {family.name!r} family; use tau_sq_empirical"
    )


def full_inference(series: TimeSeries, theta_hat: GarchParams, family: ScoreFamily) -> InferenceResult:
    """Assemble A_hat, tau^2, covariance, standard errors, residuals and the
    residual scale d_hat."""
    series = as_series(series)
    w, rel = _relative_scale_gradients(series, theta_hat)
    a = rel.T @ rel / rel.shape[0]
    a = 0.5 * (a + a.T)
    eig = np.linalg.eigvalsh(a)
    if eig[0] < 1e-12 * eig[-1] or eig[0] <= 0:
        raise SingularInformationError(
            "information matrix is numerically singular; cannot invert"
        )
    if eig[-1] / eig[0] > _COND_LIMIT:
        raise SingularInformationError(
            f"information matrix condition number {eig[-1] / eig[0]:.3g} exceeds "
            f"{_COND_LIMIT:g}"
        )
    resid = series.values[1:] / np.sqrt(w)
    tau_sq = tau_sq_empirical(series, theta_hat, family)
    cho = linalg.cho_factor(a)
    a_inv = linalg.cho_solve(cho, np.eye(a.shape[0]))
    cov = 4.0 * tau_sq * a_inv
    cov = 0.5 * (cov + cov.T)
    return InferenceResult(
        A_hat=a,
        tau_sq_hat=tau_sq,
        covariance=cov,
        std_errors=np.sqrt(np.diag(cov) / series.n),
        residuals=resid,
        d_hat=float(np.sqrt((resid**2).sum() / (series.n - 1))),
    )


def rescale_estimate(result: InferenceResult, theta_hat: GarchParams, d: float):
    """Convert an estimate (and its covariance) to a target convention with
    innovation divisor d: omega and alpha scale by 1/d^2, beta is invariant."""
    if not d > 0:
        raise ValueError("d must be positive")
    p = theta_hat.order.p
    diag = np.ones(theta_hat.order.dim)
    diag[: p + 1] = 1.0 / d**2
    new_theta = GarchParams.from_flat(theta_hat.flatten() * diag, theta_hat.order)
    new_cov = result.covariance * np.outer(diag, diag)
    return new_theta, new_cov
