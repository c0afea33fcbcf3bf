"""Stationarity diagnostics: companion-matrix Lyapunov exponent for general
(p, q), closed-form Monte Carlo criterion for GARCH(1, 1).

A strictly stationary solution of the GARCH recursion exists iff the top
Lyapunov exponent of the random companion matrices is negative.  The
exponent is estimated by iterating a unit vector through the random
products with per-step renormalization; the growth-factor average
converges to the top exponent for any vector norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .innovations import InnovationDist, sample
from .model import GarchParams

__all__ = [
    "LyapunovEstimate",
    "companion_matrix",
    "lyapunov_exponent",
    "garch11_criterion",
]

_N_BATCHES = 30


@dataclass(frozen=True)
class LyapunovEstimate:
    gamma: float
    std_error: float
    n_products: int
    verdict: str  # "stationary" | "nonstationary" | "inconclusive"


def _verdict(gamma: float, se: float) -> str:
    if gamma + 2.0 * se < 0:
        return "stationary"
    if gamma - 2.0 * se > 0:
        return "nonstationary"
    return "inconclusive"


def _padded(params: GarchParams):
    """Coefficients padded with zeros so that min(p, q) >= 2."""
    alpha = params.alpha
    beta = params.beta
    if alpha.size < 2:
        alpha = np.concatenate([alpha, np.zeros(2 - alpha.size)])
    if beta.size < 2:
        beta = np.concatenate([beta, np.zeros(2 - beta.size)])
    return alpha, beta


def companion_matrix(params: GarchParams, eps_sq: float) -> np.ndarray:
    """The (p'+q'-1) x (p'+q'-1) random-recursion matrix at a given value of
    the squared innovation, with p' = max(p, 2), q' = max(q, 2)."""
    if eps_sq < 0:
        raise ValueError("eps_sq must be nonnegative")
    alpha, beta = _padded(params)
    p, q = alpha.size, beta.size
    n = p + q - 1
    a = np.zeros((n, n))
    # first row: (beta_1 + alpha_1*eps^2, beta_2..beta_{q-1}, beta_q, alpha_2..alpha_{p-1}, alpha_p)
    a[0, 0] = beta[0] + alpha[0] * eps_sq
    a[0, 1 : q - 1] = beta[1 : q - 1]
    a[0, q - 1] = beta[q - 1]
    a[0, q : q + p - 2] = alpha[1 : p - 1]
    a[0, n - 1] = alpha[p - 1]
    # shifted identity block of size q-1
    for i in range(1, q):
        a[i, i - 1] = 1.0
    # squared-innovation row
    a[q, 0] = eps_sq
    # identity block of size p-2
    for i in range(p - 2):
        a[q + 1 + i, q + i] = 1.0
    return a


@njit(cache=True)
def _lyap_increments(base, q_row, alpha1, eps2, v):
    n = base.shape[0]
    out = np.empty(eps2.shape[0])
    w = np.empty(n)
    for k in range(eps2.shape[0]):
        e = eps2[k]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += base[i, j] * v[j]
            w[i] = acc
        w[0] += alpha1 * e * v[0]
        w[q_row] += e * v[0]
        nrm = 0.0
        for i in range(n):
            nrm += w[i] * w[i]
        nrm = np.sqrt(nrm)
        if nrm == 0.0 or not np.isfinite(nrm):
            out[k] = -np.inf if nrm == 0.0 else np.inf
            for kk in range(k + 1, eps2.shape[0]):
                out[kk] = out[k]
            return out
        out[k] = np.log(nrm)
        for i in range(n):
            v[i] = w[i] / nrm
    return out


def _beta_companion_radius(beta: np.ndarray) -> float:
    """Spectral radius of the deterministic GARCH-block companion matrix."""
    q = beta.size
    m = np.zeros((q, q))
    m[0, :] = beta
    for i in range(1, q):
        m[i, i - 1] = 1.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def lyapunov_exponent(
    params: GarchParams,
    dist: InnovationDist,
    n_products: int = 100_000,
    seed: int = 0,
) -> LyapunovEstimate:
    """Estimate the top Lyapunov exponent by renormalized power iteration.

    When every ARCH coefficient is zero the squared observations do not
    feed back into the recursion, the exponent is the log spectral radius
    of the deterministic GARCH block, and it is returned exactly."""
    if n_products < 1000:
        raise ValueError("n_products must be at least 1000")
    if np.all(params.alpha == 0.0):
        gamma = float(np.log(_beta_companion_radius(params.beta)))
        return LyapunovEstimate(gamma, 0.0, n_products, _verdict(gamma, 0.0))
    rng = np.random.default_rng(seed)
    eps2 = sample(dist, rng, n_products) ** 2
    alpha, beta = _padded(params)
    base = companion_matrix(params, 0.0)
    base[0, 0] = beta[0]  # the eps^2 parts are applied per step
    base[beta.size, 0] = 0.0
    v = rng.standard_normal(base.shape[0])
    v /= np.linalg.norm(v)
    inc = _lyap_increments(base, beta.size, alpha[0], eps2, v)
    if np.any(np.isposinf(inc)):
        return LyapunovEstimate(np.inf, 0.0, n_products, "nonstationary")
    if np.any(np.isneginf(inc)):
        return LyapunovEstimate(-np.inf, 0.0, n_products, "stationary")
    gamma = float(inc.mean())
    batches = np.array_split(inc, _N_BATCHES)
    means = np.array([b.mean() for b in batches])
    se = float(means.std(ddof=1) / np.sqrt(len(means)))
    return LyapunovEstimate(gamma, se, n_products, _verdict(gamma, se))


def garch11_criterion(
    params: GarchParams,
    dist: InnovationDist,
    n_draws: int = 100_000,
    seed: int = 0,
) -> LyapunovEstimate:
    """Monte Carlo check of E log(beta_1 + alpha_1 eps^2) < 0 for (1, 1)."""
    if params.order.p != 1 or params.order.q != 1:
        raise ValueError("garch11_criterion applies to GARCH(1,1) only")
    if n_draws < 10_000:
        raise ValueError("n_draws must be at least 10^4")
    a1 = params.alpha[0]
    b1 = params.beta[0]
    if a1 == 0.0:
        gamma = float(np.log(b1)) if b1 > 0 else -np.inf
        return LyapunovEstimate(gamma, 0.0, n_draws, _verdict(gamma, 0.0))
    rng = np.random.default_rng(seed)
    eps2 = sample(dist, rng, n_draws) ** 2
    with np.errstate(divide="ignore"):
        vals = np.log(b1 + a1 * eps2)
    gamma = float(vals.mean())
    if not np.isfinite(gamma):
        return LyapunovEstimate(gamma, 0.0, n_draws, _verdict(gamma, 0.0))
    se = float(vals.std(ddof=1) / np.sqrt(n_draws))
    return LyapunovEstimate(gamma, se, n_draws, _verdict(gamma, se))
