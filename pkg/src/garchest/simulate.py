"""Sample-path generation from the GARCH(p, q) recursion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .innovations import InnovationDist, moment, sample
from .model import GarchParams, TimeSeries

__all__ = ["SimConfig", "SimOutput", "SimulationOverflow", "simulate"]

_OVERFLOW_LIMIT = 1e300


class SimulationOverflow(RuntimeError):
    """The conditional variance exceeded the overflow guard."""

    def __init__(self, step: int):
        super().__init__(
            f"conditional variance exceeded {_OVERFLOW_LIMIT:g} at step {step}; "
            "the parameter configuration is explosive"
        )
        self.step = step


@dataclass(frozen=True)
class SimConfig:
    params: GarchParams
    dist: InnovationDist
    n: int
    burn_in: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")


@dataclass(frozen=True)
class SimOutput:
    series: TimeSeries
    sigma_sq: np.ndarray
    innovations: np.ndarray


@njit(cache=True)
def _sim_core(omega, alpha, beta, eps, sig0, y2_0):
    total = eps.shape[0]
    p = alpha.shape[0]
    q = beta.shape[0]
    r = max(p, q)
    y2 = np.empty(total + r)
    sig = np.empty(total + r)
    for i in range(r):
        sig[i] = sig0
        y2[i] = y2_0
    y = np.empty(total)
    for k in range(total):
        i = k + r
        v = omega
        for a in range(p):
            v += alpha[a] * y2[i - 1 - a]
        for b in range(q):
            v += beta[b] * sig[i - 1 - b]
        if v > _OVERFLOW_LIMIT:
            return y, sig[r:], -1.0, k
        sig[i] = v
        yk = np.sqrt(v) * eps[k]
        y[k] = yk
        y2[i] = yk * yk
    return y, sig[r:], 1.0, -1


def simulate(config: SimConfig) -> SimOutput:
    """Run the recursion for burn_in + n steps and keep the last n.

    The variance is started at the unconditional value
    omega / (1 - sum(alpha)*E[eps^2] - sum(beta)) when that is positive and
    finite, else at omega; pre-sample squared observations are seeded at
    sigma^2 * E[eps^2].  Deterministic given the seed."""
    params = config.params
    rng = np.random.default_rng(config.seed)
    eps = sample(config.dist, rng, config.burn_in + config.n)
    try:
        m2 = moment(config.dist, "square")
    except ValueError:
        m2 = 1.0  # heavy-tailed law without a second moment: neutral seed value
    denom = 1.0 - params.alpha.sum() * m2 - params.beta.sum()
    sig0 = params.omega / denom if denom > 0 else params.omega
    if not np.isfinite(sig0) or sig0 <= 0:
        sig0 = params.omega
    y, sig, ok, step = _sim_core(
        params.omega,
        np.ascontiguousarray(params.alpha),
        np.ascontiguousarray(params.beta),
        eps,
        sig0,
        sig0 * m2,
    )
    if ok < 0:
        raise SimulationOverflow(step)
    keep = slice(config.burn_in, None)
    return SimOutput(
        series=TimeSeries(y[keep]),
        sigma_sq=sig[keep],
        innovations=eps[keep],
    )
