"""Core domain types: model orders, parameter vectors, the feasible search
region, and observed series.

The flattened coordinate order is fixed everywhere in this package as
(omega, alpha_1..alpha_p, beta_1..beta_q), equivalently (x, s_1..s_p,
t_1..t_q) for a generic search point.  Index 0 is the level, indices
1..p the ARCH block, indices p+1..p+q the GARCH block.  Gradients,
matrices and JSON documents all use this order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GarchOrder",
    "GarchParams",
    "ParamSpace",
    "EstimationPoint",
    "TimeSeries",
    "validate_point",
    "project_to_space",
]


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GarchOrder:
    """Model order (p, q): p ARCH lags, q GARCH lags."""

    p: int
    q: int

    def __post_init__(self):
        if not (isinstance(self.p, (int, np.integer)) and self.p >= 1):
            raise ValueError(f"p must be a positive integer, got {self.p}")
        if not (isinstance(self.q, (int, np.integer)) and self.q >= 1):
            raise ValueError(f"q must be a positive integer, got {self.q}")

    @property
    def dim(self) -> int:
        """Length of the flattened parameter vector, p + q + 1."""
        return self.p + self.q + 1


@dataclass(frozen=True)
class GarchParams:
    """Parameter vector (omega, alpha, beta) of a GARCH(p, q) process."""

    omega: float
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _readonly(np.atleast_1d(self.alpha)))
        object.__setattr__(self, "beta", _readonly(np.atleast_1d(self.beta)))
        object.__setattr__(self, "omega", float(self.omega))
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.alpha.ndim != 1 or self.alpha.size < 1:
            raise ValueError("alpha must be a nonempty 1-d vector")
        if self.beta.ndim != 1 or self.beta.size < 1:
            raise ValueError("beta must be a nonempty 1-d vector")
        if np.any(self.alpha < 0):
            raise ValueError("alpha coefficients must be nonnegative")
        if np.any(self.beta < 0):
            raise ValueError("beta coefficients must be nonnegative")

    @property
    def order(self) -> GarchOrder:
        return GarchOrder(self.alpha.size, self.beta.size)

    def flatten(self) -> np.ndarray:
        return np.concatenate(([self.omega], self.alpha, self.beta))

    @staticmethod
    def from_flat(vec, order: GarchOrder) -> "GarchParams":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (order.dim,):
            raise ValueError(f"expected vector of length {order.dim}, got shape {vec.shape}")
        return GarchParams(vec[0], vec[1 : 1 + order.p], vec[1 + order.p :])

    def as_point(self) -> "EstimationPoint":
        return EstimationPoint(self.omega, self.alpha, self.beta)


@dataclass(frozen=True)
class EstimationPoint:
    """A generic search point u = (x, s, t), same layout as GarchParams but
    without the sign restrictions (the optimizer keeps iterates feasible,
    but intermediate points may sit anywhere)."""

    x: float
    s: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "s", _readonly(np.atleast_1d(self.s)))
        object.__setattr__(self, "t", _readonly(np.atleast_1d(self.t)))
        if self.s.ndim != 1 or self.t.ndim != 1:
            raise ValueError("s and t must be 1-d vectors")

    @property
    def order(self) -> GarchOrder:
        return GarchOrder(self.s.size, self.t.size)

    def flatten(self) -> np.ndarray:
        return np.concatenate(([self.x], self.s, self.t))

    @staticmethod
    def from_flat(vec, order: GarchOrder) -> "EstimationPoint":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (order.dim,):
            raise ValueError(f"expected vector of length {order.dim}, got shape {vec.shape}")
        return EstimationPoint(vec[0], vec[1 : 1 + order.p], vec[1 + order.p :])

    def as_params(self) -> GarchParams:
        return GarchParams(self.x, self.s, self.t)


@dataclass(frozen=True)
class ParamSpace:
    """Compact feasible region: the box [u_low, u_high]^(p+q+1) intersected
    with the cap sum(t) <= rho0 on the GARCH block."""

    order: GarchOrder
    u_low: float = 1e-4
    u_high: float = 10.0
    rho0: float = 0.999

    def __post_init__(self):
        if not 0 < self.u_low < self.u_high:
            raise ValueError(f"need 0 < u_low < u_high, got ({self.u_low}, {self.u_high})")
        if not 0 < self.rho0 < 1:
            raise ValueError(f"rho0 must be in (0, 1), got {self.rho0}")
        if not self.order.q * self.u_low < self.rho0:
            raise ValueError(
                f"empty space: q*u_low = {self.order.q * self.u_low} >= rho0 = {self.rho0}"
            )

    @property
    def dim(self) -> int:
        return self.order.dim

    def _check_dim(self, vec: np.ndarray):
        if vec.shape != (self.dim,):
            raise ValueError(f"point has shape {vec.shape}, space needs ({self.dim},)")

    def contains_flat(self, vec: np.ndarray) -> bool:
        vec = np.asarray(vec, dtype=float)
        self._check_dim(vec)
        if vec.min() < self.u_low or vec.max() > self.u_high:
            return False
        return vec[1 + self.order.p :].sum() <= self.rho0

    def project_flat(self, vec: np.ndarray) -> np.ndarray:
        """Clamp to the box, then pull the t-block back onto
        {t >= u_low, sum(t) <= rho0} by exact sort-based projection."""
        vec = np.asarray(vec, dtype=float)
        self._check_dim(vec)
        out = np.clip(vec, self.u_low, self.u_high)
        t = out[1 + self.order.p :]
        if t.sum() > self.rho0:
            out[1 + self.order.p :] = _project_capped(t, self.u_low, self.rho0)
        return out


def _project_capped(t: np.ndarray, lo: float, cap: float) -> np.ndarray:
    """Euclidean projection of t onto {t >= lo, sum(t) <= cap}.

    Shift by lo and project onto the scaled simplex {s >= 0, sum(s) <= r}
    with the usual sorted-threshold rule."""
    w = t - lo
    r = cap - t.size * lo
    pos = np.maximum(w, 0.0)
    if pos.sum() <= r:
        return lo + pos
    # active cap: find mu with sum(max(w - mu, 0)) = r
    ws = np.sort(w)[::-1]
    cs = np.cumsum(ws)
    k = np.arange(1, t.size + 1)
    mu_cand = (cs - r) / k
    valid = ws - mu_cand > 0
    kk = np.max(np.nonzero(valid)[0]) + 1
    mu = (cs[kk - 1] - r) / kk
    out = lo + np.maximum(w - mu, 0.0)
    excess = out.sum() - cap
    if excess > 0:  # absorb rounding overshoot so membership holds exactly
        out[np.argmax(out)] -= excess
    return out


@dataclass(frozen=True)
class TimeSeries:
    """Observed sample y_1..y_n."""

    values: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(np.atleast_1d(self.values)))
        if self.values.ndim != 1:
            raise ValueError("values must be a 1-d vector")
        if self.values.size < 2:
            raise ValueError(f"need at least 2 observations, got {self.values.size}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("series contains non-finite values")

    @property
    def n(self) -> int:
        return self.values.size


def as_series(series) -> TimeSeries:
    return series if isinstance(series, TimeSeries) else TimeSeries(np.asarray(series, float))


def validate_point(u: EstimationPoint, space: ParamSpace) -> bool:
    """True iff u lies in the feasible region of `space`."""
    if u.order != space.order:
        raise ValueError(f"point order {u.order} does not match space order {space.order}")
    return space.contains_flat(u.flatten())


def project_to_space(u: EstimationPoint, space: ParamSpace) -> EstimationPoint:
    """Nearest feasible point: box clamp followed, when the cap is violated,
    by exact projection of the t-block.  Idempotent on the feasible set."""
    if u.order != space.order:
        raise ValueError(f"point order {u.order} does not match space order {space.order}")
    return EstimationPoint.from_flat(space.project_flat(u.flatten()), space.order)
