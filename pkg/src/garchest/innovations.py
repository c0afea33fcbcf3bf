"""Innovation laws for simulation: sampling, moments, and rescaling between
the scaling conventions that make each score family identifiable.

Built-in base laws (scale_divisor d = 1):

  * normal      -- standard normal
  * laplace     -- two-sided exponential with unit rate, density exp(-|t|)/2
  * polytail    -- density ((theta-1)/2) (1+|t|)^(-theta), theta > 1
  * table       -- empirical sample, resampled with replacement

A distribution with divisor d draws from the base law and divides by d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "InnovationDist",
    "ScalingConvention",
    "SECOND_MOMENT_ONE",
    "FIRST_ABS_MOMENT_ONE",
    "poly_ratio",
    "normal_innovations",
    "laplace_innovations",
    "polytail_innovations",
    "table_innovations",
    "sample",
    "moment",
    "rescale_to",
]

_EULER = 0.5772156649015328606


@dataclass(frozen=True)
class ScalingConvention:
    """Moment normalization: E eps^2 = 1, E|eps| = 1, or
    E(|eps|/(1+|eps|)) = 1/theta."""

    tag: str  # "second-moment-one" | "first-abs-moment-one" | "poly-ratio"
    theta: float | None = None

    def __post_init__(self):
        if self.tag not in ("second-moment-one", "first-abs-moment-one", "poly-ratio"):
            raise ValueError(f"unknown scaling convention {self.tag!r}")
        if self.tag == "poly-ratio":
            if self.theta is None or not self.theta > 1:
                raise ValueError("poly-ratio convention needs theta > 1")


SECOND_MOMENT_ONE = ScalingConvention("second-moment-one")
FIRST_ABS_MOMENT_ONE = ScalingConvention("first-abs-moment-one")


def poly_ratio(theta: float) -> ScalingConvention:
    return ScalingConvention("poly-ratio", float(theta))


@dataclass(frozen=True)
class InnovationDist:
    kind: str  # "normal" | "laplace" | "polytail" | "table"
    scale_divisor: float = 1.0
    theta: float | None = None
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("normal", "laplace", "polytail", "table"):
            raise ValueError(f"unknown innovation kind {self.kind!r}")
        if not self.scale_divisor > 0:
            raise ValueError("scale_divisor must be positive")
        if self.kind == "polytail":
            if self.theta is None or not self.theta > 1:
                raise ValueError("polytail innovations need theta > 1")
        if self.kind == "table":
            if self.table is None or np.asarray(self.table).size < 2:
                raise ValueError("table innovations need a sample of size >= 2")
            tab = np.array(self.table, dtype=float)
            tab.setflags(write=False)
            object.__setattr__(self, "table", tab)

    def with_divisor(self, d: float) -> "InnovationDist":
        return InnovationDist(self.kind, float(d), self.theta, self.table)


def normal_innovations(divisor: float = 1.0) -> InnovationDist:
    return InnovationDist("normal", divisor)


def laplace_innovations(divisor: float = 1.0) -> InnovationDist:
    return InnovationDist("laplace", divisor)


def polytail_innovations(theta: float, divisor: float = 1.0) -> InnovationDist:
    return InnovationDist("polytail", divisor, theta=float(theta))


def table_innovations(sample_values, divisor: float = 1.0) -> InnovationDist:
    return InnovationDist("table", divisor, table=np.asarray(sample_values, float))


def sample(dist: InnovationDist, rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` i.i.d. draws, each divided by the scale divisor.

    The polynomial-tail law is sampled by inverse transform on the
    magnitude, P(|e| > t) = (1+t)^(1-theta), with a uniform sign."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if dist.kind == "normal":
        draws = rng.standard_normal(count)
    elif dist.kind == "laplace":
        draws = rng.laplace(0.0, 1.0, count)
    elif dist.kind == "polytail":
        sign = np.where(rng.random(count) < 0.5, -1.0, 1.0)
        v = rng.random(count)
        draws = sign * (v ** (-1.0 / (dist.theta - 1.0)) - 1.0)
    else:
        draws = rng.choice(dist.table, size=count, replace=True)
    return draws / dist.scale_divisor


def _abs_density(dist: InnovationDist):
    """Density of |base draw| on (0, inf), for quadrature."""
    if dist.kind == "normal":
        return lambda t: math.sqrt(2.0 / math.pi) * math.exp(-0.5 * t * t)
    if dist.kind == "laplace":
        return lambda t: math.exp(-t)
    if dist.kind == "polytail":
        th = dist.theta
        return lambda t: (th - 1.0) * (1.0 + t) ** (-th)
    raise ValueError("no closed-form density for table innovations")


def _base_moment(dist: InnovationDist, which: str) -> float:
    """Absolute moments of the base (divisor-1) law; raises when infinite."""
    kind = dist.kind
    if kind == "normal":
        return {"abs": math.sqrt(2.0 / math.pi), "square": 1.0, "fourth": 3.0}[which]
    if kind == "laplace":
        return {"abs": 1.0, "square": 2.0, "fourth": 24.0}[which]
    if kind == "polytail":
        th = dist.theta
        need = {"abs": 2.0, "square": 3.0, "fourth": 5.0}[which]
        if th <= need:
            raise ValueError(
                f"{which} moment of polytail law is infinite for theta = {th} <= {need}"
            )
        if which == "abs":
            return 1.0 / (th - 2.0)
        if which == "square":
            return 2.0 / ((th - 2.0) * (th - 3.0))
        return 24.0 / ((th - 2.0) * (th - 3.0) * (th - 4.0) * (th - 5.0))
    # empirical table
    a = np.abs(dist.table)
    return {"abs": a.mean(), "square": (a**2).mean(), "fourth": (a**4).mean()}[which]


def _ratio_moment(dist: InnovationDist, divisor: float) -> float:
    """E(|e|/(1+|e|)) for e = base/divisor, by quadrature (or averaging for
    empirical tables)."""
    if dist.kind == "table":
        a = np.abs(dist.table) / divisor
        return float((a / (1.0 + a)).mean())
    dens = _abs_density(dist)
    val, _ = integrate.quad(
        lambda t: (t / divisor) / (1.0 + t / divisor) * dens(t),
        0.0,
        np.inf,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=200,
    )
    return val


def moment(dist: InnovationDist, which: str) -> float:
    """Closed-form (or, for tables, empirical) moment of the scaled law.

    `which` is one of "abs" (E|e|), "square" (E e^2), "fourth" (E|e|^4),
    "ratio" (E(|e|/(1+|e|)))."""
    d = dist.scale_divisor
    if which == "ratio":
        return _ratio_moment(dist, d)
    base = _base_moment(dist, which)
    power = {"abs": 1, "square": 2, "fourth": 4}[which]
    return base / d**power


def log_square_moment(dist: InnovationDist) -> float:
    """E log(e^2) for the scaled law; used by stationarity oracles."""
    d = dist.scale_divisor
    if dist.kind == "table":
        return float(np.log(dist.table**2).mean()) - 2.0 * math.log(d)
    if dist.kind == "normal":
        base = -(_EULER + math.log(2.0))
    else:
        dens = _abs_density(dist)
        base, _ = integrate.quad(
            lambda t: 2.0 * math.log(t) * dens(t), 0.0, np.inf, epsabs=1e-12, epsrel=1e-12
        )
    return base - 2.0 * math.log(d)


def rescale_to(dist: InnovationDist, conv: ScalingConvention) -> InnovationDist:
    """Same base law, divisor chosen so the convention holds exactly."""
    if conv.tag == "second-moment-one":
        d = math.sqrt(_base_moment(dist, "square"))
    elif conv.tag == "first-abs-moment-one":
        d = _base_moment(dist, "abs")
    else:
        target = 1.0 / conv.theta
        # E(|base/d| / (1 + |base/d|)) decreases monotonically in d
        lo, hi = 1e-12, 1e12
        if not (_ratio_moment(dist, lo) > target > _ratio_moment(dist, hi)):
            raise ValueError("cannot bracket the poly-ratio scaling divisor")
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            val = _ratio_moment(dist, mid)
            if abs(val - target) <= 1e-10:
                lo = hi = mid
                break
            if val > target:
                lo = mid
            else:
                hi = mid
        d = math.sqrt(lo * hi)
    return dist.with_divisor(d)
