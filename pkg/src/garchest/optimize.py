"""Maximization of the sample objective over the feasible region.

The workhorse is projected gradient ascent with Barzilai-Borwein step
sizes and a nonmonotone Armijo backtracking line search; every iterate is
projected back into the feasible box-plus-cap region.  When gradient
progress stalls short of the tolerance, a small Nelder-Mead polish
(evaluating the objective at projected vertices) finishes the job.
All steps are deterministic given the options' seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .likelihood import ScoreFamily, objective_value_and_gradient
from .model import EstimationPoint, GarchParams, ParamSpace, TimeSeries, as_series

__all__ = ["FitOptions", "FitResult", "FitError", "fit", "multistart_points"]


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class FitOptions:
    max_iters: int = 500
    tol_grad: float = 1e-6
    tol_step: float = 1e-10
    n_starts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tol_grad <= 0 or self.tol_step <= 0:
            raise ValueError("tolerances must be positive")
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")


@dataclass(frozen=True)
class FitResult:
    theta_hat: GarchParams
    objective_value: float
    converged: bool
    n_iters: int
    grad_norm: float
    at_boundary: bool


def multistart_points(
    space: ParamSpace,
    n_starts: int,
    seed: int = 0,
    series: TimeSeries | None = None,
) -> list[EstimationPoint]:
    """Deterministic center heuristic first, then seeded uniform box draws,
    all projected into the feasible region."""
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    p, q = space.order.p, space.order.q
    var = float(np.var(as_series(series).values)) if series is not None else 1.0
    center = np.empty(space.dim)
    center[0] = np.clip(0.1 * var, space.u_low, space.u_high)
    center[1 : 1 + p] = np.clip(0.05, space.u_low, space.u_high)
    center[1 + p :] = 0.7 / q
    points = [space.project_flat(center)]
    rng = np.random.default_rng(seed)
    for _ in range(n_starts - 1):
        draw = rng.uniform(space.u_low, space.u_high, size=space.dim)
        points.append(space.project_flat(draw))
    return [EstimationPoint.from_flat(v, space.order) for v in points]


def _boundary_active(u: np.ndarray, space: ParamSpace, tol: float) -> bool:
    if np.any(u - space.u_low <= tol) or np.any(space.u_high - u <= tol):
        return True
    return space.rho0 - u[1 + space.order.p :].sum() <= tol


def _spg_maximize(fg, proj, u0, opts: FitOptions):
    """Spectral projected ascent; returns (u, f, g, n_iters, pg_norm)."""
    u = proj(u0)
    f, g = fg(u)
    if not np.isfinite(f):
        return u, f, g, 0, np.inf
    lam = 1.0
    hist = [f]
    n_iters = 0
    for _ in range(opts.max_iters):
        n_iters += 1
        d = proj(u + lam * g) - u
        dnorm = np.linalg.norm(d)
        if dnorm <= opts.tol_step:
            break
        gd = float(g @ d)
        if gd <= 0:
            lam = 1.0
            d = proj(u + g) - u
            gd = float(g @ d)
            if gd <= 0:
                break
        f_ref = min(hist[-10:])
        step = 1.0
        while True:
            u_new = proj(u + step * d)
            f_new, g_new = fg(u_new)
            if np.isfinite(f_new) and f_new >= f_ref + 1e-4 * step * gd:
                break
            step *= 0.5
            if step < 1e-14:
                u_new, f_new, g_new = u, f, g
                break
        s = u_new - u
        yv = g_new - g
        sy = float(s @ yv)
        ss = float(s @ s)
        lam = min(max(-ss / sy, 1e-10), 1e10) if sy < 0 else 1e10
        moved = ss > 0
        u, f, g = u_new, f_new, g_new
        hist.append(f)
        pg = np.linalg.norm(proj(u + g) - u)
        if pg <= opts.tol_grad * (1.0 + abs(f)):
            return u, f, g, n_iters, pg
        if not moved:
            break
    pg = np.linalg.norm(proj(u + g) - u)
    return u, f, g, n_iters, pg


def _nelder_mead_polish(fobj, proj, u0, f0, max_iter):
    """Reflection/expansion/contraction on projected vertices (maximization)."""
    d = u0.size
    scale = 1e-3 * (1.0 + np.abs(u0))
    verts = [u0.copy()]
    for j in range(d):
        v = u0.copy()
        v[j] += scale[j]
        verts.append(proj(v))
    verts = np.array(verts)
    fvals = np.array([f0] + [fobj(v) for v in verts[1:]])
    for _ in range(max_iter):
        idx = np.argsort(-fvals)  # descending: best first
        verts, fvals = verts[idx], fvals[idx]
        if abs(fvals[0] - fvals[-1]) <= 1e-12 * (1.0 + abs(fvals[0])):
            break
        centroid = verts[:-1].mean(axis=0)
        xr = proj(centroid + (centroid - verts[-1]))
        fr = fobj(xr)
        if fr > fvals[0]:
            xe = proj(centroid + 2.0 * (centroid - verts[-1]))
            fe = fobj(xe)
            if fe > fr:
                verts[-1], fvals[-1] = xe, fe
            else:
                verts[-1], fvals[-1] = xr, fr
        elif fr > fvals[-2]:
            verts[-1], fvals[-1] = xr, fr
        else:
            xc = proj(centroid + 0.5 * (verts[-1] - centroid))
            fc = fobj(xc)
            if fc > fvals[-1]:
                verts[-1], fvals[-1] = xc, fc
            else:  # shrink toward the best vertex
                for j in range(1, d + 1):
                    verts[j] = proj(verts[0] + 0.5 * (verts[j] - verts[0]))
                    fvals[j] = fobj(verts[j])
    best = int(np.argmax(fvals))
    return verts[best], fvals[best]


def fit(
    series: TimeSeries,
    space: ParamSpace,
    family: ScoreFamily,
    opts: FitOptions | None = None,
) -> FitResult:
    """Maximize the objective over the feasible region from several starts."""
    series = as_series(series)
    opts = opts or FitOptions()
    if series.n < 10 * space.dim:
        raise FitError(
            f"series of length {series.n} is too short for {space.dim} parameters "
            f"(need at least {10 * space.dim})"
        )
    order = space.order

    def fg(vec):
        return objective_value_and_gradient(
            EstimationPoint.from_flat(vec, order), series, family
        )

    def fobj(vec):
        f, _ = fg(vec)
        return f

    proj = space.project_flat
    starts = multistart_points(space, opts.n_starts, opts.seed, series)
    best = None
    for start in starts:
        u, f, g, n_iters, pg = _spg_maximize(fg, proj, start.flatten(), opts)
        if not np.isfinite(f):
            continue
        if not np.all(np.isfinite(g)):
            raise FitError(f"non-finite gradient at iterate {u}")
        tol = opts.tol_grad * (1.0 + abs(f))
        if pg > tol and not _boundary_active(u, space, opts.tol_step):
            u_nm, f_nm = _nelder_mead_polish(fobj, proj, u, f, 100 * space.dim)
            if f_nm > f:
                u, f = u_nm, f_nm
                _, g = fg(u)
                pg = np.linalg.norm(proj(u + g) - u)
        if best is None or f > best[1]:
            best = (u, f, n_iters, pg)
    if best is None:
        raise FitError("all starting points gave a degenerate (-inf) objective")
    u, f, n_iters, pg = best
    at_boundary = _boundary_active(u, space, max(opts.tol_step, 1e-9))
    converged = pg <= opts.tol_grad * (1.0 + abs(f)) or at_boundary
    return FitResult(
        theta_hat=GarchParams.from_flat(u, order),
        objective_value=float(f),
        converged=bool(converged),
        n_iters=int(n_iters),
        grad_norm=float(pg),
        at_boundary=bool(at_boundary),
    )
