"""Monte Carlo harness: replicated simulate-and-fit pipelines that measure
bias, spread, coverage and cross-family efficiency at desk scale.

All arms (score families) of one replication fit the same simulated
series -- the observed process is identical under every scaling
convention, so common random numbers are exact.  What changes per arm is
the parameter value the arm should recover: with r the ratio of the
arm's convention divisor to the generating law's divisor, the level and
ARCH block scale by r^2 while the GARCH block is invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .inference import full_inference, information_matrix, tau_sq_analytic
from .innovations import InnovationDist, rescale_to, sample
from .likelihood import ScoreFamily
from .model import GarchParams, ParamSpace
from .optimize import FitError, FitOptions, fit
from .simulate import SimConfig, simulate

__all__ = ["McConfig", "FamilyArmSummary", "McSummary", "NormalityReport", "run_mc", "normality_check"]


@dataclass(frozen=True)
class McConfig:
    params: GarchParams
    dist: InnovationDist
    families: list[ScoreFamily]
    n: int
    n_reps: int
    seed: int = 0
    space: ParamSpace | None = None
    burn_in: int = 1000
    fit_opts: FitOptions | None = None
    oracle_n: int = 1_000_000
    tau_draws: int = 1_000_000
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_reps < 2:
            raise ValueError("n_reps must be at least 2")
        if not self.families:
            raise ValueError("families must be nonempty")


@dataclass(frozen=True)
class FamilyArmSummary:
    family_name: str
    divisor_ratio: float
    true_theta: np.ndarray
    estimates: np.ndarray  # (n_reps, dim), nan rows for failed replications
    std_errors: np.ndarray
    converged: np.ndarray
    interior: np.ndarray  # converged and away from the boundary
    failure_count: int
    unreliable: bool
    mean_theta: np.ndarray
    bias: np.ndarray
    rmse: np.ndarray
    emp_cov: np.ndarray  # covariance of sqrt(n)(theta_hat - theta), interior reps
    theo_cov: np.ndarray  # 4 tau^2 A^{-1} from the long-run oracle
    coverage: np.ndarray  # per-coordinate 95% CI coverage


@dataclass(frozen=True)
class McSummary:
    n: int
    n_reps: int
    seed: int
    arms: dict[str, FamilyArmSummary]
    variance_ratios: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True)
class NormalityReport:
    coordinate: int
    n_used: int
    ks_distance: float
    ks_pvalue: float
    q025: float
    q975: float


def _derived_seed(*key) -> int:
    return int(np.random.SeedSequence(list(key)).generate_state(1)[0])


def _arm_true_theta(config: McConfig, family: ScoreFamily) -> tuple[GarchParams, float]:
    d_f = rescale_to(config.dist, family.convention).scale_divisor
    r = d_f / config.dist.scale_divisor
    flat = config.params.flatten().copy()
    p = config.params.order.p
    flat[: p + 1] *= r**2
    return GarchParams.from_flat(flat, config.params.order), r


def _tau_sq_theory(config: McConfig, family: ScoreFamily) -> float:
    try:
        return tau_sq_analytic(family, config.dist)
    except ValueError:
        scaled = rescale_to(config.dist, family.convention)
        rng = np.random.default_rng(_derived_seed(config.seed, 10**6))
        eps = sample(scaled, rng, config.tau_draws)
        g1m = float(np.mean(family.g1(eps, 1.0) ** 2))
        g2m = float(np.mean(family.g2(eps, np.ones_like(eps))))
        return g1m / g2m**2


def _run_rep(config: McConfig, space: ParamSpace, trues, rep: int):
    sim = simulate(
        SimConfig(
            params=config.params,
            dist=config.dist,
            n=config.n,
            burn_in=config.burn_in,
            seed=_derived_seed(config.seed, rep),
        )
    )
    base_opts = config.fit_opts or FitOptions()
    out = []
    for fi, family in enumerate(config.families):
        opts = FitOptions(
            max_iters=base_opts.max_iters,
            tol_grad=base_opts.tol_grad,
            tol_step=base_opts.tol_step,
            n_starts=base_opts.n_starts,
            seed=_derived_seed(config.seed, rep, 1 + fi),
        )
        theta_true, _ = trues[fi]
        try:
            res = fit(sim.series, space, family, opts)
            inf = full_inference(sim.series, res.theta_hat, family)
            out.append(
                (
                    res.theta_hat.flatten(),
                    inf.std_errors,
                    res.converged,
                    res.converged and not res.at_boundary,
                )
            )
        except (FitError, RuntimeError, ValueError):
            dim = theta_true.order.dim
            out.append((np.full(dim, np.nan), np.full(dim, np.nan), False, False))
    return out


def run_mc(config: McConfig) -> McSummary:
    """Run the replicated experiment and summarize each family arm."""
    space = config.space or ParamSpace(config.params.order)
    trues = [_arm_true_theta(config, fam) for fam in config.families]
    for theta_true, _ in trues:
        if not space.contains_flat(theta_true.flatten()):
            raise ValueError(
                f"converted true parameters {theta_true.flatten()} fall outside "
                "the search space; widen the bounds"
            )

    if config.n_jobs != 1:
        from joblib import Parallel, delayed

        rep_results = Parallel(n_jobs=config.n_jobs)(
            delayed(_run_rep)(config, space, trues, rep) for rep in range(config.n_reps)
        )
    else:
        rep_results = [_run_rep(config, space, trues, rep) for rep in range(config.n_reps)]

    # long-run oracle series for the information matrix, shared by all arms
    oracle = simulate(
        SimConfig(
            params=config.params,
            dist=config.dist,
            n=config.oracle_n,
            burn_in=config.burn_in,
            seed=_derived_seed(config.seed, 10**6 + 1),
        )
    )

    dim = config.params.order.dim
    arms: dict[str, FamilyArmSummary] = {}
    for fi, family in enumerate(config.families):
        theta_true, ratio = trues[fi]
        tt = theta_true.flatten()
        est = np.array([rep_results[r][fi][0] for r in range(config.n_reps)])
        ses = np.array([rep_results[r][fi][1] for r in range(config.n_reps)])
        conv = np.array([rep_results[r][fi][2] for r in range(config.n_reps)])
        interior = np.array([rep_results[r][fi][3] for r in range(config.n_reps)])
        failures = int(np.sum(~conv))
        ok = interior
        dev = est[ok] - tt
        scaled_dev = np.sqrt(config.n) * dev
        emp_cov = (
            np.cov(scaled_dev, rowvar=False, ddof=1)
            if ok.sum() >= 2
            else np.full((dim, dim), np.nan)
        )
        a_hat = information_matrix(oracle.series, theta_true)
        tau_sq = _tau_sq_theory(config, family)
        theo_cov = 4.0 * tau_sq * np.linalg.inv(a_hat)
        covered = np.abs(est[ok] - tt) <= 1.96 * ses[ok]
        arms[family.name] = FamilyArmSummary(
            family_name=family.name,
            divisor_ratio=ratio,
            true_theta=tt,
            estimates=est,
            std_errors=ses,
            converged=conv,
            interior=interior,
            failure_count=failures,
            unreliable=failures > 0.2 * config.n_reps,
            mean_theta=est[ok].mean(axis=0) if ok.any() else np.full(dim, np.nan),
            bias=dev.mean(axis=0) if ok.any() else np.full(dim, np.nan),
            rmse=np.sqrt((dev**2).mean(axis=0)) if ok.any() else np.full(dim, np.nan),
            emp_cov=np.atleast_2d(emp_cov),
            theo_cov=theo_cov,
            coverage=covered.mean(axis=0) if ok.any() else np.full(dim, np.nan),
        )

    ratios: dict[str, np.ndarray] = {}
    p = config.params.order.p
    names = [f.name for f in config.families]
    for i in range(len(names)):
        for j in range(len(names)):
            if i == j:
                continue
            vi = np.diag(arms[names[i]].emp_cov)[p + 1 :]
            vj = np.diag(arms[names[j]].emp_cov)[p + 1 :]
            ratios[f"{names[i]}/{names[j]}"] = vi / vj
    return McSummary(
        n=config.n, n_reps=config.n_reps, seed=config.seed, arms=arms, variance_ratios=ratios
    )


def normality_check(
    summary: McSummary, coordinate: int, family: str | None = None
) -> NormalityReport:
    """Kolmogorov-Smirnov comparison of one standardized coordinate of
    sqrt(n)(theta_hat - theta) against the standard normal."""
    arm = summary.arms[family] if family is not None else next(iter(summary.arms.values()))
    dim = arm.true_theta.size
    if not 0 <= coordinate < dim:
        raise ValueError(f"coordinate {coordinate} out of range for dimension {dim}")
    ok = arm.interior
    if ok.sum() < 100:
        raise ValueError(f"need at least 100 successful replications, have {int(ok.sum())}")
    sd = np.sqrt(arm.theo_cov[coordinate, coordinate])
    z = np.sqrt(summary.n) * (arm.estimates[ok, coordinate] - arm.true_theta[coordinate]) / sd
    ks = stats.kstest(z, "norm")
    return NormalityReport(
        coordinate=coordinate,
        n_used=int(ok.sum()),
        ks_distance=float(ks.statistic),
        ks_pvalue=float(ks.pvalue),
        q025=float(np.quantile(z, 0.025)),
        q975=float(np.quantile(z, 0.975)),
    )
