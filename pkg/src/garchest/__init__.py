"""Density-based quasi-likelihood estimation for GARCH(p, q) processes.

The package simulates GARCH paths, checks strict stationarity through the
top Lyapunov exponent of the random companion matrices, fits the
parameters by maximizing a score-family objective over a compact feasible
region, and delivers asymptotic standard errors from the
4 * tau^2 * A^{-1} covariance together with a Monte Carlo harness for
consistency, normality and efficiency experiments.
"""

from .model import (
    EstimationPoint,
    GarchOrder,
    GarchParams,
    ParamSpace,
    TimeSeries,
    project_to_space,
    validate_point,
)
from .innovations import (
    FIRST_ABS_MOMENT_ONE,
    SECOND_MOMENT_ONE,
    InnovationDist,
    ScalingConvention,
    laplace_innovations,
    moment,
    normal_innovations,
    poly_ratio,
    polytail_innovations,
    rescale_to,
    sample,
    table_innovations,
)
from .coeffs import CoeffTable, coeff_gradients, coeff_sequence
from .stationarity import (
    LyapunovEstimate,
    companion_matrix,
    garch11_criterion,
    lyapunov_exponent,
)
from .simulate import SimConfig, SimOutput, SimulationOverflow, simulate
from .likelihood import (
    ScaleVector,
    ScoreFamily,
    conditional_scale,
    gaussian_family,
    get_family,
    laplace_family,
    objective,
    objective_gradient,
    polytail_family,
    score_eval,
)
from .optimize import FitError, FitOptions, FitResult, fit, multistart_points
from .inference import (
    InferenceResult,
    SingularInformationError,
    full_inference,
    information_matrix,
    rescale_estimate,
    tau_sq_analytic,
    tau_sq_empirical,
)
from .mc import (
    FamilyArmSummary,
    McConfig,
    McSummary,
    NormalityReport,
    normality_check,
    run_mc,
)

__version__ = "0.1.0"
