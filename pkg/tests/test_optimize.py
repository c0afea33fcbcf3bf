import numpy as np
import pytest

from garchest import (
    FitError,
    FitOptions,
    GarchOrder,
    GarchParams,
    ParamSpace,
    SimConfig,
    TimeSeries,
    fit,
    gaussian_family,
    multistart_points,
    normal_innovations,
    simulate,
    validate_point,
)


def sim_series(n, seed=0, params=None):
    params = params or GarchParams(0.1, [0.1], [0.8])
    return simulate(
        SimConfig(params=params, dist=normal_innovations(), n=n, seed=seed)
    ).series


class TestMultistart:
    def test_deterministic(self):
        space = ParamSpace(GarchOrder(1, 1))
        a = multistart_points(space, 4, seed=7)
        b = multistart_points(space, 4, seed=7)
        for u, v in zip(a, b):
            assert np.array_equal(u.flatten(), v.flatten())

    def test_all_feasible(self):
        space = ParamSpace(GarchOrder(2, 2), u_low=0.01, u_high=0.5, rho0=0.4)
        for u in multistart_points(space, 10, seed=1):
            assert validate_point(u, space)

    def test_center_uses_sample_variance(self):
        space = ParamSpace(GarchOrder(1, 1))
        y = TimeSeries(np.full(50, 2.0) * np.resize([1.0, -1.0], 50))
        center = multistart_points(space, 1, series=y)[0]
        assert center.x == pytest.approx(0.1 * 4.0, abs=1e-12)


class TestFit:
    def test_recovers_parameters(self):
        series = sim_series(4000, seed=21)
        res = fit(series, ParamSpace(GarchOrder(1, 1)), gaussian_family())
        assert res.converged
        err = np.abs(res.theta_hat.flatten() - [0.1, 0.1, 0.8])
        assert err.max() < 0.08

    def test_bitwise_reproducible(self):
        series = sim_series(1500, seed=5)
        space = ParamSpace(GarchOrder(1, 1))
        a = fit(series, space, gaussian_family())
        b = fit(series, space, gaussian_family())
        assert np.array_equal(a.theta_hat.flatten(), b.theta_hat.flatten())
        assert a.objective_value == b.objective_value
        assert a.n_iters == b.n_iters

    def test_scaling_equivariance(self):
        # rescaling the data by lam multiplies omega by lam^2 and leaves
        # alpha and beta unchanged
        lam = 2.0
        series = sim_series(3000, seed=9)
        space = ParamSpace(GarchOrder(1, 1))
        opts = FitOptions(tol_grad=1e-9, max_iters=2000)
        a = fit(series, space, gaussian_family(), opts)
        b = fit(TimeSeries(lam * series.values), space, gaussian_family(), opts)
        ta, tb = a.theta_hat.flatten(), b.theta_hat.flatten()
        assert abs(tb[0] - lam**2 * ta[0]) < 1e-4
        assert abs(tb[1] - ta[1]) < 1e-4
        assert abs(tb[2] - ta[2]) < 1e-4

    def test_short_series_rejected(self):
        with pytest.raises(FitError):
            fit(sim_series(20), ParamSpace(GarchOrder(1, 1)), gaussian_family())

    def test_result_stays_feasible(self):
        series = sim_series(800, seed=33)
        space = ParamSpace(GarchOrder(1, 2))
        res = fit(series, space, gaussian_family())
        flat = res.theta_hat.flatten()
        assert np.all(flat >= space.u_low) and np.all(flat <= space.u_high)
        assert flat[2:].sum() <= space.rho0 + 1e-12
