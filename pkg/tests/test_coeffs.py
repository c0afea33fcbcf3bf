import numpy as np
import pytest

from garchest import EstimationPoint, GarchOrder, coeff_gradients, coeff_sequence
from helpers import central_diff, rel_err


def point(x, s, t):
    return EstimationPoint(x, np.atleast_1d(s), np.atleast_1d(t))


class TestSequence:
    def test_garch11_geometric(self):
        # closed form: c_0 = x/(1-t1), c_i = s1 * t1^(i-1)
        ct = coeff_sequence(point(0.7, 0.2, 0.3), GarchOrder(1, 1), 3)
        assert np.allclose(ct.c, [1.0, 0.2, 0.06, 0.018], atol=1e-15)

    def test_garch22_block(self):
        ct = coeff_sequence(point(0.5, [0.1, 0.2], [0.2, 0.1]), GarchOrder(2, 2), 4)
        assert np.allclose(ct.c, [0.5 / 0.7, 0.1, 0.22, 0.054, 0.0328], atol=1e-15)

    def test_garch21_block(self):
        # q < p regime: c_2 = s_2 + t_1 c_1, then the generic recursion
        ct = coeff_sequence(point(0.3, [0.1, 0.05], 0.4), GarchOrder(2, 1), 3)
        assert np.allclose(ct.c, [0.5, 0.1, 0.09, 0.036], atol=1e-15)

    def test_garch12_block(self):
        # q > p regime: c_2 = t_1 c_1 (no s_2 term)
        ct = coeff_sequence(point(0.4, 0.3, [0.2, 0.1]), GarchOrder(1, 2), 4)
        c0 = 0.4 / 0.7
        expect = [c0, 0.3, 0.06, 0.2 * 0.06 + 0.1 * 0.3, 0.2 * 0.042 + 0.1 * 0.06]
        assert np.allclose(ct.c, expect, atol=1e-15)

    def test_t_sum_guard(self):
        with pytest.raises(ValueError):
            coeff_sequence(point(0.5, 0.2, [0.6, 0.5]), GarchOrder(1, 2), 3)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            coeff_sequence(point(0.5, 0.2, 0.3), GarchOrder(2, 1), 3)


class TestGradients:
    def test_garch11_hand_values(self):
        ct = coeff_gradients(point(0.7, 0.2, 0.3), GarchOrder(1, 1), 3)
        assert ct.grad[0, 0] == pytest.approx(1 / 0.7, abs=1e-15)
        assert ct.grad[0, 2] == pytest.approx(0.7 / 0.49, abs=1e-14)
        assert ct.grad[2, 2] == pytest.approx(0.2, abs=1e-15)  # d c_2 / d t_1 = s_1

    def test_zero_s_block(self):
        # c_i (i >= 1) is linear in s, so it vanishes with s, as does d/dx
        ct = coeff_gradients(point(0.5, [0.0, 0.0], [0.3, 0.2]), GarchOrder(2, 2), 6)
        assert np.all(ct.c[1:] == 0.0)
        assert np.all(ct.grad[1:, 0] == 0.0)

    @pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (1, 2), (2, 3)])
    def test_matches_finite_differences(self, p, q):
        rng = np.random.default_rng(42)
        order = GarchOrder(p, q)
        m = 12
        for _ in range(50):
            x = rng.uniform(0.05, 2.0)
            s = rng.uniform(0.01, 0.5, p)
            t = rng.uniform(0.01, 0.8 / q, q)
            u = point(x, s, t)
            table = coeff_gradients(u, order, m)

            for i in (1, m // 2, m):
                def ci(vec, i=i):
                    return coeff_sequence(
                        EstimationPoint.from_flat(vec, order), order, m
                    ).c[i]

                fd = central_diff(ci, u.flatten())
                assert rel_err(table.grad[i], fd, floor=1e-6).max() < 1e-6


class TestInvariants:
    def test_nonnegative_and_decaying(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            p, q = rng.integers(1, 4), rng.integers(1, 4)
            u = point(
                rng.uniform(0.05, 2.0),
                rng.uniform(0.0, 0.5, p),
                rng.uniform(0.01, 0.9 / q, q),
            )
            c = coeff_sequence(u, GarchOrder(p, q), 60).c
            assert np.all(c >= 0)
            # window-to-window decay at rate sum(t) beyond R = max(p, q)
            tsum = u.t.sum()
            r = max(p, q)
            for i in range(r + 1, 60 - q):
                window = c[max(i - q, 0) : i].max()
                assert c[i] <= tsum * window + 1e-15

    def test_homogeneity_in_x_and_s(self):
        u = point(0.4, [0.1, 0.3], 0.5)
        lam = 3.5
        scaled = point(lam * 0.4, [lam * 0.1, lam * 0.3], 0.5)
        c1 = coeff_sequence(u, GarchOrder(2, 1), 30).c
        c2 = coeff_sequence(scaled, GarchOrder(2, 1), 30).c
        assert np.allclose(c2, lam * c1, rtol=1e-14)
