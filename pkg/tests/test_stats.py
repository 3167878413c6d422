import math

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from style_lens import WelchResult, betainc_reg, quantile_inclusive, welch_t_test


def betainc_quadrature(a, b, x):
    """Brute-force numeric integration of the beta density."""
    norm = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b))
    val, _err = scipy.integrate.quad(
        lambda t: norm * t ** (a - 1.0) * (1.0 - t) ** (b - 1.0),
        0.0, x, limit=200,
    )
    return val


class TestBetainc:
    @pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.0, 3.0), (2.5, 7.0),
                                     (10.0, 0.5), (40.0, 40.0)])
    def test_matches_quadrature(self, a, b):
        for x in (0.01, 0.2, 0.5, 0.8, 0.99):
            assert betainc_reg(a, b, x) == pytest.approx(
                betainc_quadrature(a, b, x), abs=1e-8
            )

    def test_boundaries(self):
        assert betainc_reg(2.0, 3.0, 0.0) == 0.0
        assert betainc_reg(2.0, 3.0, 1.0) == 1.0

    def test_symmetry(self):
        # I_x(a,b) + I_{1-x}(b,a) = 1
        assert betainc_reg(3.0, 5.0, 0.3) + betainc_reg(5.0, 3.0, 0.7) == pytest.approx(1.0)

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            betainc_reg(0.0, 1.0, 0.5)


class TestWelch:
    def test_matches_scipy(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.normal(0.0, 1.0, size=rng.integers(5, 40))
            y = rng.normal(0.5, 2.0, size=rng.integers(5, 40))
            got = welch_t_test(x, y)
            ref = scipy.stats.ttest_ind(x, y, equal_var=False)
            assert got.statistic == pytest.approx(ref.statistic, rel=1e-10)
            assert got.p_value == pytest.approx(ref.pvalue, rel=1e-8)

    def test_identical_samples(self):
        res = welch_t_test([1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_small_sample_rejected(self):
        with pytest.raises(ValueError):
            welch_t_test([1.0], [1.0, 2.0])

    def test_result_fields(self):
        res = welch_t_test([1.0, 2.0, 3.0], [4.0, 5.0, 6.0, 7.0])
        assert isinstance(res, WelchResult)
        assert (res.n1, res.n2) == (3, 4)


class TestQuantile:
    def test_inclusive_interpolation_worked_example(self):
        vals = [1.0, 2.0, 3.0, 4.0]
        assert quantile_inclusive(vals, 0.25) == pytest.approx(1.75)
        assert quantile_inclusive(vals, 0.5) == pytest.approx(2.5)
        assert quantile_inclusive(vals, 0.75) == pytest.approx(3.25)

    def test_matches_numpy_linear(self):
        rng = np.random.default_rng(3)
        vals = rng.normal(size=31)
        for q in (0.0, 0.1, 0.25, 0.5, 0.9, 1.0):
            assert quantile_inclusive(vals, q) == pytest.approx(
                np.quantile(vals, q), abs=1e-12
            )

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            quantile_inclusive([], 0.5)
