import numpy as np
import numpy.polynomial.chebyshev as C
import numpy.polynomial.polynomial as P
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svdgcn.errors import ConfigError
from svdgcn.framelets import (
    ChebFilter,
    ModulationSet,
    check_identity,
    check_monotone,
    cheb_eval_scalar,
    cheb_fit,
    cheb_fit_error,
    cheb_fit_function,
    cheb_nodes,
    eval_modulation,
)

SHIPPED = [ModulationSet("linear"), ModulationSet("haar")] + [
    ModulationSet("entropy", a) for a in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)
]


class TestModulation:
    def test_linear_midpoint(self):
        lin = ModulationSet("linear")
        vals = [eval_modulation(lin, k, np.pi / 2) for k in range(3)]
        np.testing.assert_allclose(vals, [0.5, np.sqrt(2) / 2, 0.5], atol=1e-15)
        assert abs(sum(v * v for v in vals) - 1) <= 1e-15

    def test_linear_origin(self):
        lin = ModulationSet("linear")
        assert [eval_modulation(lin, k, 0.0) for k in range(3)] == [1.0, 0.0, 0.0]

    def test_entropy_peak(self):
        ent = ModulationSet("entropy", 1.0)
        vals = [eval_modulation(ent, k, np.pi / 2) for k in range(3)]
        np.testing.assert_allclose(vals, [0.0, 1.0, 0.0], atol=1e-15)

    def test_entropy_branch_at_midpoint(self):
        ent = ModulationSet("entropy", 0.5)
        g1 = eval_modulation(ent, 1, np.pi / 2)
        assert eval_modulation(ent, 0, np.pi / 2) == pytest.approx(np.sqrt(1 - g1**2))
        assert eval_modulation(ent, 2, np.pi / 2) == 0.0

    def test_arguments_are_clamped(self):
        lin = ModulationSet("linear")
        assert eval_modulation(lin, 0, -1.0) == 1.0
        assert eval_modulation(lin, 2, 4.0) == pytest.approx(1.0)

    def test_vectorized(self):
        xi = np.linspace(0, np.pi, 7)
        out = eval_modulation(ModulationSet("linear"), 0, xi)
        np.testing.assert_allclose(out, np.cos(xi / 2) ** 2)

    @pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5])
    def test_entropy_alpha_range(self, alpha):
        with pytest.raises(ConfigError):
            ModulationSet("entropy", alpha)

    def test_band_index_range(self):
        with pytest.raises(ConfigError):
            ModulationSet("haar").evaluate(2, 0.1)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            ModulationSet("sigmoid")


class TestIdentityAndShape:
    @pytest.mark.parametrize("mset", SHIPPED, ids=str)
    def test_identity_condition(self, mset):
        assert check_identity(mset, 1001) <= 1e-12

    @pytest.mark.parametrize("mset", SHIPPED, ids=str)
    def test_monotone_ends(self, mset):
        assert check_monotone(mset)

    def test_broken_set_detected(self):
        lin = ModulationSet("linear")

        class Broken:
            K = 2

            def evaluate(self, k, xi):
                return (0.8 if k == 0 else 1.0) * lin.evaluate(k, xi)

        assert check_identity(Broken(), 1001) >= 0.1

    @settings(max_examples=50, deadline=None)
    @given(st.floats(1e-3, 1.0), st.floats(0.0, np.pi))
    def test_entropy_identity_pointwise(self, alpha, xi):
        ent = ModulationSet("entropy", alpha)
        total = sum(eval_modulation(ent, k, xi) ** 2 for k in range(3))
        assert abs(total - 1) <= 1e-12


class TestChebyshevFit:
    def test_constant(self):
        c = cheb_fit_function(lambda xi: np.ones_like(xi), 6)
        np.testing.assert_allclose(c, [1, 0, 0, 0, 0, 0, 0], atol=1e-14)
        assert cheb_eval_scalar(c, 2.3) == pytest.approx(1.0, abs=1e-15)

    def test_affine(self):
        c = cheb_fit_function(lambda xi: xi, 5)
        np.testing.assert_allclose(c, [np.pi / 2, np.pi / 2, 0, 0, 0, 0], atol=1e-14)
        assert cheb_eval_scalar(c, np.pi) == pytest.approx(np.pi, abs=1e-14)

    @pytest.mark.parametrize("degree", [3, 10, 16])
    def test_matches_numpy_interpolant(self, degree):
        fn = lambda xi: np.exp(np.sin(xi))  # noqa: E731
        ours = cheb_fit_function(fn, degree)
        ref = C.chebinterpolate(lambda t: fn(np.pi * (t + 1) / 2), degree)
        np.testing.assert_allclose(ours, ref, atol=1e-13)

    @pytest.mark.parametrize("mset", SHIPPED, ids=str)
    def test_reproduces_values_at_nodes(self, mset):
        degree = 10
        xi = np.pi * (cheb_nodes(degree) + 1) / 2
        for k in range(mset.K + 1):
            approx = cheb_eval_scalar(cheb_fit(mset, k, degree), xi)
            np.testing.assert_allclose(approx, mset.evaluate(k, xi), atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-2, 2), min_size=2, max_size=14), st.floats(0, np.pi))
    def test_clenshaw_matches_monomial_expansion(self, coeffs, xi):
        t = 2 * xi / np.pi - 1
        mono = P.polyval(t, C.cheb2poly(coeffs))
        assert abs(cheb_eval_scalar(coeffs, xi) - mono) <= 1e-12 * max(1.0, np.abs(coeffs).sum())

    def test_linear_low_pass_degree_10(self):
        assert cheb_fit_error(ModulationSet("linear"), 0, 10) <= 1e-6

    def test_linear_band_1_pointwise(self):
        lin = ModulationSet("linear")
        c = cheb_fit(lin, 1, 10)
        assert abs(cheb_eval_scalar(c, 1.0) - eval_modulation(lin, 1, 1.0)) <= 1e-6

    def test_linear_error_decays(self):
        lin = ModulationSet("linear")
        for k in range(3):
            assert cheb_fit_error(lin, k, 12) < cheb_fit_error(lin, k, 6)
        errs = [cheb_fit_error(lin, 1, n) for n in (2, 6, 10, 12, 16)]
        assert all(b < a for a, b in zip(errs, errs[1:]))

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_entropy_error_floor(self, alpha):
        # the middle band is sqrt(xi (pi - xi)) up to scale: its square-root
        # endpoints cap polynomial accuracy, so the error shrinks only slowly
        ent = ModulationSet("entropy", alpha)
        e8, e16, e32 = (cheb_fit_error(ent, 1, n) for n in (8, 16, 32))
        assert e32 < e16 < e8
        assert 1e-2 < e16 < 0.1

    def test_filter_shape(self):
        f = ChebFilter.fit(ModulationSet("linear"), 10)
        assert f.coeffs.shape == (3, 11)
        assert (f.K, f.degree) == (2, 10)
        assert f.evaluate(0, 0.3) == pytest.approx(np.cos(0.15) ** 2, abs=1e-6)

    def test_degree_zero_rejected(self):
        with pytest.raises(ConfigError):
            cheb_fit(ModulationSet("linear"), 0, 0)
