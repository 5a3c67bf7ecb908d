"""Kernel construction, moments, inversion, and the convolution bound."""

import numpy as np
import pytest
from scipy.special import i0e, iv

import aggdiff as ad
from aggdiff.kernels import log_bessel_i0, top_hat_analytic_spectrum

from conftest import convolve_quadrature

# (sigma, von Mises a) and (sigma, top-hat gamma) pairs from the reference
# parameter table; reproduced within the stated tolerances.
VM_PAIRS = [(0.1, 3.225), (0.05, 10.664), (0.025, 41.01)]
TH_PAIRS = [(0.1, 0.1732), (0.05, 0.0866), (0.025, 0.0433)]


@pytest.fixture
def grid():
    return ad.Grid(128, 1.0)


class TestBesselI0:
    def test_matches_scipy_over_wide_range(self):
        for a in np.concatenate([np.linspace(1e-3, 14.99, 37),
                                 np.linspace(15.0, 700.0, 41),
                                 [3.1, 3.225, 10.5, 10.664, 41.01, 250.0]]):
            ref = np.log(i0e(a)) + a
            got = log_bessel_i0(float(a))
            # relative error on the I0 scale, i.e. absolute error of the log
            assert abs(got - ref) < 1e-12 * max(1.0, abs(ref)), f"a={a}"

    def test_negative_argument_rejected(self):
        with pytest.raises(ValueError):
            log_bessel_i0(-1.0)


class TestVonMises:
    def test_normalized_and_positive(self, grid):
        for a in (0.5, 3.225, 41.01, 250.0):
            k = ad.von_mises(grid, a)
            assert abs(grid.dx * k.samples.values.sum() - 1.0) < 1e-8
            assert np.all(k.samples.values > 0)
            assert np.all(np.isfinite(k.samples.values))

    @pytest.mark.parametrize("sigma,a", VM_PAIRS)
    def test_sigma_matches_reference_table(self, grid, sigma, a):
        k = ad.von_mises(grid, a)
        assert abs(k.sigma - sigma) < 2e-3

    def test_uniform_limit(self, grid):
        k = ad.von_mises(grid, 1e-8)
        assert np.abs(k.samples.values - 1.0 / grid.L).max() < 1e-7
        # continuous value up to the O(dx^2) quadrature offset of x^2
        assert abs(k.sigma - grid.L / np.sqrt(12)) < 2e-5
        # and exactly the sigma of the discrete uniform density
        uniform = ad.kernel_sigma(np.full(grid.M, 1.0 / grid.L), grid)
        assert abs(k.sigma - uniform) < 1e-9

    def test_huge_concentration_no_overflow(self, grid):
        k = ad.von_mises(grid, 250.0)
        assert np.all(np.isfinite(k.samples.values))
        assert abs(k.sigma - 0.01) < 2e-3  # sigma=0.01 pairs with a=250

    def test_spectrum_is_bessel_ratio(self, grid):
        k = ad.von_mises(grid, 3.225)
        for mode in range(11):
            want = iv(mode, 3.225) / (i0e(3.225) * np.exp(3.225))
            assert abs(k.unit_coefficient(mode) - want) < 1e-10

    def test_domain_errors(self, grid):
        with pytest.raises(ValueError):
            ad.von_mises(grid, 0.0)
        with pytest.raises(ValueError):
            ad.von_mises(grid, -2.0)

    def test_symmetric_first_moment_vanishes(self, grid):
        from aggdiff.kernels import kernel_first_moment
        for a in (0.5, 7.0, 41.01):
            assert abs(kernel_first_moment(ad.von_mises(grid, a))) < 1e-10
        assert abs(kernel_first_moment(ad.top_hat(grid, 0.1732))) < 1e-10


class TestTopHat:
    def test_cell_averaged_normalization_is_machine_exact(self, grid):
        # including half-widths not aligned with any cell edge
        for gamma in (0.1732, 0.0866, 0.0433, 0.1, 0.123456789, 0.0101):
            k = ad.top_hat(grid, gamma)
            assert abs(grid.dx * k.samples.values.sum() - 1.0) < 1e-12
            assert np.all(k.samples.values >= 0)

    @pytest.mark.parametrize("sigma,gamma", TH_PAIRS)
    def test_sigma_matches_reference_table(self, grid, sigma, gamma):
        k = ad.top_hat(grid, gamma)
        assert abs(k.sigma - sigma) < 1e-3

    def test_sigma_equals_gamma_over_sqrt3(self, grid):
        # closed-form second moment of the uniform density on [-g, g]
        for gamma in (0.05, 0.1732, 0.21):
            k = ad.top_hat(grid, gamma)
            assert abs(k.sigma - gamma / np.sqrt(3)) < 5e-4

    def test_uniform_limit(self, grid):
        k = ad.top_hat(grid, grid.L / 2 * (1 - 1e-9))
        assert np.abs(k.samples.values - 1.0 / grid.L).max() < 1e-6

    def test_domain_errors(self, grid):
        for gamma in (0.0, -0.1, 0.5, 0.6):
            with pytest.raises(ValueError):
                ad.top_hat(grid, gamma)

    def test_analytic_spectrum_close_to_sampled_at_low_modes(self, grid):
        k = ad.top_hat(grid, 0.1732)
        analytic = top_hat_analytic_spectrum(k)
        for mode in range(6):
            got = grid.L * k.spectrum.coeffs[mode].real
            want = grid.L * analytic.coeffs[mode].real
            assert abs(got - want) < 1e-3


class TestKernelSigma:
    def test_negative_variance_clamped_with_warning(self):
        g = ad.Grid(4, 1.0)
        raw = np.array([1.0, -1.0, 0.0, -1.0])  # not a density; forces var < 0
        with pytest.warns(UserWarning, match="clamped"):
            sigma = ad.kernel_sigma(raw, g)
        assert sigma == 0.0

    def test_monotone_in_parameters(self, grid):
        vm_sigmas = [ad.von_mises(grid, a).sigma for a in (0.5, 2, 5, 12, 40, 120)]
        assert all(s1 > s2 for s1, s2 in zip(vm_sigmas, vm_sigmas[1:]))
        th_sigmas = [ad.top_hat(grid, g_).sigma for g_ in (0.02, 0.05, 0.12, 0.24, 0.4)]
        assert all(s1 < s2 for s1, s2 in zip(th_sigmas, th_sigmas[1:]))


class TestSolveParamForSigma:
    @pytest.mark.parametrize("sigma,a", VM_PAIRS)
    def test_von_mises_table_within_one_percent(self, grid, sigma, a):
        got = ad.solve_param_for_sigma("von_mises", sigma, grid)
        assert abs(got - a) / a < 0.01

    @pytest.mark.parametrize("sigma,gamma", TH_PAIRS)
    def test_top_hat_table_within_one_percent(self, grid, sigma, gamma):
        got = ad.solve_param_for_sigma("top_hat", sigma, grid)
        assert abs(got - gamma) / gamma < 0.01

    def test_inversion_round_trip(self, grid):
        for family, sigma in (("top_hat", 0.05), ("von_mises", 0.08)):
            p = ad.solve_param_for_sigma(family, sigma, grid)
            k = ad.top_hat(grid, p) if family == "top_hat" else ad.von_mises(grid, p)
            assert abs(k.sigma - sigma) <= 1e-6

    def test_out_of_range_names_interval(self, grid):
        with pytest.raises(ValueError, match="attainable range"):
            ad.solve_param_for_sigma("von_mises", 0.5, grid)
        with pytest.raises(ValueError, match="attainable range"):
            ad.solve_param_for_sigma("top_hat", 0.9, grid)

    def test_unknown_family(self, grid):
        with pytest.raises(ValueError, match="family"):
            ad.solve_param_for_sigma("gaussian", 0.1, grid)


class TestCustomKernels:
    def test_load_normalizes(self, grid, tmp_path):
        path = tmp_path / "kernel.txt"
        values = ad.von_mises(grid, 5.0).samples.values * 3.7  # denormalized
        np.savetxt(path, values)
        k = ad.load_kernel(path, grid)
        assert abs(grid.dx * k.samples.values.sum() - 1.0) < 1e-12
        assert k.family == "custom"

    def test_negative_samples_rejected(self, grid):
        values = np.ones(grid.M)
        values[3] = -0.5
        with pytest.raises(ValueError, match="non-negative"):
            ad.custom_kernel(grid, values)

    def test_asymmetric_kernel_rejected(self, grid):
        values = np.exp(-((grid.x - 0.3) ** 2) / 0.01)  # off-center bump
        with pytest.raises(ValueError, match="first moment"):
            ad.custom_kernel(grid, values)

    def test_wrong_length_rejected(self, grid):
        with pytest.raises(ValueError, match="samples"):
            ad.custom_kernel(grid, np.ones(64))


class TestConvolutionBound:
    def test_gradient_of_smoothed_field_bounded(self, grid):
        # | d/dx (K * phi) |_inf <= sqrt(L) * |K'|_inf * |phi|_L2, checked
        # on 100 random fields; the discrete analogue follows from the
        # rectangle-rule form of the spectral convolution.
        kernel = ad.von_mises(grid, 3.225)
        dK = ad.inverse(ad.spectral_derivative(kernel.spectrum))
        dk_inf = np.abs(dK.values).max()
        rng = np.random.default_rng(2024)
        for _ in range(100):
            phi = rng.standard_normal(grid.M)
            F = ad.spectral_convolve(ad.forward(ad.Field(grid, phi)),
                                     ad.spectral_derivative(kernel.spectrum))
            lhs = np.abs(ad.inverse(F).values).max()
            phi_l2 = np.sqrt(grid.dx * (phi ** 2).sum())
            bound = np.sqrt(grid.L) * dk_inf * phi_l2
            assert lhs <= bound * (1 + 1e-6)


def test_kernel_convolution_against_quadrature(grid):
    rng = np.random.default_rng(77)
    small = ad.Grid(16, 1.0)
    k = ad.top_hat(small, 0.17)
    phi = rng.uniform(0, 2, 16)
    got = ad.inverse(ad.spectral_convolve(k.spectrum, ad.forward(ad.Field(small, phi))))
    want = convolve_quadrature(k.samples.values, phi, small.dx)
    assert np.abs(got.values - want).max() < 1e-10
