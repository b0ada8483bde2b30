import numpy as np
import pytest
from scipy import stats as sps
from scipy.signal import lfilter

from carmagen import (
    CompoundPoissonInnovation,
    GaussianInnovation,
    SasInnovation,
    apply_localization,
    build_system,
    bspline_L,
    charfn_increment,
    discrete_bspline_filter,
    empirical_autocorr,
    empirical_charfn,
    generate_gaussian,
    generate_levy_oversampled,
    generate_mixed,
    generate_poisson,
    normal_amplitude,
    power_spectrum,
    spectral_factorize,
    whiteness_check,
)

PI = np.pi


def _recovery_error(sysm, real):
    u = apply_localization(sysm, real.samples)
    scale = max(1.0, float(np.max(np.abs(real.increments))))
    return float(np.max(np.abs(u - real.increments[sysm.order :]))) / scale


class TestDeterminism:
    def test_identical_seed_identical_path(self, sys_car2):
        a = generate_gaussian(sys_car2, 1.0, 500, 123)
        b = generate_gaussian(sys_car2, 1.0, 500, 123)
        assert np.array_equal(a.samples, b.samples)

    def test_poisson_and_sas(self, sys_levy, sys_car2):
        pa = generate_poisson(sys_levy, 0.1, normal_amplitude(), 300, 9)
        pb = generate_poisson(sys_levy, 0.1, normal_amplitude(), 300, 9)
        assert np.array_equal(pa.samples, pb.samples)
        assert np.array_equal(pa.knots[0], pb.knots[0])
        sa = generate_levy_oversampled(sys_car2, SasInnovation(1.2, 1.0), 8, 300, 9)
        sb = generate_levy_oversampled(sys_car2, SasInnovation(1.2, 1.0), 8, 300, 9)
        assert np.array_equal(sa.samples, sb.samples)

    def test_mixed_deterministic(self, sys_car2):
        comps = [
            (sys_car2, GaussianInnovation(0.5), {}),
            (sys_car2, CompoundPoissonInnovation(1 / 32, normal_amplitude()), {}),
        ]
        a = generate_mixed(comps, 200, 77)
        b = generate_mixed(comps, 200, 77)
        assert np.array_equal(a.samples, b.samples)


class TestGaussian:
    def test_brownian_anchors_at_zero(self, sys_levy):
        real = generate_gaussian(sys_levy, 1.0, 2000, 42)
        assert real.samples[0] == 0.0
        assert real.boundary.residuals == (0.0 + 0.0j,)

    def test_brownian_increments_are_iid(self, sys_levy):
        real = generate_gaussian(sys_levy, 1.0, 200_000, 42)
        u = np.diff(real.samples.real)
        rep = empirical_autocorr(u, 3)
        assert abs(rep.estimate[0] - 1.0) < 3 * rep.stderr[0]
        assert np.all(np.abs(rep.estimate[1:]) <= 3 * rep.stderr[1:])

    def test_increment_recovery_exact(self, sys_car2):
        real = generate_gaussian(sys_car2, 1.0, 5000, 4)
        assert _recovery_error(sys_car2, real) < 1e-13

    def test_increment_autocovariance_matches_kernel(self, sys_car2):
        var0 = 1.7
        real = generate_gaussian(sys_car2, var0, 400_000, 5)
        u = apply_localization(sys_car2, real.samples).real
        rep = empirical_autocorr(u, 4, sys=sys_car2, var0=var0)
        assert rep.passed

    def test_recovered_innovation_is_white(self, sys_car2):
        real = generate_gaussian(sys_car2, 1.0, (1 << 15) + 2, 6)
        u = apply_localization(sys_car2, real.samples).real
        taps = spectral_factorize(discrete_bspline_filter(sys_car2)).as_array().real
        e = lfilter([1.0], taps, u)
        assert whiteness_check(e).passed

    def test_real_system_yields_real_path(self, sys_car2):
        real = generate_gaussian(sys_car2, 1.0, 4000, 7)
        assert np.max(np.abs(real.samples.imag)) < 1e-10


class TestPoisson:
    def test_levy_paths_piecewise_constant(self, sys_levy):
        real = generate_poisson(sys_levy, 1 / 32, normal_amplitude(), 4000, 7)
        times, _ = real.knots
        s = real.samples
        jumps = np.abs(np.diff(s))
        knot_in_gap = np.array(
            [np.any((times > k - 1) & (times <= k)) for k in range(1, len(s))]
        )
        assert np.max(jumps[~knot_in_gap]) == 0.0
        assert np.all(jumps[knot_in_gap] > 0.0)

    def test_zero_rate_gives_zero_path(self, sys_levy):
        real = generate_poisson(sys_levy, 0.0, normal_amplitude(), 100, 1)
        assert np.max(np.abs(real.samples)) == 0.0

    def test_double_levy_piecewise_linear(self, sys_double_levy):
        real = generate_poisson(sys_double_levy, 1 / 32, normal_amplitude(), 3000, 3)
        times, _ = real.knots
        s = real.samples.real
        second = np.abs(np.diff(s, 2))
        free = np.array(
            [not np.any((times > k - 2) & (times < k + 1)) for k in range(1, len(s) - 1)]
        )
        tol = 1e-12 * max(1.0, np.max(np.abs(s)))
        assert np.max(second[free]) < tol

    def test_increments_reproducible_from_knots(self, sys_car2):
        real = generate_poisson(sys_car2, 0.2, normal_amplitude(), 500, 11)
        times, amps = real.knots
        kernel = bspline_L(sys_car2)
        k = np.arange(500)
        direct = np.zeros(500, dtype=complex)
        for t, a in zip(times, amps):
            direct += a * kernel(k - t)
        assert np.max(np.abs(direct - real.increments)) < 1e-12

    def test_increment_recovery_exact(self, sys_car2):
        real = generate_poisson(sys_car2, 0.3, normal_amplitude(), 2000, 12)
        assert _recovery_error(sys_car2, real) < 1e-13

    def test_dependence_range_limited_to_order(self, sys_car2):
        real = generate_poisson(sys_car2, 0.5, normal_amplitude(), 200_000, 13)
        u = apply_localization(sys_car2, real.samples).real
        rep = empirical_autocorr(u, sys_car2.order + 3)
        far = rep.estimate[sys_car2.order + 1 :]
        assert np.all(np.abs(far) <= 3.0 * rep.stderr[sys_car2.order + 1 :])


class TestOversampled:
    def test_kernel_error_reported_and_halving(self, sys_oscillator):
        errs = []
        for m in (8, 16, 32):
            real = generate_levy_oversampled(
                sys_oscillator, SasInnovation(1.2, 1.0), m, 50, 1
            )
            assert real.oversampling == m
            errs.append(real.kernel_sup_error)
        ratios = np.array(errs[:-1]) / np.array(errs[1:])
        assert np.all(ratios > 1.5) and np.all(ratios < 2.5)

    def test_increment_recovery_exact(self, sys_car2):
        real = generate_levy_oversampled(sys_car2, SasInnovation(1.2, 1.0), 16, 2000, 2)
        assert _recovery_error(sys_car2, real) < 1e-12

    def test_alpha2_matches_gaussian_distribution(self, sys_car2):
        # alpha = 2 with b_alpha = b2 must agree with the exact Gaussian
        # route in distribution; compare independent subsampled marginals
        n = 60_000
        g = generate_gaussian(sys_car2, 1.0, n, 21)
        s = generate_levy_oversampled(sys_car2, SasInnovation(2.0, 0.5), 64, n, 22)
        ug = apply_localization(sys_car2, g.samples).real[:: sys_car2.order + 1]
        us = apply_localization(sys_car2, s.samples).real[:: sys_car2.order + 1]
        assert sps.ks_2samp(ug, us).pvalue > 0.01

    def test_sas_marginal_charfn_matches_table_prediction(self, sys_car2):
        # the localized increments of the oversampled path are exactly
        # alpha-stable with the discrete-kernel norm as scale
        alpha, b_alpha, m = 1.2, 1.0, 32
        kernel = bspline_L(sys_car2)
        taps = np.asarray(kernel(np.arange(m * sys_car2.order + 1) / m)).real
        norm_m = np.sum(np.abs(taps) ** alpha) / m
        real = generate_levy_oversampled(
            sys_car2, SasInnovation(alpha, b_alpha), m, 36_003, 23
        )
        u = apply_localization(sys_car2, real.samples).real[:: sys_car2.order + 1]
        omegas = np.array([[0.4], [0.8], [1.6]])
        theory = [np.exp(-b_alpha * w[0] ** alpha * norm_m) for w in omegas]
        rep = empirical_charfn(
            u.reshape(-1, 1), omegas, theory=theory, rng=np.random.default_rng(8)
        )
        assert rep.passed


class TestMixed:
    def test_single_component_matches_theory(self, sys_car2):
        comps = [(sys_car2, GaussianInnovation(0.5), {})]
        real = generate_mixed(comps, 300_000, 99)
        u = apply_localization(sys_car2, real.samples).real
        rep = empirical_autocorr(u, 3, sys=sys_car2, var0=1.0)
        assert rep.passed

    def test_increment_recovery_same_poles(self, sys_car2):
        comps = [
            (sys_car2, GaussianInnovation(0.5), {}),
            (sys_car2, CompoundPoissonInnovation(1 / 32, normal_amplitude()), {}),
        ]
        real = generate_mixed(comps, 1000, 100)
        assert _recovery_error(sys_car2, real) < 1e-12

    def test_spectra_add_for_independent_gaussians(self):
        s1 = build_system([complex(-0.1, 1.0), complex(-0.1, -1.0)])
        s2 = build_system([-0.4])
        comps = [(s1, GaussianInnovation(0.5), {}), (s2, GaussianInnovation(0.8), {})]
        n = 1 << 16
        real = generate_mixed(comps, n, 12345)
        x = real.samples.real
        segs = 64
        seg = n // segs
        xs = x[: seg * segs].reshape(segs, seg)
        xs = xs - xs.mean(axis=1, keepdims=True)
        per = (np.abs(np.fft.rfft(xs, axis=1)) ** 2 / seg).mean(axis=0)
        om = 2 * PI * np.arange(1, seg // 2) / seg
        theory = power_spectrum(s1, 1.0, om)[1] + power_spectrum(s2, 1.6, om)[1]
        ratio = per[1 : seg // 2] / theory
        assert abs(ratio.mean() - 1.0) < 0.05
        assert np.all((ratio > 0.5) & (ratio < 2.0))

    def test_mixed_increment_charfn_is_product(self, sys_car2):
        g = GaussianInnovation(0.5)
        p = CompoundPoissonInnovation(1 / 32, normal_amplitude())
        comps = [(sys_car2, g, {}), (sys_car2, p, {})]
        real = generate_mixed(comps, 36_003, 404)
        u = apply_localization(sys_car2, real.samples).real[:: sys_car2.order + 1]
        omegas = np.array([[0.3], [0.7], [1.2]])
        theory = [
            charfn_increment(g, sys_car2, w) * charfn_increment(p, sys_car2, w)
            for w in omegas
        ]
        rep = empirical_charfn(
            u.reshape(-1, 1), omegas, theory=theory, rng=np.random.default_rng(9)
        )
        assert rep.passed

    def test_step_mismatch_rejected(self, sys_car2):
        from carmagen import rescale_system

        other = rescale_system(build_system([-1.0]), 0.5)
        comps = [(sys_car2, GaussianInnovation(0.5), {}),
                 (other, GaussianInnovation(0.5), {})]
        with pytest.raises(ValueError):
            generate_mixed(comps, 100, 1)


class TestBoundary:
    @pytest.mark.parametrize("poles", [[0.0], [0.0, 0.0], [0.5j, -0.5j], [0.0, -0.5]])
    def test_boundary_residuals_vanish(self, poles):
        sysm = build_system(poles)
        real = generate_gaussian(sysm, 1.0, 600, 31)
        scale = max(1.0, float(np.max(np.abs(real.samples))))
        assert real.boundary.max_residual <= 1e-12 * scale
        assert len(real.boundary.residuals) == sysm.n0
