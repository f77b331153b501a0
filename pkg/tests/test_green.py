"""Green-function evaluator tests."""

import math

import numpy as np
import pytest

from app.config import settings
from app.models.domain import GreenQuery
from app.services.cutoffs import cutoff_service
from app.services.green import ETA_WINDOW, angular_kernel, green_service
from app.services.oscquad import oscillatory_quadrature
from app.services.specfun import airy_service
from app.util.errors import ArgumentError, DomainError

# Coarse semiclassical scale: a dozen modes, fast quadratures
COARSE = GreenQuery(m=0, h=2.0 ** -5, a=0.5, gamma=0.5, t=1.5, x=0.5, y=-0.4)
OMEGA_1 = 2.338107410459767


class TestHighFrequency:
    """Test the spectral high-frequency evaluator."""

    def test_time_reversal(self):
        """G(-t) is the complex conjugate of G(t)."""
        forward = green_service.green_high_freq(COARSE).value
        backward = green_service.green_high_freq(COARSE.at(t=-COARSE.t)).value
        assert backward == pytest.approx(forward.conjugate(), rel=1e-6)

    def test_even_in_y(self):
        """Both signs of eta make G even in y."""
        left = green_service.green_high_freq(COARSE).value
        right = green_service.green_high_freq(COARSE.at(y=-COARSE.y)).value
        assert left == pytest.approx(right, rel=1e-9)

    def test_positive_at_time_zero(self):
        """At t = 0, y = 0, x = a the integrand is a non-negative real density."""
        result = green_service.green_high_freq(COARSE.at(t=0.0, y=0.0, x=COARSE.a))
        assert result.value.real > 0
        assert abs(result.value.imag) < 1e-10 * result.value.real
        assert result.mode_count > 0

    def test_guard_modes_are_inert(self):
        """Doubling kmax past the psi2 window changes nothing."""
        _, _, kmax = green_service.high_freq_modes(COARSE.h, COARSE.gamma)
        base = green_service.green_high_freq(COARSE).value
        doubled = green_service.green_high_freq(COARSE.at(kmax=2 * kmax)).value
        assert doubled == pytest.approx(base, rel=1e-12)

    def test_empty_window(self):
        """No mode inside the window gives zero with a flag."""
        q = GreenQuery(m=0, h=0.5, a=0.25, gamma=0.01, t=1.0, x=0.25, y=0.0)
        result = green_service.green_high_freq(q)
        assert result.value == 0
        assert "empty_window" in result.flags

    def test_eta_support(self):
        """The eta-interval lies inside the psi1 window or is empty."""
        omega = airy_service.zero(3)
        support = green_service.eta_support(omega, 2.0 ** -5, 0.5)
        assert support is not None
        assert ETA_WINDOW[0] <= support[0] < support[1] <= ETA_WINDOW[1]
        assert green_service.eta_support(1e4, 2.0 ** -5, 0.5) is None

    def test_grid_matches_pointwise(self):
        """The trapezoid grid evaluator reproduces the adaptive value."""
        pointwise = green_service.green_high_freq(COARSE).value
        grid = green_service.green_high_freq_grid(COARSE, [COARSE.x, 0.2], [COARSE.y, 0.0])
        assert grid.shape == (2, 2)
        assert grid[0, 0] == pytest.approx(pointwise, rel=1e-5)

    def test_flank_modes_converge(self):
        """Each mode integral meets a relative tolerance although the cutoff flanks are nearly zero."""
        omegas, lprimes, _ = green_service.high_freq_modes(COARSE.h, COARSE.gamma)
        for omega, lprime in zip(omegas, lprimes):
            support = green_service.eta_support(omega, COARSE.h, COARSE.gamma)
            if support is None:
                continue
            for sign in (1.0, -1.0):
                spec = green_service._mode_spec(omega, lprime, COARSE, sign, support)
                result = oscillatory_quadrature.integrate_detailed(spec, tol=0.0, rtol=COARSE.tol)
                assert np.isfinite(result.value.real) and np.isfinite(result.value.imag)
                assert result.panels < settings.quad_max_panels // 100

    def test_needs_gamma(self):
        with pytest.raises(ArgumentError):
            green_service.green_high_freq(COARSE.at(gamma=None))

    async def test_async_variant(self):
        value = await green_service.green_high_freq_async(COARSE)
        assert value.value == pytest.approx(green_service.green_high_freq(COARSE).value)


class TestLowFrequency:
    """Test the spectral low-frequency evaluator."""

    def test_split_adds_up(self):
        """The chi0 part and its complement sum to the full value."""
        # t lambda_k / M crosses the chi0 transition for the upper modes
        args = dict(m=1, t=40.0, x=0.5, a=0.5, y_norm=1.0, tol=1e-10)
        full = green_service.green_low_freq(**args).value
        chi0 = green_service.green_low_freq(split_part="chi0", **args).value
        rest = green_service.green_low_freq(split_part="rest", **args).value
        assert abs(rest) > 0
        assert chi0 + rest == pytest.approx(full, rel=1e-6)

    def test_time_reversal(self):
        forward = green_service.green_low_freq(1, 2.0, 0.5, 0.5, 1.0).value
        backward = green_service.green_low_freq(1, -2.0, 0.5, 0.5, 1.0).value
        assert backward == pytest.approx(forward.conjugate(), rel=1e-6)

    def test_grid_matches_pointwise(self):
        """The uniform rho grid reproduces the adaptive value."""
        pointwise = green_service.green_low_freq(1, 3.0, 0.5, 0.5, 1.0).value
        grid = green_service.green_low_freq_grid(1, 3.0, 0.5, [0.5], [-1.0, 1.0])
        assert grid[0, 0] == pytest.approx(pointwise, rel=1e-5)
        assert grid[0, 1] == pytest.approx(grid[0, 0], rel=1e-12)

    def test_higher_dimension_runs(self):
        """d = 3 uses the Bessel kernel and returns a finite value."""
        result = green_service.green_low_freq(0, 2.0, 0.5, 0.5, 1.0, d=3)
        assert np.isfinite(result.value.real) and result.mode_count > 0

    def test_invalid_arguments(self):
        with pytest.raises(ArgumentError):
            green_service.green_low_freq(0, 1.0, 0.5, 0.5, 0.0, d=1)
        with pytest.raises(DomainError):
            green_service.green_low_freq(0, 1.0, -0.5, 0.5, 0.0)
        with pytest.raises(ArgumentError):
            green_service.green_low_freq(0, 1.0, 0.5, 0.5, 0.0, split_part="half")

    def test_ring_taper_telescopes(self):
        """sum of dyadic rings psi2(2^j rho) equals phi(rho) - phi(2^J rho)."""
        rho = np.linspace(0.05, 2.0, 200)
        rings = sum(cutoff_service.psi2(2.0 ** j * rho) for j in range(4))
        assert np.allclose(green_service.ring_taper(rho, 4), rings)
        assert green_service.rho_min(4) == pytest.approx(0.75 / 8)


class TestAngularKernel:
    """Test the angular kernel over the sphere."""

    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_closed_form_matches_quadrature(self, d):
        r = np.linspace(0.0, 20.0, 41)
        closed = angular_kernel(r, d, "closed")
        quadrature = angular_kernel(r, d, "quadrature")
        assert np.allclose(closed, quadrature, atol=1e-10)

    def test_two_dimensions(self):
        """d = 2 is 2 cos r."""
        r = np.array([0.0, 1.0, 2.5])
        assert np.allclose(angular_kernel(r, 2), 2.0 * np.cos(r))

    def test_origin_is_sphere_area(self):
        """K_3(0) = 2 pi, the length of the circle."""
        assert angular_kernel(0.0, 3).real == pytest.approx(2.0 * math.pi)


class TestModelIntegral:
    """Test the Klein-Gordon model integral and its degenerate point."""

    def test_degenerate_point_with_mass(self):
        """m = 1, c = w_1 has an inflection of g inside the window."""
        found = green_service.find_degenerate(1, OMEGA_1)
        assert found is not None
        eta0, z0 = found
        assert 0.5 <= eta0 <= 1.5
        assert abs(float(green_service.model_dispersion(eta0, 1, OMEGA_1)[2])) < 1e-8
        assert z0 == pytest.approx(float(green_service.model_dispersion(eta0, 1, OMEGA_1)[1]))

    def test_no_degenerate_point_without_mass(self):
        """m = 0 keeps g'' of one sign."""
        assert green_service.find_degenerate(0, OMEGA_1) is None

    def test_curvature_numerator_sign(self):
        """g'' has the sign of the curvature numerator."""
        eta = np.linspace(0.5, 1.5, 11)
        numerator = green_service.model_curvature(eta, 1, OMEGA_1)
        second = green_service.model_dispersion(eta, 1, OMEGA_1)[2]
        assert np.all(np.sign(numerator) == np.sign(second))

    def test_degenerate_decay_rate(self):
        """At the degenerate slope the model integral decays like t^{-1/3}."""
        _, z0 = green_service.find_degenerate(1, OMEGA_1)
        fit = oscillatory_quadrature.decay_probe(
            lambda t: green_service.model_spec(1, OMEGA_1, z0, t), np.geomspace(1e2, 1e4, 9)
        )
        assert fit.exponent == pytest.approx(1.0 / 3.0, abs=0.05)

    def test_massless_control_rate(self):
        """Without mass the stationary point is simple and the rate is t^{-1/2}."""
        z = float(green_service.model_dispersion(1.0, 0, OMEGA_1)[1])
        fit = oscillatory_quadrature.decay_probe(
            lambda t: green_service.model_spec(0, OMEGA_1, z, t), np.geomspace(1e2, 1e4, 9)
        )
        assert fit.exponent == pytest.approx(0.5, abs=0.05)

    def test_stationary_points_classified(self):
        """The degenerate slope yields an order-two stationary point."""
        _, z0 = green_service.find_degenerate(1, OMEGA_1)
        points = green_service.model_stationary_points(1, OMEGA_1, z0)
        assert any(p.order == 2 for p in points)

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            green_service.model_integral(1, -1.0, 1.0, 10.0)
        with pytest.raises(DomainError):
            green_service.model_integral(1, OMEGA_1, 1.0, 0.0)


class TestRingPhase:
    """Test the low-frequency ring phase and its degenerate mode."""

    def test_bracket_value(self):
        """f_{1,0}(1) = 1 + w_1/9 - 2 w_1^2/9, about 0.045."""
        value = float(green_service.f_kj(1, 0, 1.0))
        assert value == pytest.approx(1.0 + OMEGA_1 / 9.0 - 2.0 * OMEGA_1 ** 2 / 9.0, abs=1e-12)
        assert 0.04 <= value <= 0.05

    def test_bracket_decreasing(self):
        z = np.linspace(0.01, 3.0, 500)
        assert np.all(np.diff(green_service.f_kj(1, 0, z)) < 0)

    def test_second_derivative_identity(self):
        """phase'' = t f_{k,j} / p^{3/2}, checked by central differences."""
        rho = np.linspace(0.6, 1.8, 13)
        step = 1e-4
        phase = lambda r: green_service.ring_phase(1, 0, r, 5.0, 0.7)
        numeric = (phase(rho + step) - 2.0 * phase(rho) + phase(rho - step)) / step ** 2
        assert np.allclose(green_service.ring_phase_second(1, 0, rho, 5.0), numeric, rtol=1e-5, atol=1e-6)

    def test_degenerate_mode_of_first_ring(self):
        """Ring j = 0 degenerates for k = 1 near rho = 1."""
        mode = green_service.kg_degenerate_scan(0)
        assert mode is not None
        assert mode.k == 1
        assert mode.z_star == pytest.approx(1.0, abs=0.05)

    def test_negative_ring_rejected(self):
        with pytest.raises(ArgumentError):
            green_service.kg_degenerate_scan(-1)
