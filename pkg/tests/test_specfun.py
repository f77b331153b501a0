"""Airy function, zero table and phase function tests."""

import math

import numpy as np
import pytest
from scipy import special, stats

from app.config import settings
from app.services.specfun import AI_ZERO, AIPRIME_ZERO, B1, AiryService, airy_service
from app.util.errors import ArgumentError, DomainError, RangeError


def ai_maclaurin(x: float, terms: int = 30) -> float:
    """Ai(x) = Ai(0) f(x) + Ai'(0) g(x) from the two power series."""
    f = g = 0.0
    f_term, g_term = 1.0, x
    for k in range(terms):
        f += f_term
        g += g_term
        f_term *= x ** 3 / ((3 * k + 2) * (3 * k + 3))
        g_term *= x ** 3 / ((3 * k + 3) * (3 * k + 4))
    return AI_ZERO * f + AIPRIME_ZERO * g


class TestAiryFunctions:
    """Test Airy evaluations on the real line."""

    @pytest.mark.parametrize("x", [-2.0, -0.5, 0.0, 0.3, 1.7])
    def test_ai_matches_maclaurin_series(self, x):
        """Ai agrees with its Maclaurin series on moderate arguments."""
        assert airy_service.ai(x) == pytest.approx(ai_maclaurin(x), abs=1e-13)

    def test_ai_deriv_matches_series(self):
        """Ai' is the derivative of the Maclaurin series, and Ai'(0) is tabulated."""
        step = 1e-5
        for x in (-1.5, 0.4, 1.2):
            numeric = (ai_maclaurin(x + step) - ai_maclaurin(x - step)) / (2 * step)
            assert airy_service.ai_deriv(x) == pytest.approx(numeric, abs=1e-9)
        assert airy_service.ai_deriv(0.0) == pytest.approx(AIPRIME_ZERO, abs=1e-15)

    def test_ai_second_is_x_ai(self):
        """Ai'' = x Ai."""
        x = np.linspace(-5.0, 3.0, 41)
        h = 1e-4
        numeric = (airy_service.ai(x + h) - 2.0 * airy_service.ai(x) + airy_service.ai(x - h)) / h ** 2
        assert np.allclose(airy_service.ai_second(x), numeric, atol=1e-6)

    def test_non_finite_input_rejected(self):
        """NaN and infinite arguments raise DomainError."""
        with pytest.raises(DomainError):
            airy_service.ai(float("nan"))
        with pytest.raises(DomainError):
            airy_service.big_l(np.array([1.0, np.inf]))

    def test_a_plus_a_minus_conjugate(self):
        """A_- is the complex conjugate of A_+ on the real axis."""
        z = np.linspace(-10.0, 10.0, 21)
        assert np.allclose(airy_service.a_minus(z), np.conj(airy_service.a_plus(z)))
        assert airy_service.a_plus(0.0) == pytest.approx(complex(0.5, -math.sqrt(3) / 2) * AI_ZERO)

    def test_a_plus_range(self):
        """Arguments beyond the validated range raise RangeError."""
        with pytest.raises(RangeError):
            airy_service.a_plus(51.0)


class TestAiryZeros:
    """Test the zero table."""

    @pytest.mark.parametrize(
        "k, expected",
        [(1, 2.3381074105), (4, 6.7867080901), (8, 11.0085243037)],
    )
    def test_reference_zeros(self, k, expected):
        """Tabulated values of the first zeros."""
        assert airy_service.zero(k) == pytest.approx(expected, abs=1e-8)

    def test_against_scipy_zeros(self):
        """First 50 zeros agree with scipy's table."""
        reference = -special.ai_zeros(50)[0]
        assert np.allclose(airy_service.airy_zeros(50), reference, atol=1e-10)

    def test_full_default_table(self):
        """A fresh service builds the whole default table; zeros agree with scipy deep into it."""
        service = AiryService()
        table = service.airy_table()
        assert table.count == settings.airy_table_size
        reference = -special.ai_zeros(200)[0]
        for k in (10, 50, 200):
            assert table.zeros[k - 1] == pytest.approx(reference[k - 1], abs=1e-10)
            assert abs(service.ai(-table.zeros[k - 1])) < 1e-10

    def test_table_is_increasing_and_consistent(self):
        """Zeros increase and L'(w_k) = 2 pi Ai'(-w_k)^2."""
        table = airy_service.airy_table(30)
        assert table.count == 30
        assert all(b > a for a, b in zip(table.zeros, table.zeros[1:]))
        for w, d, lp in zip(table.zeros, table.aiprime_at_zeros, table.lprime):
            assert lp == pytest.approx(2.0 * math.pi * d ** 2, rel=1e-14)
            assert lp == pytest.approx(airy_service.lprime(w), rel=1e-10)

    def test_zeros_below(self):
        """zeros_below returns exactly the zeros under the bound."""
        zeros = airy_service.zeros_below(11.0)
        assert len(zeros) == 7
        assert zeros[-1] == pytest.approx(airy_service.zero(7))

    def test_invalid_counts(self):
        """Non-positive table sizes and indices are argument errors."""
        with pytest.raises(ArgumentError):
            airy_service.airy_zeros(0)
        with pytest.raises(ArgumentError):
            airy_service.zero(0)


class TestPhaseL:
    """Test the spectral phase L and its remainder."""

    def test_value_at_origin(self):
        """L(0) = pi/3."""
        assert airy_service.big_l(0.0) == pytest.approx(math.pi / 3.0, abs=1e-10)

    def test_quantization_at_zeros(self):
        """L(w_k) = 2 pi k for k <= 20."""
        zeros = np.asarray(airy_service.airy_zeros(20))
        values = airy_service.big_l(zeros)
        assert np.allclose(values, 2.0 * math.pi * np.arange(1, 21), atol=1e-8)

    def test_scalar_and_array_paths_agree(self):
        """Cached scalar evaluation equals the vectorized one."""
        omega = np.array([-3.0, 0.5, 4.2, 17.0])
        assert [airy_service.big_l(float(w)) for w in omega] == pytest.approx(list(airy_service.big_l(omega)), abs=1e-13)

    def test_strictly_increasing(self):
        """L' > 0 on negative and positive arguments."""
        omega = np.linspace(-6.0, 40.0, 2001)
        assert np.all(np.diff(airy_service.big_l(omega)) > 0)
        assert np.all(airy_service.lprime(omega) > 0)

    def test_lprime_matches_finite_difference(self):
        """The Wronskian form of L' is the derivative of L."""
        omega = np.array([-2.0, 0.7, 3.3, 12.5])
        step = 1e-5
        numeric = (airy_service.big_l(omega + step) - airy_service.big_l(omega - step)) / (2 * step)
        assert np.allclose(airy_service.lprime(omega), numeric, rtol=1e-7)

    def test_lprime_at_zero_grows_like_sqrt(self):
        """L'(w_k) / (2 sqrt(w_k)) is within 5% of 1 for k >= 20."""
        for k in (20, 40, 80):
            ratio = airy_service.lprime_at_zero(k) / (2.0 * math.sqrt(airy_service.zero(k)))
            assert ratio == pytest.approx(1.0, abs=0.05)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_lprime_integral_form(self, k):
        """L'(w_k) = 2 pi int_0^inf Ai(x - w_k)^2 dx."""
        assert airy_service.lprime_by_quadrature(k) == pytest.approx(airy_service.lprime_at_zero(k), rel=1e-8)

    def test_remainder_decays_fast(self):
        """L - (4/3 w^{3/2} + pi/2 - b1 w^{-3/2}) has log-log slope <= -3 on [5, 30]."""
        omega = np.geomspace(5.0, 30.0, 12)
        remainder = np.abs(airy_service.big_l(omega) - airy_service.asymptotic_l(omega, terms=1))
        fit = stats.linregress(np.log(omega), np.log(remainder))
        assert fit.slope <= -3.0

    def test_first_correction_coefficient(self):
        """Without the b1 term the remainder is b1 w^{-3/2}."""
        omega = 30.0
        remainder = airy_service.asymptotic_l(omega, terms=0) - airy_service.big_l(omega)
        assert remainder * omega ** 1.5 == pytest.approx(B1, rel=1e-3)
        assert B1 == pytest.approx(5.0 / 24.0)

    def test_big_b_and_derivative(self):
        """B(u) ~ b1/u, B'(u) ~ -b1/u^2, and the two sides of the series switch agree."""
        u = 200.0
        assert airy_service.big_b(u) * u == pytest.approx(B1, rel=1e-3)
        step = 1e-3
        numeric = (airy_service.big_b(u + step) - airy_service.big_b(u - step)) / (2 * step)
        assert airy_service.big_b_prime(u) == pytest.approx(numeric, rel=1e-4)
        edge = 40.0 ** 1.5
        assert airy_service.big_b(edge * 0.999) == pytest.approx(airy_service.big_b(edge * 1.001), rel=1e-2)
        with pytest.raises(DomainError):
            airy_service.big_b(0.0)

    async def test_async_variant(self):
        """big_l_async returns the same values."""
        value = await airy_service.big_l_async(2.0)
        assert value == pytest.approx(airy_service.big_l(2.0))


class TestAiryBounds:
    """Test the Airy square-sum and derivative bounds."""

    def test_square_sum_ratio_bounded(self):
        """sup_b sum w_k^{-1/2} Ai(b - w_k)^2 grows like count^{1/3}."""
        ratios = [airy_service.estairy_sum(count, b_points=3000)[1] for count in (8, 16, 32, 64, 128)]
        assert max(ratios) / min(ratios) < 3.0

    @pytest.mark.parametrize("order", [0, 1, 2])
    def test_derivative_bound_finite(self, order):
        """b^l Ai^(l)(b - w_k) stays bounded."""
        bound = airy_service.airy_derivative_bound(3, order)
        assert 0 < bound < 100

    def test_invalid_order(self):
        with pytest.raises(ArgumentError):
            airy_service.airy_derivative_bound(1, 3)
