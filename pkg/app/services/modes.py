"""Gallery modes of -d_x^2 + (1+x) theta^2 on x > 0 with Dirichlet condition."""

import math
from typing import Callable, Tuple

import numpy as np
from scipy import integrate, special

from app.models.domain import Eigenmode
from app.services.specfun import airy_service
from app.util.errors import ArgumentError, DomainError
from app.util.logging import get_logger

logger = get_logger("modes")

DEFAULT_DIRAC_MODES = 200

# Past the turning point the modes decay like Ai; ten units of |theta|^{-2/3} leave < 1e-17
TAIL_LENGTH = 10.0


class ModeService:
    """Eigenvalues, eigenfunctions and the Dirac-mass decomposition."""

    def _check(self, k: int, theta: float):
        if k < 1:
            raise ArgumentError(f"Mode index must be >= 1, got {k}")
        if theta == 0 or not math.isfinite(theta):
            raise DomainError("theta must be finite and non-zero")

    def eigenvalue(self, k: int, theta: float) -> float:
        """lambda_k(theta) = |theta|^2 + w_k |theta|^{4/3}."""
        self._check(k, theta)
        return theta ** 2 + airy_service.zero(k) * abs(theta) ** (4.0 / 3.0)

    def eigenvalues(self, omegas: np.ndarray, theta) -> np.ndarray:
        """Vectorized lambda_k for an array of zeros and tangential frequencies."""
        theta = np.abs(np.asarray(theta, dtype=float))
        return theta ** 2 + omegas * theta ** (4.0 / 3.0)

    def eigenmode(self, k: int, theta: float) -> Eigenmode:
        self._check(k, theta)
        omega = airy_service.zero(k)
        return Eigenmode(
            k=k,
            theta=theta,
            omega=omega,
            eigenvalue=theta ** 2 + omega * abs(theta) ** (4.0 / 3.0),
            normalizer=math.sqrt(2.0 * math.pi) * abs(theta) ** (1.0 / 3.0) / math.sqrt(airy_service.lprime_at_zero(k)),
        )

    def evaluate(self, mode: Eigenmode, x) -> np.ndarray:
        """e_k(x, theta) = normalizer * Ai(|theta|^{2/3} x - w_k)."""
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr < 0):
            raise DomainError("Eigenfunctions are defined on x >= 0")
        value = mode.normalizer * special.airy(abs(mode.theta) ** (2.0 / 3.0) * x_arr - mode.omega)[0]
        return float(value) if np.ndim(x) == 0 else value

    def eigenfunction(self, k: int, theta: float, x):
        return self.evaluate(self.eigenmode(k, theta), x)

    def mode_products(self, omegas: np.ndarray, lprimes: np.ndarray, theta, x, a) -> np.ndarray:
        """e_k(x, theta) e_k(a, theta) = 2 pi |theta|^{2/3} / L'(w_k) Ai(...x) Ai(...a), broadcast."""
        scale = np.abs(theta) ** (2.0 / 3.0)
        ai_x = special.airy(scale * x - omegas)[0]
        ai_a = special.airy(scale * a - omegas)[0]
        return 2.0 * math.pi * scale / lprimes * ai_x * ai_a

    def norm_squared(self, k: int, theta: float) -> float:
        """int_0^inf e_k^2 dx, adaptive on [0, turning point + tail] plus the Ai^2 tail beyond."""
        mode = self.eigenmode(k, theta)
        scale = abs(theta) ** (-2.0 / 3.0)
        cut = mode.turning_point + TAIL_LENGTH * scale
        f = lambda x: self.evaluate(mode, x) ** 2
        inner, _ = integrate.quad(f, 0.0, cut, limit=500, epsabs=1e-14, epsrel=1e-13)
        # int_c^inf Ai^2 = Ai'(c)^2 - c Ai(c)^2 in the rescaled variable
        c = TAIL_LENGTH
        ai, aip, _, _ = special.airy(c)
        tail = mode.normalizer ** 2 * scale * (aip ** 2 - c * ai ** 2)
        return inner + tail

    def inner_product(self, j: int, k: int, theta: float) -> float:
        first, second = self.eigenmode(j, theta), self.eigenmode(k, theta)
        scale = abs(theta) ** (-2.0 / 3.0)
        cut = max(first.turning_point, second.turning_point) + TAIL_LENGTH * scale
        value, _ = integrate.quad(
            lambda x: self.evaluate(first, x) * self.evaluate(second, x),
            0.0, cut, limit=500, epsabs=1e-14, epsrel=1e-12,
        )
        return value

    def interior_zeros(self, k: int, theta: float, points: int = 20000) -> int:
        """Sign changes of e_k on (0, turning point)."""
        mode = self.eigenmode(k, theta)
        x = np.linspace(0.0, mode.turning_point, points)[1:-1]
        values = self.evaluate(mode, x)
        return int(np.count_nonzero(np.signbit(values[1:]) != np.signbit(values[:-1])))

    def spectral_action(self, k: int, theta: float, spacing: float = 1e-3) -> Tuple[float, float]:
        """Apply -d^2/dx^2 + (1+x) theta^2 by central differences; returns (max abs residual, max |lambda e|)."""
        mode = self.eigenmode(k, theta)
        x = np.arange(spacing, mode.turning_point + TAIL_LENGTH * abs(theta) ** (-2.0 / 3.0), spacing)
        values = self.evaluate(mode, x)
        second = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / spacing ** 2
        applied = -second + (1.0 + x[1:-1]) * theta ** 2 * values[1:-1]
        target = mode.eigenvalue * values[1:-1]
        return float(np.max(np.abs(applied - target))), float(np.max(np.abs(target)))

    def sample(self, k: int, theta: float, points: int, x_max: float = None) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenfunction on a uniform grid of [0, x_max] (default: two turning points)."""
        if points < 2:
            raise ArgumentError("Need at least two grid points")
        mode = self.eigenmode(k, theta)
        x = np.linspace(0.0, x_max if x_max is not None else 2.0 * mode.turning_point + 2.0, points)
        return x, self.evaluate(mode, x)

    def dirac_kernel(self, x, x0: float, theta: float, count: int = DEFAULT_DIRAC_MODES) -> np.ndarray:
        """sum_{k<=count} e_k(x, theta) e_k(x0, theta)."""
        table = airy_service.airy_table(max(count, 1))
        omegas = np.asarray(table.zeros[:count])
        lprimes = np.asarray(table.lprime[:count])
        x = np.asarray(x, dtype=float)
        products = self.mode_products(omegas, lprimes, theta, x[..., None], x0)
        return products.sum(axis=-1)

    def dirac_partial_sum(
        self,
        x0: float,
        theta: float,
        count: int,
        testfn: Callable,
        support: Tuple[float, float],
    ) -> float:
        """int testfn(x) sum_{k<=count} e_k(x, theta) e_k(x0, theta) dx over the support of testfn."""
        if x0 <= 0:
            raise DomainError("x0 must be positive")
        if count < 1:
            raise ArgumentError("count must be >= 1")
        self._check(1, theta)
        lo, hi = support
        if lo < 0:
            raise DomainError("Test functions must be supported in x > 0")
        # the kernel oscillates on the scale of the highest mode: w_K^{-1/2} |theta|^{-2/3}
        omega_top = airy_service.zero(count)
        wavelength = 2.0 * math.pi / math.sqrt(omega_top) * abs(theta) ** (-2.0 / 3.0)
        panels = max(8, int(math.ceil(4.0 * (hi - lo) / wavelength)))
        nodes, weights = np.polynomial.legendre.leggauss(20)
        edges = np.linspace(lo, hi, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        x = mid[:, None] + half[:, None] * nodes[None, :]
        integrand = np.asarray(testfn(x), dtype=float) * self.dirac_kernel(x, x0, theta, count)
        return float(np.sum(half[:, None] * weights[None, :] * integrand))


# Global mode service instance
mode_service = ModeService()
