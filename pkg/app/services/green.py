"""Spectral evaluators of the localized Green functions of the wave and Klein-Gordon equations.

High frequency (d = 2):

    G(t, x, a, y) = sum_k (1/h) int e^{i t sqrt(m^2 + lambda_k(eta/h))} e^{i y eta/h}
                    psi1(|eta|) psi1(h sqrt(lambda_k)) psi2(h^{2/3} w_k / (eta^{2/3} gamma))
                    e_k(x, eta/h) e_k(a, eta/h) d eta

Low frequency (radial in y, any d >= 2):

    G_SF(t, x, a, y) = sum_k int_0^2 K_d(rho |y|) rho^{d-2} e^{i t sqrt(lambda_k(rho) + m^2)}
                       phi(rho) phi(sqrt(lambda_k)) e_k(x, rho) e_k(a, rho) d rho

with K_d the angular kernel of S^{d-2}. Both signs of eta are kept, so at d = 2
the kernel is 2 cos(rho |y|) and every evaluator satisfies G(-t) = conj G(t).
"""

import asyncio
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize, special

from app.config import settings
from app.models.domain import DegenerateMode, FieldValue, GreenQuery, PhaseSpec, StationaryPoint
from app.services.cutoffs import cutoff_service
from app.services.modes import mode_service
from app.services.oscquad import oscillatory_quadrature
from app.services.specfun import airy_service
from app.util.errors import ArgumentError, DomainError
from app.util.logging import get_logger
from app.util.metrics import MODES_SUMMED, track

logger = get_logger("green")

# psi2 window in A = h^{2/3} w / (eta^{2/3} gamma) and psi1 window in eta
A_WINDOW = (0.75, 2.0)
ETA_WINDOW = (0.5, 1.5)

# phi support: |theta| < 2 and sqrt(lambda_k) < 2
PHI_EDGE = 2.0

ANGULAR_NODES_MIN = 64

# Frequency headroom of uniform-grid quadrature over cutoffs whose transitions are
# a quarter unit wide: their Fourier transforms fall below 1e-12 past it
TRAPEZOID_MARGIN = 1600.0


def angular_kernel(r, d: int, method: str = "closed") -> np.ndarray:
    """int_{S^{d-2}} exp(-i r Theta_1) dTheta, i.e. |S^{d-3}| int_0^pi e^{-i r cos s} sin^{d-3} s ds."""
    if d < 2:
        raise ArgumentError(f"Dimension must be >= 2, got {d}")
    r = np.asarray(r, dtype=float)
    if d == 2:
        return 2.0 * np.cos(r) + 0j
    if method == "closed" and d == 3:
        return 2.0 * math.pi * special.j0(r) + 0j
    if method == "closed":
        n = d - 1
        # (2 pi)^{n/2} r^{1-n/2} J_{n/2-1}(r), continuous at r = 0
        safe = np.where(r == 0, 1.0, r)
        value = (2.0 * math.pi) ** (n / 2.0) * safe ** (1.0 - n / 2.0) * special.jv(n / 2.0 - 1.0, safe)
        origin = 2.0 * math.pi ** (n / 2.0) / special.gamma(n / 2.0)
        return np.where(r == 0, origin, value) + 0j
    sphere = 2.0 * math.pi ** ((d - 2) / 2.0) / special.gamma((d - 2) / 2.0)
    count = int(max(ANGULAR_NODES_MIN, 2.0 * float(np.max(np.abs(r), initial=0.0)) + 40))
    nodes, weights = np.polynomial.legendre.leggauss(count)
    s = 0.5 * math.pi * (nodes + 1.0)
    w = 0.5 * math.pi * weights * np.sin(s) ** (d - 3)
    phases = np.exp(-1j * r[..., None] * np.cos(s))
    return sphere * np.sum(phases * w, axis=-1)


Y_CHUNK = 1024


def _cosine_transform(y_grid: np.ndarray, frequencies: np.ndarray, field: np.ndarray) -> np.ndarray:
    """sum_j 2 cos(y frequencies_j) field[j, :] for every y, as an |x| by |y| array, in blocks of y."""
    out = np.empty((field.shape[1], y_grid.size), dtype=complex)
    for start in range(0, y_grid.size, Y_CHUNK):
        block = y_grid[start:start + Y_CHUNK]
        out[:, start:start + block.size] = (2.0 * np.cos(np.outer(block, frequencies)) @ field).T
    return out


class GreenService:
    """Spectral-sum evaluators, the model integral and its degenerate points."""

    # Mode windows

    def high_freq_modes(self, h: float, gamma: float, kmax: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, int]:
        """Zeros and L' of every mode the psi2 window can see, plus guard modes; returns (omegas, lprimes, kmax)."""
        omega_top = (ETA_WINDOW[1] ** (2.0 / 3.0)) * A_WINDOW[1] * gamma / h ** (2.0 / 3.0)
        inside = airy_service.zeros_below(omega_top).size
        default_kmax = inside + settings.kmax_guard
        if kmax is not None and kmax < inside:
            logger.warning(f"kmax={kmax} truncates the psi2 window, which reaches mode {inside}")
        count = kmax or default_kmax
        table = airy_service.airy_table(max(count, settings.airy_table_size))
        return np.asarray(table.zeros[:count]), np.asarray(table.lprime[:count]), count

    @staticmethod
    def eta_support(omega: float, h: float, gamma: float) -> Optional[Tuple[float, float]]:
        """eta-interval on which psi2(h^{2/3} w / (eta^{2/3} gamma)) and psi1(eta) can be non-zero."""
        base = h * omega ** 1.5
        lo = max(ETA_WINDOW[0], base / (A_WINDOW[1] * gamma) ** 1.5)
        hi = min(ETA_WINDOW[1], base / (A_WINDOW[0] * gamma) ** 1.5)
        if hi <= lo:
            return None
        return lo, hi

    def _high_freq_symbol(self, eta, omega, lprime, q: GreenQuery):
        """Amplitude of one mode: cutoffs times e_k(x) e_k(a) / h."""
        eta = np.asarray(eta, dtype=float)
        theta = eta / q.h
        scaled = np.sqrt(eta ** 2 + omega * q.h ** (2.0 / 3.0) * eta ** (4.0 / 3.0))
        a_var = q.h ** (2.0 / 3.0) * omega / (eta ** (2.0 / 3.0) * q.gamma)
        cut = cutoff_service.psi1(eta) * cutoff_service.psi1(scaled) * cutoff_service.psi2(a_var)
        products = mode_service.mode_products(omega, lprime, theta, q.x, q.a)
        return cut * products / q.h

    @staticmethod
    def _dispersion(eta, omega: float, q: GreenQuery):
        """sqrt(m^2 h^2 + eta^2 + w h^{2/3} eta^{4/3}) = h sqrt(m^2 + lambda_k(eta/h)) and its derivatives."""
        c = omega * q.h ** (2.0 / 3.0)
        mh2 = (q.m * q.h) ** 2
        p = mh2 + eta ** 2 + c * eta ** (4.0 / 3.0)
        dp = 2.0 * eta + (4.0 / 3.0) * c * eta ** (1.0 / 3.0)
        ddp = 2.0 + (4.0 / 9.0) * c * eta ** (-2.0 / 3.0)
        root = np.sqrt(p)
        return root, dp / (2.0 * root), (2.0 * p * ddp - dp ** 2) / (4.0 * p * root)

    def _mode_spec(self, omega: float, lprime: float, q: GreenQuery, sign: float, support) -> PhaseSpec:
        t, y = q.t, sign * q.y
        return PhaseSpec(
            phase=lambda e: t * self._dispersion(e, omega, q)[0] + y * e,
            dphase=lambda e: t * self._dispersion(e, omega, q)[1] + y,
            ddphase=lambda e: t * self._dispersion(e, omega, q)[2],
            amplitude=lambda e: self._high_freq_symbol(e, omega, lprime, q),
            interval=support,
            large_parameter=1.0 / q.h,
        )

    def green_high_freq(self, q: GreenQuery) -> FieldValue:
        """k-truncated, eta-quadrature value of the high-frequency Green function at d = 2."""
        if not q.high_frequency:
            raise ArgumentError("green_high_freq needs a dyadic scale gamma")
        with track("green_high_freq"):
            omegas, lprimes, kmax = self.high_freq_modes(q.h, q.gamma, q.kmax)
            value = 0.0 + 0.0j
            error = 0.0
            used = 0
            for k, (omega, lprime) in enumerate(zip(omegas, lprimes), start=1):
                support = self.eta_support(omega, q.h, q.gamma)
                if support is None:
                    continue
                used += 1
                for sign in (1.0, -1.0):
                    result = oscillatory_quadrature.integrate_detailed(
                        self._mode_spec(omega, lprime, q, sign, support), tol=0.0, rtol=q.tol
                    )
                    value += result.value
                    error += result.error
            MODES_SUMMED.labels(evaluator="high_freq").inc(used)
        if used == 0:
            logger.debug(f"Empty psi2 window at h={q.h}, gamma={q.gamma}")
            return FieldValue(value=0j, mode_count=0, error_estimate=0.0, flags=["empty_window"])
        return FieldValue(value=complex(value), mode_count=used, error_estimate=error)

    def green_high_freq_grid(self, q: GreenQuery, x_grid, y_grid, eta_points: int = None) -> np.ndarray:
        """|x_grid| x |y_grid| array of high-frequency values by uniform trapezoid in eta.

        The eta-integrands are smooth and vanish with all derivatives at the ends of
        the psi1 window, so the trapezoid rule converges spectrally once the grid
        resolves the largest phase rate.
        """
        x_grid = np.atleast_1d(np.asarray(x_grid, dtype=float))
        y_grid = np.atleast_1d(np.asarray(y_grid, dtype=float))
        omegas, lprimes, _ = self.high_freq_modes(q.h, q.gamma, q.kmax)
        eta = self.eta_grid(q, x_grid, y_grid, omegas, eta_points)
        step = eta[1] - eta[0]
        field = np.zeros((eta.size, x_grid.size), dtype=complex)
        for omega, lprime in zip(omegas, lprimes):
            if self.eta_support(omega, q.h, q.gamma) is None:
                continue
            field += self._mode_column(eta, omega, lprime, q, x_grid)
        return _cosine_transform(y_grid, eta / q.h, field) * step

    def _mode_column(self, eta, omega, lprime, q: GreenQuery, x_grid) -> np.ndarray:
        theta = eta / q.h
        scale = theta ** (2.0 / 3.0)
        scaled = np.sqrt(eta ** 2 + omega * q.h ** (2.0 / 3.0) * eta ** (4.0 / 3.0))
        a_var = q.h ** (2.0 / 3.0) * omega / (eta ** (2.0 / 3.0) * q.gamma)
        cut = cutoff_service.psi1(eta) * cutoff_service.psi1(scaled) * cutoff_service.psi2(a_var)
        active = cut != 0
        column = np.zeros((eta.size, x_grid.size), dtype=complex)
        if not np.any(active):
            return column
        e, s = eta[active], scale[active]
        source = special.airy(s * q.a - omega)[0]
        weight = cut[active] * 2.0 * math.pi * s / lprime * source / q.h
        phase = np.exp(1j * q.t * self._dispersion(e, omega, q)[0] / q.h)
        column[active] = (weight * phase)[:, None] * special.airy(s[:, None] * x_grid[None, :] - omega)[0]
        return column

    def eta_grid(self, q: GreenQuery, x_grid, y_grid, omegas, eta_points: int = None) -> np.ndarray:
        """Uniform eta nodes on the psi1 window fine enough for the largest phase rate."""
        omega_max = float(omegas[-1]) if len(omegas) else 1.0
        rate = (1.5 * abs(q.t) + float(np.max(np.abs(y_grid)))) / q.h
        # Airy factors oscillate in eta at about (2/3) h^{-2/3} x sqrt(w) per unit eta
        bandwidth = 2.0 * q.h ** (-2.0 / 3.0) * (float(np.max(x_grid)) + q.a) * math.sqrt(omega_max)
        needed = int(math.ceil((ETA_WINDOW[1] - ETA_WINDOW[0]) * (2.0 * (rate + bandwidth) + TRAPEZOID_MARGIN) / (2.0 * math.pi))) + 1
        count = max(needed, eta_points or settings.grid_eta_points)
        return np.linspace(ETA_WINDOW[0], ETA_WINDOW[1], count)

    # Low frequency

    def low_freq_modes(self, rho_min: float, kmax: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Modes with phi(sqrt(lambda_k(rho))) != 0 for some rho >= rho_min, plus guard modes."""
        omega_top = (PHI_EDGE ** 2 - rho_min ** 2) / rho_min ** (4.0 / 3.0)
        inside = airy_service.zeros_below(omega_top).size
        count = kmax or inside + settings.kmax_guard
        table = airy_service.airy_table(max(count, settings.airy_table_size))
        return np.asarray(table.zeros[:count]), np.asarray(table.lprime[:count])

    @staticmethod
    def rho_min(rings: int = None) -> float:
        rings = rings or settings.low_freq_rings
        return 0.75 * 2.0 ** -(rings - 1)

    @staticmethod
    def ring_taper(rho, rings: int = None):
        """sum_{j<rings} psi2(2^j rho) = phi(rho) - phi(2^rings rho)."""
        rings = rings or settings.low_freq_rings
        return cutoff_service.phi(rho) - cutoff_service.phi(2.0 ** rings * np.asarray(rho, dtype=float))

    @staticmethod
    def _rho_top(omega: float) -> float:
        """rho with rho^2 + w rho^{4/3} = 4."""
        return optimize.brentq(lambda r: r ** 2 + omega * r ** (4.0 / 3.0) - PHI_EDGE ** 2, 0.0, PHI_EDGE)

    def _low_freq_symbol(self, rho, omega, lprime, m, t, x, a, d, split_part, split_m):
        rho = np.asarray(rho, dtype=float)
        lam = rho ** 2 + omega * rho ** (4.0 / 3.0)
        cut = self.ring_taper(rho) * cutoff_service.phi(np.sqrt(lam))
        if split_part != "full":
            chi = cutoff_service.chi0(t * lam / split_m)
            cut = cut * (chi if split_part == "chi0" else 1.0 - chi)
        return cut * rho ** (d - 2) * mode_service.mode_products(omega, lprime, rho, x, a)

    def green_low_freq(
        self,
        m: int,
        t: float,
        x: float,
        a: float,
        y_norm: float,
        d: int = 2,
        kmax: Optional[int] = None,
        tol: float = 1e-8,
        split_part: str = "full",
        split_m: float = None,
        angular: str = "closed",
    ) -> FieldValue:
        """Truncated spectral value of the low-frequency Green function, radial in y."""
        if d < 2:
            raise ArgumentError(f"Dimension must be >= 2, got {d}")
        if x < 0 or a <= 0:
            raise DomainError("Need x >= 0 and a > 0")
        if split_part not in ("full", "chi0", "rest"):
            raise ArgumentError(f"Unknown split part {split_part}")
        split_m = split_m or settings.low_freq_split_m
        y_norm = abs(y_norm)
        lo = self.rho_min()
        omegas, lprimes = self.low_freq_modes(lo, kmax)
        value = 0.0 + 0.0j
        error = 0.0
        used = 0
        with track("green_low_freq"):
            for omega, lprime in zip(omegas, lprimes):
                hi = self._rho_top(omega)
                if hi <= lo:
                    continue
                used += 1
                symbol = lambda r, o=omega, lp=lprime: self._low_freq_symbol(r, o, lp, m, t, x, a, d, split_part, split_m)
                dispersion = lambda r, o=omega: np.sqrt(r ** 2 + o * r ** (4.0 / 3.0) + m ** 2)
                slope = lambda r, o=omega: (2.0 * r + (4.0 / 3.0) * o * r ** (1.0 / 3.0)) / (2.0 * np.sqrt(r ** 2 + o * r ** (4.0 / 3.0) + m ** 2))
                if d == 2:
                    # 2 cos(rho |y|) = e^{i rho |y|} + e^{-i rho |y|}
                    for sign in (1.0, -1.0):
                        spec = PhaseSpec(
                            phase=lambda r, s=sign, f=dispersion: t * f(r) + s * y_norm * r,
                            dphase=lambda r, s=sign, g=slope: t * g(r) + s * y_norm,
                            amplitude=symbol,
                            interval=(lo, hi),
                        )
                        result = oscillatory_quadrature.integrate_detailed(spec, tol=0.0, rtol=tol)
                        value += result.value
                        error += result.error
                else:
                    spec = PhaseSpec(
                        phase=lambda r, f=dispersion: t * f(r),
                        dphase=lambda r, g=slope: t * g(r),
                        amplitude=lambda r, s=symbol: s(r) * angular_kernel(r * y_norm, d, angular),
                        interval=(lo, hi),
                    )
                    result = oscillatory_quadrature.integrate_detailed(spec, tol=0.0, rtol=tol)
                    value += result.value
                    error += result.error
            MODES_SUMMED.labels(evaluator="low_freq").inc(used)
        return FieldValue(value=complex(value), mode_count=used, error_estimate=error)

    def green_low_freq_grid(
        self,
        m: int,
        t: float,
        a: float,
        x_grid,
        y_grid,
        rho_points: int = None,
    ) -> np.ndarray:
        """|x_grid| x |y_grid| low-frequency values at d = 2 by uniform trapezoid in rho."""
        x_grid = np.atleast_1d(np.asarray(x_grid, dtype=float))
        y_grid = np.atleast_1d(np.abs(np.asarray(y_grid, dtype=float)))
        lo = self.rho_min()
        omegas, lprimes = self.low_freq_modes(lo)
        # group speed of mode k is at most 4/(3 rho) on the phi window
        rate = abs(t) * 4.0 / (3.0 * lo) + float(np.max(y_grid))
        # the innermost ring and the phi(sqrt(lambda_k)) edges are 2^{rings-1} times narrower
        margin = TRAPEZOID_MARGIN * 2.0 ** (settings.low_freq_rings - 1)
        count = max(int(math.ceil(PHI_EDGE * (2.0 * rate + margin) / (2.0 * math.pi))) + 1, rho_points or settings.grid_eta_points)
        rho = np.linspace(0.0, PHI_EDGE, count)[1:]
        step = rho[1] - rho[0]
        taper = self.ring_taper(rho)
        active = taper != 0
        rho, taper = rho[active], taper[active]
        scale = rho ** (2.0 / 3.0)
        field = np.zeros((rho.size, x_grid.size), dtype=complex)
        for omega, lprime in zip(omegas, lprimes):
            lam = rho ** 2 + omega * rho ** (4.0 / 3.0)
            cut = taper * cutoff_service.phi(np.sqrt(lam))
            live = cut != 0
            if not np.any(live):
                continue
            s = scale[live]
            weight = cut[live] * 2.0 * math.pi * s / lprime * special.airy(s * a - omega)[0]
            phase = np.exp(1j * t * np.sqrt(lam[live] + m ** 2))
            field[live] += (weight * phase)[:, None] * special.airy(s[:, None] * x_grid[None, :] - omega)[0]
        return _cosine_transform(y_grid, rho, field) * step

    # The model integral v(z, t)

    @staticmethod
    def model_dispersion(eta, m: int, c: float):
        """g(eta) = sqrt(eta^2 + c eta^{4/3} + m^2) with g' and g''."""
        eta = np.asarray(eta, dtype=float)
        p = eta ** 2 + c * eta ** (4.0 / 3.0) + m ** 2
        dp = 2.0 * eta + (4.0 / 3.0) * c * eta ** (1.0 / 3.0)
        ddp = 2.0 + (4.0 / 9.0) * c * eta ** (-2.0 / 3.0)
        root = np.sqrt(p)
        return root, dp / (2.0 * root), (2.0 * p * ddp - dp ** 2) / (4.0 * p * root)

    @staticmethod
    def model_curvature(eta, m: int, c: float):
        """Numerator of g'': m^2 + (2/9) m^2 c eta^{-2/3} - (1/9) c eta^{4/3} - (2/9) c^2 eta^{2/3}."""
        eta = np.asarray(eta, dtype=float)
        return (
            m ** 2
            + (2.0 / 9.0) * m ** 2 * c * eta ** (-2.0 / 3.0)
            - (1.0 / 9.0) * c * eta ** (4.0 / 3.0)
            - (2.0 / 9.0) * c ** 2 * eta ** (2.0 / 3.0)
        )

    def model_spec(self, m: int, c: float, z: float, t: float) -> PhaseSpec:
        """Phase z eta - g(eta) with large parameter t and amplitude psi1."""
        return PhaseSpec(
            phase=lambda e: z * e - self.model_dispersion(e, m, c)[0],
            dphase=lambda e: z - self.model_dispersion(e, m, c)[1],
            ddphase=lambda e: -self.model_dispersion(e, m, c)[2],
            amplitude=cutoff_service.psi1,
            interval=ETA_WINDOW,
            large_parameter=t,
        )

    def model_integral(self, m: int, c: float, z: float, t: float, tol: float = 1e-13) -> complex:
        """v(z, t) = int e^{it(z eta - sqrt(eta^2 + c eta^{4/3} + m^2))} psi1(eta) d eta."""
        if c < 0:
            raise DomainError("c must be non-negative")
        if t <= 0:
            raise DomainError("t must be positive")
        with track("model_integral"):
            return oscillatory_quadrature.integrate(self.model_spec(m, c, z, t), tol)

    def find_degenerate(self, m: int, c: float) -> Optional[Tuple[float, float]]:
        """(eta0, z0) where g''(eta0) = 0 on the psi1 window and z0 = g'(eta0); None if g'' keeps its sign."""
        if c < 0:
            raise DomainError("c must be non-negative")
        eta = np.linspace(ETA_WINDOW[0], ETA_WINDOW[1], 2001)
        numerator = self.model_curvature(eta, m, c)
        changes = np.nonzero(np.signbit(numerator[1:]) != np.signbit(numerator[:-1]))[0]
        changes = [i for i in changes if numerator[i] != 0 or numerator[i + 1] != 0]
        if not changes:
            return None
        i = changes[0]
        eta0 = optimize.brentq(lambda e: self.model_curvature(e, m, c), eta[i], eta[i + 1], xtol=1e-15)
        z0 = float(self.model_dispersion(eta0, m, c)[1])
        logger.debug(f"Degenerate point of the model phase at eta0={eta0:.12f}, z0={z0:.12f}")
        return float(eta0), z0

    def model_stationary_points(self, m: int, c: float, z: float) -> List[StationaryPoint]:
        return oscillatory_quadrature.stationary_points(self.model_spec(m, c, z, 1.0))

    # Ring phases of the low-frequency dyadic pieces

    @staticmethod
    def f_kj(k: int, j: int, z, m: int = 1):
        """Bracket of the second rho-derivative of the ring phase, in z = rho^{2/3}."""
        c = 2.0 ** (-4.0 * j / 3.0) * airy_service.zero(k)
        b = 2.0 ** (-2.0 * j)
        z = np.asarray(z, dtype=float)
        return m ** 2 * (b + (2.0 / 9.0) * c / z) - (1.0 / 9.0) * c * b * z ** 2 - (2.0 / 9.0) * c ** 2 * z

    @staticmethod
    def ring_phase(k: int, j: int, rho, t: float, y_norm: float, theta_perp: float = 0.0, m: int = 1):
        """-2^{-j} rho |y| sqrt(1 - |Theta'|^2) + t sqrt(m^2 + 2^{-2j} rho^2 + 2^{-4j/3} rho^{4/3} w_k)."""
        c = 2.0 ** (-4.0 * j / 3.0) * airy_service.zero(k)
        rho = np.asarray(rho, dtype=float)
        p = m ** 2 + 2.0 ** (-2.0 * j) * rho ** 2 + c * rho ** (4.0 / 3.0)
        return -(2.0 ** -j) * rho * y_norm * math.sqrt(1.0 - theta_perp ** 2) + t * np.sqrt(p)

    def ring_phase_second(self, k: int, j: int, rho, t: float, m: int = 1):
        """Second rho-derivative of the ring phase, t f_{k,j}(rho^{2/3}) / p^{3/2}."""
        c = 2.0 ** (-4.0 * j / 3.0) * airy_service.zero(k)
        rho = np.asarray(rho, dtype=float)
        p = m ** 2 + 2.0 ** (-2.0 * j) * rho ** 2 + c * rho ** (4.0 / 3.0)
        return t * self.f_kj(k, j, rho ** (2.0 / 3.0), m) / p ** 1.5

    def kg_degenerate_scan(self, j: int) -> Optional[DegenerateMode]:
        """Mode k(j) whose bracket f_{k,j} changes sign for rho on the psi2 window."""
        if j < 0:
            raise ArgumentError("Ring index must be >= 0")
        z = np.linspace((A_WINDOW[0]) ** (2.0 / 3.0), A_WINDOW[1] ** (2.0 / 3.0), 801)
        omega_cap = 4.0 * 2.0 ** (4.0 * j / 3.0)
        found = []
        for k in range(1, airy_service.zeros_below(omega_cap).size + 1):
            values = self.f_kj(k, j, z)
            changes = np.nonzero(np.signbit(values[1:]) != np.signbit(values[:-1]))[0]
            if changes.size == 0:
                continue
            i = changes[0]
            root = optimize.brentq(lambda s: float(self.f_kj(k, j, s)), z[i], z[i + 1], xtol=1e-14)
            found.append((k, root))
        if not found:
            return None
        if len(found) > 1:
            logger.warning(f"Ring {j}: {len(found)} modes change curvature sign, keeping the one closest to rho=1")
        k, root = min(found, key=lambda item: abs(item[1] - 1.0))
        return DegenerateMode(j=j, k=k, z_star=root, rho_star=root ** 1.5, candidates=[item[0] for item in found])

    async def green_high_freq_async(self, q: GreenQuery) -> FieldValue:
        """Async variant of green_high_freq."""
        loop = asyncio.get_event_loop()
        return await loop.run_in_executor(None, self.green_high_freq, q)


# Global Green-function service instance
green_service = GreenService()
