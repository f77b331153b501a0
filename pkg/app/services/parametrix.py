"""Reflected-wave representation of the high-frequency Green function.

Poisson summation over the Airy zeros turns the mode sum into a sum over
reflection counts N of oscillatory integrals

    W_N = int int e^{-i N L(w)} F(w, eta) dw deta,     w = gamma A eta^{2/3} / h^{2/3},

where F is the mode-sum symbol with the two Airy factors kept whole. In the
rescaled variables x = gamma X, t = sqrt(gamma) T, gamma^{3/2} Y = y + t sqrt(1 + gamma)
the phase is eta times

    Y + T (sqrt(1 + gamma A + m^2 h^2/eta^2) - sqrt(1 + gamma)) / gamma
      + Upsilon^3/3 + Upsilon (X - A) + S^3/3 + S (a/gamma - A) - 4/3 N A^{3/2}

plus (N / lambda) B(eta lambda A^{3/2}), lambda = gamma^{3/2} / h.
"""

import asyncio
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage, optimize, special

from app.config import settings
from app.models.domain import (
    CriticalPoint,
    GreenQuery,
    OverlapReport,
    PhasePoint,
    PoissonCheck,
    TransverseScaling,
)
from app.services.cutoffs import cutoff_service
from app.services.green import A_WINDOW, ETA_WINDOW, TRAPEZOID_MARGIN
from app.services.specfun import airy_service
from app.util.errors import ArgumentError, DomainError, RegimeError, WindowError
from app.util.logging import get_logger
from app.util.metrics import MODES_SUMMED, track

logger = get_logger("parametrix")

# Box of the critical-point search: |Upsilon|, |S| <= 3, A in [9/10, 8], eta in the psi1 window
A_BOX = (0.9, 8.0)
ROOT_BOX = 3.0

# Seed grid of the reduced (A, eta) solve
SEED_A = 8
SEED_ETA = 4

# Grids of the overlap scan; the A grid is refined with |T|
OVERLAP_A_POINTS = 240
OVERLAP_A_PER_T = 0.6
OVERLAP_ETA_POINTS = 9

POISSON_NODES = 15


class ParametrixService:
    """Phases, wave packets, critical points and overlap counts of the reflected waves."""

    # Phase functions

    @staticmethod
    def _radius(a_var, eta, gamma: float, h: float, m: int):
        return np.sqrt(1.0 + gamma * a_var + (m * h) ** 2 / eta ** 2)

    def _check_point(self, p: PhasePoint):
        if p.A <= 0:
            raise DomainError("Psi is defined for A > 0")
        if p.eta <= 0:
            raise DomainError("Psi is defined for eta > 0")

    def phase_psi(self, p: PhasePoint, m: int, a_over_gamma: float) -> float:
        """Psi_N at the point; B is evaluated through L."""
        self._check_point(p)
        lam = p.lambda_gamma
        radius = self._radius(p.A, p.eta, p.gamma, p.h, m)
        bracket = (
            p.Y
            + p.T * (radius - math.sqrt(1.0 + p.gamma)) / p.gamma
            + p.Upsilon ** 3 / 3.0
            + p.Upsilon * (p.X - p.A)
            + p.S ** 3 / 3.0
            + p.S * (a_over_gamma - p.A)
            - (4.0 / 3.0) * p.N * p.A ** 1.5
        )
        value = p.eta * bracket
        if p.N != 0:
            value += p.N / lam * airy_service.big_b(p.eta * lam * p.A ** 1.5)
        return float(value)

    def phase_psi_gradient(self, p: PhasePoint, m: int, a_over_gamma: float) -> np.ndarray:
        """(d/dUpsilon, d/dS, d/dA, d/deta) of Psi_N."""
        self._check_point(p)
        lam = p.lambda_gamma
        radius = self._radius(p.A, p.eta, p.gamma, p.h, m)
        reflection = 1.0
        if p.N != 0:
            reflection = 1.0 - 0.75 * airy_service.big_b_prime(p.eta * lam * p.A ** 1.5)
        mass = (m * p.h) ** 2 / (p.gamma * p.eta ** 2 * radius)
        d_upsilon = p.eta * (p.Upsilon ** 2 + p.X - p.A)
        d_s = p.eta * (p.S ** 2 + a_over_gamma - p.A)
        d_a = p.eta * (-p.Upsilon - p.S + p.T / (2.0 * radius) - 2.0 * p.N * math.sqrt(p.A) * reflection)
        d_eta = (
            p.Y
            + p.T * ((radius - math.sqrt(1.0 + p.gamma)) / p.gamma - mass)
            + p.Upsilon ** 3 / 3.0
            + p.Upsilon * (p.X - p.A)
            + p.S ** 3 / 3.0
            + p.S * (a_over_gamma - p.A)
            - (4.0 / 3.0) * p.N * p.A ** 1.5 * reflection
        )
        return np.array([d_upsilon, d_s, d_a, d_eta], dtype=float)

    def phase_phi_n(
        self,
        N: int,
        t: float,
        x: float,
        y: float,
        sigma: float,
        s: float,
        alpha: float,
        eta: float,
        a: float,
        h: float,
        m: int = 0,
    ) -> float:
        """Unscaled phase of the N-th reflected wave, with -N h L(w) as written in the integrand."""
        if alpha <= 0 or eta <= 0:
            raise DomainError("Phi_N is defined for alpha > 0 and eta > 0")
        omega = (eta * alpha ** 1.5 / h) ** (2.0 / 3.0)
        bracket = (
            y
            + t * math.sqrt(1.0 + alpha + (m * h) ** 2 / eta ** 2)
            + sigma ** 3 / 3.0
            + sigma * (x - alpha)
            + s ** 3 / 3.0
            + s * (a - alpha)
        )
        return float(eta * bracket - N * h * airy_service.big_l(omega))

    def critical_residual(self, p: PhasePoint, m: int, a_over_gamma: float) -> np.ndarray:
        """(Upsilon^2 + X - A, S^2 + a/gamma - A, dPsi/dA / eta, dPsi/deta)."""
        grad = self.phase_psi_gradient(p, m, a_over_gamma)
        return np.array([grad[0] / p.eta, grad[1] / p.eta, grad[2] / p.eta, grad[3]])

    def critical_yt_residual(self, p: PhasePoint, m: int, a_over_gamma: float) -> float:
        """The relation between Y and T left after eliminating N from the A- and eta-equations."""
        radius = self._radius(p.A, p.eta, p.gamma, p.h, m)
        mass = (m * p.h) ** 2 / (p.gamma * p.eta ** 2)
        shift = ((p.A - 1.0) + mass) / (radius + math.sqrt(1.0 + p.gamma)) - mass / radius
        cubic = p.Upsilon ** 3 / 3.0 + p.Upsilon * (p.X - p.A) + p.S ** 3 / 3.0 + p.S * (a_over_gamma - p.A)
        return float(p.Y + p.T * shift + cubic - (2.0 / 3.0) * p.A * (p.T / (2.0 * radius) - (p.Upsilon + p.S)))

    # Critical points

    def critical_solve(
        self,
        N: int,
        T: float,
        X: float,
        Y: float,
        gamma: float,
        h: float,
        a: float,
        m: int = 0,
    ) -> List[CriticalPoint]:
        """All critical points of Psi_N in the search box.

        Upsilon and S are eliminated through their quadratic equations (four sign
        branches); the remaining (A, eta) system is solved by bounded least squares
        from a seed grid, so one-parameter families are returned at every seed.
        """
        a_over_gamma = a / gamma
        lo = max(A_BOX[0], X, a_over_gamma)
        if lo >= A_BOX[1]:
            return []
        base = PhasePoint(N=N, T=T, X=X, Y=Y, gamma=gamma, h=h)
        tolerance = settings.newton_tol * max(1.0, abs(T), abs(Y))
        found: List[CriticalPoint] = []
        seeds_a = np.linspace(lo, A_BOX[1], SEED_A + 2)[1:-1]
        seeds_eta = np.linspace(ETA_WINDOW[0], ETA_WINDOW[1], SEED_ETA + 2)[1:-1]
        for sign_u in (1.0, -1.0):
            for sign_s in (1.0, -1.0):
                branch = lambda v: self._branch_residual(base, v, sign_u, sign_s, m, a_over_gamma)
                for a_seed in seeds_a:
                    for eta_seed in seeds_eta:
                        solution = self._solve_reduced(branch, np.array([a_seed, eta_seed]), lo, tolerance)
                        if solution is None:
                            continue
                        point = self._lift(base, solution, sign_u, sign_s, a_over_gamma)
                        if abs(point.Upsilon) > ROOT_BOX or abs(point.S) > ROOT_BOX:
                            continue
                        residual = float(np.max(np.abs(self.critical_residual(point, m, a_over_gamma))))
                        candidate = CriticalPoint(
                            Upsilon=point.Upsilon, S=point.S, A=point.A, eta=point.eta, residual=residual
                        )
                        if not self._is_duplicate(candidate, found):
                            found.append(candidate)
        logger.debug(f"Psi_{N} at T={T}: {len(found)} critical points")
        return found

    @staticmethod
    def _lift(base: PhasePoint, reduced, sign_u: float, sign_s: float, a_over_gamma: float) -> PhasePoint:
        a_var, eta = reduced
        upsilon = sign_u * math.sqrt(max(a_var - base.X, 0.0))
        s = sign_s * math.sqrt(max(a_var - a_over_gamma, 0.0))
        return base.with_variables((upsilon, s, a_var, eta))

    def _branch_residual(self, base, reduced, sign_u, sign_s, m, a_over_gamma) -> np.ndarray:
        point = self._lift(base, reduced, sign_u, sign_s, a_over_gamma)
        return self.critical_residual(point, m, a_over_gamma)[2:]

    def _solve_reduced(self, residual: Callable, start: np.ndarray, a_floor: float, tolerance: float) -> Optional[np.ndarray]:
        """Bounded trust-region least squares in (A, eta); None when no root is reached."""
        fit = optimize.least_squares(
            residual,
            start,
            jac="3-point",
            bounds=([a_floor, ETA_WINDOW[0]], [A_BOX[1], ETA_WINDOW[1]]),
            method="trf",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=10 * settings.newton_max_iter,
        )
        if float(np.max(np.abs(fit.fun))) > 100.0 * tolerance:
            logger.debug(f"No root from seed {start}: {fit.message}")
            return None
        return fit.x

    @staticmethod
    def _is_duplicate(candidate: CriticalPoint, found: Sequence[CriticalPoint]) -> bool:
        here = np.array([candidate.Upsilon, candidate.S, candidate.A, candidate.eta])
        for other in found:
            there = np.array([other.Upsilon, other.S, other.A, other.eta])
            if np.linalg.norm(here - there) < settings.dedup_radius:
                return True
        return False

    # Overlap of reflected waves

    @staticmethod
    def bound_rhs(t: float, gamma: float, h: float, m: int) -> float:
        """1 + t / (gamma^{1/2} gamma^3 / h^2) + m^2 |t| h^2 / gamma^{3/2}."""
        return 1.0 + abs(t) / (math.sqrt(gamma) * gamma ** 3 / h ** 2) + m ** 2 * abs(t) * h ** 2 / gamma ** 1.5

    def overlap_count(
        self,
        t: float,
        x: float,
        y: float,
        gamma: float,
        h: float,
        m: int = 0,
        a: float = None,
    ) -> OverlapReport:
        """Reflections N with a critical point for some (t', x', y') near (t, x, y).

        The neighbourhood is |t' - t| <= sqrt(gamma), |x' - x| < gamma (x' >= 0) and
        |y' + t' sqrt(1+gamma) - y - t sqrt(1+gamma)| < gamma^{3/2}, i.e. unit boxes in
        (T, X, Y). T' and X' are sampled on a grid. Y' and eta are covered as a
        continuum: at a root of the A-equation the eta-equation fixes Y through an
        N-free relation, so the admissible (A, eta) set is {|y_star - Y| < 1}, and on
        each connected piece of it the real reflection count drive / weight takes
        every value between its extremes. Only A in the psi2 window carries amplitude.
        """
        a = gamma if a is None else a
        a_over_gamma = a / gamma
        lam = gamma ** 1.5 / h
        T = t / math.sqrt(gamma)
        X = x / gamma
        Y = (y + t * math.sqrt(1.0 + gamma)) / gamma ** 1.5
        samples = settings.overlap_probe
        members = set()
        with track("overlap_count"):
            eta = np.linspace(ETA_WINDOW[0], ETA_WINDOW[1], OVERLAP_ETA_POINTS)
            for x_near in sorted({max(0.0, v) for v in X + np.linspace(-1.0, 1.0, samples)}):
                lo = max(A_WINDOW[0], x_near, a_over_gamma)
                if lo >= A_WINDOW[1]:
                    continue
                # |y_star - Y| < 1 is a band of width about 2 / (|T| |dF/dA|) in A
                density = OVERLAP_A_PER_T * (abs(T) + 1.0) + 8.0
                count = max(OVERLAP_A_POINTS, int(math.ceil((A_WINDOW[1] - lo) * density)))
                a_grid = np.linspace(lo, A_WINDOW[1], count)
                grid_a, grid_eta = np.meshgrid(a_grid, eta, indexing="ij")
                reflection = 1.0 - 0.75 * airy_service.big_b_prime(grid_eta * lam * grid_a ** 1.5)
                weight = 2.0 * np.sqrt(grid_a) * reflection
                for t_near in T + np.linspace(-1.0, 1.0, samples):
                    members |= self._members_near(
                        t_near, x_near, Y, grid_a, grid_eta, weight, gamma, h, m, a_over_gamma
                    )
        report = OverlapReport(
            t=t, x=x, y=y, gamma=gamma, h=h, m=m,
            members=sorted(members),
            bound_rhs=self.bound_rhs(t, gamma, h, m),
            constant=settings.overlap_constant,
        )
        if not report.within_bound:
            logger.warning(f"{report.count} overlapping reflections exceed {report.constant} x {report.bound_rhs:.3g}")
        return report

    def _members_near(self, T, X, Y, grid_a, grid_eta, weight, gamma, h, m, a_over_gamma) -> set:
        """Integers hit by drive / weight on the pieces of the (A, eta) grid where |y_star - Y| < 1."""
        radius = self._radius(grid_a, grid_eta, gamma, h, m)
        mass = (m * h) ** 2 / (gamma * grid_eta ** 2)
        shift = ((grid_a - 1.0) + mass) / (radius + math.sqrt(1.0 + gamma)) - mass / radius
        members = set()
        for sign_u in (1.0, -1.0):
            for sign_s in (1.0, -1.0):
                upsilon = sign_u * np.sqrt(grid_a - X)
                s = sign_s * np.sqrt(np.maximum(grid_a - a_over_gamma, 0.0))
                drive = T / (2.0 * radius) - upsilon - s
                cubic = upsilon ** 3 / 3.0 + upsilon * (X - grid_a) + s ** 3 / 3.0 + s * (a_over_gamma - grid_a)
                # Y at which a root of the A-equation is also a root of the eta-equation
                y_star = -(T * shift + cubic) + (2.0 / 3.0) * grid_a * drive
                admissible = np.abs(y_star - Y) < 1.0
                if not np.any(admissible):
                    continue
                labels, pieces = ndimage.label(admissible)
                index = np.arange(1, pieces + 1)
                ratio = drive / weight
                lows = ndimage.minimum(ratio, labels, index)
                highs = ndimage.maximum(ratio, labels, index)
                for low, high in zip(np.atleast_1d(lows), np.atleast_1d(highs)):
                    members.update(range(int(math.ceil(low)), int(math.floor(high)) + 1))
        return members

    # Wave packets

    @staticmethod
    def _check_regime(q: GreenQuery):
        if not q.high_frequency:
            raise ArgumentError("Wave packets need a dyadic scale gamma")
        if q.lambda_gamma < settings.regime_lambda_min:
            raise RegimeError(
                f"lambda_gamma = {q.lambda_gamma:.3g} < {settings.regime_lambda_min}: "
                "outside the stationary-phase regime, use green_high_freq"
            )

    def reflection_window(self, q: GreenQuery) -> range:
        """N with |4 N sqrt(gamma) sqrt(1+gamma) - t| <= Delta, widened by guard reflections."""
        speed = 4.0 * math.sqrt(q.gamma) * math.sqrt(1.0 + q.gamma)
        delta = max(settings.window_delta_floor * math.sqrt(q.gamma), abs(q.t) / 2.0)
        lo = int(math.floor((q.t - delta) / speed)) - settings.window_guard
        hi = int(math.ceil((q.t + delta) / speed)) + settings.window_guard
        return range(lo, hi + 1)

    def _packet_grid(self, q: GreenQuery, n_abs: int):
        """Uniform (eta, A) nodes resolving every phase up to reflection count n_abs."""
        c = q.gamma / q.h ** (2.0 / 3.0)
        omega_max = c * A_WINDOW[1] * ETA_WINDOW[1] ** (2.0 / 3.0)
        slope = 2.0 * math.sqrt(omega_max) + 1.0  # bounds L'
        theta23 = (ETA_WINDOW[1] / q.h) ** (2.0 / 3.0)
        airy_range = theta23 * max(q.x, q.a) + omega_max
        eta_rate = (
            (1.5 * abs(q.t) + abs(q.y)) / q.h
            + n_abs * slope * (2.0 / 3.0) * omega_max / ETA_WINDOW[0]
            + 2.0 * math.sqrt(airy_range) * (2.0 / 3.0) * airy_range / ETA_WINDOW[0]
        )
        dw_da = c * ETA_WINDOW[1] ** (2.0 / 3.0)
        a_rate = (
            n_abs * slope * dw_da
            + abs(q.t) * ETA_WINDOW[1] ** 2 * q.gamma / (2.0 * q.h)
            + 2.0 * math.sqrt(airy_range) * dw_da
        )
        n_eta = int(math.ceil((ETA_WINDOW[1] - ETA_WINDOW[0]) * (2.0 * eta_rate + TRAPEZOID_MARGIN) / (2.0 * math.pi))) + 1
        n_a = int(math.ceil((A_WINDOW[1] - A_WINDOW[0]) * (2.0 * a_rate + TRAPEZOID_MARGIN) / (2.0 * math.pi))) + 1
        return np.linspace(*ETA_WINDOW, n_eta), np.linspace(*A_WINDOW, n_a)

    def _packet_symbol(self, q: GreenQuery, eta: np.ndarray, a_var: np.ndarray):
        """Non-reflection part of the (A, eta) integrand on the live nodes, with L there."""
        grid_eta, grid_a = np.meshgrid(eta, a_var, indexing="ij")
        stretch = np.sqrt(1.0 + q.gamma * grid_a)
        cut = cutoff_service.psi1(grid_eta) * cutoff_service.psi1(grid_eta * stretch) * cutoff_service.psi2(grid_a)
        live = cut != 0
        e, av = grid_eta[live], grid_a[live]
        theta23 = (e / q.h) ** (2.0 / 3.0)
        jacobian = q.gamma * e ** (2.0 / 3.0) / q.h ** (2.0 / 3.0)
        omega = jacobian * av
        energy = np.sqrt((q.m * q.h) ** 2 + e ** 2 * (1.0 + q.gamma * av))
        symbol = (
            cut[live]
            * theta23
            * special.airy(theta23 * q.x - omega)[0]
            * special.airy(theta23 * q.a - omega)[0]
            * 2.0 * np.cos(q.y * e / q.h)
            * np.exp(1j * q.t * energy / q.h)
            * jacobian / q.h
        )
        step = (eta[1] - eta[0]) * (a_var[1] - a_var[0])
        return symbol * step, airy_service.big_l(omega)

    def wave_packets(self, q: GreenQuery, orders: Iterable[int]) -> np.ndarray:
        """W_N for every N in orders, on one shared quadrature grid."""
        self._check_regime(q)
        orders = [int(n) for n in orders]
        if not orders:
            return np.zeros(0, dtype=complex)
        with track("wave_packets"):
            eta, a_var = self._packet_grid(q, max(abs(n) for n in orders))
            symbol, phase = self._packet_symbol(q, eta, a_var)
            packet = lambda n: complex(np.sum(symbol * np.exp(-1j * n * phase)))
            with ThreadPoolExecutor(max_workers=settings.threads) as pool:
                values = list(pool.map(packet, orders))
        logger.debug(f"{len(orders)} wave packets on a {eta.size} x {a_var.size} grid")
        return np.array(values, dtype=complex)

    def wave_packet(self, N: int, q: GreenQuery) -> complex:
        """N-th reflected wave W_N at the query point."""
        return complex(self.wave_packets(q, [N])[0])

    def sum_reflected(self, q: GreenQuery, window: Optional[Sequence[int]] = None) -> complex:
        """sum_N W_N over the reflection window; the default window grows until its edges are negligible."""
        explicit = window is not None
        orders = list(window) if explicit else list(self.reflection_window(q))
        for _ in range(4):
            values = self.wave_packets(q, orders)
            total = complex(np.sum(values))
            edge = float(max(abs(values[0]), abs(values[-1])))
            scale = float(np.max(np.abs(values)))
            MODES_SUMMED.labels(evaluator="reflected").inc(len(orders))
            if edge <= q.tol * scale:
                return total
            if explicit:
                break
            guard = settings.window_guard
            orders = list(range(orders[0] - guard, orders[-1] + guard + 1))
            logger.info(f"Widening reflection window to [{orders[0]}, {orders[-1]}]")
        if edge > 10.0 * q.tol * scale:
            raise WindowError(
                f"Reflection window [{orders[0]}, {orders[-1]}] too small at t={q.t}",
                boundary=edge,
                interior=scale,
            )
        return total

    async def sum_reflected_async(self, q: GreenQuery) -> complex:
        """Async variant of sum_reflected."""
        loop = asyncio.get_event_loop()
        return await loop.run_in_executor(None, self.sum_reflected, q)

    # Airy-Poisson summation

    def airy_poisson_check(
        self,
        testfn: Callable,
        support: Tuple[float, float],
        n_max: int,
    ) -> PoissonCheck:
        """sum_{|N|<=n_max} int e^{-iN L(w)} f(w) dw against 2 pi sum_k f(w_k) / L'(w_k)."""
        lo, hi = support
        if lo < 0 or hi <= lo:
            raise DomainError("Test functions must be supported in [0, inf)")
        if n_max < 0:
            raise ArgumentError("n_max must be >= 0")
        with track("airy_poisson_check"):
            slope = float(np.max(airy_service.lprime(np.linspace(lo, hi, 200))))
            panels = max(16, int(math.ceil((hi - lo) * (n_max + 1) * slope / 2.0)))
            nodes, weights = np.polynomial.legendre.leggauss(POISSON_NODES)
            edges = np.linspace(lo, hi, panels + 1)
            half = 0.5 * np.diff(edges)
            omega = (0.5 * (edges[1:] + edges[:-1])[:, None] + half[:, None] * nodes[None, :]).ravel()
            w = (half[:, None] * weights[None, :]).ravel() * np.asarray(testfn(omega), dtype=float)
            ell = airy_service.big_l(omega)
            total = complex(np.sum(w))
            for n in range(1, n_max + 1):
                # N and -N paired, in increasing |N|
                total += complex(np.sum(w * np.exp(-1j * n * ell))) + complex(np.sum(w * np.exp(1j * n * ell)))
            zeros = airy_service.zeros_below(hi)
            inside = zeros[zeros >= lo]
            rhs = 0.0
            for omega_k in inside:
                rhs += 2.0 * math.pi * float(testfn(np.asarray([omega_k]))[0]) / float(airy_service.lprime(omega_k))
        return PoissonCheck(lhs=total.real, rhs=rhs, lhs_imag=total.imag, n_max=n_max)

    # Transverse dyadic pieces

    def transverse_rescale(self, h: float, h_tilde: float, t: float, x: float, a: float, y: float) -> TransverseScaling:
        """T = t (h/h~)^2, X = x h^2/h~^2, Y = (h/h~)^3 (y + t), a~ = a (h/h~)^2, lambda~ = h~^2 / h^3."""
        if h <= 0 or h_tilde < h:
            raise DomainError("Need 0 < h <= h_tilde")
        ratio = h / h_tilde
        if a > 4.0 / ratio ** 2:
            logger.debug(f"a={a} beyond 4 (h~/h)^2: transverse piece is negligible")
            return TransverseScaling(negligible=True)
        return TransverseScaling(
            T=t * ratio ** 2,
            X=x * ratio ** 2,
            Y=ratio ** 3 * (y + t),
            a_tilde=a * ratio ** 2,
            lambda_tilde=h_tilde ** 2 / h ** 3,
        )

    # Envelopes of single wave packets

    @staticmethod
    def lattice_bound(h: float, lam: float, N: int, T: float) -> float:
        """h^{-2} h^{1/3} / ((N / lambda^{1/3})^{1/4} + |N (T - 4N)|^{1/6}), valid for N < lambda^{1/3}."""
        return h ** (-5.0 / 3.0) / ((abs(N) / lam ** (1.0 / 3.0)) ** 0.25 + abs(N * (T - 4.0 * N)) ** (1.0 / 6.0))

    @staticmethod
    def away_bound(h: float, N: int, T: float) -> float:
        """h^{-2} h^{1/3} / (1 + |N (T - 4N)|^{1/2}), away from the caustic."""
        return h ** (-5.0 / 3.0) / (1.0 + abs(N * (T - 4.0 * N)) ** 0.5)

    @staticmethod
    def medium_bound(h: float, lam: float, N: int, T: float) -> float:
        """h^{-2} h^{1/3} / ((N / lambda^{1/3})^{1/2} + lambda^{1/6} |T - 4N|^{1/2}), lambda^{1/3} <= N <= lambda."""
        return h ** (-5.0 / 3.0) / (
            (abs(N) / lam ** (1.0 / 3.0)) ** 0.5 + lam ** (1.0 / 6.0) * abs(T - 4.0 * N) ** 0.5
        )

    @staticmethod
    def large_bound(h: float, lam: float, N: int) -> float:
        """h^{-2} h^{1/3} sqrt(lambda/N) / (N / lambda^{1/3})^{1/2}, N >= lambda."""
        n = abs(N)
        return h ** (-5.0 / 3.0) * math.sqrt(lam / n) / (n / lam ** (1.0 / 3.0)) ** 0.5

    def packet_bound(self, h: float, lam: float, N: int, T: float) -> float:
        """Envelope of |W_N| for N != 0, picked by the size of N and the distance to the caustic."""
        n = abs(N)
        if n == 0:
            raise ArgumentError("The direct wave has no reflection envelope")
        if n < lam ** (1.0 / 3.0):
            if abs(T - 4.0 * n) * n <= 1.0:
                return self.lattice_bound(h, lam, n, T)
            return self.away_bound(h, n, T)
        if n <= lam:
            return self.medium_bound(h, lam, n, T)
        return self.large_bound(h, lam, n)

    @staticmethod
    def transverse_bound(h_tilde: float, lam_tilde: float, N: int, T: float) -> float:
        """The lattice envelope with (h~, lambda~) in place of (h, lambda)."""
        return h_tilde ** (-5.0 / 3.0) / (
            (abs(N) / lam_tilde ** (1.0 / 3.0)) ** 0.25 + abs(N * (T - 4.0 * N)) ** (1.0 / 6.0)
        )


# Global parametrix service instance
parametrix_service = ParametrixService()
