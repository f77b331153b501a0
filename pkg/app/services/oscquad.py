"""Oscillatory-integral engine.

Integrals  I = int_lo^hi amplitude(s) exp(i lam phase(s)) ds  are computed with
Gauss-Legendre panels. Initial panels carry at most a fixed budget of phase
(|lam phase'| * width <= pi/2); panels are then bisected until the difference
between the one-panel and two-half-panel rules meets the local tolerance.
"""

import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import optimize, stats

from app.config import settings
from app.models.domain import DecayFit, PhaseSpec, QuadratureResult, StationaryPoint
from app.util.errors import AccuracyError, ArgumentError
from app.util.logging import get_logger
from app.util.metrics import QUADRATURE_PANELS, track

logger = get_logger("oscquad")

UNDERFLOW = 1e-14
EPS = np.finfo(float).eps
# relative two-halves discrepancy under which a non-improving panel is noise
STALL_LEVEL = 1e-8


class OscillatoryQuadrature:
    """Adaptive Gauss-Legendre panels driven by the phase derivative."""

    def __init__(self, nodes: int = None):
        self.order = nodes or settings.quad_nodes
        self.nodes, self.weights = np.polynomial.legendre.leggauss(self.order)

    # Panel construction

    def initial_edges(self, spec: PhaseSpec, min_panels: int = 1) -> np.ndarray:
        """Edges such that each panel carries about pi/2 of phase."""
        lo, hi = spec.interval
        s = np.linspace(lo, hi, settings.quad_scan_points)
        rate = spec.large_parameter * np.abs(np.asarray(spec.dphase(s), dtype=float))
        cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(s))])
        # the scan's resolution bounds how finely we can place edges
        budget = settings.quad_phase_per_panel
        count = max(min_panels, int(math.ceil(cumulative[-1] / budget)))
        uniform = np.linspace(lo, hi, min_panels + 1)
        if count <= min_panels:
            return uniform
        targets = np.linspace(0.0, cumulative[-1], count + 1)
        edges = np.interp(targets, cumulative, s)
        edges[0], edges[-1] = lo, hi
        return np.unique(np.concatenate([edges, uniform]))

    def _rule(self, f: Callable, left: np.ndarray, right: np.ndarray):
        """Panel sums of f and |f| for arrays of panels."""
        mid = 0.5 * (left + right)
        half = 0.5 * (right - left)
        s = mid[:, None] + half[:, None] * self.nodes[None, :]
        values = np.asarray(f(s))
        weighted = half[:, None] * self.weights[None, :]
        return np.sum(weighted * values, axis=1), np.sum(weighted * np.abs(values), axis=1)

    def integrate_function(
        self,
        f: Callable,
        edges: np.ndarray,
        tol: float,
        rtol: float = 0.0,
        max_depth: int = None,
        max_panels: int = None,
    ) -> QuadratureResult:
        """Adaptive panel integration of a vectorized integrand over the given edges.

        A panel is accepted when its two-halves error estimate is below its share
        (width / total width) of max(tol, rtol * int|f|), or when bisection stops
        improving an estimate that is already at the integrand's noise level.
        """
        if tol <= 0 and rtol <= 0:
            raise ArgumentError("Need a positive absolute or relative tolerance")
        max_depth = max_depth or settings.quad_max_depth
        max_panels = max_panels or settings.quad_max_panels
        total_width = edges[-1] - edges[0]
        left, right = edges[:-1].astype(float), edges[1:].astype(float)
        coarse, _ = self._rule(f, left, right)
        parent = np.full(left.size, np.inf)
        value = 0.0 + 0.0j
        error = 0.0
        accepted_abs = 0.0
        accepted_panels = 0
        stalled_panels = 0
        for _ in range(max_depth):
            mid = 0.5 * (left + right)
            q_left, a_left = self._rule(f, left, mid)
            q_right, a_right = self._rule(f, mid, right)
            fine = q_left + q_right
            panel_abs = a_left + a_right
            estimate = np.abs(fine - coarse)
            abs_total = accepted_abs + float(np.sum(panel_abs))
            share = (right - left) / total_width
            local = share * max(tol, rtol * abs_total, 16.0 * EPS * abs_total)
            local = np.maximum(local, 64.0 * EPS * panel_abs)
            converged = estimate <= local
            relative = estimate / np.maximum(panel_abs, np.finfo(float).tiny)
            # bisection no longer gains and the discrepancy is at the integrand's noise level
            stalled = ~converged & (relative > 0.25 * parent) & (relative <= STALL_LEVEL)
            done = converged | stalled
            value += np.sum(fine[done])
            error += float(np.sum(estimate[done]))
            accepted_abs += float(np.sum(panel_abs[done]))
            accepted_panels += int(np.count_nonzero(done))
            stalled_panels += int(np.count_nonzero(stalled))
            if np.all(done):
                QUADRATURE_PANELS.set(accepted_panels)
                if stalled_panels:
                    target = max(tol, rtol * accepted_abs)
                    log = logger.warning if error > target else logger.debug
                    log(f"{stalled_panels} panels stopped at roundoff level; error estimate {error:.3e}")
                return QuadratureResult(value=complex(value), error=error, panels=max(accepted_panels, 1))
            keep = ~done
            if 2 * int(np.count_nonzero(keep)) + accepted_panels > max_panels:
                coarse = fine[keep]
                break
            left = np.concatenate([left[keep], mid[keep]])
            right = np.concatenate([mid[keep], right[keep]])
            coarse = np.concatenate([q_left[keep], q_right[keep]])
            parent = np.concatenate([relative[keep], relative[keep]])
        best = value + np.sum(coarse)
        bound = error + float(np.sum(np.abs(coarse)))
        raise AccuracyError(
            f"Oscillatory quadrature did not converge within {max_depth} bisections "
            f"and {max_panels} panels ({left.size} panels active)",
            estimate=complex(best),
            bound=bound,
        )

    def integrate_detailed(
        self,
        spec: PhaseSpec,
        tol: float = None,
        rtol: float = 0.0,
        min_panels: int = 1,
    ) -> QuadratureResult:
        tol = settings.quad_tol if tol is None else tol
        lam = spec.large_parameter
        f = lambda s: spec.amplitude(s) * np.exp(1j * lam * spec.phase(s))
        with track("integrate_oscillatory"):
            return self.integrate_function(f, self.initial_edges(spec, min_panels), tol, rtol)

    def integrate(self, spec: PhaseSpec, tol: float = None) -> complex:
        """Value of the oscillatory integral with estimated absolute error <= tol."""
        return self.integrate_detailed(spec, tol).value

    def integrate_nested(
        self,
        inner: Callable[[float], QuadratureResult],
        interval: Sequence[float],
        tol: float,
        outer_weight: Optional[Callable] = None,
        min_panels: int = 1,
        rtol: float = 0.0,
    ) -> QuadratureResult:
        """int outer_weight(u) * inner(u) du with inner integrals evaluated to tol / width each."""
        lo, hi = interval
        width = hi - lo
        inner_errors: List[float] = []

        def integrand(u: np.ndarray) -> np.ndarray:
            flat = u.ravel()
            values = np.empty(flat.size, dtype=complex)
            for i, point in enumerate(flat):
                result = inner(float(point))
                values[i] = result.value
                inner_errors.append(result.error)
            values = values.reshape(u.shape)
            if outer_weight is not None:
                values = values * outer_weight(u)
            return values

        edges = np.linspace(lo, hi, max(1, min_panels) + 1)
        outer = self.integrate_function(integrand, edges, tol, rtol)
        inner_bound = width * (max(inner_errors) if inner_errors else 0.0)
        return QuadratureResult(value=outer.value, error=outer.error + inner_bound, panels=outer.panels)

    # Stationary points

    def stationary_points(self, spec: PhaseSpec, zero_tol: float = 1e-9) -> List[StationaryPoint]:
        """Roots of phase' on the interval, order 1 or order 2 (phase'' also vanishes)."""
        lo, hi = spec.interval
        s = np.linspace(lo, hi, settings.quad_scan_points)
        first = np.asarray(spec.dphase(s), dtype=float)
        scale = max(1.0, float(np.max(np.abs(first))))
        second_fn = spec.ddphase or (lambda x: _central_difference(spec.dphase, x))
        second = np.asarray(second_fn(s), dtype=float)
        curvature = float(np.max(np.abs(second)))
        points: List[StationaryPoint] = []

        for i in np.nonzero(np.signbit(first[1:]) != np.signbit(first[:-1]))[0]:
            try:
                root = optimize.brentq(spec.dphase, s[i], s[i + 1], xtol=1e-14)
            except ValueError as e:
                logger.warning(f"Root bracketing failed on [{s[i]}, {s[i + 1]}] at scan resolution {s[1] - s[0]}: {e}")
                continue
            points.append(self._classify(root, float(second_fn(root)), curvature))

        # touching zeros: phase'' changes sign where phase' itself vanishes
        for i in np.nonzero(np.signbit(second[1:]) != np.signbit(second[:-1]))[0]:
            try:
                inflection = optimize.brentq(second_fn, s[i], s[i + 1], xtol=1e-14)
            except ValueError:
                continue
            if abs(float(spec.dphase(inflection))) <= zero_tol * scale:
                points = [p for p in points if abs(p.location - inflection) > 4.0 * (s[1] - s[0])]
                points.append(StationaryPoint(location=inflection, order=2, second_derivative=float(second_fn(inflection))))

        points.sort(key=lambda p: p.location)
        return points

    @staticmethod
    def _classify(location: float, second: float, curvature: float) -> StationaryPoint:
        """Order 2 when |phase''| is below degenerate_tol times its largest value on the interval."""
        order = 1 if abs(second) > settings.degenerate_tol * curvature else 2
        return StationaryPoint(location=location, order=order, second_derivative=second)

    def gradient_check(self, spec: PhaseSpec, points: int = 50, rel: float = 1e-6) -> bool:
        """Derivative callbacks agree with central differences on the interval."""
        lo, hi = spec.interval
        s = np.linspace(lo, hi, points + 2)[1:-1]
        checks = [(spec.phase, spec.dphase)]
        if spec.ddphase is not None:
            checks.append((spec.dphase, spec.ddphase))
        for fn, derivative in checks:
            exact = np.asarray(derivative(s), dtype=float)
            approx = _central_difference(fn, s)
            if np.any(np.abs(exact - approx) > rel * np.maximum(1.0, np.abs(exact))):
                return False
        return True

    # Decay measurement

    def decay_probe(self, family: Callable[[float], PhaseSpec], t_list: Sequence[float], tol: float = 1e-13) -> DecayFit:
        """Fit |I(t)| ~ C t^{-rho} over a geometric list of t."""
        t_values = [float(t) for t in t_list]
        if len(t_values) < 6:
            raise ArgumentError("decay_probe needs at least 6 values of t")
        values = [abs(self.integrate_detailed(family(t), tol=tol).value) for t in t_values]
        return fit_power_law(t_values, values)


def _central_difference(fn: Callable, s, step: float = 1e-5) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    h = step * np.maximum(1.0, np.abs(s))
    return (np.asarray(fn(s + h)) - np.asarray(fn(s - h))) / (2.0 * h)


def fit_power_law(t_values: Sequence[float], values: Sequence[float]) -> DecayFit:
    """Least-squares slope of log|value| against log t; exponent = -slope."""
    t = np.asarray(t_values, dtype=float)
    v = np.asarray(values, dtype=float)
    underflow = bool(np.any(v < UNDERFLOW))
    usable = v >= UNDERFLOW
    if np.count_nonzero(usable) < 2:
        return DecayFit(
            t_values=list(t), abs_values=list(v), exponent=float("inf"), constant=0.0,
            residual=0.0, underflow=True, degenerate=True,
        )
    logs = np.log(v[usable])
    degenerate = bool(np.ptp(logs) == 0.0)
    fit = stats.linregress(np.log(t[usable]), logs)
    predicted = fit.intercept + fit.slope * np.log(t[usable])
    residual = float(np.sqrt(np.mean((logs - predicted) ** 2)))
    return DecayFit(
        t_values=list(t),
        abs_values=list(v),
        exponent=float(-fit.slope),
        constant=float(np.exp(fit.intercept)),
        residual=residual,
        underflow=underflow,
        degenerate=degenerate,
    )


# Global quadrature instance
oscillatory_quadrature = OscillatoryQuadrature()


def integrate_oscillatory(spec: PhaseSpec, tol: float = None) -> complex:
    return oscillatory_quadrature.integrate(spec, tol)


def stationary_points(spec: PhaseSpec) -> List[StationaryPoint]:
    return oscillatory_quadrature.stationary_points(spec)


def decay_probe(family: Callable[[float], PhaseSpec], t_list: Sequence[float]) -> DecayFit:
    return oscillatory_quadrature.decay_probe(family, t_list)
