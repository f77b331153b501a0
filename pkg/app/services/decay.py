"""Dispersive-decay harness: sup-norm scans, peak detection, exponent fits and regime envelopes."""

import asyncio
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import signal

from app.config import settings
from app.models.domain import DecayCurve, DecayFit, GreenQuery, Regime, RegimeInfo
from app.services.green import green_service
from app.services.oscquad import fit_power_law
from app.util.errors import ArgumentError, DomainError
from app.util.logging import get_logger
from app.util.metrics import track

logger = get_logger("decay")

# points per axis of the refinement patch around a coarse argmax
REFINE_CELLS = 4
REFINE_FACTOR = 4

# relative prominence (in log sup) of a reflection peak
PEAK_PROMINENCE = 0.05

# the low-frequency field is scanned over y in [-LOW_FREQ_SPEED t - LOW_FREQ_MARGIN, 0]
LOW_FREQ_SPEED = 2.0
LOW_FREQ_MARGIN = 4.0
LOW_FREQ_Y_STEP = 0.5

GridEvaluator = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


class DecayService:
    """Sup-norm scans of the Green functions and the decay rates read off them."""

    # Grids

    def scan_grid(self, h: float, a: float, gamma: float, t: float, x_points: int = 129) -> Tuple[np.ndarray, np.ndarray]:
        """x in [0, 2a]; y over the propagation cone, finer across the wave front."""
        x_grid = np.linspace(0.0, 2.0 * a, x_points)
        t = abs(t)
        scale = gamma ** 1.5
        y_lo = -(1.0 + gamma) * t - 4.0 * scale
        coarse = np.linspace(y_lo, 0.0, int(math.ceil(-y_lo / (scale / 2.0))) + 1)
        fine_step = max(min(scale, h * t) / 8.0, h / 8.0)
        front_lo = max(y_lo, -math.sqrt(1.0 + 2.0 * gamma) * t - 4.0 * scale)
        front_hi = min(0.0, -math.sqrt(1.0 + 0.75 * gamma) * t + 4.0 * scale)
        if front_hi > front_lo:
            fine = np.arange(front_lo, front_hi, fine_step)
            y_grid = np.unique(np.concatenate([coarse, fine, [front_hi]]))
        else:
            y_grid = coarse
        return x_grid, y_grid

    def low_freq_grid(self, a: float, t: float, x_points: int = 9) -> Tuple[np.ndarray, np.ndarray]:
        x_grid = np.linspace(0.0, 2.0 * a, x_points)
        y_lo = -LOW_FREQ_SPEED * abs(t) - LOW_FREQ_MARGIN
        y_grid = np.linspace(y_lo, 0.0, int(math.ceil(-y_lo / LOW_FREQ_Y_STEP)) + 1)
        return x_grid, y_grid

    # Sup scans

    def sup_scan(
        self,
        evaluator: GridEvaluator,
        t: float,
        x_grid: np.ndarray,
        y_grid: np.ndarray,
    ) -> Tuple[float, Tuple[float, float], List[str]]:
        """max |G(t)| over the grid, refined once around the coarse argmax; returns (sup, argmax, warnings)."""
        with track("sup_scan"):
            values = np.abs(evaluator(t, x_grid, y_grid))
            i, j = np.unravel_index(int(np.argmax(values)), values.shape)
            sup = float(values[i, j])
            x_patch = self._patch(x_grid, i)
            y_patch = self._patch(y_grid, j)
            refined = np.abs(evaluator(t, x_patch, y_patch))
            p, r = np.unravel_index(int(np.argmax(refined)), refined.shape)
        warnings: List[str] = []
        best = (float(x_grid[i]), float(y_grid[j]))
        if refined[p, r] > sup:
            sup = float(refined[p, r])
            best = (float(x_patch[p]), float(y_patch[r]))
            moved_x = abs(best[0] - x_grid[i]) / self._cell(x_grid, i)
            moved_y = abs(best[1] - y_grid[j]) / self._cell(y_grid, j)
            if max(moved_x, moved_y) > settings.resolution_cells:
                message = f"t={t}: refinement moved the argmax by {max(moved_x, moved_y):.1f} coarse cells"
                logger.warning(message)
                warnings.append(message)
        return sup, best, warnings

    @staticmethod
    def _cell(grid: np.ndarray, i: int) -> float:
        if grid.size < 2:
            return 1.0
        i = min(max(i, 1), grid.size - 1)
        return float(grid[i] - grid[i - 1])

    def _patch(self, grid: np.ndarray, i: int) -> np.ndarray:
        if grid.size < 2:
            return grid.copy()
        lo = grid[max(i - REFINE_CELLS, 0)]
        hi = grid[min(i + REFINE_CELLS, grid.size - 1)]
        count = 2 * REFINE_CELLS * REFINE_FACTOR + 1
        return np.linspace(lo, hi, count)

    def high_freq_evaluator(self, q: GreenQuery) -> GridEvaluator:
        return lambda t, x, y: green_service.green_high_freq_grid(q.at(t=t), x, y)

    def low_freq_evaluator(self, m: int, a: float) -> GridEvaluator:
        return lambda t, x, y: green_service.green_low_freq_grid(m, t, a, x, y)

    # Curves

    def decay_curve(
        self,
        evaluator: GridEvaluator,
        t_values: Sequence[float],
        grid_for: Callable[[float], Tuple[np.ndarray, np.ndarray]],
        grid_info: Optional[dict] = None,
    ) -> DecayCurve:
        """Sup-norm at every t, evaluated concurrently and collected in t order."""
        t_values = [float(t) for t in t_values]
        if not t_values:
            raise ArgumentError("Need at least one time")

        def one(t: float):
            x_grid, y_grid = grid_for(t)
            return self.sup_scan(evaluator, t, x_grid, y_grid)

        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            results = list(pool.map(one, t_values))
        warnings = [w for _, _, ws in results for w in ws]
        curve = DecayCurve(
            t_values=t_values,
            sup_values=[r[0] for r in results],
            argmax_points=[r[1] for r in results],
            grid=grid_info or {},
            warnings=warnings,
        )
        curve.peaks = self.detect_peaks(curve.t_values, curve.sup_values)
        logger.info(f"Scanned {len(t_values)} times, {len(curve.peaks)} peaks")
        return curve

    def high_freq_curve(
        self,
        m: int,
        h: float,
        a: float,
        gamma: float,
        t_values: Sequence[float],
        x_points: int = 129,
    ) -> DecayCurve:
        q = GreenQuery(m=m, h=h, a=a, gamma=gamma, t=0.0, x=a, y=0.0)
        grid_info = {"x": [0.0, 2.0 * a, x_points], "y": "cone", "h": h, "a": a, "gamma": gamma, "m": m}
        return self.decay_curve(
            self.high_freq_evaluator(q),
            t_values,
            lambda t: self.scan_grid(h, a, gamma, t, x_points),
            grid_info,
        )

    def low_freq_curve(self, m: int, a: float, t_values: Sequence[float], x_points: int = 9) -> DecayCurve:
        grid_info = {"x": [0.0, 2.0 * a, x_points], "y_speed": LOW_FREQ_SPEED, "y_step": LOW_FREQ_Y_STEP, "a": a, "m": m}
        return self.decay_curve(
            self.low_freq_evaluator(m, a),
            t_values,
            lambda t: self.low_freq_grid(a, t, x_points),
            grid_info,
        )

    async def high_freq_curve_async(self, *args, **kwargs) -> DecayCurve:
        """Async variant of high_freq_curve."""
        loop = asyncio.get_event_loop()
        return await loop.run_in_executor(None, lambda: self.high_freq_curve(*args, **kwargs))

    # Peaks and fits

    @staticmethod
    def detect_peaks(t_values: Sequence[float], sup_values: Sequence[float]) -> List[Tuple[float, float]]:
        """Local maxima of sup over t, located by a parabola through the three nearest samples."""
        t = np.asarray(t_values, dtype=float)
        v = np.asarray(sup_values, dtype=float)
        if t.size < 3 or np.any(v <= 0):
            return []
        indices, _ = signal.find_peaks(np.log(v), prominence=PEAK_PROMINENCE)
        peaks = []
        for i in indices:
            t0, t1, t2 = t[i - 1], t[i], t[i + 1]
            v0, v1, v2 = v[i - 1], v[i], v[i + 1]
            denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
            a2 = (t2 * (v1 - v0) + t1 * (v0 - v2) + t0 * (v2 - v1)) / denom
            a1 = (t2 ** 2 * (v0 - v1) + t1 ** 2 * (v2 - v0) + t0 ** 2 * (v1 - v2)) / denom
            if a2 >= 0:
                peaks.append((float(t1), float(v1)))
                continue
            vertex = -a1 / (2.0 * a2)
            vertex = min(max(vertex, t0), t2)
            height = v1 + a2 * (vertex - t1) ** 2 + (a1 + 2.0 * a2 * t1) * (vertex - t1)
            peaks.append((float(vertex), float(max(height, v1))))
        return peaks

    def fit_exponent(self, curve: DecayCurve, use_peaks_only: bool = False) -> DecayFit:
        """Least-squares rate of log sup against log t, over all samples or over the peaks."""
        if use_peaks_only:
            if len(curve.peaks) < 4:
                raise ArgumentError(f"Envelope fit needs at least 4 peaks, found {len(curve.peaks)}")
            t_values = [p[0] for p in curve.peaks]
            values = [p[1] for p in curve.peaks]
        else:
            if len(curve.t_values) < 6:
                raise ArgumentError(f"Decay fit needs at least 6 samples, got {len(curve.t_values)}")
            t_values, values = curve.t_values, curve.sup_values
        if any(t <= 0 for t in t_values):
            raise DomainError("Decay fits need positive times")
        fit = fit_power_law(t_values, values)
        if fit.degenerate:
            logger.warning("Degenerate decay fit: all sup values are equal")
        curve.fitted_exponent = fit.exponent
        curve.fit_residual = fit.residual
        curve.fitted_constant = fit.constant
        return fit

    def peak_envelope_monotone(self, curve: DecayCurve) -> bool:
        heights = [p[1] for p in curve.peaks]
        return all(b <= a for a, b in zip(heights, heights[1:]))

    def peak_times(self, a: float, n_max: int, h: Optional[float] = None) -> List[float]:
        """t_n = 4 n sqrt(a) sqrt(1 + a), n = 1..n_max."""
        if a <= 0:
            raise DomainError("a must be positive")
        if h is not None and n_max > math.sqrt(a) / h ** (1.0 / 3.0):
            logger.warning(f"n_max={n_max} is past sqrt(a)/h^(1/3) = {math.sqrt(a) / h ** (1.0 / 3.0):.2f}")
        return [4.0 * n * math.sqrt(a) * math.sqrt(1.0 + a) for n in range(1, n_max + 1)]

    def match_peaks(self, detected: Sequence[Tuple[float, float]], a: float, n_max: int) -> Dict[int, Optional[float]]:
        """Nearest detected peak time to each t_n, if within sqrt(a)/4."""
        matches: Dict[int, Optional[float]] = {}
        times = np.array([p[0] for p in detected])
        for n, t_n in enumerate(self.peak_times(a, n_max), start=1):
            if times.size == 0:
                matches[n] = None
                continue
            nearest = float(times[np.argmin(np.abs(times - t_n))])
            matches[n] = nearest if abs(nearest - t_n) <= math.sqrt(a) / 4.0 else None
        return matches

    # Regimes

    def regime_classifier(self, t: float, a: float, gamma: float, h: float) -> RegimeInfo:
        """Time regime of the high-frequency estimate, its decay rate and envelope (times h^2)."""
        if min(t, a, gamma, h) <= 0:
            raise DomainError("Regime classification needs positive parameters")
        lam = a ** 1.5 / h
        if t <= math.sqrt(a):
            return RegimeInfo(regime=Regime.FREE, exponent=0.5, envelope=(h / t) ** 0.5)
        if t <= a / h ** (1.0 / 3.0):
            return RegimeInfo(regime=Regime.LATTICE, exponent=0.25, envelope=(h / t) ** 0.25 * a ** 0.25)
        if t < a ** 2 / h:
            return RegimeInfo(regime=Regime.MEDIUM, exponent=0.25, envelope=(h / t) ** 0.25 * a ** 0.25)
        if t < a ** 3.5 / h ** 2:
            return RegimeInfo(regime=Regime.LARGE, exponent=1.0 / 3.0, envelope=a ** 1.5 / (t * h ** (1.0 / 3.0)))
        return RegimeInfo(regime=Regime.OVERLAP, exponent=1.0 / 3.0, envelope=(h / t) ** 0.5 * lam ** (1.0 / 3.0))

    def envelope_domination(self, curve: DecayCurve, a: float, gamma: float, h: float) -> float:
        """Smallest C with sup(t) <= C h^{-2} envelope(t) at every sampled t > h."""
        ratios = [
            s * h ** 2 / self.regime_classifier(t, a, gamma, h).envelope
            for t, s in zip(curve.t_values, curve.sup_values)
            if t > h
        ]
        if not ratios:
            raise ArgumentError("No sampled time beyond h")
        return float(max(ratios))

    def low_freq_comparison(self, a: float, t_values: Sequence[float], x_points: int = 9) -> Dict[str, DecayFit]:
        """Fitted sup-norm rates of the low-frequency wave (m=0) and Klein-Gordon (m=1) fields."""
        fits = {}
        for name, m in (("wave", 0), ("klein_gordon", 1)):
            curve = self.low_freq_curve(m, a, t_values, x_points)
            fits[name] = self.fit_exponent(curve)
            logger.info(f"Low-frequency {name}: exponent {fits[name].exponent:.3f}")
        return fits


# Global decay service instance
decay_service = DecayService()
