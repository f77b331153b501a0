"""Smooth compactly supported cutoffs built from the exp(-1/u) mollifier."""

from typing import Callable, Dict

import numpy as np

from app.models.domain import Cutoff, CutoffKind
from app.util.logging import get_logger

logger = get_logger("cutoffs")

INF = float("inf")

# Supports and plateaus of the standard cutoffs
STANDARD_CUTOFFS: Dict[CutoffKind, Cutoff] = {
    CutoffKind.PSI1: Cutoff(kind=CutoffKind.PSI1, support=(0.5, 1.5), plateau=(0.75, 1.25)),
    CutoffKind.PSI: Cutoff(kind=CutoffKind.PSI, support=(0.5, 1.5), plateau=(0.75, 1.25)),
    CutoffKind.PSI2: Cutoff(kind=CutoffKind.PSI2, support=(0.75, 2.0), plateau=(1.0, 1.5)),
    CutoffKind.PHI: Cutoff(kind=CutoffKind.PHI, support=(-2.0, 2.0), plateau=(-1.5, 1.5)),
    CutoffKind.CHI0: Cutoff(kind=CutoffKind.CHI0, support=(-2.0, 2.0), plateau=(-1.5, 1.5)),
    CutoffKind.CHI1: Cutoff(kind=CutoffKind.CHI1, support=(1.0, INF), plateau=(2.0, INF)),
}


def mollifier(u: np.ndarray, delta: float = 1.0) -> np.ndarray:
    """g(u) = exp(-delta/u) for u > 0, else 0."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    positive = u > 0
    out[positive] = np.exp(-delta / u[positive])
    return out


def smooth_step(u: np.ndarray, delta: float = 1.0) -> np.ndarray:
    """0 for u <= 0, 1 for u >= 1, C-infinity and increasing in between."""
    u = np.asarray(u, dtype=float)
    rise = mollifier(u, delta)
    fall = mollifier(1.0 - u, delta)
    return rise / (rise + fall)


class CutoffService:
    """Evaluates cutoffs and hands out vectorized callables."""

    def get(self, kind) -> Cutoff:
        kind = CutoffKind(kind)
        if kind not in STANDARD_CUTOFFS:
            raise ValueError(f"No standard cutoff of kind {kind.value}")
        return STANDARD_CUTOFFS[kind]

    def evaluate(self, cutoff: Cutoff, x) -> np.ndarray:
        """Value of a cutoff; psi2 is realized as phi(rho) - phi(2 rho) on rho > 0."""
        if cutoff.kind == CutoffKind.PSI2 and cutoff == STANDARD_CUTOFFS[CutoffKind.PSI2]:
            phi = STANDARD_CUTOFFS[CutoffKind.PHI]
            rho = np.asarray(x, dtype=float)
            # phi is even, so the difference would repeat the ring on rho < 0
            return (self._window(phi, rho) - self._window(phi, 2.0 * rho)) * (rho > 0)
        return self._window(cutoff, x)

    @staticmethod
    def _window(cutoff: Cutoff, x) -> np.ndarray:
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lo, hi = cutoff.support
        p_lo, p_hi = cutoff.plateau
        value = np.ones_like(x)
        if np.isfinite(lo):
            value *= smooth_step((x - lo) / (p_lo - lo), cutoff.delta) if p_lo > lo else (x >= lo)
        if np.isfinite(hi):
            value *= smooth_step((hi - x) / (hi - p_hi), cutoff.delta) if hi > p_hi else (x <= hi)
        return float(value[0]) if scalar else value

    def function(self, kind) -> Callable:
        cutoff = self.get(kind)
        return lambda x: self.evaluate(cutoff, x)

    def bump(self, center: float, width: float, delta: float = 1.0) -> Cutoff:
        """Bump supported on [center - width/2, center + width/2], equal to 1 on the middle quarter."""
        if width <= 0:
            raise ValueError("Bump width must be positive")
        return Cutoff(
            kind=CutoffKind.BUMP,
            support=(center - width / 2.0, center + width / 2.0),
            plateau=(center - width / 8.0, center + width / 8.0),
            delta=delta,
        )

    def bump_function(self, center: float, width: float) -> Callable:
        cutoff = self.bump(center, width)
        return lambda x: self.evaluate(cutoff, x)

    # Shorthands used throughout the Green-function and parametrix code

    def psi1(self, x):
        return self._window(STANDARD_CUTOFFS[CutoffKind.PSI1], x)

    def psi2(self, x):
        return self.evaluate(STANDARD_CUTOFFS[CutoffKind.PSI2], x)

    def phi(self, x):
        return self._window(STANDARD_CUTOFFS[CutoffKind.PHI], x)

    def chi0(self, x):
        return self._window(STANDARD_CUTOFFS[CutoffKind.CHI0], x)

    def chi1(self, x):
        return self._window(STANDARD_CUTOFFS[CutoffKind.CHI1], x)


# Global cutoff service instance
cutoff_service = CutoffService()
