"""Airy functions, Airy zeros and the spectral phase L(omega) of the gallery modes.

L(omega) = pi + i log(A_-(omega)/A_+(omega)) with A_+(z) = exp(-i pi/3) Ai(exp(-i pi/3) z)
and A_- its conjugate. It is real-analytic, strictly increasing, L(0) = pi/3,
L(omega_k) = 2 pi k at the zeros of Ai(-.), and for large omega

    L(omega) = 4/3 omega^{3/2} + pi/2 - B(omega^{3/2}),   B(u) ~ b1/u,  b1 = 5/24.
"""

import asyncio
import math
from functools import lru_cache
from typing import List, Tuple, Union

import numpy as np
from scipy import integrate, optimize, special

from app.config import settings
from app.models.domain import AiryTable
from app.util.errors import ArgumentError, DomainError, PhaseTrackingError, RangeError
from app.util.logging import get_logger
from app.util.metrics import track

logger = get_logger("specfun")

ArrayLike = Union[float, np.ndarray]

# Values at the origin
AI_ZERO = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
AIPRIME_ZERO = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))

# Leading coefficient of |A_+(z)| ~ a0 z^{-1/4} ... in Psi(z) ~ z^{-1/4} sum a_j z^{-3j/2}
A0 = 1.0 / (4.0 * math.pi ** 1.5)

# B(u) = B1/u + O(u^{-3})
B1 = 5.0 / 24.0

# B is evaluated through L while omega = u^{2/3} stays below this bound
B_EXACT_OMEGA_MAX = 40.0

ROTATION = complex(math.cos(math.pi / 3.0), -math.sin(math.pi / 3.0))

# Uniform omega-spacing of the tracking grid near the origin and spacing in u = omega^{3/2} beyond
TRACK_OMEGA_STEP = 0.05
TRACK_OMEGA_DENSE = 2.0
TRACK_U_STEP = 0.5


def _as_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _restore(arr: np.ndarray, like) -> ArrayLike:
    if np.ndim(like) == 0:
        return float(arr)
    return arr


def zero_seed(k: int) -> float:
    """Asymptotic position of the k-th zero of Ai(-.) from T(t) = t^{2/3}(1 + 5/48 t^-2 - 5/36 t^-4)."""
    t = 3.0 * math.pi * (4 * k - 1) / 8.0
    return t ** (2.0 / 3.0) * (1.0 + 5.0 / 48.0 * t ** -2 - 5.0 / 36.0 * t ** -4)


class AiryService:
    """Airy evaluations, the shared zero table and the phase function L."""

    def __init__(self):
        self._table = None
        self._setup_caches()

    def _setup_caches(self):
        """Setup LRU caches for scalar evaluations of L and its remainder."""
        self._big_l_cached = lru_cache(maxsize=4096)(self._big_l_scalar)

    # Airy functions on the real line

    def ai(self, x: ArrayLike) -> ArrayLike:
        """Ai(x)."""
        arr = _as_array(x, "x")
        return _restore(special.airy(arr)[0], x)

    def ai_deriv(self, x: ArrayLike) -> ArrayLike:
        """Ai'(x)."""
        arr = _as_array(x, "x")
        return _restore(special.airy(arr)[1], x)

    def ai_second(self, x: ArrayLike) -> ArrayLike:
        """Ai''(x) = x Ai(x)."""
        arr = _as_array(x, "x")
        return _restore(arr * special.airy(arr)[0], x)

    def bi(self, x: ArrayLike) -> ArrayLike:
        arr = _as_array(x, "x")
        return _restore(special.airy(arr)[2], x)

    # Zeros and the table

    def _polish_zero(self, k: int) -> float:
        """Bracket w_k around its asymptotic seed, bisect, then Newton-polish."""
        seed = zero_seed(k)
        half_gap = 0.25 * math.pi / math.sqrt(seed)
        lo, hi = seed - half_gap, seed + half_gap
        f = lambda w: special.airy(-w)[0]
        widen = 0
        while f(lo) * f(hi) > 0:
            widen += 1
            if widen > 8:
                raise ArithmeticError(f"Could not bracket Airy zero {k} near {seed}")
            lo -= half_gap
            hi += half_gap
        root = optimize.brentq(f, lo, hi, xtol=settings.zero_tol, rtol=4 * np.finfo(float).eps)
        polished = float(
            optimize.newton(f, root, fprime=lambda w: -special.airy(-w)[1], tol=1e-15, maxiter=8, disp=False)
        )
        if not math.isfinite(polished) or abs(polished - root) > 1e-8:
            logger.warning(f"Newton polish moved zero {k} from {root} to {polished}; keeping bisection value")
            return float(root)
        # Newton may stall at roundoff; keep whichever is closer to a zero
        return polished if abs(f(polished)) <= abs(f(root)) else float(root)

    def airy_zeros(self, count: int) -> List[float]:
        """First `count` zeros w_k of Ai(-.) (positive, increasing)."""
        if count is None or int(count) <= 0:
            raise ArgumentError(f"Number of zeros must be positive, got {count}")
        count = int(count)
        if self._table is not None and self._table.count >= count:
            return list(self._table.zeros[:count])
        return list(self.airy_table(count).zeros)

    def _build_table(self, count: int) -> AiryTable:
        with track("airy_table"):
            zeros = [self._polish_zero(k) for k in range(1, count + 1)]
            aiprime = special.airy(-np.asarray(zeros))[1]
            lprime = 2.0 * math.pi * aiprime ** 2
            table = AiryTable(
                zeros=tuple(zeros),
                aiprime_at_zeros=tuple(float(v) for v in aiprime),
                lprime=tuple(float(v) for v in lprime),
            )
        logger.info(f"Airy table built with {count} zeros, omega_max={zeros[-1]:.6f}")
        return table

    def airy_table(self, count: int = None) -> AiryTable:
        """Shared immutable table; grows by rebuilding when more zeros are requested."""
        if count is None:
            count = settings.airy_table_size
        if count <= 0:
            raise ArgumentError(f"Table size must be positive, got {count}")
        if self._table is None or self._table.count < count:
            self._table = self._build_table(max(count, settings.airy_table_size))
        if self._table.count == count:
            return self._table
        return AiryTable(
            zeros=self._table.zeros[:count],
            aiprime_at_zeros=self._table.aiprime_at_zeros[:count],
            lprime=self._table.lprime[:count],
        )

    def zero(self, k: int) -> float:
        if k < 1:
            raise ArgumentError(f"Zero index must be >= 1, got {k}")
        return self.airy_table(max(k, settings.airy_table_size)).zeros[k - 1]

    def zeros_below(self, omega_max: float) -> np.ndarray:
        """All w_k <= omega_max."""
        if omega_max <= 0:
            return np.empty(0)
        # w_k ~ (3 pi k / 2)^{2/3}
        estimate = int((2.0 / (3.0 * math.pi)) * omega_max ** 1.5 + 0.25) + 2
        zeros = np.asarray(self.airy_table(max(estimate, settings.airy_table_size)).zeros)
        return zeros[zeros <= omega_max]

    # A_+/A_-

    def a_plus(self, z: ArrayLike) -> Union[complex, np.ndarray]:
        """A_+(z) = exp(-i pi/3) Ai(exp(-i pi/3) z) for real z."""
        arr = _as_array(z, "z")
        if np.any(np.abs(arr) > settings.a_plus_max_abs):
            raise RangeError(f"|z| must not exceed {settings.a_plus_max_abs} for A_+")
        value = ROTATION * special.airy(ROTATION * arr.astype(complex))[0]
        return complex(value) if np.ndim(z) == 0 else value

    def a_minus(self, z: ArrayLike) -> Union[complex, np.ndarray]:
        """A_-(z), the conjugate of A_+(z) on the real axis."""
        return np.conj(self.a_plus(z)) if np.ndim(z) else self.a_plus(z).conjugate()

    # The phase L

    @staticmethod
    def _arg_a_plus(omega: np.ndarray) -> np.ndarray:
        """Principal arg A_+(w) = atan2(-Bi(-w), Ai(-w))."""
        ai, _, bi, _ = special.airy(-omega)
        return np.arctan2(-bi, ai)

    @staticmethod
    def _l_nonpositive(omega: np.ndarray) -> np.ndarray:
        """L = 2 arctan(Ai(|w|)/Bi(|w|)) for w <= 0, via scaled Airy functions."""
        s = -omega
        aie, _, bie, _ = special.airye(s)
        zeta = (2.0 / 3.0) * s ** 1.5
        return 2.0 * np.arctan(aie / bie * np.exp(-2.0 * zeta))

    def tracking_grid(self, omega_max: float) -> np.ndarray:
        """Nodes on [0, omega_max]: uniform near 0, uniform in u = w^{3/2} beyond."""
        dense = np.arange(0.0, min(omega_max, TRACK_OMEGA_DENSE) + TRACK_OMEGA_STEP, TRACK_OMEGA_STEP)
        u_max = omega_max ** 1.5
        coarse = np.arange(0.0, u_max + TRACK_U_STEP, TRACK_U_STEP) ** (2.0 / 3.0)
        return np.union1d(dense, coarse)

    def _l_positive(self, omega: np.ndarray) -> np.ndarray:
        """Continuous tracking of arg A_+ from w = 0 through every requested point."""
        grid = self.tracking_grid(float(omega.max()))
        nodes, inverse = np.unique(np.concatenate([grid, omega]), return_inverse=True)
        raw = self._arg_a_plus(nodes)
        tracked = np.unwrap(raw)
        jumps = np.abs(np.diff(tracked))
        if jumps.size and jumps.max() >= settings.phase_track_step:
            worst = int(jumps.argmax())
            spacing = nodes[worst + 1] - nodes[worst]
            raise PhaseTrackingError(
                f"arg A_+ jumped by {jumps.max():.3f} between {nodes[worst]:.6f} and {nodes[worst + 1]:.6f}",
                suggested_step=0.5 * spacing,
            )
        # branch fixed by L(0) = pi/3, i.e. arg A_+(0) = -pi/3
        tracked += -math.pi / 3.0 - tracked[0]
        values = math.pi + 2.0 * tracked
        return values[inverse[grid.size:]]

    def big_l(self, omega: ArrayLike) -> ArrayLike:
        """L(omega) on scalars or arrays."""
        arr = _as_array(omega, "omega")
        if arr.ndim == 0:
            return self._big_l_cached(float(arr))
        return self._big_l_array(arr)

    def _big_l_scalar(self, omega: float) -> float:
        return float(self._big_l_array(np.asarray([omega]))[0])

    def _big_l_array(self, arr: np.ndarray) -> np.ndarray:
        flat = arr.ravel()
        out = np.empty_like(flat)
        negative = flat <= 0
        if np.any(negative):
            out[negative] = self._l_nonpositive(flat[negative])
        if np.any(~negative):
            out[~negative] = self._l_positive(flat[~negative])
        return out.reshape(arr.shape)

    def lprime(self, omega: ArrayLike) -> ArrayLike:
        """L'(w) = 2/(pi (Ai(-w)^2 + Bi(-w)^2)) (Wronskian form)."""
        arr = _as_array(omega, "omega")
        flat = np.atleast_1d(arr).ravel()
        value = np.empty_like(flat)
        oscillatory = flat >= 0
        if np.any(oscillatory):
            ai, _, bi, _ = special.airy(-flat[oscillatory])
            value[oscillatory] = 2.0 / (math.pi * (ai ** 2 + bi ** 2))
        if np.any(~oscillatory):
            # Ai = aie e^-zeta and Bi = bie e^zeta on the positive axis
            s = -flat[~oscillatory]
            aie, _, bie, _ = special.airye(s)
            zeta = (2.0 / 3.0) * s ** 1.5
            value[~oscillatory] = 2.0 * np.exp(-2.0 * zeta) / (math.pi * (bie ** 2 + aie ** 2 * np.exp(-4.0 * zeta)))
        return _restore(value.reshape(np.shape(arr)), omega)

    def lprime_at_zero(self, k: int) -> float:
        """L'(w_k) = 2 pi Ai'(-w_k)^2."""
        table = self.airy_table()
        if k < 1 or k > table.count:
            raise ArgumentError(f"k must lie in [1, {table.count}], got {k}")
        return table.lprime[k - 1]

    def lprime_by_quadrature(self, k: int) -> float:
        """2 pi int_0^inf Ai(x - w_k)^2 dx, the integral form of L'(w_k)."""
        omega = self.zero(k)
        oscillatory, _ = integrate.quad(lambda x: special.airy(x - omega)[0] ** 2, 0.0, omega, limit=400, epsabs=1e-14, epsrel=1e-13)
        tail, _ = integrate.quad(lambda x: special.airy(x - omega)[0] ** 2, omega, np.inf, limit=200, epsabs=1e-14, epsrel=1e-13)
        return 2.0 * math.pi * (oscillatory + tail)

    def asymptotic_l(self, omega: ArrayLike, terms: int = 1) -> ArrayLike:
        """4/3 w^{3/2} + pi/2 - b1 w^{-3/2} (terms=1) or without the b1 term (terms=0)."""
        arr = _as_array(omega, "omega")
        value = (4.0 / 3.0) * arr ** 1.5 + math.pi / 2.0
        if terms >= 1:
            value = value - B1 * arr ** -1.5
        return _restore(value, omega)

    # Remainder B of the large-omega expansion

    def big_b(self, u: ArrayLike) -> ArrayLike:
        """B(u) = 4/3 u + pi/2 - L(u^{2/3}); series b1/u once u^{2/3} exceeds the exact range."""
        arr = _as_array(u, "u")
        if np.any(arr <= 0):
            raise DomainError("B(u) requires u > 0")
        flat = np.atleast_1d(arr).ravel()
        omega = flat ** (2.0 / 3.0)
        exact = omega <= B_EXACT_OMEGA_MAX
        out = B1 / flat
        if np.any(exact):
            out[exact] = (4.0 / 3.0) * flat[exact] + math.pi / 2.0 - self._big_l_array(omega[exact])
        return _restore(out.reshape(np.shape(arr)), u)

    def big_b_prime(self, u: ArrayLike) -> ArrayLike:
        """B'(u) = 4/3 - (2/3) u^{-1/3} L'(u^{2/3}); series -b1/u^2 beyond the exact range."""
        arr = _as_array(u, "u")
        if np.any(arr <= 0):
            raise DomainError("B'(u) requires u > 0")
        flat = np.atleast_1d(arr).ravel()
        omega = flat ** (2.0 / 3.0)
        exact = omega <= B_EXACT_OMEGA_MAX
        out = -B1 / flat ** 2
        if np.any(exact):
            out[exact] = 4.0 / 3.0 - (2.0 / 3.0) * flat[exact] ** (-1.0 / 3.0) * self.lprime(omega[exact])
        return _restore(out.reshape(np.shape(arr)), u)

    # Bounds on Airy sums

    def estairy_sum(self, count: int, b_points: int = 4000) -> Tuple[float, float]:
        """sup_{b>=0} sum_{k<=count} w_k^{-1/2} Ai(b - w_k)^2 and its ratio to count^{1/3}."""
        if count < 1:
            raise ArgumentError(f"count must be positive, got {count}")
        zeros = np.asarray(self.airy_zeros(count))
        b = np.linspace(0.0, zeros[-1] + 4.0, b_points)
        total = np.zeros_like(b)
        for omega in zeros:
            total += special.airy(b - omega)[0] ** 2 / math.sqrt(omega)
        sup = float(total.max())
        return sup, sup / count ** (1.0 / 3.0)

    def airy_derivative_bound(self, k: int, order: int = 1, b_points: int = 4000) -> float:
        """sup_{b>0} |b^l Ai^{(l)}(b - w_k)| for l in {0, 1, 2}."""
        if order not in (0, 1, 2):
            raise ArgumentError(f"Derivative order must be 0, 1 or 2, got {order}")
        omega = self.zero(k)
        b = np.linspace(0.0, omega + 12.0, b_points)[1:]
        ai, aip, _, _ = special.airy(b - omega)
        derivative = (ai, aip, (b - omega) * ai)[order]
        return float(np.max(np.abs(b ** order * derivative)))

    async def big_l_async(self, omega: ArrayLike) -> ArrayLike:
        """Async variant of big_l."""
        loop = asyncio.get_event_loop()
        return await loop.run_in_executor(None, self.big_l, omega)

    def get_cache_info(self) -> dict:
        """Get cache statistics."""
        return {
            "big_l": self._big_l_cached.cache_info()._asdict(),
            "table_size": self._table.count if self._table else 0,
        }


# Global Airy service instance
airy_service = AiryService()
