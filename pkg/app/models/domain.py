"""Domain models shared by the numerical services."""

import math
from enum import Enum
from typing import Callable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class AiryTable(BaseModel):
    """Precomputed zeros of Ai(-.) with Ai'(-w_k) and L'(w_k); immutable once built."""

    model_config = ConfigDict(frozen=True)

    zeros: Tuple[float, ...] = Field(..., description="w_k, increasing")
    aiprime_at_zeros: Tuple[float, ...] = Field(..., description="Ai'(-w_k)")
    lprime: Tuple[float, ...] = Field(..., description="L'(w_k) = 2 pi Ai'(-w_k)^2")

    @property
    def count(self) -> int:
        return len(self.zeros)

    @model_validator(mode="after")
    def validate_table(self):
        """Zeros increase and every normalizer is positive."""
        if not (len(self.zeros) == len(self.aiprime_at_zeros) == len(self.lprime)):
            raise ValueError("AiryTable columns must have equal length")
        if any(b <= a for a, b in zip(self.zeros, self.zeros[1:])):
            raise ValueError("Airy zeros must be strictly increasing")
        if any(v <= 0 for v in self.lprime):
            raise ValueError("L'(w_k) must be positive")
        return self

    def records(self) -> List[dict]:
        return [
            {"k": k + 1, "omega_k": w, "aiprime": d, "lprime": lp}
            for k, (w, d, lp) in enumerate(zip(self.zeros, self.aiprime_at_zeros, self.lprime))
        ]


class CutoffKind(str, Enum):
    """The smooth cutoffs used by the spectral and reflected-wave representations."""

    PSI1 = "psi1"
    PSI = "psi"
    PSI2 = "psi2"
    PHI = "phi"
    CHI0 = "chi0"
    CHI1 = "chi1"
    BUMP = "bump"


class Cutoff(BaseModel):
    """A C-infinity cutoff: 0 off `support`, 1 on `plateau`, monotone in between."""

    model_config = ConfigDict(frozen=True)

    kind: CutoffKind
    support: Tuple[float, float]
    plateau: Tuple[float, float]
    delta: float = Field(1.0, gt=0, description="Mollifier scale in exp(-delta/u)")

    @model_validator(mode="after")
    def validate_nesting(self):
        lo, hi = self.support
        p_lo, p_hi = self.plateau
        if not (lo <= p_lo <= p_hi <= hi):
            raise ValueError(f"Plateau {self.plateau} must lie inside support {self.support}")
        return self


class Eigenmode(BaseModel):
    """Gallery mode e_k(., theta) of -d_x^2 + (1+x) theta^2 with Dirichlet condition."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1)
    theta: float
    omega: float = Field(..., description="w_k")
    eigenvalue: float = Field(..., description="|theta|^2 + w_k |theta|^{4/3}")
    normalizer: float = Field(..., description="sqrt(2 pi) |theta|^{1/3} / sqrt(L'(w_k))")

    @field_validator("theta")
    @classmethod
    def validate_theta(cls, v: float) -> float:
        if v == 0 or not math.isfinite(v):
            raise ValueError("theta must be finite and non-zero")
        return v

    @property
    def turning_point(self) -> float:
        """Point where |theta|^{2/3} x = w_k."""
        return self.omega * abs(self.theta) ** (-2.0 / 3.0)


class PhaseSpec(BaseModel):
    """One-dimensional oscillatory integral  int amplitude(s) exp(i lam phase(s)) ds."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    phase: Callable
    dphase: Callable
    ddphase: Optional[Callable] = None
    amplitude: Callable
    interval: Tuple[float, float]
    large_parameter: float = Field(1.0, gt=0)

    @field_validator("interval")
    @classmethod
    def validate_interval(cls, v):
        lo, hi = v
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"Invalid interval {v}")
        return v


class QuadratureResult(BaseModel):
    """Value of an oscillatory integral with its error estimate."""

    value: complex
    error: float = Field(..., ge=0)
    panels: int = Field(..., ge=1)


class StationaryPoint(BaseModel):
    """Root of phase' with order 1 (non-degenerate) or 2 (phase'' vanishes too)."""

    location: float
    order: int = Field(..., ge=1)
    second_derivative: float


class DecayFit(BaseModel):
    """Power-law fit |value| ~ C t^{-exponent}."""

    t_values: List[float]
    abs_values: List[float]
    exponent: float
    constant: float
    residual: float
    underflow: bool = False
    degenerate: bool = False


class GreenQuery(BaseModel):
    """One evaluation of a localized Green function."""

    m: int = Field(0, ge=0, le=1, description="Mass")
    h: float = Field(2.0 ** -7, gt=0, le=0.5, description="Semiclassical parameter")
    a: float = Field(0.25, gt=0, description="Source distance to the boundary")
    gamma: Optional[float] = Field(0.25, gt=0, description="Dyadic angle scale; None at low frequency")
    t: float = Field(0.0, description="Time")
    x: float = Field(0.25, ge=0, description="Normal coordinate of the observation point")
    y: float = Field(0.0, description="Tangential coordinate of the observation point")
    kmax: Optional[int] = Field(None, ge=1, description="Mode truncation; derived from the cutoffs when omitted")
    tol: float = Field(1e-8, gt=0, description="Relative quadrature tolerance")

    @property
    def high_frequency(self) -> bool:
        return self.gamma is not None

    @property
    def lambda_gamma(self) -> float:
        if self.gamma is None:
            raise ValueError("lambda_gamma is only defined at high frequency")
        return self.gamma ** 1.5 / self.h

    def at(self, **changes) -> "GreenQuery":
        """Copy with some fields replaced."""
        return self.model_copy(update=changes)


class FieldValue(BaseModel):
    """A Green-function value with the number of modes summed."""

    value: complex
    mode_count: int = Field(..., ge=0)
    error_estimate: float = Field(..., ge=0)
    flags: List[str] = Field(default_factory=list)

    def as_json(self) -> dict:
        return {
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "mode_count": self.mode_count,
            "error_estimate": self.error_estimate,
            "flags": list(self.flags),
        }


class PhasePoint(BaseModel):
    """Rescaled variables of the reflected-wave phase Psi."""

    N: int
    T: float
    X: float
    Y: float
    Upsilon: float = 0.0
    S: float = 0.0
    A: float = 1.0
    eta: float = 1.0
    gamma: float = Field(..., gt=0)
    h: float = Field(..., gt=0)

    @property
    def lambda_gamma(self) -> float:
        return self.gamma ** 1.5 / self.h

    def variables(self) -> Tuple[float, float, float, float]:
        return (self.Upsilon, self.S, self.A, self.eta)

    def with_variables(self, values) -> "PhasePoint":
        upsilon, s, a_var, eta = (float(v) for v in values)
        return self.model_copy(update={"Upsilon": upsilon, "S": s, "A": a_var, "eta": eta})


class CriticalPoint(BaseModel):
    """Solution (Upsilon, S, A, eta) of the critical system of Psi."""

    Upsilon: float
    S: float
    A: float
    eta: float
    residual: float = Field(..., ge=0)


class OverlapReport(BaseModel):
    """Reflections contributing near (t, x, y) and the bound on their number."""

    t: float
    x: float
    y: float
    gamma: float
    h: float
    m: int
    members: List[int]
    bound_rhs: float
    constant: float

    @property
    def count(self) -> int:
        return len(self.members)

    @property
    def within_bound(self) -> bool:
        return self.count <= self.constant * self.bound_rhs


class TransverseScaling(BaseModel):
    """Rescaled quantities of a transverse dyadic piece."""

    T: Optional[float] = None
    X: Optional[float] = None
    Y: Optional[float] = None
    a_tilde: Optional[float] = None
    lambda_tilde: Optional[float] = None
    negligible: bool = False


class PoissonCheck(BaseModel):
    """Both sides of the Airy-Poisson summation identity."""

    lhs: float
    rhs: float
    lhs_imag: float
    n_max: int

    @property
    def relerr(self) -> float:
        if self.rhs == 0:
            return abs(self.lhs)
        return abs(self.lhs - self.rhs) / abs(self.rhs)


class Regime(str, Enum):
    """Time regimes of the high-frequency dispersive estimate."""

    FREE = "free"
    LATTICE = "finite-N lattice"
    MEDIUM = "N in (lambda^1/3, lambda)"
    LARGE = "N in (lambda, lambda^2)"
    OVERLAP = "spectral-overlap"


class RegimeInfo(BaseModel):
    regime: Regime
    exponent: float
    envelope: float


class DegenerateMode(BaseModel):
    """Mode k(j) whose ring phase has a degenerate critical point."""

    j: int
    k: int
    z_star: float = Field(..., description="Root of f_{k,j} in z = rho^{2/3}")
    rho_star: float
    candidates: List[int] = Field(default_factory=list)


class DecayCurve(BaseModel):
    """Sampled sup-norms of a Green function with fit and peaks."""

    t_values: List[float]
    sup_values: List[float]
    argmax_points: List[Tuple[float, float]]
    fitted_exponent: Optional[float] = None
    fit_residual: Optional[float] = None
    fitted_constant: Optional[float] = None
    peaks: List[Tuple[float, float]] = Field(default_factory=list)
    grid: dict = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_lengths(self):
        if not (len(self.t_values) == len(self.sup_values) == len(self.argmax_points)):
            raise ValueError("DecayCurve columns must have equal length")
        if any(v < 0 for v in self.sup_values):
            raise ValueError("sup values must be non-negative")
        return self
