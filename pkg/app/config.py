"""Configuration settings for the Friedlander dispersion toolkit."""

import math
import os
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Toolkit settings, overridable from the environment (FD_ prefix) or a .env file."""

    # Workers
    threads: int = Field(
        default=1,
        ge=1,
        description="Worker cap for grid scans; FD_THREADS is the fallback for --threads",
    )

    # Logging
    log_level: str = Field("INFO", description="Logging level")
    log_json: bool = Field(True, description="Emit JSON log records on stderr")

    # Special functions
    airy_table_size: int = Field(200, ge=1, description="Zeros precomputed in the shared Airy table")
    zero_tol: float = Field(1e-12, gt=0, description="Polishing tolerance for Airy zeros")
    phase_track_step: float = Field(
        math.pi / 4,
        gt=0,
        description="Largest admissible change of arg A_+ between two tracking nodes",
    )
    a_plus_max_abs: float = Field(50.0, gt=0, description="Validated |z| range of A_+/A_-")

    # Oscillatory quadrature
    quad_tol: float = Field(1e-10, gt=0, description="Default absolute tolerance")
    quad_nodes: int = Field(15, ge=3, description="Gauss-Legendre nodes per panel")
    quad_max_depth: int = Field(30, ge=1, description="Maximum bisection depth of a panel")
    quad_max_panels: int = Field(400000, ge=16, description="Panel budget of one adaptive integral")
    quad_phase_per_panel: float = Field(
        math.pi / 2, gt=0, description="Phase budget |phase'|*width per initial panel"
    )
    quad_scan_points: int = Field(4001, ge=101, description="Samples used to scan phase derivatives")
    degenerate_tol: float = Field(
        1e-6, gt=0, description="|phase''| relative to its maximum on the interval below which a stationary point is degenerate"
    )

    # Green functions
    kmax_guard: int = Field(2, ge=0, description="Guard modes beyond the cutoff window")
    low_freq_split_m: float = Field(64.0, gt=1, description="M in the chi0(t*lambda_k/M) split")
    low_freq_rings: int = Field(4, ge=1, description="Dyadic rings psi2(2^j rho), j < rings, kept at low frequency")
    grid_eta_points: int = Field(2048, ge=64, description="Minimum uniform eta nodes of the grid evaluators")

    # Reflected waves
    window_delta_floor: float = Field(8.0, gt=0, description="Delta = max(floor*sqrt(gamma), t/2)")
    window_guard: int = Field(12, ge=0, description="Extra reflections summed beyond the Delta window")
    regime_lambda_min: float = Field(5.0, gt=0, description="Smallest gamma^{3/2}/h accepted by wave_packet")

    # Newton / critical points
    newton_max_iter: int = Field(50, ge=1, description="Solver iterations per seed (function evaluations are capped at ten times this)")
    newton_tol: float = Field(1e-12, gt=0, description="Residual tolerance of the critical system")
    dedup_radius: float = Field(1e-6, gt=0, description="Distance under which two critical points merge")
    overlap_probe: int = Field(5, ge=2, description="Sample points per axis of the overlap neighborhood")
    overlap_constant: float = Field(4.0, gt=0, description="Frozen acceptance constant C for the overlap bound")

    # Decay harness
    resolution_cells: int = Field(2, ge=1, description="Argmax drift (coarse cells) that triggers a resolution warning")

    # Metrics
    enable_metrics: bool = Field(True, description="Write a Prometheus textfile beside each manifest")
    metrics_file_name: str = Field("metrics.prom", description="Metrics textfile name")

    results_dir: Optional[str] = Field(
        default=os.getenv("FD_RESULTS_DIR"),
        description="Default directory for outputs when --out is relative",
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Accept the standard level names only."""
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Invalid log level: {v}")
        return level

    model_config = {
        "env_file": ".env",
        "env_prefix": "FD_",
        "case_sensitive": False,
    }


# Global settings instance
settings = Settings()
