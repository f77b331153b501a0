"""Evaluation metrics for performance monitoring."""

import time
from contextlib import contextmanager
from pathlib import Path

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

from app.util.logging import get_logger

logger = get_logger("metrics")

REGISTRY = CollectorRegistry()

EVALUATION_COUNT = Counter(
    "fd_evaluations_total",
    "Total evaluations per operation",
    ["operation", "status"],
    registry=REGISTRY,
)

EVALUATION_DURATION = Histogram(
    "fd_evaluation_duration_seconds",
    "Evaluation duration in seconds",
    ["operation"],
    registry=REGISTRY,
)

QUADRATURE_PANELS = Gauge(
    "fd_quadrature_panels",
    "Panels used by the last oscillatory integral",
    registry=REGISTRY,
)

MODES_SUMMED = Counter(
    "fd_modes_summed_total",
    "Gallery modes summed by the spectral evaluators",
    ["evaluator"],
    registry=REGISTRY,
)


@contextmanager
def track(operation: str):
    """Count and time one evaluation."""
    start_time = time.perf_counter()
    try:
        yield
    except Exception as e:
        EVALUATION_COUNT.labels(operation=operation, status=type(e).__name__).inc()
        raise
    else:
        EVALUATION_COUNT.labels(operation=operation, status="ok").inc()
    finally:
        EVALUATION_DURATION.labels(operation=operation).observe(time.perf_counter() - start_time)


def evaluation_count(operation: str, status: str = "ok") -> float:
    """Current counter value, mostly for tests."""
    value = REGISTRY.get_sample_value(
        "fd_evaluations_total", {"operation": operation, "status": status}
    )
    return value or 0.0


def write_metrics(directory: Path, file_name: str) -> Path:
    """Dump the registry in the textfile exposition format."""
    path = Path(directory) / file_name
    try:
        write_to_textfile(str(path), REGISTRY)
    except OSError as e:
        logger.error(f"Failed to write metrics to {path}: {e}")
        raise
    return path
