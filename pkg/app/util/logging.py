"""JSON logging configuration for the Friedlander toolkit."""

import json
import logging
import sys
import time
import uuid
from datetime import datetime, timezone

from app.config import settings

ROOT_LOGGER = "friedlander"

# Extra attributes copied into the JSON record when a call site provides them
EXTRA_FIELDS = ("command", "run_id", "latency_ms", "status", "error", "k", "N", "t")


class JSONFormatter(logging.Formatter):
    """JSON formatter for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        for field in EXTRA_FIELDS:
            if hasattr(record, field):
                log_entry[field] = getattr(record, field)

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_entry, default=str)


def setup_logging(level: str = None) -> None:
    """Attach the stderr handler; stdout is reserved for results."""
    level_name = (level or settings.log_level).upper()
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(getattr(logging, level_name))

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stderr)
    if settings.log_json:
        console_handler.setFormatter(JSONFormatter())
    else:
        console_handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
    logger.addHandler(console_handler)
    logger.propagate = False


def get_logger(name: str) -> logging.Logger:
    """Get a logger with the given name."""
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


class RunLogger:
    """Command logging context manager."""

    def __init__(self, command: str, run_id: str = None):
        self.command = command
        self.run_id = run_id or uuid.uuid4().hex[:12]
        self.start_time = time.time()
        self.logger = get_logger("run")

    def _latency_ms(self) -> int:
        return int((time.time() - self.start_time) * 1000)

    def __enter__(self):
        self.logger.info(
            "Command started",
            extra={"command": self.command, "run_id": self.run_id, "status": "started"},
        )
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type:
            self.logger.error(
                "Command failed",
                extra={
                    "command": self.command,
                    "run_id": self.run_id,
                    "latency_ms": self._latency_ms(),
                    "status": "error",
                    "error": str(exc_val),
                },
            )
        else:
            self.logger.info(
                "Command completed",
                extra={
                    "command": self.command,
                    "run_id": self.run_id,
                    "latency_ms": self._latency_ms(),
                    "status": "success",
                },
            )
        return False
