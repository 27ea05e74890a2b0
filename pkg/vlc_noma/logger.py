"""
Structured logging for the VLC NOMA simulator.
Readable lines in development, one JSON object per record in production.
"""

import json
import logging
import os
import sys
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from colorama import Back, Fore, Style

_CONTEXT_FIELDS = ("mode", "snr_db", "entity_id", "decoder", "point", "seed")


class StructuredFormatter(logging.Formatter):
    """Custom formatter that outputs structured JSON logs."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        for field in _CONTEXT_FIELDS:
            if hasattr(record, field):
                log_data[field] = getattr(record, field)

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data)


class ColoredFormatter(logging.Formatter):
    """Console formatter colouring the level name."""

    COLORS = {
        "DEBUG": Fore.CYAN,
        "INFO": Fore.GREEN,
        "WARNING": Fore.YELLOW,
        "ERROR": Fore.RED,
        "CRITICAL": Fore.RED + Back.YELLOW,
    }

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, "")
        saved = record.levelname
        record.levelname = f"{color}{record.levelname}{Style.RESET_ALL}"
        try:
            return super().format(record)
        finally:
            record.levelname = saved


class SimulatorLogger:
    """Logger wrapper carrying run-level context into every record."""

    def __init__(self, name: str = "vlc_noma"):
        """
        Initialize the logger.

        Args:
            name: Logger name
        """
        self.logger = logging.getLogger(name)
        self._run_context: Dict[str, Any] = {}

    def set_run_context(self, **context):
        """
        Set context included in all subsequent records (mode, seed, ...).
        """
        self._run_context.update(context)

    def clear_run_context(self):
        """Clear all run-level context."""
        self._run_context.clear()

    def _merge_context(self, kwargs: Dict[str, Any]) -> Dict[str, Any]:
        merged = self._run_context.copy()
        merged.update(kwargs)
        return merged

    def debug(self, message: str, **kwargs):
        self.logger.debug(message, extra=self._merge_context(kwargs))

    def info(self, message: str, **kwargs):
        self.logger.info(message, extra=self._merge_context(kwargs))

    def warning(self, message: str, **kwargs):
        self.logger.warning(message, extra=self._merge_context(kwargs))

    def error(self, message: str, exc_info=None, **kwargs):
        self.logger.error(message, exc_info=exc_info, extra=self._merge_context(kwargs))


def setup_logging(level: Optional[str] = None, structured: Optional[bool] = None):
    """
    Install handlers on the package root logger.

    Args:
        level: Log level name; defaults to LOG_LEVEL
        structured: Force JSON output; defaults to ENVIRONMENT == production
    """
    root = logging.getLogger("vlc_noma")
    log_level = (level or os.getenv("LOG_LEVEL", "INFO")).upper()
    root.setLevel(getattr(logging, log_level, logging.INFO))
    root.handlers.clear()

    if structured is None:
        structured = os.getenv("ENVIRONMENT", "development") == "production"

    console_handler = logging.StreamHandler(sys.stderr)
    if structured:
        console_handler.setFormatter(StructuredFormatter())
    else:
        console_handler.setFormatter(
            ColoredFormatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )
    root.addHandler(console_handler)

    log_file = os.getenv("LOG_FILE")
    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(StructuredFormatter())
        root.addHandler(file_handler)


def get_logger(name: str = "vlc_noma") -> SimulatorLogger:
    """Get a context-aware logger below the package root."""
    return SimulatorLogger(name)
