"""Logging configuration for the library and the command-line interface."""

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

from graph_matern.core.settings import settings


class ColoredFormatter(logging.Formatter):
    """ANSI-colored console lines: level in its own color, messages blue below WARNING."""

    RESET = "\x1b[0m"
    TIMESTAMP = "\x1b[38;5;51m"
    NAME = "\x1b[38;5;213m"
    MESSAGE = "\x1b[38;5;39m"
    LEVELS = {
        logging.DEBUG: "\x1b[38;21m",
        logging.INFO: "\x1b[38;5;46m",
        logging.WARNING: "\x1b[38;5;208m",
        logging.ERROR: "\x1b[38;5;196m",
        logging.CRITICAL: "\x1b[31;1m",
    }

    def __init__(self, fmt: str, datefmt: str = "%Y-%m-%d %H:%M:%S"):
        super().__init__(fmt, datefmt)

    def _paint(self, color: str, text: str) -> str:
        return f"{color}{text}{self.RESET}"

    def format(self, record: logging.LogRecord) -> str:
        level_color = self.LEVELS.get(record.levelno, self.LEVELS[logging.DEBUG])
        message_color = level_color if record.levelno >= logging.WARNING else self.MESSAGE
        parts = (
            self._paint(self.TIMESTAMP, self.formatTime(record, self.datefmt)),
            f"{self._paint(level_color, record.levelname):8s}",
            self._paint(self.NAME, record.name),
            self._paint(message_color, record.getMessage()),
        )
        return " | ".join(parts)


def setup_logging(log_level: str | None = None, log_file: str | Path | None = None) -> None:
    """Configure the console handler and, with ``log_file``, a rotating file handler.

    Args:
        log_level: Logging level name. If None, uses settings.LOG_LEVEL, then
                   DEBUG if settings.DEBUG else WARNING.
        log_file: Path of a log file that receives the same records as the console.
    """
    name = log_level or settings.LOG_LEVEL
    if name is None:
        level = logging.DEBUG if settings.DEBUG else logging.WARNING
    else:
        level = getattr(logging, name.upper(), logging.INFO)

    console_format = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
    file_format = "%(asctime)s | %(levelname)s | %(name)s:%(lineno)d | %(funcName)s | %(message)s"

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()

    # stderr keeps stdout free for command results
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    if settings.DEBUG:
        console_handler.setFormatter(ColoredFormatter(console_format))
    else:
        console_handler.setFormatter(logging.Formatter(console_format, datefmt="%Y-%m-%d %H:%M:%S"))
    root_logger.addHandler(console_handler)

    if log_file is not None:
        _setup_file_handler(root_logger, Path(log_file), level, file_format)

    configure_third_party_loggers()

    logger = logging.getLogger(__name__)
    logger.debug(f"Log level: {logging.getLevelName(level)}")
    logger.debug(f"Debug mode: {settings.DEBUG}")


def _setup_file_handler(root_logger: logging.Logger, path: Path, level: int, file_format: str) -> None:
    """Attach a rotating file handler at ``path``."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        handler = RotatingFileHandler(path, maxBytes=10 * 1024 * 1024, backupCount=5, encoding="utf-8")
    except OSError as e:
        root_logger.warning(f"Could not set up file logging at {path}: {e}. Using console only.")
        return
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(file_format, datefmt="%Y-%m-%d %H:%M:%S"))
    root_logger.addHandler(handler)


def configure_third_party_loggers() -> None:
    """Quiet chatty third-party loggers."""
    for name in ("networkx", "sksparse"):
        logging.getLogger(name).setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance for a module.

    Args:
        name: Name of the logger (usually __name__)

    Returns:
        Configured logger instance
    """
    return logging.getLogger(name)
