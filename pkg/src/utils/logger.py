"""
Logging system for brownsim
Category loggers with rotating log files plus a console handler on stderr
"""

import logging
import logging.handlers
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional


class SimLogger:
    """Logging front-end with one rotating log file per category and console output"""

    CATEGORIES = ("main", "protocol", "oracle")

    def __init__(self, log_dir: str = "logs", console_level: str = "WARNING"):
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)

        # One logger per category
        self.main_logger = self._setup_logger("main", "brownsim.log")
        self.protocol_logger = self._setup_logger("protocol", "protocols.log")
        self.oracle_logger = self._setup_logger("oracle", "oracle.log")
        self.error_logger = self._setup_logger("error", "errors.log", level=logging.ERROR)

        # Console handler for immediate feedback
        self.console_handler = self._setup_console_handler(console_level)
        for handler in list(self.main_logger.handlers):
            if type(handler) is logging.StreamHandler:
                self.main_logger.removeHandler(handler)
        self.main_logger.addHandler(self.console_handler)

    def _setup_logger(self, name: str, filename: str, level: int = logging.DEBUG) -> logging.Logger:
        """Set up a logger with file rotation"""
        logger = logging.getLogger(f"brownsim.{name}")
        logger.setLevel(level)
        logger.propagate = False

        file_path = self.log_dir / filename

        # Prevent duplicate handlers; a new log directory replaces the old file
        for handler in list(logger.handlers):
            if isinstance(handler, logging.FileHandler):
                if handler.baseFilename == os.path.abspath(file_path):
                    return logger
                logger.removeHandler(handler)
                handler.close()

        file_handler = logging.handlers.RotatingFileHandler(
            file_path, maxBytes=10*1024*1024, backupCount=5, encoding="utf-8"  # 10MB max, 5 backups
        )

        formatter = logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(name)-18s | %(funcName)-20s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        return logger

    def _setup_console_handler(self, console_level: str) -> logging.StreamHandler:
        """Set up console handler; stdout carries JSON output, so logs go to stderr"""
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(getattr(logging, console_level.upper(), logging.WARNING))

        formatter = logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(message)s',
            datefmt='%H:%M:%S'
        )
        console_handler.setFormatter(formatter)

        return console_handler

    def _category(self, category: str) -> logging.Logger:
        return getattr(self, f"{category}_logger", self.main_logger)

    def info(self, message: str, category: str = "main"):
        """Log info message"""
        self._category(category).info(message)

    def warning(self, message: str, category: str = "main"):
        """Log warning message"""
        self._category(category).warning(message)

    def error(self, message: str, exception: Optional[Exception] = None, category: str = "main"):
        """Log error message with optional exception details"""
        logger = self._category(category)

        if exception:
            text = f"{message} | Exception: {type(exception).__name__}: {exception}"
        else:
            text = message
        logger.error(text)
        self.error_logger.error(text)

    def debug(self, message: str, category: str = "main"):
        """Log debug message"""
        self._category(category).debug(message)

    def log_command(self, command: str, exit_code: int, details: str = ""):
        """Log a CLI command and its exit code"""
        message = f"COMMAND: {command} | Exit Code: {exit_code}"
        if details:
            message += f" | Details: {details[:500]}"

        if exit_code == 0:
            self.info(message)
        else:
            self.error(message)

    def log_check(self, component: str, status: str, details: str = ""):
        """Log a verification check result"""
        message = f"CHECK: {component} | Status: {status}"
        if details:
            message += f" | Details: {details}"
        self.info(message, category="oracle")

    def log_protocol_event(self, protocol: str, event: str, details: str = ""):
        """Log a protocol step"""
        message = f"PROTOCOL {protocol.upper()}: {event}"
        if details:
            message += f" | {details}"
        self.debug(message, category="protocol")

    def start_session(self):
        """Log session start"""
        self.info("="*60)
        self.info("BROWNSIM SESSION STARTED")
        self.info(f"Timestamp: {datetime.now().isoformat()}")
        self.info(f"Python Version: {sys.version}")
        self.info(f"Platform: {sys.platform}")
        self.info("="*60)

    def end_session(self):
        """Log session end"""
        self.info("="*60)
        self.info("BROWNSIM SESSION ENDED")
        self.info(f"Timestamp: {datetime.now().isoformat()}")
        self.info("="*60)


# Global logger instance
logger_instance: Optional[SimLogger] = None


def get_logger() -> SimLogger:
    """Get the global logger instance"""
    global logger_instance
    if logger_instance is None:
        from .config import get_settings

        settings = get_settings()
        logger_instance = SimLogger(settings["log_dir"], settings["console_level"])
    return logger_instance


def init_logging(log_dir: Optional[str] = None, console_level: Optional[str] = None) -> SimLogger:
    """Initialize the logging system"""
    global logger_instance
    from .config import get_settings

    settings = get_settings()
    logger_instance = SimLogger(
        log_dir or settings["log_dir"],
        console_level or settings["console_level"],
    )
    logger_instance.start_session()
    return logger_instance
