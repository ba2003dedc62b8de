"""Handler for log messages from the seriesflow library and commands."""
import datetime
import logging
import os
from collections import defaultdict
from pathlib import Path
from typing import Optional

from rich.logging import RichHandler
from rich.text import Text

from seriesflow.core.console import console

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FORMAT_DEBUG = "%(asctime)s - %(name)s (%(process)d) - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
TIME_FORMAT = "%H:%M:%S"

ROOT_LOGGER = "seriesflow"


class LogLevelCounterHandler(logging.Handler):
    """Handler that counts the number of log messages per log level."""

    def __init__(self, count_dict, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.levelcount = count_dict

    def emit(self, record):
        """Increment level counter for each log message."""
        self.levelcount[record.levelname] += 1


class FileHandlerWithDirCreation(logging.FileHandler):
    """FileHandler which creates necessary directories when the first log message is handled."""

    def emit(self, record):
        """Emit a record and create necessary directories if needed."""
        if self.stream is None:
            os.makedirs(os.path.dirname(self.baseFilename), exist_ok=True)
        super().emit(record)


class ModifiedRichHandler(RichHandler):
    """RichHandler modified to print names instead of paths."""

    def emit(self, record: logging.LogRecord) -> None:
        """Replace path with name and call parent method."""
        record.pathname = record.name
        record.lineno = 0
        super().emit(record)


class LogHandler:
    """Install console and file handlers on the seriesflow logger and report a summary when done."""

    def __init__(self, log_level: str = "warning", log_file_level: Optional[str] = None, log_dir: str = "logs",
                 summary: bool = True):
        """Initialize log handler.

        Args:
            log_level: Log level for logging to the console.
            log_file_level: Log level for logging to file. No log file is written when None.
            log_dir: Directory for log files.
            summary: Set to False to skip the warning and error count at the end.
        """
        self.log_level = log_level
        self.log_file_level = log_file_level
        self.log_dir = log_dir
        self.show_summary = summary
        self.log_filename: Optional[Path] = None
        self.log_levelcount = defaultdict(int)
        self.handlers = []
        self.setup_loggers()

    def setup_loggers(self):
        """Set up log handlers for logging to the console and log file."""
        logger = logging.getLogger(ROOT_LOGGER)
        logger.setLevel(logging.DEBUG)
        logger.propagate = False

        # Console logger
        stream_handler = ModifiedRichHandler(enable_link_path=False, console=console)
        stream_handler.setLevel(self.log_level.upper())
        log_format = "%(message)s" if stream_handler.level > logging.DEBUG else "(%(process)d) - %(message)s"
        stream_handler.setFormatter(logging.Formatter(log_format, datefmt=TIME_FORMAT))
        self._add(logger, stream_handler)

        # File logger
        if self.log_file_level:
            self.log_filename = Path(self.log_dir,
                                     "{}.log".format(datetime.datetime.now().strftime("%Y-%m-%d_%H.%M.%S.%f")))
            file_handler = FileHandlerWithDirCreation(self.log_filename, mode="w", encoding="UTF-8", delay=True)
            file_handler.setLevel(self.log_file_level.upper())
            log_format = LOG_FORMAT if file_handler.level > logging.DEBUG else LOG_FORMAT_DEBUG
            file_handler.setFormatter(logging.Formatter(log_format, datefmt=DATE_FORMAT))
            self._add(logger, file_handler)

        # Level counter
        levelcount_handler = LogLevelCounterHandler(self.log_levelcount)
        levelcount_handler.setLevel(logging.WARNING)
        self._add(logger, levelcount_handler)

    def _add(self, logger: logging.Logger, handler: logging.Handler):
        logger.addHandler(handler)
        self.handlers.append(handler)

    @staticmethod
    def warning(msg):
        """Print warning message."""
        console.print(Text(msg, style="yellow"))

    def stop(self):
        """Detach the handlers and print a summary of warnings and errors."""
        logger = logging.getLogger(ROOT_LOGGER)
        for handler in self.handlers:
            logger.removeHandler(handler)
            handler.close()
        self.handlers = []

        if not self.show_summary:
            return
        problems = {k: v for k, v in self.log_levelcount.items() if v}
        if problems:
            self.warning("There {} {} during the run:".format(
                "were" if sum(problems.values()) > 1 else "was",
                ", ".join(f"{count} {level.lower()} message{'s' if count > 1 else ''}"
                          for level, count in sorted(problems.items()))))
            if self.log_filename and self.log_filename.is_file():
                self.warning(f"See {self.log_filename} for details.")
