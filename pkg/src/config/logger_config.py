"""
Logging setup shared by every module.

File records are JSON lines (python-json-logger); the console gets a short
human-readable line on stderr, leaving stdout to the command-line output.
"""
import os
import logging
from datetime import date

try:
    from pythonjsonlogger.json import JsonFormatter
    HAS_JSON_LOGGER = True
except ImportError:
    try:
        from pythonjsonlogger.jsonlogger import JsonFormatter
        HAS_JSON_LOGGER = True
    except ImportError:
        HAS_JSON_LOGGER = False


LOG_DIR = os.environ.get("ONTIC_LOG_DIR", "logs")
LOG_LEVEL = os.environ.get("ONTIC_LOG_LEVEL", "INFO").upper()

CONSOLE_FORMAT = "%(levelname)s | %(name)s | %(message)s"
RECORD_FIELDS = "%(asctime)s %(levelname)s %(name)s %(message)s"


def _record_formatter() -> logging.Formatter:
    if HAS_JSON_LOGGER:
        return JsonFormatter(RECORD_FIELDS,
                             rename_fields={"asctime": "timestamp", "levelname": "level"})
    return logging.Formatter(RECORD_FIELDS.replace(" %", " - %"))


def log_file_path(log_dir=None) -> str:
    """logs/ontic_<yyyy-mm-dd>.log under the configured directory."""
    return os.path.join(log_dir or LOG_DIR, f"ontic_{date.today().isoformat()}.log")


def setup_logger(name="Ontic", log_dir=None):
    """
    Logger with a JSON file handler and a stderr console handler.

    Parameters:
        name (str): component name shown in every record
        log_dir (str): directory for the daily log file (default ONTIC_LOG_DIR)

    Returns:
        logging.Logger: configured logger; calling again replaces its handlers
    """
    path = log_file_path(log_dir)
    os.makedirs(os.path.dirname(path), exist_ok=True)

    logger = logging.getLogger(name)
    logger.setLevel(LOG_LEVEL)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.propagate = False

    records = logging.FileHandler(path, mode="a", encoding="utf-8")
    records.setFormatter(_record_formatter())

    console = logging.StreamHandler()
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))

    for handler in (records, console):
        handler.setLevel(LOG_LEVEL)
        logger.addHandler(handler)
    return logger
