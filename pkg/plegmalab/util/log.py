import logging
import os
import sys
from contextlib import contextmanager
from typing import Any, Iterator, Optional

from loguru import logger
from tqdm import tqdm

from plegmalab.util.system import date_fname, safe_mkdirs

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | "
    "<cyan>{extra[operation]}</cyan> | {message}"
)
FILE_FORMAT = (
    "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <7} | {extra[operation]} | "
    "{name}:{function}:{line} | {message}"
)

# Operations whose runs always leave a logfile next to their artifacts
ALWAYS_LOGGED = ("selftest",)


class LoguruBridge(logging.Handler):
    """Forward records of the standard logging module (matplotlib, joblib) to loguru"""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level: Any = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        frame, depth = logging.currentframe(), 2

        while frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back  # type: ignore
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(
            level, record.getMessage()
        )


def configure_logging(level: str = "INFO", operation: str = "plegma-lab") -> None:
    """configure_logging Route loguru to the console through tqdm.write

    Searches and stabilizations run behind tqdm bars, so console records go through
    tqdm.write and do not break them. Records of the standard logging module are bridged
    into loguru. Every record carries the running operation, "plegma-lab" until a run
    starts (see run_log).

    Args:
        level (str): Minimum level printed on the console
        operation (str): Default operation tag of the records
    """
    logger.remove()
    logger.configure(extra={"operation": operation})

    def tqdm_write(msg: str) -> Any:
        return tqdm.write(msg, end="", file=sys.stderr)

    logger.add(tqdm_write, format=CONSOLE_FORMAT, colorize=True, level=level)
    logging.basicConfig(handlers=[LoguruBridge()], level=logging.INFO)


def run_logfile(
    output_dir: str, operation: str, prefix: Optional[str] = None
) -> Optional[str]:
    """run_logfile Logfile of a run, <output_dir>/<prefix>.<date>.log

    Relative prefixes live inside output_dir. Without a prefix only the operations in
    ALWAYS_LOGGED get a logfile, named after the operation.

    Examples:
        >>> run_logfile("results", "selftest")
        results/selftest.20210228-211832.log
        >>> run_logfile("results", "sm.cesaro") is None
        True
    """
    if prefix is None:
        if operation not in ALWAYS_LOGGED:
            return None

        prefix = operation

    if not os.path.isabs(prefix):
        prefix = os.path.join(output_dir, prefix)

    return f"{prefix}.{date_fname()}.log"


@contextmanager
def run_log(
    output_dir: str, operation: str, prefix: Optional[str] = None
) -> Iterator[Optional[str]]:
    """run_log Tag records with the operation and write them to the run logfile

    The file sink takes every record from DEBUG up and is removed, flushed and closed
    when the run ends.

    Yields:
        Optional[str]: The logfile, None if the run is not logged to a file
    """
    logfile = run_logfile(output_dir, operation, prefix)

    with logger.contextualize(operation=operation):
        if logfile is None:
            yield None

            return

        safe_mkdirs(os.path.dirname(logfile) or ".")
        sink = logger.add(
            logfile, format=FILE_FORMAT, colorize=False, level="DEBUG", enqueue=True
        )
        logger.info(f"Log file will be saved in {logfile}")

        try:
            yield logfile
        finally:
            logger.remove(sink)
