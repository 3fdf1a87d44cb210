"""
Logging configuration shared by the CLI and scripts
"""
import sys

import coloredlogs

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: str = "INFO", stream=None) -> None:
    """Install a colored handler on the root logger.

    stdout carries data (words, CSV, reports), so logs go to stderr unless
    another stream is passed.
    """
    coloredlogs.install(
        level=level.upper(),
        fmt=LOG_FORMAT,
        stream=stream or sys.stderr,
    )
