# cli/logging_utils.py
from __future__ import annotations

import logging
import sys
import time
from contextlib import contextmanager
from typing import Iterator

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

log = logging.getLogger("srdm")


def setup_logging(level: str = "INFO") -> logging.Handler:
    """Route every logger to stderr; stdout stays reserved for results."""
    root = logging.getLogger()
    for h in list(root.handlers):
        root.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    return handler


@contextmanager
def stage(name: str) -> Iterator[None]:
    """One start line and one finish line per pipeline stage."""
    log.info("stage %s started", name)
    t0 = time.monotonic()
    yield
    log.info("stage %s done in %.2fs", name, time.monotonic() - t0)
