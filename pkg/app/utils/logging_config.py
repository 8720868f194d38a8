import logging
import sys
from typing import Optional

from app.config.settings import get_settings

_HANDLER_NAME = "twincurvex-console"


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """Configure application-wide logging on stderr; stdout carries JSON and CSV output."""
    settings = get_settings()
    if level is None:
        level = settings.log_level
    if level is not None:
        log_level = logging.getLevelName(level.upper())
        if not isinstance(log_level, int):
            log_level = logging.INFO
    else:
        log_level = logging.DEBUG if settings.debug else logging.INFO

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Reconfiguring (tests, repeated CLI calls) replaces our handler instead of stacking another
    for handler in list(root_logger.handlers):
        if handler.get_name() == _HANDLER_NAME:
            root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.set_name(_HANDLER_NAME)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    # Quiet down noisy libraries
    logging.getLogger("redis").setLevel(logging.WARNING)

    return root_logger
