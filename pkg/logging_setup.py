"""
Logging setup for command-line runs.

Library modules only create named loggers; handlers are installed here.
"""
import logging

from rich.console import Console
from rich.logging import RichHandler

from config import get_config


def configure_logging(verbose: bool = False, console: Console = None) -> None:
    """Route the root logger through rich, INFO by default and DEBUG when verbose"""
    verbose = verbose or get_config().debug
    level = logging.DEBUG if verbose else logging.INFO
    handler = RichHandler(
        console=console or Console(stderr=True),
        show_path=verbose,
        rich_tracebacks=True,
        markup=False,
    )
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]", handlers=[handler], force=True)
