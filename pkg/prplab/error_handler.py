"""
Error Handler
-------------
Custom exception hook for clean, user-friendly error messages.
"""

import sys
from typing import Type

from .exceptions import PrpLabError

EXIT_INPUT_ERROR = 2


def format_error(exc: PrpLabError) -> str:
    """Format a PrpLabError into a clean, user-friendly message.

    Args:
        exc: PrpLabError instance

    Returns:
        Formatted error message
    """
    lines = []

    if exc.error_code:
        lines.append(f"\n❌ Error [{exc.error_code}]:")
    else:
        lines.append("\n❌ Error:")

    lines.append(f"   {exc.message}")

    if exc.suggestion:
        lines.append("\n💡 Suggestion:")
        lines.append(f"   {exc.suggestion}")

    # Only validation and lookup errors carry context worth showing
    if exc.context and exc.error_type in ("validation_error", "resource_error"):
        lines.append("\n📋 Details:")
        for key, value in exc.context.items():
            if key != "reason":  # already in the message
                lines.append(f"   {key}: {value}")

    lines.append("")
    return "\n".join(lines)


def prplab_excepthook(
    exc_type: Type[BaseException], exc_value: BaseException, exc_traceback
) -> None:
    """Custom exception hook for PrpLabError exceptions.

    Displays a short error block without the traceback and exits with the
    input-error status. Falls back to default behavior for other exceptions.

    Args:
        exc_type: Exception class
        exc_value: Exception instance
        exc_traceback: Traceback object
    """
    if isinstance(exc_value, PrpLabError):
        print(format_error(exc_value), file=sys.stderr)
        sys.exit(EXIT_INPUT_ERROR)

    sys.__excepthook__(exc_type, exc_value, exc_traceback)


def install_exception_handler() -> None:
    """Install custom exception handler for clean error messages."""
    sys.excepthook = prplab_excepthook
