"""
Timing Utilities
----------------
Decorator for measuring execution time of scenario runners.
"""

import asyncio
import logging
import time
from functools import wraps
from typing import Any, Callable, TypeVar

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def timed(func: F) -> F:
    """Decorator logging the wall time of a sync or async function at INFO.

    Usage:
        @timed
        def run_thm2(session, bindings):
            ...

    Args:
        func: Function or coroutine function to measure

    Returns:
        Wrapped function that measures execution time
    """
    if asyncio.iscoroutinefunction(func):

        @wraps(func)
        async def async_wrapper(*args, **kwargs):
            init_time = time.perf_counter()
            try:
                return await func(*args, **kwargs)
            finally:
                elapsed = time.perf_counter() - init_time
                logger.info("%s took %.3f seconds", func.__qualname__, elapsed)

        return async_wrapper  # type: ignore

    @wraps(func)
    def wrapper(*args, **kwargs):
        init_time = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            elapsed = time.perf_counter() - init_time
            logger.info("%s took %.3f seconds", func.__qualname__, elapsed)

    return wrapper  # type: ignore
