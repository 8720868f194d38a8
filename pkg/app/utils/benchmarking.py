import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Tuple, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class CheckTiming:
    check: str
    tasks: int
    rows: int
    failures: int
    time_seconds: float


def timed(fn: Callable[..., T], *args) -> Tuple[T, float]:
    """Run fn(*args) and return its result with the elapsed wall time."""
    start = time.time()
    result = fn(*args)
    return result, time.time() - start


def summarize_timings(records: Iterable[Tuple[str, int, int, float]]) -> List[CheckTiming]:
    """
    Aggregate per-task records (check, rows, failures, seconds) into one CheckTiming per check.

    Seconds are summed over tasks, so with several workers the total can
    exceed the wall time of the sweep.
    """
    by_check: Dict[str, CheckTiming] = {}
    for check, rows, failures, seconds in records:
        timing = by_check.setdefault(check, CheckTiming(check, 0, 0, 0, 0.0))
        timing.tasks += 1
        timing.rows += rows
        timing.failures += failures
        timing.time_seconds += seconds
    timings = [by_check[name] for name in sorted(by_check)]
    for timing in timings:
        logger.info(
            f"Check {timing.check}: {timing.rows} rows, {timing.failures} failures, "
            f"{timing.tasks} tasks, {timing.time_seconds:.2f}s"
        )
    return timings
