"""
Ordered thread-pool fan-out for independent replicates and analysis units.
"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Sequence, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """
    Derive one independent generator per replicate.

    Args:
        seed: Root seed
        count: Number of generators

    Returns:
        Generators whose streams depend only on (seed, index)
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def run_ordered(
    func: Callable[[T], R],
    items: Sequence[T],
    workers: int = 1,
    label: str = 'tasks'
) -> List[R]:
    """
    Apply func to every item, possibly concurrently, keeping submission order.

    Args:
        func: Callable applied to each item
        items: Work items
        workers: Maximum number of concurrent workers (1 runs inline)
        label: Name used in progress logging

    Returns:
        Results in the order of items
    """
    total = len(items)
    results: List[R] = [None] * total  # type: ignore[list-item]
    step = max(1, total // 10)

    if workers <= 1 or total <= 1:
        for index, item in enumerate(items):
            results[index] = func(item)
            if (index + 1) % step == 0:
                logger.debug(f"{label}: {index + 1}/{total}")
        return results

    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(func, item): index
            for index, item in enumerate(items)
        }
        completed = 0
        for future in as_completed(futures):
            # Exceptions propagate to the caller with their original type
            results[futures[future]] = future.result()
            completed += 1
            if completed % step == 0:
                logger.debug(f"{label}: {completed}/{total}")
    return results
