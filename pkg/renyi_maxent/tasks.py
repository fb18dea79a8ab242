"""Batch execution helpers.

Independent units of work (oracle restarts, the members of a thermodynamic
family, verification suites) are fanned out to a bounded thread pool.
Results always come back in input order so reports do not depend on
scheduling.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .config import Config


logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit value, else RENYI_MAXENT_THREADS, else the core count."""
    if threads is None:
        threads = Config.THREADS
    return max(1, int(threads))


def run_batch(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Apply ``fn`` to every item, in parallel when more than one thread is allowed."""
    work = list(items)
    workers = min(resolve_threads(threads), len(work)) if work else 1
    if workers <= 1:
        return [fn(item) for item in work]
    logger.debug(f'running {len(work)} tasks on {workers} threads')
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, work))
