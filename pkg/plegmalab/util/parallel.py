import os
from typing import Callable, Iterable, List, Optional, Sequence

from joblib import Parallel, delayed
from loguru import logger
from tqdm import tqdm

from plegmalab.util import types

THREADS_ENV = "PLEGMA_LAB_THREADS"


class ProgressParallel(Parallel):
    """joblib Parallel with a tqdm bar over the completed tasks"""

    def __init__(
        self, use_tqdm: bool = True, total: Optional[int] = None, *args, **kwargs
    ):
        self._use_tqdm = use_tqdm
        self._total = total
        super().__init__(*args, **kwargs)

    def __call__(self, *args, **kwargs):
        with tqdm(
            disable=not self._use_tqdm, total=self._total, leave=False
        ) as self._pbar:
            return Parallel.__call__(self, *args, **kwargs)

    def print_progress(self):
        if self._total is None:
            self._pbar.total = self.n_dispatched_tasks
        self._pbar.n = self.n_completed_tasks
        self._pbar.refresh()


def worker_count(default: int = 1) -> int:
    """worker_count Number of worker processes allowed for internal parallel sweeps

    Read from the PLEGMA_LAB_THREADS environment variable.

    Args:
        default (int): Used when the variable is unset

    Returns:
        int: A positive number of workers
    """
    raw = os.environ.get(THREADS_ENV)

    if raw is None:
        return default

    try:
        workers = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non integer {THREADS_ENV}={raw}")

        return default

    return max(1, workers)


def _apply_chunk(
    fn: Callable[[types.T], types.V], chunk: Sequence[types.T]
) -> List[types.V]:
    return [fn(it) for it in chunk]


def parallel_map(
    fn: Callable[[types.T], types.V],
    items: Iterable[types.T],
    workers: Optional[int] = None,
    progress: bool = False,
) -> List[types.V]:
    """parallel_map Map fn over items with joblib worker processes if allowed

    Items are split into one contiguous chunk per worker and the chunks are concatenated
    back in input order, so reductions over the result are deterministic. fn may be a
    closure, joblib's loky backend pickles it with cloudpickle.

    Args:
        fn (Callable): Function to apply
        items (Iterable): Inputs
        workers (Optional[int]): Overrides worker_count()
        progress (bool): Show a tqdm bar over the chunks

    Returns:
        List: [fn(item) for item in items]
    """
    workers = worker_count() if workers is None else workers
    items = list(items)

    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]

    size = -(-len(items) // workers)
    chunks = [items[i : i + size] for i in range(0, len(items), size)]
    logger.debug(f"Mapping {len(items)} items over {len(chunks)} joblib workers")

    pool = ProgressParallel(use_tqdm=progress, total=len(chunks), n_jobs=len(chunks))
    results = pool(delayed(_apply_chunk)(fn, chunk) for chunk in chunks)

    return [v for part in results for v in part]
