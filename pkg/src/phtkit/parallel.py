"""Deterministic parallel map: results always come back in input order."""

from __future__ import annotations

import os
from typing import Callable, Sequence


def available_jobs() -> int:
    return os.cpu_count() or 1


def parallel_map(fn: Callable, items: Sequence, jobs: int | None = 1) -> list:
    """Map fn over items, optionally with a process pool; order is preserved.

    jobs == 1 runs serially in-process; results are identical either way
    (workers run the same code on the same inputs), which is what makes
    parallelism a pure throughput knob.
    """
    items = list(items)
    if jobs is None:
        jobs = 1
    if jobs <= 0:
        jobs = available_jobs()
    if jobs == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=jobs)(delayed(fn)(x) for x in items)
