"""Deterministic replicate fan-out.

Replicate r always computes from derive_seed(seed, r) and results are
reduced in replicate order, so output is identical for any worker count.
The heavy kernels release the GIL, so threads give real parallelism.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def default_workers():
    return max(1, min(8, os.cpu_count() or 1))


def run_replicates(fn, n, workers=None):
    """[fn(0), fn(1), ..., fn(n-1)] in index order, computed in parallel."""
    workers = workers or default_workers()
    if workers <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(n)))
