import os
from concurrent.futures import ProcessPoolExecutor
from multiprocessing import RLock
from typing import Callable, Optional

import numpy as np
from tqdm import tqdm


def parallelize(fun: Callable, data: list, workers: Optional[int] = None) -> list:
    """
    Split data into one chunk per worker and call fun(chunk, position) in a process pool.
    Results are concatenated in chunk order; a single worker runs in-process.
    """
    workers = workers if workers else os.cpu_count()
    if workers <= 1 or len(data) <= 1:
        return list(fun(data, 0))
    chunks = [[data[i] for i in indices] for indices in np.array_split(np.arange(len(data)), workers)
              if len(indices)]
    with ProcessPoolExecutor(initargs=(RLock(),), initializer=tqdm.set_lock, max_workers=len(chunks)) as p:
        futures = [p.submit(fun, chunk, i) for i, chunk in enumerate(chunks)]
        results = [f.result() for f in futures]
    return [item for chunk in results for item in chunk]
