from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import replace
from operator import attrgetter

import numpy as np
from sortedcontainers import SortedKeyList
from tqdm import tqdm

from pimass.model.estimation.algorithms import run_algorithm
from pimass.model.estimation.sum_approx import SampleCapExceeded
from pimass.model.models import Algorithm, ReversibleChain, StateId, SweepRecord
from pimass.model.oracle import stationary_exact
from pimass.model.session import CallBudgetExceeded
from pimass.util import parallelize

log = logging.getLogger(__name__)


def length_schedule(start: int = 10, growth: float = math.sqrt(2)) -> Iterator[int]:
    """Walk lengths round(start * growth^k) for k = 0, 1, ..., kept strictly increasing."""
    if start < 1 or growth <= 1:
        raise ValueError(f'Need start >= 1 and growth > 1, got {start} and {growth}.')
    previous, k = 0, 0
    while True:
        length = max(previous + 1, round(start * growth ** k))
        yield length
        previous, k = length, k + 1


def trial_seed(master_seed: int, algo: Algorithm, length_index: int, trial: int) -> int:
    """Seed of one trial, derived from the master seed and the trial's coordinates only."""
    entropy = [master_seed, list(Algorithm).index(algo), length_index, trial]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


class Sweeper:
    """
    Runs each algorithm on a growing walk-length schedule, a few trials per length, until every trial
    of one length lands within (1 +- epsilon) of the true mass or the algorithm's call budget runs out.
    """

    def __init__(self, config: dict):
        self._start_length = config['start_length']
        self._growth = config['length_growth']
        self._trials = config['trials_per_length']
        self._call_budget = config['call_budget']
        self._burn_in = config['burn_in']
        self._return_time_trials = config['return_time_trials']
        self._log_space = config['log_space_gamma']
        self._record_time = config['record_wall_time']
        self._workers = config['workers']

    def sweep(self, chain: ReversibleChain, v: StateId, algos: Sequence[Algorithm], epsilon: float, delta: float,
              seed: int = 0) -> list[SweepRecord]:
        if not 0 <= v < chain.n:
            raise IndexError(f'Target {v} is not a state of {chain}.')
        self._chain, self._v, self._epsilon, self._delta, self._seed = chain, v, epsilon, delta, seed
        self._true_pi = stationary_exact(chain)[v]
        workers = min(self._workers or 1, len(algos)) if algos else 1
        records = parallelize(self._sweep_algorithms, list(algos), workers)
        return list(SortedKeyList(records, key=attrgetter('canonical_key')))

    def _sweep_algorithms(self, algos, pos=0) -> list[SweepRecord]:
        return [record for algo in algos for record in self._sweep_algorithm(algo, pos)]

    def _sweep_algorithm(self, algo: Algorithm, pos: int) -> list[SweepRecord]:
        records, spent = [], 0
        with tqdm(desc=f'Sweeping {algo}', unit='length', position=pos, leave=False) as progress:
            for length_index, walk_len in enumerate(length_schedule(self._start_length, self._growth)):
                log.info(f'{algo}: walk length {walk_len}.')
                batch = []
                for trial in range(self._trials):
                    seed = trial_seed(self._seed, algo, length_index, trial)
                    remaining = self._call_budget - spent if self._call_budget is not None else None
                    try:
                        report = run_algorithm(algo, self._chain, self._v, walk_len, self._epsilon, self._delta,
                                               seed, remaining, self._burn_in, self._return_time_trials,
                                               self._log_space)
                    except (CallBudgetExceeded, SampleCapExceeded) as e:
                        log.warning(f'Stopping {algo} at walk length {walk_len}: {e}')
                        records.extend(batch)
                        if records:
                            records[-1] = replace(records[-1], budget_exhausted=True)
                        return records
                    spent += report.total_calls
                    batch.append(SweepRecord.from_report(algo, walk_len, trial, seed, self._true_pi, report,
                                                         self._record_time))
                records.extend(batch)
                progress.update()
                if all(record.rel_error <= self._epsilon for record in batch):
                    log.info(f'{algo}: all {len(batch)} trials within {self._epsilon} at walk length {walk_len}.')
                    return records


def run_sweep(chain: ReversibleChain, v: StateId, algos: Sequence[Algorithm], epsilon: float, delta: float,
              config: dict, seed: int = 0) -> list[SweepRecord]:
    return Sweeper(config).sweep(chain, v, algos, epsilon, delta, seed)
