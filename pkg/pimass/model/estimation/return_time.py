from __future__ import annotations

import logging
import time
from typing import Optional

from pimass.model.models import EstimatorReport, ReturnTimeConfig, ReversibleChain, StateId
from pimass.model.session import QuerySession

log = logging.getLogger(__name__)


def return_time_estimate(chain: ReversibleChain, v: StateId, config: ReturnTimeConfig, seed=None,
                         call_budget: Optional[int] = None) -> tuple[float, EstimatorReport]:
    """
    Estimate pi(v) = 1 / E[T_v+] from first-return times of walks started at v.
    A walk that has not come back after config.truncation steps counts with the truncation as its time.
    """
    start = time.perf_counter()
    session = QuerySession(chain, v, seed, call_budget)
    total_time, returned = 0, 0
    for _ in range(config.trials):
        u = v
        for length in range(1, config.truncation + 1):
            u = session.step(u)
            if u == v:
                returned += 1
                break
        total_time += length
    estimate = config.trials / total_time
    log.debug(f'Return times on {chain} from {v}: {returned}/{config.trials} walks returned, estimate {estimate}.')
    return estimate, EstimatorReport(estimate, returned, config.trials, session.footprint(), session.step_calls,
                                     session.probe_calls, session.footprint(), time.perf_counter() - start)
