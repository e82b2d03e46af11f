from __future__ import annotations

from typing import Optional

from pimass.model.estimation.mass_approx import mass_approx, full_mass_approx
from pimass.model.estimation.return_time import return_time_estimate
from pimass.model.models import Algorithm, EstimatorReport, ReturnTimeConfig, ReversibleChain, StateId, WalkConfig


def run_algorithm(algo: Algorithm, chain: ReversibleChain, v: StateId, walk_len: int, epsilon: float,
                  delta: float, seed=None, call_budget: Optional[int] = None, burn_in: int = 0,
                  return_time_trials: int = 400, log_space: Optional[bool] = None) -> EstimatorReport:
    """
    Run one estimator with walk_len as its length parameter: the walk length t for the collision
    estimators, the truncation for the return-time baseline.
    """
    if algo is Algorithm.MASS_APPROX:
        _, report = mass_approx(chain, v, epsilon, delta, WalkConfig(walk_len), seed, call_budget=call_budget,
                                log_space=log_space)
    elif algo is Algorithm.FULL_MASS_APPROX:
        _, report = full_mass_approx(chain, v, epsilon, delta, WalkConfig(walk_len, burn_in), seed,
                                     call_budget=call_budget, log_space=log_space)
    elif algo is Algorithm.RETURN_TIME:
        _, report = return_time_estimate(chain, v, ReturnTimeConfig(walk_len, return_time_trials), seed,
                                         call_budget=call_budget)
    else:
        raise ValueError(f'Unknown algorithm {algo}.')
    return report
