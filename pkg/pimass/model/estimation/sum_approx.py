from __future__ import annotations

import logging
import math
import time
from typing import Hashable, Optional

from pimass.config import settings
from pimass.model.models import EstimatorReport, DomainError
from pimass.model.sampling import WeightedSampleSource

log = logging.getLogger(__name__)

GAMMA_RTOL = 1e-9


def repeat_threshold(epsilon: float, delta: float) -> int:
    """k = ceil((2 + 4.4 eps) / eps^2 * ln(3 / delta)), the number of repeats after which SumApprox halts."""
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise DomainError(f'epsilon and delta must lie in (0, 1), got {epsilon} and {delta}.')
    return math.ceil((2 + 4.4 * epsilon) / epsilon ** 2 * math.log(3 / delta))


def theoretical_sample_bound(pi_norm: float, epsilon: float, delta: float) -> int:
    """Number of draws SumApprox stays below with probability at least 1 - delta / 3."""
    if not 0 < pi_norm <= 1:
        raise DomainError(f'pi_norm must lie in (0, 1], got {pi_norm}.')
    check_formula_parameters(epsilon, delta)
    return math.ceil(45 / pi_norm / epsilon ** 3 * math.log(3 / delta) ** 1.5)


def check_formula_parameters(epsilon: float, delta: float):
    # The closed forms only need eps > 0 and ln(3 / delta) > 0
    if not (0 < epsilon <= 1 and 0 < delta < 3):
        raise DomainError(f'Need epsilon in (0, 1] and delta in (0, 3), got {epsilon} and {delta}.')


class SumApprox:
    """
    Incremental collision counter. Every fed pair is one draw: w grows by the mass w_S of the elements
    seen so far, then the draw is either a repeat (r += 1) or a new element whose gamma joins w_S.
    Once r reaches the threshold, w / r estimates the total gamma.
    """

    def __init__(self, epsilon: float, delta: float, threshold: Optional[int] = None,
                 sample_cap: Optional[int] = None):
        self.k_threshold = threshold if threshold else repeat_threshold(epsilon, delta)
        self.sample_cap = sample_cap
        self.seen: dict[Hashable, float] = {}
        self.w_S = 0.0
        self.w = 0.0
        self.r = 0
        self.samples_drawn = 0

    @property
    def done(self) -> bool:
        return self.r >= self.k_threshold

    def reserve(self):
        """Claim the next draw; raises once the sample cap is used up."""
        if self.sample_cap is not None and self.samples_drawn >= self.sample_cap:
            raise SampleCapExceeded(f'No estimate after {self.samples_drawn} samples '
                                    f'({self.r} of {self.k_threshold} repeats).')

    def feed(self, element: Hashable, gamma: float) -> bool:
        if self.done:
            raise RuntimeError('Repeat threshold already reached.')
        self.w += self.w_S
        self.samples_drawn += 1
        recorded = self.seen.get(element)
        if recorded is None:
            self.seen[element] = gamma
            self.w_S += gamma
            return False
        if not math.isclose(recorded, gamma, rel_tol=GAMMA_RTOL):
            raise InconsistentGammaError(f'Element {element!r} reported gamma {gamma}, earlier {recorded}.')
        self.r += 1
        return True

    @property
    def estimate(self) -> float:
        return self.w / self.r

    @property
    def inverse_estimate(self) -> float:
        return self.r / self.w

    def __repr__(self):
        return f'SumApprox(r={self.r}/{self.k_threshold}, samples={self.samples_drawn}, distinct={len(self.seen)})'


def sum_approx(source: WeightedSampleSource, epsilon: float, delta: float, sample_cap: Optional[int] = None,
               pi_norm: Optional[float] = None) -> tuple[float, EstimatorReport]:
    if sample_cap is None:
        sample_cap = default_sample_cap(pi_norm, epsilon, delta)
    start = time.perf_counter()
    state = SumApprox(epsilon, delta, sample_cap=sample_cap)
    while not state.done:
        state.reserve()
        state.feed(*source.draw())
    estimate = state.estimate
    log.debug(f'{state} estimated gamma = {estimate}.')
    return estimate, EstimatorReport(estimate, state.r, state.samples_drawn, len(state.seen), 0, 0, len(state.seen),
                                     time.perf_counter() - start)


def default_sample_cap(pi_norm: Optional[float], epsilon: float, delta: float) -> Optional[int]:
    if pi_norm is None:
        return settings['sample_cap']
    return settings['sample_cap_factor'] * theoretical_sample_bound(pi_norm, epsilon, delta)


class SampleCapExceeded(Exception):
    pass


class InconsistentGammaError(Exception):
    pass
