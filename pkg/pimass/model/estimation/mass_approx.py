from __future__ import annotations

import logging
import math
import time
from typing import Optional

from pimass.config import settings
from pimass.model.estimation.sum_approx import SumApprox, repeat_threshold, SampleCapExceeded, \
    check_formula_parameters
from pimass.model.models import EstimatorReport, ReversibleChain, StateId, WalkConfig, DomainError
from pimass.model.oracle import mixing_profile, pi_norm, stationary_exact
from pimass.model.session import QuerySession

log = logging.getLogger(__name__)

THRESHOLD_FACTOR = 4


class GammaLedger:
    """Known gamma_u = pi(u) / pi(v) for every visited state u, anchored at gamma_v = 1."""

    def __init__(self, anchor: StateId, log_space: bool = False):
        self.anchor = anchor
        self.log_space = log_space
        self._values = {anchor: 0.0 if log_space else 1.0}

    def __contains__(self, u: StateId) -> bool:
        return u in self._values

    def __len__(self):
        return len(self._values)

    def __getitem__(self, u: StateId) -> float:
        value = self._values[u]
        return math.exp(value) if self.log_space else value

    def extend(self, u: StateId, u_next: StateId, ratio: float):
        """Record gamma_{u_next} = gamma_u * ratio."""
        if self.log_space:
            self._values[u_next] = self._values[u] + math.log(ratio)
        else:
            self._values[u_next] = self._values[u] * ratio

    def states(self):
        return self._values.keys()

    def __repr__(self):
        return f'GammaLedger(anchor={self.anchor}, states={len(self)})'


def gamma_step(ledger: GammaLedger, session: QuerySession, u: StateId, u_next: StateId) -> float:
    """
    Detailed balance gives pi(u_next) / pi(u) = p(u, u_next) / p(u_next, u), so a walk extends the ledger
    with two probes per newly reached state.
    """
    if u_next not in ledger:
        forward = session.probe(u, u_next)
        backward = session.probe(u_next, u)
        if backward == 0:
            raise ZeroBackProbability(f'p({u_next}, {u}) = 0 although {u} -> {u_next} was stepped.')
        ledger.extend(u, u_next, forward / backward)
    return ledger[u_next]


def walk_length_from_tau(tau: int, pi_norm: float, epsilon: float, delta: float, c_constant: float = 1.0) -> int:
    """t = ceil(tau * c * ln(||pi||^-1 eps^-1 ln(3 / delta)) / ln 2), at least 1."""
    if tau < 1:
        raise DomainError(f'tau must be at least 1, got {tau}.')
    if not 0 < pi_norm <= 1:
        raise DomainError(f'pi_norm must lie in (0, 1], got {pi_norm}.')
    if c_constant <= 0:
        raise DomainError(f'c_constant must be positive, got {c_constant}.')
    check_formula_parameters(epsilon, delta)
    argument = math.log(3 / delta) / (pi_norm * epsilon)
    if argument <= 1:
        return 1
    return max(1, math.ceil(tau * c_constant * math.log(argument) / math.log(2)))


def suggest_walk_length(chain: ReversibleChain, v: StateId, epsilon: float, delta: float,
                        c_constant: float = None, t_max: int = None) -> int:
    if not 0 <= v < chain.n:
        raise IndexError(f'Target {v} is not a state of {chain}.')
    c_constant = c_constant if c_constant is not None else settings['c_constant']
    profile = mixing_profile(chain, t_max if t_max is not None else settings['mixing_t_max'])
    norm = pi_norm(stationary_exact(chain))
    return walk_length_from_tau(max(profile.tau, 1), norm, epsilon, delta, c_constant)


def mass_approx(chain: ReversibleChain, v: StateId, epsilon: float, delta: float, walk: WalkConfig, seed=None,
                sample_cap: Optional[int] = None, call_budget: Optional[int] = None,
                log_space: Optional[bool] = None) -> tuple[float, EstimatorReport]:
    """
    Estimate pi(v) by running SumApprox on the endpoints of independent t-step walks from v.
    Each endpoint u comes with gamma_u read off the ledger; the collision count then estimates
    sum_u gamma_u = 1 / pi(v).
    """
    start = time.perf_counter()
    session = QuerySession(chain, v, seed, call_budget)
    ledger = GammaLedger(v, _log_space(log_space))
    state = SumApprox(epsilon, delta, threshold=THRESHOLD_FACTOR * repeat_threshold(epsilon, delta),
                      sample_cap=sample_cap)
    while not state.done:
        state.reserve()
        u, gamma = v, 1.0
        for _ in range(walk.t):
            u_next = session.step(u)
            gamma = gamma_step(ledger, session, u, u_next)
            u = u_next
        state.feed(u, gamma)
    estimate = state.inverse_estimate
    log.debug(f'MassApprox on {chain} from {v}: {estimate} after {state.samples_drawn} walks, {session}.')
    return estimate, EstimatorReport(estimate, state.r, state.samples_drawn, len(state.seen), session.step_calls,
                                     session.probe_calls, session.footprint(), time.perf_counter() - start)


def full_mass_approx(chain: ReversibleChain, v: StateId, epsilon: float, delta: float, walk: WalkConfig,
                     seed=None, sample_cap: Optional[int] = None, call_budget: Optional[int] = None,
                     log_space: Optional[bool] = None) -> tuple[float, EstimatorReport]:
    """
    Estimate pi(v) from one long walk sampled every t steps. Unlike MassApprox, every state the walk
    reaches joins S, so a sample counts as a repeat whenever it lands on a state known before its round.
    """
    start = time.perf_counter()
    session = QuerySession(chain, v, seed, call_budget)
    ledger = GammaLedger(v, _log_space(log_space))
    k = THRESHOLD_FACTOR * repeat_threshold(epsilon, delta)
    seen = {v}
    w_S, w, r, rounds = 1.0, 0.0, 0, 0
    u = v
    burned = []
    for _ in range(walk.burn_in):
        u, new = _advance(ledger, session, u)
        if new:
            burned.append(u)
    w_S += sum(ledger[x] for x in burned)
    seen.update(burned)
    while r < k:
        if sample_cap is not None and rounds >= sample_cap:
            raise SampleCapExceeded(f'No estimate after {rounds} rounds ({r} of {k} repeats).')
        w += w_S
        new_states = []
        for _ in range(walk.t):
            u, new = _advance(ledger, session, u)
            if new:
                new_states.append(u)
        rounds += 1
        # Repeat check sees S as it was before this round
        if u in seen:
            r += 1
        w_S += sum(ledger[x] for x in new_states)
        seen.update(new_states)
    estimate = r / w
    log.debug(f'FullMassApprox on {chain} from {v}: {estimate} after {rounds} rounds, {session}.')
    return estimate, EstimatorReport(estimate, r, rounds, len(seen), session.step_calls, session.probe_calls,
                                     session.footprint(), time.perf_counter() - start)


def _advance(ledger: GammaLedger, session: QuerySession, u: StateId) -> tuple[StateId, bool]:
    u_next = session.step(u)
    new = u_next not in ledger
    if new:
        gamma_step(ledger, session, u, u_next)
    return u_next, new


def _log_space(flag: Optional[bool]) -> bool:
    return settings['log_space_gamma'] if flag is None else flag


class ZeroBackProbability(Exception):
    pass
