from __future__ import annotations

from typing import Optional

import numpy as np

from pimass.model.models import ReversibleChain, StateId

UNIFORM_BUFFER = 4096


class QuerySession:
    """Metered step()/probe() access to a chain under the locality constraint.

    A state is visited if it is the start state or was returned by step(). Both queries
    may only touch visited states.
    """

    def __init__(self, chain: ReversibleChain, start_state: StateId, seed=None, call_budget: Optional[int] = None):
        if not isinstance(chain, ReversibleChain):
            raise TypeError(f'Queries need a ReversibleChain, got {type(chain).__name__}.')
        if not 0 <= start_state < chain.n:
            raise IndexError(f'Start state {start_state} is not a state of {chain}.')
        self.chain = chain
        self.start_state = start_state
        self.visited = {start_state}
        self.step_calls = 0
        self.probe_calls = 0
        self.call_budget = call_budget
        self._rng = np.random.default_rng(seed)
        self._uniforms = iter(())

    def step(self, u: StateId) -> StateId:
        if u not in self.visited:
            raise LocalityViolation(f'step({u}) on an unvisited state.')
        self._charge()
        self.step_calls += 1
        u_next = self.chain.sample_neighbor(u, self._uniform())
        self.visited.add(u_next)
        return u_next

    def probe(self, u: StateId, u2: StateId) -> float:
        if u not in self.visited or u2 not in self.visited:
            raise LocalityViolation(f'probe({u}, {u2}) touches an unvisited state.')
        self._charge()
        self.probe_calls += 1
        return self.chain.transition_probability(u, u2)

    def footprint(self) -> int:
        return len(self.visited)

    @property
    def calls(self) -> int:
        return self.step_calls + self.probe_calls

    def _charge(self):
        if self.call_budget is not None and self.calls >= self.call_budget:
            raise CallBudgetExceeded(f'Call budget of {self.call_budget} exhausted.')

    def _uniform(self) -> float:
        try:
            return next(self._uniforms)
        except StopIteration:
            self._uniforms = iter(self._rng.random(UNIFORM_BUFFER).tolist())
            return next(self._uniforms)

    def __repr__(self):
        return f'QuerySession(start={self.start_state}, steps={self.step_calls}, probes={self.probe_calls}, ' \
               f'footprint={self.footprint()})'


class LocalityViolation(Exception):
    pass


class CallBudgetExceeded(Exception):
    pass
