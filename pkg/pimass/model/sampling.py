from __future__ import annotations

from typing import Hashable, Protocol, Tuple

import numpy as np

from pimass.model.models import ReversibleChain, StateId, DomainError
from pimass.model.oracle import stationary_exact

DRAW_BUFFER = 4096


class WeightedSampleSource(Protocol):
    def draw(self) -> Tuple[Hashable, float]:
        """Return an element drawn with probability gamma_u / gamma, together with gamma_u."""


class AliasTable:
    """Vose's alias method: O(n) setup, O(1) draws from a discrete distribution given by positive weights."""

    def __init__(self, weights, seed=None):
        weights = np.asarray(weights, dtype=np.float64)
        if not len(weights) or np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise DomainError('Alias tables need a non-empty vector of positive finite weights.')
        n = len(weights)
        scaled = (weights * n / weights.sum()).tolist()
        prob, alias = [1.0] * n, list(range(n))
        small = [i for i, w in enumerate(scaled) if w < 1.0]
        large = [i for i, w in enumerate(scaled) if w >= 1.0]
        while small and large:
            lo, hi = small.pop(), large.pop()
            prob[lo], alias[lo] = scaled[lo], hi
            scaled[hi] -= 1.0 - scaled[lo]
            (small if scaled[hi] < 1.0 else large).append(hi)
        # Leftovers are 1 up to rounding
        self._prob = np.array(prob)
        self._alias = np.array(alias)
        self._rng = np.random.default_rng(seed)
        self._buffer = iter(())

    def __len__(self):
        return len(self._prob)

    def draw(self) -> int:
        try:
            return next(self._buffer)
        except StopIteration:
            columns = self._rng.integers(0, len(self._prob), size=DRAW_BUFFER)
            coins = self._rng.random(DRAW_BUFFER)
            self._buffer = iter(np.where(coins < self._prob[columns], columns, self._alias[columns]).tolist())
            return next(self._buffer)


class VectorSampleSource:
    """Draws indices of a nonnegative vector with probability proportional to their entries."""

    def __init__(self, gammas, seed=None):
        self.gammas = np.asarray(gammas, dtype=np.float64)
        self._gamma_list = self.gammas.tolist()
        self._table = AliasTable(self.gammas, seed)

    @property
    def total(self) -> float:
        return float(self.gammas.sum())

    def draw(self) -> Tuple[int, float]:
        u = self._table.draw()
        return u, self._gamma_list[u]


class StationarySampleSource:
    """Draws states exactly from pi, reporting gamma_u = pi(u) / pi(v) relative to a target state v."""

    def __init__(self, chain: ReversibleChain, v: StateId, seed=None):
        pi = stationary_exact(chain).probs
        self.target = v
        self._source = VectorSampleSource(pi / pi[v], seed)

    def draw(self) -> Tuple[StateId, float]:
        return self._source.draw()
