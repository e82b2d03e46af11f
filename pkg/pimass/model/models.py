from __future__ import annotations

import math
from bisect import bisect_right
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from scipy import sparse

StateId = int
Edge = Tuple[int, int, float]

STRENGTH_RTOL = 1e-12
BALANCE_RTOL = 1e-9
DISTRIBUTION_ATOL = 1e-9


class ReversibleChain:
    """Random walk on a weighted undirected graph with self-loops.

    Adjacency is kept in CSR form: the neighbors of u are indices[indptr[u]:indptr[u + 1]]
    with weights data[...] and in-row cumulative weights used for neighbor sampling.
    A self-loop {u,u} appears once in u's row, so it is counted once in the strength s(u).
    """

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, weights: np.ndarray):
        if n < 1:
            raise InvalidChainError('A chain needs at least one state.')
        self.n = n
        self._indptr = np.asarray(indptr, dtype=np.int64)
        self._indices = np.asarray(indices, dtype=np.int64)
        self._weights = np.asarray(weights, dtype=np.float64)
        self._validate()
        cumulative = np.empty_like(self._weights)
        for u in range(n):
            lo, hi = self._indptr[u], self._indptr[u + 1]
            cumulative[lo:hi] = np.cumsum(self._weights[lo:hi])
        self.node_strength = np.add.reduceat(self._weights, self._indptr[:-1]) if len(self._weights) \
            else np.zeros(n)
        self._check_strengths(cumulative)
        self.total_strength = float(self.node_strength.sum())
        # Plain lists keep the per-step walk free of numpy scalar overhead
        self._indptr_list = self._indptr.tolist()
        self._indices_list = self._indices.tolist()
        self._cumulative_list = cumulative.tolist()
        self._rows = [dict(zip(self._indices_list[lo:hi], self._weights[lo:hi].tolist()))
                      for lo, hi in zip(self._indptr_list[:-1], self._indptr_list[1:])]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> ReversibleChain:
        """Build a chain from undirected (u, v, weight) triples. Parallel edges are merged by adding weights."""
        rows, cols, vals = [], [], []
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidChainError(f'Edge ({u}, {v}) leaves the state space [0, {n}).')
            if not w > 0:
                raise InvalidChainError(f'Edge ({u}, {v}) has non-positive weight {w}.')
            rows.append(u), cols.append(v), vals.append(float(w))
            if u != v:
                rows.append(v), cols.append(u), vals.append(float(w))
        matrix = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        matrix.sum_duplicates()
        matrix.sort_indices()
        return cls(n, matrix.indptr, matrix.indices, matrix.data)

    def _validate(self):
        if len(self._indptr) != self.n + 1 or len(self._indices) != len(self._weights):
            raise InvalidChainError('Malformed adjacency arrays.')
        if np.any(self._weights <= 0):
            raise InvalidChainError('All weights must be strictly positive.')
        if np.any(np.diff(self._indptr) == 0):
            raise InvalidChainError('Every state needs at least one transition.')
        adjacency = self.adjacency_matrix()
        asymmetry = abs(adjacency - adjacency.T)
        if asymmetry.nnz and asymmetry.max() > 0:
            raise InvalidChainError('Adjacency is not symmetric.')

    def _check_strengths(self, cumulative: np.ndarray):
        row_ends = cumulative[self._indptr[1:] - 1]
        if not np.allclose(row_ends, self.node_strength, rtol=STRENGTH_RTOL, atol=0):
            raise InvalidChainError('Node strengths disagree with adjacency weights.')

    @property
    def m(self) -> int:
        """Number of undirected edges, self-loops included."""
        self_loops = sum(1 for u, row in enumerate(self._rows) if u in row)
        return (len(self._indices_list) - self_loops) // 2 + self_loops

    def neighbors(self, u: StateId) -> dict:
        return self._rows[u]

    def weight(self, u: StateId, u2: StateId) -> float:
        return self._rows[u].get(u2, 0.0)

    def transition_probability(self, u: StateId, u2: StateId) -> float:
        return self._rows[u].get(u2, 0.0) / self.node_strength[u]

    def sample_neighbor(self, u: StateId, x: float) -> StateId:
        """Map a uniform x in [0, 1) to a neighbor of u drawn with probability w_{uu'}/s(u)."""
        lo, hi = self._indptr_list[u], self._indptr_list[u + 1]
        k = bisect_right(self._cumulative_list, x * self._cumulative_list[hi - 1], lo, hi)
        return self._indices_list[min(k, hi - 1)]

    def edges(self) -> Iterator[Edge]:
        """Each undirected edge once as (u, v, weight) with u <= v, in lexicographic order."""
        for u, row in enumerate(self._rows):
            for v in sorted(row):
                if u <= v:
                    yield u, v, row[v]

    def adjacency_matrix(self) -> sparse.csr_matrix:
        return sparse.csr_matrix((self._weights, self._indices, self._indptr), shape=(self.n, self.n))

    def transition_matrix(self) -> sparse.csr_matrix:
        return sparse.diags(1.0 / self.node_strength) @ self.adjacency_matrix()

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if type(other) is type(self):
            return self.n == other.n and self._rows == other._rows
        return False

    def __hash__(self):
        return hash((self.n, tuple(self._indices_list)))

    def __repr__(self):
        return f'ReversibleChain(n={self.n}, m={self.m})'


class TransitionTable:
    """Explicit row-stochastic matrix of a general chain. Not accepted by the estimators."""

    def __init__(self, matrix: np.ndarray, reversible: bool = False):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch(f'Transition table must be square, got shape {matrix.shape}.')
        if np.any(matrix < 0) or np.any(matrix > 1):
            raise DomainError('Transition probabilities must lie in [0, 1].')
        if not np.allclose(matrix.sum(axis=1), 1.0, rtol=0, atol=1e-12):
            raise DomainError('Rows of a transition table must sum to 1.')
        self.matrix = matrix
        self.reversible = reversible

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def transition_matrix(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(self.matrix)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f'TransitionTable(n={self.n}, reversible={self.reversible})'


class DistributionVector:
    def __init__(self, probs):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 1 or not len(probs):
            raise DimensionMismatch('A distribution is a non-empty vector.')
        if np.any(probs < 0):
            raise DomainError('Probabilities must be nonnegative.')
        if abs(probs.sum() - 1.0) > DISTRIBUTION_ATOL:
            raise DomainError(f'Probabilities sum to {probs.sum()}, not 1.')
        self.probs = probs

    @classmethod
    def uniform(cls, n: int) -> DistributionVector:
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, u: StateId) -> DistributionVector:
        probs = np.zeros(n)
        probs[u] = 1.0
        return cls(probs)

    def __getitem__(self, u):
        return float(self.probs[u])

    def __len__(self):
        return len(self.probs)

    def __repr__(self):
        return f'DistributionVector(n={len(self)})'


def tv_distance(a: DistributionVector, b: DistributionVector) -> float:
    if len(a) != len(b):
        raise DimensionMismatch(f'Cannot compare distributions of length {len(a)} and {len(b)}.')
    return min(1.0, 0.5 * float(np.abs(a.probs - b.probs).sum()))


def validate_reversibility(chain, pi: DistributionVector) -> bool:
    """Check detailed balance pi(u) p_{uu'} = pi(u') p_{u'u} on every transition."""
    if len(pi) != chain.n:
        raise DimensionMismatch(f'Distribution has length {len(pi)}, chain has {chain.n} states.')
    flows = sparse.diags(pi.probs) @ chain.transition_matrix()
    flows = sparse.csr_matrix(flows)
    imbalance = abs(flows - flows.T).tocsr()
    scale = abs(flows).maximum(abs(flows.T)).tocsr()
    imbalance.eliminate_zeros()
    if not imbalance.nnz:
        return True
    rows, cols = imbalance.nonzero()
    scales = np.asarray(scale[rows, cols]).ravel()
    return bool(np.all(np.asarray(imbalance[rows, cols]).ravel() <= BALANCE_RTOL * scales))


@dataclass(frozen=True)
class EstimatorReport:
    estimate: float
    repeats: int
    samples: int
    distinct_samples: int
    step_calls: int
    probe_calls: int
    footprint: int
    elapsed_s: float

    @property
    def total_calls(self) -> int:
        return self.step_calls + self.probe_calls


@dataclass(frozen=True)
class MixingProfile:
    d_values: tuple
    tau: int

    def d(self, t: int) -> float:
        return self.d_values[t]


@dataclass(frozen=True)
class WalkConfig:
    t: int
    burn_in: int = 0
    c_constant: float = 1.0

    def __post_init__(self):
        if self.t < 1:
            raise DomainError(f'Walk length must be at least 1, got {self.t}.')
        if self.burn_in < 0:
            raise DomainError(f'Burn-in must be nonnegative, got {self.burn_in}.')


@dataclass(frozen=True)
class ReturnTimeConfig:
    truncation: int
    trials: int

    def __post_init__(self):
        if self.truncation < 1 or self.trials < 1:
            raise DomainError('Truncation and trials must both be at least 1.')


class Weighting(Enum):
    UNIFORM = 'uniform'
    INVERSE_UNIFORM = 'inverse_uniform'

    def __str__(self):
        return self.value


class Variant(Enum):
    G = 'G'
    G_PRIME = 'G_prime'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TorusSpec:
    rows: int
    cols: int
    shortcut_fraction: float = 0.0
    weighting: Weighting = Weighting.UNIFORM
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.rows * self.cols < 2:
            raise DomainError(f'A torus needs at least two nodes, got {self.rows}x{self.cols}.')
        if self.shortcut_fraction < 0:
            raise DomainError('Shortcut fraction must be nonnegative.')

    @property
    def n(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class StarExpanderSpec:
    n0: int
    d: int
    delta: int
    variant: Variant = Variant.G
    eps_attach: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.d < 3 or self.delta < 2:
            raise DomainError(f'Need d >= 3 and delta >= 2, got d={self.d}, delta={self.delta}.')
        if (self.n0 * self.d) % 2:
            raise DomainError(f'n0 * d must be even, got {self.n0} * {self.d}.')
        if self.variant is Variant.G_PRIME and ((self.n0 // 2) * self.d % 2 or self.n0 % 2):
            raise DomainError('The G_prime variant halves n0, so n0 and n0 / 2 * d must be even.')
        if self.eps_attach <= 0:
            raise DomainError('eps_attach must be positive.')


class VectorVariant(Enum):
    X = 'x'
    X_PRIME = 'x_prime'

    def __str__(self):
        return self.value


class Algorithm(Enum):
    MASS_APPROX = 'mass_approx'
    FULL_MASS_APPROX = 'full_mass_approx'
    RETURN_TIME = 'return_time'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SweepRecord:
    algo: Algorithm
    walk_len: int
    trial: int
    seed: int
    estimate: float
    true_pi: float
    rel_error: float
    step_calls: int
    probe_calls: int
    footprint: int
    elapsed_ms: int
    budget_exhausted: bool = False

    @classmethod
    def from_report(cls, algo: Algorithm, walk_len: int, trial: int, seed: int, true_pi: float,
                    report: EstimatorReport, record_time: bool = False) -> SweepRecord:
        return SweepRecord(algo, walk_len, trial, seed, report.estimate, true_pi,
                           relative_error(report.estimate, true_pi), report.step_calls, report.probe_calls,
                           report.footprint, int(round(report.elapsed_s * 1000)) if record_time else 0)

    @property
    def total_calls(self) -> int:
        return self.step_calls + self.probe_calls

    @property
    def canonical_key(self) -> tuple:
        return str(self.algo), self.walk_len, self.trial


def relative_error(estimate: float, true_value: float) -> float:
    return abs(estimate - true_value) / true_value if true_value else math.inf


class InvalidChainError(Exception):
    pass


class DimensionMismatch(Exception):
    pass


class DomainError(Exception):
    pass


class EmptyRecordsError(Exception):
    pass
