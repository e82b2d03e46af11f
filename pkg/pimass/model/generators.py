from __future__ import annotations

import logging
import math

import networkx as nx
import numpy as np

from pimass.config import settings
from pimass.model.models import ReversibleChain, StarExpanderSpec, TorusSpec, TransitionTable, Variant, \
    VectorVariant, Weighting, DomainError
from pimass.model.sampling import VectorSampleSource, WeightedSampleSource

log = logging.getLogger(__name__)

SELF_LOOP_WEIGHT = 1.0


def torus_chain(spec: TorusSpec) -> ReversibleChain:
    """
    Periodic grid with a unit self-loop on every node and floor(shortcut_fraction * n) extra edges
    between random non-adjacent pairs. Wraparound arcs that land on the same pair (2 x k tori) are merged.
    """
    rng = np.random.default_rng(spec.seed)
    rows, cols, n = spec.rows, spec.cols, spec.n
    arcs = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            for u2 in (r * cols + (c + 1) % cols, ((r + 1) % rows) * cols + c):
                if u2 != u:
                    arcs.append((u, u2))
    arcs.extend(_shortcuts(arcs, n, math.floor(spec.shortcut_fraction * n), rng))
    if spec.weighting is Weighting.INVERSE_UNIFORM:
        # 1 / X with X uniform on (0, 1]
        weights = (1.0 / (1.0 - rng.random(len(arcs)))).tolist()
    else:
        weights = [1.0] * len(arcs)
    edges = [(u, u2, w) for (u, u2), w in zip(arcs, weights)]
    edges.extend((u, u, SELF_LOOP_WEIGHT) for u in range(n))
    return ReversibleChain.from_edges(n, edges)


def _shortcuts(arcs: list, n: int, count: int, rng: np.random.Generator) -> list:
    taken = {frozenset(arc) for arc in arcs}
    if count > n * (n - 1) // 2 - len(taken):
        raise DomainError(f'Cannot place {count} shortcuts on a torus of {n} nodes.')
    shortcuts = []
    while len(shortcuts) < count:
        u, u2 = rng.integers(0, n, size=2).tolist()
        pair = frozenset((u, u2))
        if u != u2 and pair not in taken:
            taken.add(pair)
            shortcuts.append((u, u2))
    return shortcuts


def star_expander_chain(spec: StarExpanderSpec) -> ReversibleChain:
    """
    Replace every edge {u, u'} of a random d-regular multigraph on n0 nodes by a star: a center joined
    to u and u' plus delta - 2 leaves, each leaf with a self-loop of weight d - 1. All other arcs weigh 1.
    The G_prime variant builds the graph on n0 / 2 nodes and pads it to the same size with leaves hanging
    off node 0 by arcs of weight eps_attach / k.
    """
    if spec.variant is Variant.G:
        return ReversibleChain.from_edges(_star_expander_size(spec.n0, spec.d, spec.delta),
                                          _star_expander_edges(spec.n0, spec.d, spec.delta, spec.seed))
    half = spec.n0 // 2
    base = _star_expander_size(half, spec.d, spec.delta)
    n = _star_expander_size(spec.n0, spec.d, spec.delta)
    k = n - base
    edges = _star_expander_edges(half, spec.d, spec.delta, spec.seed)
    edges.extend((0, pad, spec.eps_attach / k) for pad in range(base, n))
    return ReversibleChain.from_edges(n, edges)


def star_center_states(spec: StarExpanderSpec) -> list[int]:
    n0 = spec.n0 if spec.variant is Variant.G else spec.n0 // 2
    return [n0 + i * (spec.delta - 1) for i in range(n0 * spec.d // 2)]


def _star_expander_size(n0: int, d: int, delta: int) -> int:
    return n0 + (n0 * d // 2) * (delta - 1)


def _star_expander_edges(n0: int, d: int, delta: int, seed: int) -> list:
    if delta == 2:
        log.warning('Stars without leaves carry no self-loops, so the walk is periodic.')
    expander = _regular_multigraph(n0, d, seed)
    edges = []
    for i, (u, u2) in enumerate(expander.edges()):
        center = n0 + i * (delta - 1)
        edges.append((u, center, 1.0))
        edges.append((u2, center, 1.0))
        for leaf in range(center + 1, center + delta - 1):
            edges.append((center, leaf, 1.0))
            edges.append((leaf, leaf, float(d - 1)))
    return edges


def _regular_multigraph(n0: int, d: int, seed: int) -> nx.MultiGraph:
    retries = settings['construction_retries']
    seeds = np.random.default_rng(seed).integers(0, 2 ** 32, size=retries).tolist()
    for attempt, graph_seed in enumerate(seeds):
        graph = nx.configuration_model([d] * n0, seed=graph_seed)
        if nx.is_connected(graph):
            return graph
        log.debug(f'Configuration model attempt {attempt} on {n0} nodes is disconnected, retrying.')
    raise ConstructionFailure(f'No connected {d}-regular multigraph on {n0} nodes after {retries} attempts.')


def nonreversible_lb_chain(n: int, tau_fn: int, p_fn: float, redirect: bool = True) -> TransitionTable:
    """
    Hub state 0 with satellites 1..n-1. The hub moves to each satellite with probability p / tau and each
    satellite returns to the hub with probability 1 / tau. With redirect, satellite 2 jumps to the target
    satellite 1 with probability 1, which breaks detailed balance and roughly doubles the target's mass.
    """
    if n < (3 if redirect else 2):
        raise DomainError(f'Need at least {3 if redirect else 2} states, got {n}.')
    if tau_fn < 1:
        raise DomainError(f'tau must be at least 1, got {tau_fn}.')
    leave_hub = (n - 1) * p_fn / tau_fn
    if not (p_fn > 0 and leave_hub < 1):
        raise DomainError(f'Hub transition probabilities leave [0, 1] for n={n}, tau={tau_fn}, p={p_fn}.')
    matrix = np.zeros((n, n))
    matrix[0, 0] = 1.0 - leave_hub
    matrix[0, 1:] = p_fn / tau_fn
    satellites = np.arange(1, n)
    matrix[satellites, satellites] = 1.0 - 1.0 / tau_fn
    matrix[satellites, 0] = 1.0 / tau_fn
    if redirect:
        matrix[2] = 0.0
        matrix[2, 1] = 1.0
    return TransitionTable(matrix, reversible=not redirect)


def adversarial_sum_vectors(n: int, k: int, variant: VectorVariant, seed=None) \
    -> tuple[np.ndarray, WeightedSampleSource]:
    """
    x has k unit entries, x_prime has 2k, and every other entry is sqrt(k) / n. Positions are shuffled
    by a seeded permutation.
    """
    if not (1 <= k and 2 * k <= n):
        raise DomainError(f'Need 1 <= k <= n / 2, got n={n}, k={k}.')
    units = k if variant is VectorVariant.X else 2 * k
    gammas = np.full(n, math.sqrt(k) / n)
    gammas[:units] = 1.0
    rng = np.random.default_rng(seed)
    gammas = gammas[rng.permutation(n)]
    return gammas, VectorSampleSource(gammas, rng.integers(0, 2 ** 63))


def collision_distinguisher(source_a: WeightedSampleSource, source_b: WeightedSampleSource, budget: int,
                            rng: np.random.Generator) -> int:
    """
    Guess which of two sources has the smaller total from budget draws each: the one whose draws
    collide more often. Ties are broken by a coin flip. Returns 0 for source_a and 1 for source_b.
    """
    collisions = [_collisions(source, budget) for source in (source_a, source_b)]
    if collisions[0] == collisions[1]:
        return int(rng.integers(0, 2))
    return 0 if collisions[0] > collisions[1] else 1


def _collisions(source: WeightedSampleSource, budget: int) -> int:
    draws = [source.draw()[0] for _ in range(budget)]
    return len(draws) - len(set(draws))


def cycle_chain(n: int, self_loop: float = 1.0) -> ReversibleChain:
    """Lazy n-cycle with unit edges."""
    if n < 2:
        raise DomainError(f'A cycle needs at least two states, got {n}.')
    edges = [(u, (u + 1) % n, 1.0) for u in range(n)]
    edges.extend((u, u, self_loop) for u in range(n))
    return ReversibleChain.from_edges(n, edges)


class ConstructionFailure(Exception):
    pass
