from __future__ import annotations

import logging

import numpy as np
from scipy.sparse.csgraph import connected_components

from pimass.config import settings
from pimass.model.models import DistributionVector, MixingProfile, ReversibleChain, TransitionTable, DomainError

log = logging.getLogger(__name__)

MIXING_THRESHOLD = 0.25
FIXED_POINT_ATOL = 1e-9
CHUNK_ELEMENTS = 1 << 22


def stationary_exact(chain: ReversibleChain) -> DistributionVector:
    """
    Compute pi(u) = s(u) / sum_w s(w), the stationary distribution of the random walk on a weighted graph,
    and verify it is a fixed point of P with one matrix-vector product.
    """
    components, _ = connected_components(chain.adjacency_matrix(), directed=False)
    if components > 1:
        raise NotErgodic(f'{chain} splits into {components} connected components.')
    probs = chain.node_strength / chain.total_strength
    residual = float(np.abs(chain.transition_matrix().T @ probs - probs).sum())
    if residual > FIXED_POINT_ATOL:
        raise NotErgodic(f'Strength-proportional vector is not stationary (residual {residual:.3e}).')
    return DistributionVector(probs)


def stationary_solve(table: TransitionTable) -> DistributionVector:
    """Solve pi P = pi with sum(pi) = 1 for a general chain given as a dense table."""
    n = table.n
    system = np.vstack([table.matrix.T - np.eye(n), np.ones(n)])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    probs, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    probs = np.clip(probs, 0.0, None)
    return DistributionVector(probs / probs.sum())


def pi_norm(pi: DistributionVector) -> float:
    return float(np.linalg.norm(pi.probs))


def mixing_profile(chain: ReversibleChain, t_max: int, stop_at_tau: bool = True, max_states: int = None) \
    -> MixingProfile:
    """
    Compute d(t) = max_u tvd(delta_u P^t, pi) for t = 0, 1, ... and the 1/4-mixing time tau.
    The maximum over initial distributions is attained at a point mass, so only the n point-mass starts are
    propagated, in column blocks of P^T. With stop_at_tau the curve ends at tau, otherwise at t_max.
    """
    max_states = max_states if max_states else settings['max_mixing_states']
    if chain.n > max_states:
        raise TooLarge(f'{chain} exceeds the {max_states} states the mixing oracle handles.')
    if t_max < 0:
        raise DomainError(f't_max must be nonnegative, got {t_max}.')
    pi = stationary_exact(chain).probs
    forward = chain.transition_matrix().T.tocsr()
    blocks = _start_blocks(chain.n)
    curves = [_block_distances(forward, pi, starts, t_max, stop_early=stop_at_tau) for starts in blocks]
    if stop_at_tau:
        # TV distance from a fixed start never increases with t, so tau is the latest block-wise tau
        if any(curve[-1] > MIXING_THRESHOLD for curve in curves):
            raise NotMixedWithin(f'd({t_max}) > {MIXING_THRESHOLD} for {chain}.')
        horizon = max(len(curve) for curve in curves) - 1
        curves = [curve if len(curve) == horizon + 1
                  else _block_distances(forward, pi, starts, horizon, stop_early=False)
                  for curve, starts in zip(curves, blocks)]
    d_values = np.max(np.array(curves), axis=0)
    mixed = np.flatnonzero(d_values <= MIXING_THRESHOLD)
    if not len(mixed):
        raise NotMixedWithin(f'd({t_max}) > {MIXING_THRESHOLD} for {chain}.')
    log.debug(f'{chain} mixes in {mixed[0]} steps.')
    return MixingProfile(tuple(float(d) for d in d_values), int(mixed[0]))


def _start_blocks(n: int) -> list[np.ndarray]:
    width = max(1, min(n, CHUNK_ELEMENTS // n))
    return [np.arange(lo, min(lo + width, n)) for lo in range(0, n, width)]


def _block_distances(forward, pi: np.ndarray, starts: np.ndarray, t_end: int, stop_early: bool) -> list[float]:
    dists = np.zeros((len(pi), len(starts)))
    dists[starts, np.arange(len(starts))] = 1.0
    curve = []
    for t in range(t_end + 1):
        curve.append(float(0.5 * np.abs(dists - pi[:, None]).sum(axis=0).max()))
        if stop_early and curve[-1] <= MIXING_THRESHOLD:
            break
        if t < t_end:
            dists = forward @ dists
    return curve


class NotErgodic(Exception):
    pass


class NotMixedWithin(Exception):
    pass


class TooLarge(Exception):
    pass
