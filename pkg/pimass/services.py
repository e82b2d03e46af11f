from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from click import ClickException, UsageError

from pimass.config import settings
from pimass.model import generators
from pimass.model.estimation.algorithms import run_algorithm
from pimass.model.estimation.mass_approx import suggest_walk_length, ZeroBackProbability
from pimass.model.estimation.sum_approx import SampleCapExceeded, InconsistentGammaError
from pimass.model.models import Algorithm, DistributionVector, EstimatorReport, MixingProfile, ReversibleChain, \
    StarExpanderSpec, StateId, SweepRecord, TorusSpec, DomainError, EmptyRecordsError, InvalidChainError
from pimass.model.oracle import mixing_profile, pi_norm, stationary_exact, NotErgodic, NotMixedWithin, TooLarge
from pimass.model.reporting import generate_svg_chart
from pimass.model.session import CallBudgetExceeded
from pimass.model.sweep import run_sweep
from pimass.repositories import ChainFileRepository, ChainFormatError, SweepRecordCsvRepository

log = logging.getLogger(__name__)

USAGE_ERRORS = (DomainError, InvalidChainError, ChainFormatError, NotErgodic, NotMixedWithin, TooLarge,
                generators.ConstructionFailure, IndexError, FileExistsError, FileNotFoundError, EmptyRecordsError)
RUN_ERRORS = (CallBudgetExceeded, SampleCapExceeded, InconsistentGammaError, ZeroBackProbability)


@dataclass(frozen=True)
class ExactSummary:
    pi: DistributionVector
    norm: float
    profile: Optional[MixingProfile]


def load_chain(chain_repo: ChainFileRepository) -> ReversibleChain:
    try:
        return chain_repo.load()
    except (ChainFormatError, FileNotFoundError) as e:
        raise UsageError(str(e)) from e


def generate_chain(spec: Union[TorusSpec, StarExpanderSpec]) -> ReversibleChain:
    try:
        if isinstance(spec, TorusSpec):
            return generators.torus_chain(spec)
        return generators.star_expander_chain(spec)
    except (DomainError, generators.ConstructionFailure) as e:
        raise UsageError(str(e)) from e


def write_chain(chain: ReversibleChain, chain_repo: ChainFileRepository):
    try:
        chain_repo.save(chain)
    except FileExistsError as e:
        raise UsageError(str(e)) from e


def exact_summary(chain: ReversibleChain, t_max: Optional[int] = None, with_mixing=True, config=settings) \
    -> ExactSummary:
    try:
        pi = stationary_exact(chain)
        profile = mixing_profile(chain, t_max if t_max is not None else config['mixing_t_max'],
                                 max_states=config['max_mixing_states']) if with_mixing else None
        return ExactSummary(pi, pi_norm(pi), profile)
    except USAGE_ERRORS as e:
        raise UsageError(str(e)) from e


def estimate(chain: ReversibleChain, v: StateId, algo: Algorithm, seed: int = 0, walk_len: Optional[int] = None,
             t_max: Optional[int] = None, config=settings) -> tuple[EstimatorReport, float]:
    """Run one estimator and return its report together with the exact mass of v."""
    try:
        true_pi = stationary_exact(chain)[v]
        if walk_len is None:
            walk_len = _default_walk_len(chain, v, algo, t_max, config)
        log.info(f'Running {algo} on {chain} from state {v} with length {walk_len}.')
        report = run_algorithm(algo, chain, v, walk_len, config['epsilon'], config['delta'], seed,
                               config['call_budget'], config['burn_in'], config['return_time_trials'],
                               config['log_space_gamma'])
        return report, true_pi
    except USAGE_ERRORS as e:
        raise UsageError(str(e)) from e
    except RUN_ERRORS as e:
        raise ClickException(str(e)) from e


def _default_walk_len(chain: ReversibleChain, v: StateId, algo: Algorithm, t_max: Optional[int], config) -> int:
    if algo is Algorithm.RETURN_TIME:
        return config['truncation_factor'] * chain.n
    return suggest_walk_length(chain, v, config['epsilon'], config['delta'], config['c_constant'],
                               t_max if t_max is not None else config['mixing_t_max'])


def sweep(chain: ReversibleChain, v: StateId, algos: Sequence[Algorithm], csv_repo: SweepRecordCsvRepository,
          svg_path: Optional[Path] = None, seed: int = 0, config=settings) -> list[SweepRecord]:
    try:
        records = run_sweep(chain, v, algos, config['epsilon'], config['delta'], config, seed)
        csv_repo.save(records)
        if svg_path:
            generate_svg_chart(records, svg_path)
        return records
    except USAGE_ERRORS as e:
        raise UsageError(str(e)) from e
    except RUN_ERRORS as e:
        raise ClickException(str(e)) from e
