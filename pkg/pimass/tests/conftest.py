from pytest import fixture

from pimass.model.generators import torus_chain
from pimass.model.models import ReversibleChain, TorusSpec, Weighting


@fixture(scope='session')
def config():
    return {
        'epsilon': 0.25, 'delta': 0.1, 'c_constant': 1.0, 'burn_in': 0, 'log_space_gamma': False,
        'sample_cap': None, 'sample_cap_factor': 10, 'max_mixing_states': 20000, 'mixing_t_max': 100000,
        'expander_degree': 8, 'eps_attach': 0.01, 'construction_retries': 50, 'return_time_trials': 400,
        'truncation_factor': 50, 'start_length': 10, 'length_growth': 2 ** 0.5, 'trials_per_length': 3,
        'call_budget': 10 ** 8, 'workers': 1, 'record_wall_time': False
    }


@fixture(scope='session')
def single_state_chain():
    return ReversibleChain.from_edges(1, [(0, 0, 1.0)])


@fixture(scope='session')
def path_chain():
    return ReversibleChain.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])


@fixture(scope='session')
def two_state_chain():
    return ReversibleChain.from_edges(2, [(0, 1, 1.0), (0, 0, 1.0), (1, 1, 1.0)])


@fixture(scope='session')
def skewed_two_state_chain():
    # Strengths (2, 4), so pi = (1/3, 2/3)
    return ReversibleChain.from_edges(2, [(0, 1, 1.0), (0, 0, 1.0), (1, 1, 3.0)])


@fixture(scope='session')
def small_torus():
    return torus_chain(TorusSpec(8, 8))


@fixture(scope='session')
def skewed_torus():
    return torus_chain(TorusSpec(8, 8, shortcut_fraction=0.05, weighting=Weighting.INVERSE_UNIFORM, seed=3))
