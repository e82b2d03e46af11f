from unittest.mock import patch

import pytest
from click import ClickException, UsageError

from pimass import services
from pimass.model.estimation.sum_approx import InconsistentGammaError
from pimass.model.models import Algorithm, ReversibleChain, StarExpanderSpec, TorusSpec
from pimass.repositories import ChainFileRepository, SweepRecordCsvRepository


def test_generate_torus():
    assert services.generate_chain(TorusSpec(3, 4)).n == 12


def test_generate_star_expander():
    spec = StarExpanderSpec(10, 4, 5, seed=1)
    assert services.generate_chain(spec).n == 10 + 20 * 4


def test_generate_with_too_many_shortcuts():
    with pytest.raises(UsageError):
        services.generate_chain(TorusSpec(2, 2, shortcut_fraction=2.0))


def test_write_and_load_chain(path_chain, tmp_path):
    repo = ChainFileRepository(tmp_path / 'path.chain')
    services.write_chain(path_chain, repo)
    assert services.load_chain(repo) == path_chain


def test_write_existing_chain(path_chain, tmp_path):
    repo = ChainFileRepository(tmp_path / 'path.chain')
    services.write_chain(path_chain, repo)
    with pytest.raises(UsageError):
        services.write_chain(path_chain, repo)


def test_load_missing_chain(tmp_path):
    with pytest.raises(UsageError):
        services.load_chain(ChainFileRepository(tmp_path / 'missing.chain'))


def test_exact_summary(path_chain, config):
    summary = services.exact_summary(path_chain, with_mixing=False, config=config)
    assert summary.pi.probs.tolist() == [0.25, 0.5, 0.25]
    assert summary.norm == pytest.approx(0.375 ** 0.5)
    assert summary.profile is None


def test_exact_summary_of_periodic_chain(path_chain, config):
    with pytest.raises(UsageError):
        services.exact_summary(path_chain, t_max=50, config=config)


def test_exact_summary_of_disconnected_chain(config):
    chain = ReversibleChain.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(UsageError):
        services.exact_summary(chain, config=config)


def test_estimate(small_torus, config):
    report, true_pi = services.estimate(small_torus, 0, Algorithm.MASS_APPROX, seed=2, walk_len=15, config=config)
    assert true_pi == 1 / 64
    assert report.step_calls == 15 * report.samples


def test_estimate_return_time_truncation_defaults_to_multiple_of_n(path_chain, config):
    # Walks from an end of the path return after 2 or more steps, never truncated at 150
    report, true_pi = services.estimate(path_chain, 0, Algorithm.RETURN_TIME, seed=0,
                                        config=dict(config, return_time_trials=200))
    assert true_pi == 0.25
    assert report.repeats == 200


def test_estimate_over_budget(small_torus, config):
    with pytest.raises(ClickException):
        services.estimate(small_torus, 0, Algorithm.MASS_APPROX, walk_len=15, config=dict(config, call_budget=10))


def test_estimate_unknown_state(small_torus, config):
    with pytest.raises(UsageError):
        services.estimate(small_torus, 64, Algorithm.MASS_APPROX, walk_len=15, config=config)


def test_sweep_writes_records_and_chart(single_state_chain, config, tmp_path):
    csv_repo = SweepRecordCsvRepository(tmp_path / 'sweep.csv')
    records = services.sweep(single_state_chain, 0, [Algorithm.MASS_APPROX], csv_repo, tmp_path / 'sweep.svg',
                             config=config)
    assert csv_repo.list() == records
    assert (tmp_path / 'sweep.svg').is_file()


def test_sweep_with_corrupted_gamma(small_torus, config, tmp_path):
    csv_repo = SweepRecordCsvRepository(tmp_path / 'sweep.csv')
    with patch('pimass.services.run_sweep', side_effect=InconsistentGammaError('Gamma of state 3 changed.')):
        with pytest.raises(ClickException, match='Gamma of state 3 changed.'):
            services.sweep(small_torus, 0, [Algorithm.MASS_APPROX], csv_repo, config=config)
    assert not (tmp_path / 'sweep.csv').exists()


def test_sweep_without_records(small_torus, config, tmp_path):
    csv_repo = SweepRecordCsvRepository(tmp_path / 'sweep.csv')
    with pytest.raises(UsageError):
        services.sweep(small_torus, 0, [Algorithm.MASS_APPROX], csv_repo, config=dict(config, call_budget=10))
