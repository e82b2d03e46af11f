from __future__ import annotations

import functools
import sys
from pathlib import Path

import click
from click import UsageError

from pimass import services
from pimass.config import settings
from pimass.model.models import Algorithm, ReversibleChain, StarExpanderSpec, TorusSpec, Variant, Weighting, \
    DomainError
from pimass.model.reporting import generate_estimate_report
from pimass.repositories import ChainFileRepository, SweepRecordCsvRepository

ALGO_NAMES = {str(algo).replace('_', '-'): algo for algo in Algorithm}


def chain_options(fun):
    @click.option('chain_file', '--chain', type=click.Path(exists=True, dir_okay=False),
                  help='Chain file with a header line "n m" and one "u v weight" line per edge.')
    @click.option('torus', '--torus', metavar='RxC', help='Generate a ROWS x COLS torus chain.')
    @click.option('star_expander', '--star-expander', is_flag=True,
                  help='Generate a star-expander chain, see --n0, --d, --Delta and --variant.')
    @click.option('shortcuts', '--shortcuts', type=click.FloatRange(0), default=0.0,
                  help='Random torus shortcuts as a fraction of the number of nodes.')
    @click.option('weighting', '--weighting', type=click.Choice([str(w) for w in Weighting]), default='uniform',
                  help='Torus arc weights: all 1, or 1/X with X uniform on (0, 1].')
    @click.option('n0', '--n0', type=click.IntRange(1), default=100, help='Nodes of the underlying expander.')
    @click.option('degree', '--d', type=click.IntRange(3), default=None,
                  help='Degree of the underlying expander, defaults to 8.')
    @click.option('star_size', '--Delta', type=click.IntRange(2), default=8, help='Nodes per star besides its center.')
    @click.option('variant', '--variant', type=click.Choice([str(v) for v in Variant]), default='G',
                  help='G, or G_prime built on n0 / 2 nodes and padded to the size of G.')
    @click.option('eps_attach', '--eps-attach', type=float, default=None,
                  help='Total weight attaching the padding nodes of G_prime, defaults to 0.01.')
    @click.option('seed', '--seed', type=click.IntRange(0), default=0, help='Seed of generators and estimators.')
    @functools.wraps(fun)
    def wrapper(*args, chain_file, torus, star_expander, shortcuts, weighting, n0, degree, star_size, variant,
                eps_attach, seed, **kwargs):
        chain = resolve_chain(chain_file, torus, star_expander, shortcuts, Weighting(weighting), n0, degree,
                              star_size, Variant(variant), eps_attach, seed)
        return fun(*args, chain=chain, seed=seed, **kwargs)

    return wrapper


def resolve_chain(chain_file, torus, star_expander, shortcuts, weighting, n0, degree, star_size, variant,
                  eps_attach, seed) -> ReversibleChain:
    if sum(map(bool, (chain_file, torus, star_expander))) != 1:
        raise UsageError('Choose exactly one of --chain, --torus and --star-expander.')
    if chain_file:
        return services.load_chain(ChainFileRepository(Path(str(chain_file))))
    try:
        if torus:
            rows, cols = _parse_torus(torus)
            spec = TorusSpec(rows, cols, shortcuts, weighting, seed)
        else:
            spec = StarExpanderSpec(n0, degree if degree else settings['expander_degree'], star_size, variant,
                                    eps_attach if eps_attach is not None else settings['eps_attach'], seed)
    except DomainError as e:
        raise UsageError(str(e)) from e
    return services.generate_chain(spec)


def _parse_torus(value: str) -> tuple[int, int]:
    try:
        rows, cols = value.lower().split('x')
        return int(rows), int(cols)
    except ValueError as e:
        raise UsageError(f'--torus expects ROWSxCOLS, e.g. 100x100, got "{value}".') from e


def accuracy_options(fun):
    @click.option('epsilon', '--eps', type=click.FloatRange(0, 1, min_open=True, max_open=True), default=None,
                  help='Relative accuracy, defaults to 0.25.')
    @click.option('delta', '--delta', type=click.FloatRange(0, 1, min_open=True, max_open=True),
                  default=None, help='Failure probability, defaults to 0.1.')
    @click.option('budget', '--budget', type=click.IntRange(1), default=None,
                  help='Ceiling on step() plus probe() calls per run (per algorithm in a sweep).')
    @click.option('burn_in', '--burn-in', type=click.IntRange(0), default=None,
                  help='Steps FullMassApprox walks before it starts sampling.')
    @click.option('target', '--target', type=click.IntRange(0), default=0, help='State whose mass is estimated.')
    @functools.wraps(fun)
    def wrapper(*args, epsilon, delta, budget, burn_in, **kwargs):
        config = _overrides(epsilon=epsilon, delta=delta, call_budget=budget, burn_in=burn_in)
        return fun(*args, config=config, **kwargs)

    return wrapper


def _overrides(**values) -> dict:
    return dict(settings, **{key: value for key, value in values.items() if value is not None})


@click.group(context_settings=dict(help_option_names=["-h", "--help"]))
@click.version_option(prog_name='pimass', package_name='pimass')
def cli():
    """
    \b
    pimass estimates the stationary probability of a single state of a time-reversible Markov chain
    from step() and probe() queries, and compares the estimators against exact values.
    """


@cli.command()
@chain_options
@click.option('out', '--out', type=click.Path(dir_okay=False), required=True, help='Chain file to write.')
def gen(chain: ReversibleChain, seed: int, out: str):
    """Generate a chain and write it to a file."""
    services.write_chain(chain, ChainFileRepository(Path(out)))
    click.echo(f'Wrote {chain} to {out}.')


@cli.command()
@chain_options
@click.option('top_k', '--top-k', type=click.IntRange(1), default=None, help='Print only the k heaviest states.')
@click.option('t_max', '--t-max', type=click.IntRange(0), default=None, help='Horizon of the d(t) table.')
@click.option('with_mixing', '--mixing/--no-mixing', default=True, help='Compute the d(t) table and mixing time.')
def exact(chain: ReversibleChain, seed: int, top_k: int, t_max: int, with_mixing: bool):
    """Print the exact stationary distribution, its norm and the d(t) table."""
    summary = services.exact_summary(chain, t_max, with_mixing)
    probs = summary.pi.probs
    states = sorted(range(chain.n), key=lambda u: (-probs[u], u))[:top_k] if top_k else range(chain.n)
    click.echo('state,pi')
    for u in states:
        click.echo(f'{u},{probs[u]:.17g}')
    click.echo(f'pi_norm={summary.norm:.17g}')
    if summary.profile:
        click.echo(f'tau={summary.profile.tau}')
        click.echo('t,d_t')
        for t, d in enumerate(summary.profile.d_values):
            click.echo(f'{t},{d:.17g}')


@cli.command()
@chain_options
@accuracy_options
@click.option('algo', '--algo', type=click.Choice(list(ALGO_NAMES)), default='mass-approx', help='Estimator to run.')
@click.option('walk_len', '--walk-len', type=click.IntRange(1), default=None,
              help='Walk length t, or the truncation of the return-time baseline. Derived from the mixing time '
                   'when omitted.')
@click.option('truncation', '--truncation', type=click.IntRange(1), default=None,
              help='Truncation of return-time walks, an alias of --walk-len.')
@click.option('trials', '--trials', type=click.IntRange(1), default=None, help='Walks of the return-time baseline.')
@click.option('c_constant', '--c-const', type=click.FloatRange(0, min_open=True), default=None,
              help='Constant c of the walk length derived from the mixing time.')
@click.option('t_max', '--t-max', type=click.IntRange(1), default=None, help='Horizon of the mixing computation.')
def estimate(chain: ReversibleChain, seed: int, config: dict, target: int, algo: str, walk_len: int, truncation: int,
             trials: int, c_constant: float, t_max: int):
    """Run one estimator and print its report as key=value lines."""
    if walk_len is not None and truncation is not None:
        raise UsageError('Give either --walk-len or --truncation, not both.')
    config.update({key: value for key, value in (('return_time_trials', trials), ('c_constant', c_constant))
                   if value is not None})
    algorithm = ALGO_NAMES[algo]
    report, true_pi = services.estimate(chain, target, algorithm, seed, walk_len or truncation, t_max, config)
    click.echo(generate_estimate_report(algorithm, report, true_pi), nl=False)


@cli.command()
@chain_options
@accuracy_options
@click.option('algos', '--algo', type=click.Choice(list(ALGO_NAMES)), multiple=True,
              help='Estimator to sweep, repeatable. Defaults to all.')
@click.option('out', '--out', type=click.Path(dir_okay=False), required=True, help='CSV file of sweep records.')
@click.option('svg', '--svg', type=click.Path(dir_okay=False), default=None, help='SVG chart of error against cost.')
@click.option('workers', '--workers', type=click.IntRange(1), default=None, help='Worker processes.')
@click.option('wall_time', '--wall-time', is_flag=True, help='Record wall time per trial.')
def sweep(chain: ReversibleChain, seed: int, config: dict, target: int, algos: tuple[str], out: str, svg: str,
          workers: int, wall_time: bool):
    """Sweep walk lengths on a sqrt(2) schedule and record error against query cost."""
    config.update({'record_wall_time': wall_time or config['record_wall_time']})
    if workers:
        config['workers'] = workers
    algorithms = [ALGO_NAMES[a] for a in algos] if algos else list(Algorithm)
    records = services.sweep(chain, target, algorithms, SweepRecordCsvRepository(Path(out)),
                             Path(svg) if svg else None, seed, config)
    click.echo(f'Wrote {len(records)} sweep records to {out}.')


if __name__ == "__main__":
    sys.exit(cli())
