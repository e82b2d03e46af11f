from click.testing import CliRunner

from pimass.app import cli


def _invoke(*args):
    return CliRunner().invoke(cli, list(args))


def _values(output: str) -> dict:
    return dict(line.split('=', 1) for line in output.splitlines())


def test_cli_version():
    result = _invoke('--version')
    assert result.exit_code == 0


def test_gen_torus(tmp_path):
    out = tmp_path / 'torus.chain'
    result = _invoke('gen', '--torus', '4x4', '--out', str(out))
    assert result.exit_code == 0
    assert out.read_text(encoding='utf-8').startswith('16 48\n')


def test_gen_star_expander(tmp_path):
    out = tmp_path / 'stars.chain'
    result = _invoke('gen', '--star-expander', '--n0', '20', '--d', '4', '--Delta', '6', '--seed', '2',
                     '--out', str(out))
    assert result.exit_code == 0
    assert out.read_text(encoding='utf-8').split('\n', 1)[0].split()[0] == str(20 + 40 * 5)


def test_gen_is_deterministic(tmp_path):
    for name in ('first.chain', 'second.chain'):
        _invoke('gen', '--torus', '5x5', '--shortcuts', '0.1', '--weighting', 'inverse_uniform', '--seed', '3',
                '--out', str(tmp_path / name))
    assert (tmp_path / 'first.chain').read_bytes() == (tmp_path / 'second.chain').read_bytes()


def test_gen_does_not_overwrite(tmp_path):
    out = tmp_path / 'torus.chain'
    out.write_text('keep', encoding='utf-8')
    result = _invoke('gen', '--torus', '4x4', '--out', str(out))
    assert result.exit_code == 2
    assert out.read_text(encoding='utf-8') == 'keep'


def test_chain_source_is_required(tmp_path):
    result = _invoke('gen', '--out', str(tmp_path / 'torus.chain'))
    assert result.exit_code == 2
    assert 'Choose exactly one of' in result.output


def test_chain_sources_are_exclusive(tmp_path):
    result = _invoke('gen', '--torus', '4x4', '--star-expander', '--out', str(tmp_path / 'torus.chain'))
    assert result.exit_code == 2


def test_malformed_torus_shape(tmp_path):
    result = _invoke('gen', '--torus', '4by4', '--out', str(tmp_path / 'torus.chain'))
    assert result.exit_code == 2
    assert 'ROWSxCOLS' in result.output


def test_invalid_star_expander(tmp_path):
    result = _invoke('gen', '--star-expander', '--n0', '5', '--d', '3', '--out', str(tmp_path / 'stars.chain'))
    assert result.exit_code == 2


def test_exact_without_mixing():
    result = _invoke('exact', '--torus', '3x3', '--no-mixing')
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == 'state,pi'
    assert len(lines) == 11
    assert lines[-1].startswith('pi_norm=0.33333333333333')
    assert 'tau=' not in result.stdout


def test_exact_with_mixing():
    result = _invoke('exact', '--torus', '6x6', '--top-k', '2')
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[:3] == ['state,pi', '0,0.027777777777777776', '1,0.027777777777777776']
    tau = int(next(line for line in lines if line.startswith('tau=')).split('=')[1])
    table = lines[lines.index('t,d_t') + 1:]
    assert len(table) == tau + 1
    assert table[0].startswith('0,')


def test_exact_from_chain_file(tmp_path):
    chain_file = tmp_path / 'path.chain'
    chain_file.write_text('3 4\n0 1 1\n1 2 1\n0 0 1\n2 2 1\n', encoding='utf-8')
    result = _invoke('exact', '--chain', str(chain_file), '--no-mixing')
    assert result.exit_code == 0
    assert result.stdout.splitlines()[1:4] == ['0,0.33333333333333331', '1,0.33333333333333331',
                                               '2,0.33333333333333331']


def test_exact_from_malformed_chain_file(tmp_path):
    chain_file = tmp_path / 'bad.chain'
    chain_file.write_text('3 4\n0 1 1\n', encoding='utf-8')
    result = _invoke('exact', '--chain', str(chain_file))
    assert result.exit_code == 2


def test_estimate():
    result = _invoke('estimate', '--torus', '6x6', '--algo', 'mass-approx', '--walk-len', '20', '--eps', '0.5',
                     '--delta', '0.3', '--seed', '1')
    assert result.exit_code == 0
    values = _values(result.stdout)
    assert values['algo'] == 'mass_approx'
    assert values['true_pi'] == repr(1 / 36)
    assert abs(float(values['estimate']) - 1 / 36) <= 0.5 / 36
    assert int(values['total_calls']) == int(values['step_calls']) + int(values['probe_calls'])


def test_estimate_is_deterministic_given_seed():
    args = ('estimate', '--torus', '5x5', '--shortcuts', '0.1', '--algo', 'full-mass-approx', '--walk-len', '10',
            '--eps', '0.5', '--delta', '0.3', '--seed', '4')
    first, second = _values(_invoke(*args).stdout), _values(_invoke(*args).stdout)
    first.pop('elapsed_s'), second.pop('elapsed_s')
    assert first == second


def test_estimate_with_derived_walk_length():
    result = _invoke('estimate', '--torus', '4x4', '--eps', '0.5', '--delta', '0.3')
    assert result.exit_code == 0
    assert int(_values(result.stdout)['step_calls']) > 0


def test_estimate_return_time():
    result = _invoke('estimate', '--torus', '4x4', '--algo', 'return-time', '--truncation', '500', '--trials', '50')
    assert result.exit_code == 0
    values = _values(result.stdout)
    assert values['samples'] == '50'
    assert values['probe_calls'] == '0'


def test_estimate_unknown_target():
    result = _invoke('estimate', '--torus', '3x3', '--target', '9', '--walk-len', '5')
    assert result.exit_code == 2


def test_estimate_with_walk_length_and_truncation():
    result = _invoke('estimate', '--torus', '3x3', '--algo', 'return-time', '--walk-len', '50', '--truncation', '60')
    assert result.exit_code == 2
    assert '--walk-len or --truncation' in result.output


def test_estimate_over_budget():
    result = _invoke('estimate', '--torus', '6x6', '--walk-len', '20', '--budget', '10')
    assert result.exit_code == 1
    assert 'Call budget of 10 exhausted' in result.output


def test_sweep(tmp_path):
    out, svg = tmp_path / 'sweep.csv', tmp_path / 'sweep.svg'
    result = _invoke('sweep', '--torus', '4x4', '--algo', 'mass-approx', '--algo', 'return-time', '--eps', '0.5',
                     '--delta', '0.3', '--workers', '1', '--out', str(out), '--svg', str(svg))
    assert result.exit_code == 0
    lines = out.read_text(encoding='utf-8').splitlines()
    assert lines[0].startswith('algo,walk_len,trial,seed')
    assert {line.split(',')[0] for line in lines[1:]} == {'mass_approx', 'return_time'}
    assert 'series-mass_approx' in svg.read_text(encoding='utf-8')


def test_sweep_does_not_depend_on_workers(tmp_path):
    for workers in ('1', '2'):
        _invoke('sweep', '--torus', '4x4', '--algo', 'mass-approx', '--algo', 'full-mass-approx', '--eps', '0.5',
                '--delta', '0.3', '--seed', '7', '--workers', workers, '--out', str(tmp_path / f'{workers}.csv'),
                '--svg', str(tmp_path / f'{workers}.svg'))
    assert (tmp_path / '1.csv').read_bytes() == (tmp_path / '2.csv').read_bytes()
    assert (tmp_path / '1.svg').read_bytes() == (tmp_path / '2.svg').read_bytes()
