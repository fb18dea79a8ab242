"""Integration tests for the command line."""

import dataclasses
import json
import math

import pytest

from renyi_maxent.commands import verify
from renyi_maxent.services.suites import run_suite
from renyi_maxent.utils import render_json


SOLVE = ('solve', '--ref', 'uniform:0,1', '--grid-n', '256')


def test_solve_at_reference_mean(invoke_json):
    result, report = invoke_json(*SOLVE, '--alpha', '0.5', '--m', '0.5')
    assert result.exit_code == 0, result.output
    assert report['gamma_star'] == pytest.approx(0.0, abs=1e-8)
    assert report['divergence'] == pytest.approx(0.0, abs=1e-8)
    assert report['kind'] == 'C'
    assert report['route'] == 'direct'
    assert report['xi'] == pytest.approx(-2.0)
    assert len(report['density_samples']) == 512


def test_solve_generalized_constraint(invoke_json):
    result, report = invoke_json(*SOLVE, '--alpha', '0.5', '--m', '0.7', '--kind', 'G')
    assert result.exit_code == 0, result.output
    assert report['kind'] == 'G'
    assert report['Z_solution'] == pytest.approx(report['Z_dual'], rel=1e-8)
    assert report['divergence'] == pytest.approx(-math.log(report['Z_dual']), abs=1e-8)
    assert report['lambda'] < 0.0


@pytest.mark.parametrize('args', [
    SOLVE + ('--alpha', '1.0', '--m', '0.6'),
    SOLVE + ('--alpha', '0.5'),
    ('--threads', '0') + SOLVE + ('--alpha', '0.5', '--m', '0.6'),
    SOLVE + ('--alpha', '0.5', '--m', '0.6', '--gamma-range', '3,1'),
    ('solve', '--ref', 'cauchy:0,1', '--alpha', '0.5', '--m', '0.6'),
])
def test_usage_errors(invoke, args):
    result, text = invoke(*args)
    assert result.exit_code == 1
    assert not text


def test_solve_is_deterministic(invoke):
    args = SOLVE + ('--alpha', '2', '--m', '0.6')
    _, first = invoke(*args)
    _, second = invoke(*args)
    assert first == second


def test_json_report_is_canonical(invoke):
    result, text = invoke(*SOLVE, '--alpha', '2', '--m', '0.6')
    assert result.exit_code == 0
    parsed = json.loads(text)
    assert render_json(parsed) == text


def test_csv_density_table(invoke):
    result, text = invoke(*SOLVE, '--alpha', '0.5', '--m', '0.6', '--format', 'csv')
    assert result.exit_code == 0
    lines = text.splitlines()
    assert lines[0] == 'x,p'
    table = [line for line in lines[1:] if not line.startswith('#')]
    assert len(table) == 512
    assert any(line.startswith('# gamma_star: ') for line in lines)


def test_sweep_classical_mean_decreases(invoke_json):
    result, report = invoke_json('sweep', '--ref', 'uniform:0,1', '--alpha', '0.5', '--m', '0.6',
                                 '--gamma-range=-3,3', '--grid-n', '121')
    assert result.exit_code == 0, result.output
    assert len(report['rows']) == 121
    means = [row['E_classical'] for row in report['rows'] if row['E_classical'] is not None]
    assert len(means) > 10
    assert all(b < a for a, b in zip(means, means[1:]))
    assert report['non_injective'] == []
    assert len(report['intervals']) == 1


def test_sweep_generalized_on_gamma_reference(invoke):
    result, text = invoke('sweep', '--ref', 'gamma:1.2,1', '--alpha', '0.5', '--kind', 'G', '--m', '1.0',
                          '--gamma-range=-0.5,0.5', '--grid-n', '64', '--format', 'csv')
    assert result.exit_code == 0, result.output
    lines = text.splitlines()
    assert lines[0] == 'gamma,dual,Z,E_classical,E_generalized,defined'
    assert any(line.startswith('# non_injective:') for line in lines)


def test_sweep_without_defined_point(invoke):
    result, _ = invoke('sweep', '--ref', 'uniform:0,1', '--alpha', '0.5', '--m', '0.5',
                       '--gamma-range', '10,20', '--grid-n', '64')
    assert result.exit_code == 2


def test_verify_unknown_suite(invoke):
    result, _ = invoke('verify', '--suite', 'nonsense')
    assert result.exit_code == 1


def test_verify_duality_suite(invoke_json):
    result, report = invoke_json('verify', '--suite', 'duality', '--alpha', '2', '--m', '0.6')
    assert result.exit_code == 0, result.output
    assert report['passed'] is True
    assert [s['name'] for s in report['suites']] == ['duality']


def test_duality_command(invoke_json):
    result, report = invoke_json('duality', '--alpha', '2', '--m', '0.6', '--grid-n', '256')
    assert result.exit_code == 0, result.output
    assert report['passed'] is True
    assert report['divergence_c'] == pytest.approx(report['divergence_g'], abs=1e-8)


def test_divergence_command(invoke_json):
    result, report = invoke_json('divergence', '--ref', 'uniform:0,1', '--other', 'uniform:0,0.5',
                                 '--alpha', '2')
    assert result.exit_code == 0, result.output
    assert report['renyi'] == pytest.approx(math.log(2.0), abs=1e-10)
    assert report['kl'] == pytest.approx(math.log(2.0), abs=1e-10)
    assert report['renyi_from_tsallis'] == pytest.approx(report['renyi'], abs=1e-10)
    assert report['undefined'] == {}


def test_divergence_reports_undefined_quantities(invoke_json):
    result, report = invoke_json('divergence', '--ref', 'uniform:0,0.5', '--other', 'uniform:0,1',
                                 '--alpha', '2')
    assert result.exit_code == 0, result.output
    assert report['renyi'] is None
    assert 'renyi' in report['undefined']
    assert report['shannon_p'] == pytest.approx(0.0, abs=1e-10)


def test_solve_tabulated_reference(invoke_json, tmp_path):
    table = tmp_path / 'triangle.tsv'
    table.write_text('# x\tq\n0\t0\n0.5\t1\n1\t2\n2\t0\n', encoding='utf-8')
    result, report = invoke_json('solve', '--ref', f'@{table}', '--alpha', '0.5', '--m', '0.9',
                                 '--grid-n', '256')
    assert result.exit_code == 0, result.output
    assert report['achieved_mean'] == pytest.approx(0.9, abs=1e-6)


@pytest.mark.slow
def test_thermo_command(invoke_json):
    result, report = invoke_json('thermo', '--ref', 'uniform:0,1', '--alpha', '0.5', '--grid-n', '128')
    assert result.exit_code == 0, result.output
    assert report['passed'] is True
    assert len(report['family']) == 9
    assert report['notes'] == []


def test_duality_command_reports_failure(invoke_json, monkeypatch):
    compare = verify.check_duality
    monkeypatch.setattr(verify, 'check_duality',
                        lambda c, g: dataclasses.replace(compare(c, g), gamma_gap=1.0))
    result, report = invoke_json('duality', '--alpha', '2', '--m', '0.6', '--grid-n', '256')
    assert result.exit_code == 2
    assert report['passed'] is False


def test_json_floats_keep_seventeen_digits():
    text = render_json({'b': 0.1, 'a': [1.0, -2.0, 1e20], 'c': {}, 'd': None})
    assert '"b": 0.10000000000000001' in text
    assert '    1.0,\n    -2.0,\n    1e+20\n' in text
    assert json.loads(text) == {'a': [1.0, -2.0, 1e20], 'b': 0.1, 'c': {}, 'd': None}
    assert render_json(json.loads(text)) == text


@pytest.mark.slow
@pytest.mark.parametrize('name', ['normalization', 'convexity', 'duality', 'legendre'])
def test_default_suites_pass(name):
    result = run_suite(name, threads=2, seed=0)
    assert result.passed, result.detail


@pytest.mark.slow
def test_default_oracle_suite_passes():
    result = run_suite('oracle', threads=2, seed=0)
    assert result.passed, result.detail
