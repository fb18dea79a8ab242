import json

import pytest
from click.testing import CliRunner

from renyi_maxent.commands import create_cli
from renyi_maxent.services.reference import load_tabulated, make_builtin


@pytest.fixture(scope='session')
def uniform():
    return make_builtin('uniform', (0.0, 1.0))


@pytest.fixture(scope='session')
def exponential():
    return make_builtin('exponential', (1.0,))


@pytest.fixture(scope='session')
def gaussian():
    return make_builtin('gaussian', (0.0, 1.0))


@pytest.fixture(scope='session')
def gamma_ref():
    return make_builtin('gamma', (1.2, 1.0))


@pytest.fixture(scope='session')
def triangle():
    # trapezoid area 2, so every value is halved
    return load_tabulated([(0.0, 0.0), (0.5, 1.0), (1.0, 2.0), (2.0, 0.0)])


@pytest.fixture
def cli():
    return create_cli()


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def invoke(cli, runner, tmp_path):
    """Run a command writing its report to a file; return (result, report text)."""
    def run(*args):
        out = tmp_path / f'report-{len(list(tmp_path.iterdir()))}.out'
        result = runner.invoke(cli, [*args, '--output', str(out)])
        text = out.read_text(encoding='utf-8') if out.exists() else None
        return result, text
    return run


@pytest.fixture
def invoke_json(invoke):
    def run(*args):
        result, text = invoke(*args)
        return result, (json.loads(text) if text else None)
    return run
