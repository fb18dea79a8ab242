"""Tests for the built-in and tabulated references."""

import numpy as np
import pytest

from renyi_maxent.errors import InvalidParameterError
from renyi_maxent.services.analysis import total_mass
from renyi_maxent.services.reference import load_tabulated, make_builtin
from renyi_maxent.utils import read_tabulated


def test_uniform_reference(uniform):
    assert uniform(0.3) == pytest.approx(1.0)
    assert total_mass(uniform) == pytest.approx(1.0, abs=1e-12)
    assert uniform.mean == pytest.approx(0.5)
    assert uniform.std == pytest.approx(np.sqrt(1 / 12))


def test_exponential_reference(exponential):
    assert exponential(1.0) == pytest.approx(np.exp(-1.0))
    assert total_mass(exponential) == pytest.approx(1.0, abs=1e-8)
    assert exponential.truncated
    assert exponential.truncation_mass < 1e-30
    assert 'omitted mass' in exponential.label


def test_gaussian_truncated_to_twelve_sigma(gaussian):
    lo, hi = gaussian.support.bounds
    assert (lo, hi) == (-12.0, 12.0)
    assert gaussian.truncation_mass < 1e-30
    assert gaussian.mean == pytest.approx(0.0, abs=1e-10)
    assert gaussian.std == pytest.approx(1.0, abs=1e-8)


def test_gamma_reference(gamma_ref):
    assert total_mass(gamma_ref) == pytest.approx(1.0, abs=1e-8)
    assert gamma_ref.mean == pytest.approx(1.2, abs=1e-7)


@pytest.mark.parametrize('family,params,parameter', [
    ('uniform', (1.0, 1.0), 'hi'),
    ('exponential', (-1.0,), 'rate'),
    ('gaussian', (0.0, 0.0), 'sigma'),
    ('gamma', (0.0, 1.0), 'shape'),
    ('cauchy', (0.0, 1.0), 'family'),
])
def test_invalid_builtin_parameters(family, params, parameter):
    with pytest.raises(InvalidParameterError) as exc:
        make_builtin(family, params)
    assert exc.value.parameter == parameter


@pytest.mark.parametrize('name', ['uniform', 'exponential', 'gaussian', 'gamma_ref', 'triangle'])
def test_density_nonnegative_and_zero_outside(request, name):
    ref = request.getfixturevalue(name)
    lo, hi = ref.support.bounds
    rng = np.random.default_rng(3)
    inside = rng.uniform(lo, hi, 10_000)
    assert np.all(ref(inside) >= 0.0)
    outside = np.concatenate([lo - rng.uniform(0.01, 5.0, 100), hi + rng.uniform(0.01, 5.0, 100)])
    assert np.all(ref(outside) == 0.0)


def test_tabulated_constant_rows_rescaled():
    ref = load_tabulated([(0.0, 1.0), (0.5, 1.0), (1.0, 1.0), (1.5, 1.0)])
    assert ref(0.7) == pytest.approx(2.0 / 3.0)
    assert ref.scale_factor == pytest.approx(2.0 / 3.0)
    assert ref.support.bounds == (0.0, 1.5)


def test_tabulated_triangle(triangle):
    assert triangle(1.0) == pytest.approx(1.0)
    assert triangle(0.5) == pytest.approx(0.5)
    assert triangle.scale_factor == pytest.approx(0.5)
    assert total_mass(triangle) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize('rows,parameter', [
    ([(0.0, 1.0), (1.0, 1.0), (1.0, 1.0), (2.0, 1.0)], 'x'),
    ([(0.0, 1.0), (1.0, -1.0), (2.0, 1.0), (3.0, 1.0)], 'q'),
    ([(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)], 'rows'),
    ([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)], 'q'),
])
def test_tabulated_errors(rows, parameter):
    with pytest.raises(InvalidParameterError) as exc:
        load_tabulated(rows)
    assert exc.value.parameter == parameter


def test_read_tabulated_file(tmp_path):
    path = tmp_path / 'q.tsv'
    path.write_text('# x\tq\n0\t1\n0.5\t1\n\n1\t1\n1.5\t1\n', encoding='utf-8')
    ref = read_tabulated(str(path))
    assert ref(1.0) == pytest.approx(2.0 / 3.0)


def test_read_tabulated_missing_file(tmp_path):
    with pytest.raises(InvalidParameterError) as exc:
        read_tabulated(str(tmp_path / 'absent.tsv'))
    assert exc.value.parameter == 'ref'
