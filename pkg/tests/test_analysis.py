"""Tests for divergences, entropies, escorts and the duality check."""

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from renyi_maxent.errors import DivergentIntegralError, IndexMismatchError, InvalidParameterError
from renyi_maxent.models import Kind, ProblemSpec
from renyi_maxent.services.analysis import (check_duality, escort, exponential_tilt, kl_divergence, make_pair,
                                            renyi_divergence, renyi_from_tsallis, shannon_entropy,
                                            tsallis_divergence, tsallis_entropy)
from renyi_maxent.services.reference import make_builtin
from renyi_maxent.services.solver import solve


@pytest.fixture(scope='module')
def half():
    return make_builtin('uniform', (0.0, 0.5))


@pytest.mark.parametrize('alpha', [0.3, 0.5, 2.0, 4.0])
def test_divergence_of_reference_with_itself(uniform, alpha):
    assert renyi_divergence(make_pair(uniform, uniform), alpha) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize('alpha', [0.5, 2.0])
def test_restricted_uniform_is_log_two_away(uniform, half, alpha):
    pair = make_pair(half, uniform)
    assert renyi_divergence(pair, alpha) == pytest.approx(math.log(2.0), abs=1e-10)
    assert kl_divergence(pair) == pytest.approx(math.log(2.0), abs=1e-10)


def test_support_violation_for_large_alpha(uniform, half):
    with pytest.raises(DivergentIntegralError):
        renyi_divergence(make_pair(uniform, half), 2.0)
    with pytest.raises(DivergentIntegralError):
        kl_divergence(make_pair(uniform, half))


def test_alpha_one_is_rejected(uniform):
    with pytest.raises(InvalidParameterError):
        renyi_divergence(make_pair(uniform, uniform), 1.0)


def test_renyi_approaches_kl_near_one(uniform):
    _, p = exponential_tilt(uniform, 0.62)
    pair = make_pair(p, uniform)
    kl = kl_divergence(pair)
    assert kl > 0.0
    for alpha in (1.0 - 1e-4, 1.0 + 1e-4):
        assert renyi_divergence(pair, alpha) == pytest.approx(kl, abs=1e-3)


def test_tsallis_divergence_maps_to_renyi(uniform):
    _, p = exponential_tilt(uniform, 0.4)
    pair = make_pair(p, uniform)
    for alpha in (0.5, 3.0):
        value = tsallis_divergence(pair, alpha)
        assert renyi_from_tsallis(value, alpha) == pytest.approx(renyi_divergence(pair, alpha), abs=1e-10)


def test_entropies_of_uniform():
    wide = make_builtin('uniform', (0.0, 2.0))
    assert shannon_entropy(wide, wide.support) == pytest.approx(math.log(2.0), abs=1e-10)
    unit = make_builtin('uniform', (0.0, 1.0))
    assert tsallis_entropy(unit, 0.5, unit.support) == pytest.approx(0.0, abs=1e-10)
    # ∫ (1/2)^2 over [0, 2] = 1/2, so T_2 = (1/2 - 1) / (1 - 2)
    assert tsallis_entropy(wide, 2.0, wide.support) == pytest.approx(0.5, abs=1e-10)


def test_escort_endpoints(uniform, half):
    assert escort(half, uniform, 1.0) is half
    assert escort(half, uniform, 0.0) is uniform


def test_escort_is_normalised(uniform):
    _, p = exponential_tilt(uniform, 0.7)
    e = escort(p, uniform, 0.4)
    xs = np.linspace(0.0, 1.0, 100_001)
    assert trapezoid(e(xs), xs) == pytest.approx(1.0, abs=1e-8)


def test_exponential_tilt_hits_mean(uniform):
    tau, p = exponential_tilt(uniform, 0.5)
    assert tau == pytest.approx(0.0, abs=1e-10)
    tau, p = exponential_tilt(uniform, 0.3)
    assert tau < 0.0
    xs = np.linspace(0.0, 1.0, 200_001)
    assert trapezoid(xs * p(xs), xs) == pytest.approx(0.3, abs=1e-8)


@pytest.mark.parametrize('alpha,m', [(1.5, 0.55), (2.0, 0.6), (4.0, 0.65)])
def test_duality_between_indices(uniform, alpha, m):
    sol_c = solve(ProblemSpec(kind=Kind.C, alpha=alpha, m=m, ref=uniform), n=256)
    sol_g = solve(ProblemSpec(kind=Kind.G, alpha=1.0 / alpha, m=m, ref=uniform), n=256)
    report = check_duality(sol_c, sol_g)
    assert report.gamma_gap <= 1e-6
    assert report.escort_gap_g <= 1e-6
    assert report.escort_gap_c <= 1e-6
    assert report.divergence_gap <= 1e-8
    assert sol_c.divergence == pytest.approx(sol_g.divergence, abs=1e-8)


def test_duality_index_mismatch(uniform):
    sol_c = solve(ProblemSpec(kind=Kind.C, alpha=2.0, m=0.6, ref=uniform), n=128)
    sol_g = solve(ProblemSpec(kind=Kind.G, alpha=0.6, m=0.6, ref=uniform), n=128)
    with pytest.raises(IndexMismatchError):
        check_duality(sol_c, sol_g)
    with pytest.raises(IndexMismatchError):
        check_duality(sol_g, sol_c)
