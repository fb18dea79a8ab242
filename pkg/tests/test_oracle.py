"""Tests for the brute-force oracle on a discretised simplex."""

import numpy as np
import pytest

from renyi_maxent.errors import InfeasibleConstraintError, InvalidParameterError
from renyi_maxent.models import GridProblem, Kind, ProblemSpec
from renyi_maxent.services.oracle import discrete_renyi, escort_weights, grid_problem, oracle_solve
from renyi_maxent.services.solver import solve


NODES = 200


def _total_variation(weights, density, nodes):
    cell = np.asarray(density(nodes), dtype=float)
    cell = cell / cell.sum()
    return 0.5 * float(np.abs(weights - cell).sum())


def test_grid_problem_midpoints(uniform):
    gp = grid_problem(uniform, 0.5, 0.6, Kind.C, n=NODES)
    assert gp.nodes[0] == pytest.approx(0.5 / NODES)
    assert gp.nodes[-1] == pytest.approx(1.0 - 0.5 / NODES)
    assert gp.q_weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_grid_problem_too_coarse(uniform):
    with pytest.raises(InvalidParameterError):
        grid_problem(uniform, 0.5, 0.6, Kind.C, n=50)


def test_discrete_renyi_and_escort():
    q = np.full(4, 0.25)
    p = np.array([0.5, 0.5, 0.0, 0.0])
    assert discrete_renyi(p, q, 2.0) == pytest.approx(np.log(2.0))
    assert discrete_renyi(p, q, 0.5) == pytest.approx(np.log(2.0))
    assert np.allclose(escort_weights(p, q, 1.0), p)
    assert np.allclose(escort_weights(p, q, 0.5)[:2], 0.5)


def test_unconstrained_mean_returns_reference(uniform):
    gp = grid_problem(uniform, 0.5, 0.5, Kind.C, n=NODES)
    gp = GridProblem(nodes=gp.nodes, q_weights=gp.q_weights, alpha=0.5,
                     m=float(np.dot(gp.nodes, gp.q_weights)), kind=Kind.C)
    found = oracle_solve(gp, iterations=2000, restarts=2, seed=1, threads=1)
    assert np.max(np.abs(found.weights - gp.q_weights)) <= 1e-6
    assert found.divergence == pytest.approx(0.0, abs=1e-8)


def test_mean_outside_nodes(uniform):
    gp = grid_problem(uniform, 0.5, 0.9999, Kind.C, n=NODES)
    with pytest.raises(InfeasibleConstraintError):
        oracle_solve(gp, iterations=10, restarts=1)


@pytest.mark.slow
@pytest.mark.parametrize('kind,alpha,m', [(Kind.C, 0.5, 0.7), (Kind.G, 2.0, 0.6)])
def test_oracle_agrees_with_closed_form(uniform, kind, alpha, m):
    sol = solve(ProblemSpec(kind=kind, alpha=alpha, m=m, ref=uniform), n=512)
    gp = grid_problem(uniform, alpha, m, kind, n=NODES)
    found = oracle_solve(gp, iterations=20000, restarts=2, seed=7, threads=2)
    assert found.residual <= 1e-6
    assert found.divergence == pytest.approx(sol.divergence, abs=1e-3)
    assert _total_variation(found.weights, sol.density, gp.nodes) <= 1e-2


@pytest.mark.slow
def test_restarts_agree_for_convex_problem(uniform):
    gp = grid_problem(uniform, 0.5, 0.65, Kind.C, n=NODES)
    found = oracle_solve(gp, iterations=20000, restarts=3, seed=3, threads=3)
    assert len(found.restart_divergences) == 3
    assert max(found.restart_divergences) - min(found.restart_divergences) <= 1e-5
