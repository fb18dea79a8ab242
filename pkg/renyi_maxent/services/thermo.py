"""Legendre structure along a family of solved problems.

The entropy S of a solution is the log of its dual partition function,
which is also minus its divergence.  With the Lagrange multiplier λ and the
realised mean x̄, the Massieu potential is φ = S − λ x̄, and along a family
of constraint values the four relations

    dS/dλ = λ dx̄/dλ,   dS/dx̄ = λ,   dφ/dλ = −x̄,   dφ/dx̄ = −x̄ dλ/dx̄

hold.  They are checked here with central finite differences.
"""

from __future__ import annotations

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import PreconditionError, RenyiMaxentError
from ..models import Kind, PartitionQuery, ProblemSpec, ReferenceDistribution, ThermoReport, TsallisSolution
from ..tasks import run_batch
from .partition import partition_value
from .solver import solve


logger = logging.getLogger(__name__)

FAMILY_STEP = 0.025
TEMPERATURE_NOTE = 'lambda is not positive at every point; a temperature reading of 1/lambda needs lambda > 0'


def entropy_of_solution(sol: TsallisSolution) -> float:
    """S = log Z_{ξ+1}(γ*, x̄) for kind C, log Z_{−ξ}(γ*, x̄) for kind G."""
    spec = sol.spec
    query = PartitionQuery(nu=spec.dual_exponent, gamma=sol.gamma_star, xbar=sol.achieved_mean, ref=spec.ref)
    return math.log(partition_value(query).value)


def lambda_of_solution(sol: TsallisSolution) -> float:
    spec = sol.spec
    if spec.kind is Kind.C:
        return -(spec.xi + 1.0) * sol.gamma_star
    return spec.xi * sol.gamma_star


def default_family(ref: ReferenceDistribution, center: Optional[float] = None, count: int = 9) -> Tuple[float, ...]:
    """Evenly spaced constraint values, 0.025 reference standard deviations apart.

    Without a centre the family ends one step below the reference mean, a
    range every reference handles for both problem kinds.
    """
    h = FAMILY_STEP * ref.std
    if center is None:
        center = ref.mean - h * (count + 1) / 2.0
    offset = (count - 1) / 2.0
    return tuple(center + h * (i - offset) for i in range(count))


def central_difference(values: np.ndarray, grid: np.ndarray) -> Tuple[np.ndarray, int]:
    """Derivative on the family grid and the stencil half-width it used.

    Evenly spaced grids get the fourth-order five-point stencil
    (f[i-2] − 8f[i-1] + 8f[i+1] − f[i+2]) / 12h, defined from the third node to
    the third from last.  Uneven grids fall back to second-order differences.
    """
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    steps = np.diff(grid)
    h = float(steps.mean())
    if len(grid) >= 5 and np.allclose(steps, h, rtol=1e-9, atol=0.0):
        out = np.full(len(values), np.nan)
        out[2:-2] = (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * h)
        return out, 2
    return np.gradient(values, grid), 1


def _solve_member(spec: ProblemSpec, m: float, gamma_range, n) -> TsallisSolution:
    lo, hi = gamma_range if gamma_range else (None, None)
    try:
        return solve(spec.with_m(m), lo, hi, n)
    except RenyiMaxentError as exc:
        logger.error(f'thermo family member m={m:.12g} failed: {exc}')
        raise


def legendre_check(spec: ProblemSpec, ms: Sequence[float], gamma_range: Optional[Tuple[float, float]] = None,
                   n: Optional[int] = None, threads: Optional[int] = None) -> ThermoReport:
    """Solve ``spec`` for every m in ``ms`` and measure the four Legendre residuals."""
    ms = tuple(float(m) for m in ms)
    if len(ms) < 5:
        raise PreconditionError(f'a thermodynamic family needs at least 5 members, got {len(ms)}')
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise PreconditionError('family constraint values must be strictly increasing')

    solutions = run_batch(lambda m: _solve_member(spec, m, gamma_range, n), ms, threads)
    lam = np.array([lambda_of_solution(s) for s in solutions])
    xbar = np.array([s.achieved_mean for s in solutions])
    entropy = np.array([entropy_of_solution(s) for s in solutions])
    phi = entropy - lam * xbar
    consistency = max(abs(S + s.divergence) for S, s in zip(entropy, solutions))

    grid = np.array(ms)
    (dS, reach), (dlam, _), (dx, _), (dphi, _) = (central_difference(v, grid) for v in (entropy, lam, xbar, phi))
    interior = [s.interior for s in solutions]
    nodes = [i for i in range(reach, len(ms) - reach) if all(interior[i - reach:i + reach + 1])]
    if not nodes:
        raise PreconditionError('no interior family member has interior neighbours')

    def worst(values) -> float:
        return float(max(abs(v) for v in values))

    report = ThermoReport(
        kind=spec.kind,
        alpha=spec.alpha,
        ms=ms,
        lambdas=tuple(lam),
        xbars=tuple(xbar),
        entropies=tuple(entropy),
        massieu=tuple(phi),
        interior=tuple(interior),
        residual_euler=worst(dS[i] / dlam[i] - lam[i] * dx[i] / dlam[i] for i in nodes),
        residual_dSdx=worst(dS[i] / dx[i] - lam[i] for i in nodes),
        residual_dphidlam=worst(dphi[i] / dlam[i] + xbar[i] for i in nodes),
        residual_dphidx=worst(dphi[i] / dx[i] + xbar[i] * dlam[i] / dx[i] for i in nodes),
        entropy_consistency=float(consistency),
        notes=() if np.all(lam > 0) else (TEMPERATURE_NOTE,),
    )
    logger.info(f'legendre check {spec.kind.value} alpha={spec.alpha:g}: passed={report.passed}')
    return report
