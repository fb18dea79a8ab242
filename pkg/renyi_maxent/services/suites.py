"""Verification suites run by the ``verify`` command.

Each suite solves a fixed set of problems on the built-in references and
returns a ``SuiteResult`` carrying its worst residuals.  Suites accept
``alpha`` and ``m`` overrides so a single case can be rerun from the
command line.
"""

from __future__ import annotations

import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import Config
from ..errors import RenyiMaxentError
from ..models import Kind, PartitionQuery, ProblemSpec, ReferenceDistribution, SuiteResult
from ..tasks import run_batch
from .analysis import check_duality, total_mass
from .oracle import grid_problem, oracle_solve
from .partition import partition_value
from .reference import make_builtin
from .solver import solve
from .thermo import default_family, legendre_check


logger = logging.getLogger(__name__)

ALPHAS = (0.3, 0.5, 0.8)
DUALITY_ALPHAS = (1.5, 2.0, 4.0)
DUALITY_MS = (0.55, 0.6, 0.65)
CONVEXITY_TRIPLES = 100
ORACLE_GRID = 1000

# feasible constraint values per reference; the exponential ones stay below its mean
NORMALIZATION_MS = {'uniform': (0.4, 0.45, 0.6), 'exponential': (0.8, 0.9, 0.95)}
# γ ranges on which every tested partition function is finite, at x̄ = CONVEXITY_XBAR
CONVEXITY_GAMMAS = {'uniform': (-1.5, 1.5), 'exponential': (0.0, 0.9)}
CONVEXITY_XBAR = {'uniform': 0.5, 'exponential': 0.9}

ORACLE_CASES = (
    (Kind.C, 0.5, 0.7),
    (Kind.C, 0.5, 0.4),
    (Kind.C, 0.3, 0.6),
    (Kind.C, 2.0, 0.6),
    (Kind.G, 0.5, 0.6),
    (Kind.G, 0.5, 0.4),
    (Kind.G, 2.0, 0.6),
    (Kind.G, 1.5, 0.65),
)


def builtin_references() -> Dict[str, ReferenceDistribution]:
    return {
        'uniform': make_builtin('uniform', (0.0, 1.0)),
        'exponential': make_builtin('exponential', (1.0,)),
    }


def _pick(default: Sequence[float], override: Optional[float]) -> Tuple[float, ...]:
    return tuple(default) if override is None else (override,)


def _worst(residuals: Iterable[Dict[str, float]]) -> Dict[str, float]:
    merged: Dict[str, float] = {}
    for entry in residuals:
        for key, value in entry.items():
            merged[key] = max(merged.get(key, 0.0), float(value))
    return merged


def normalization_suite(alpha: Optional[float] = None, m: Optional[float] = None,
                        threads: Optional[int] = None, seed: Optional[int] = None) -> SuiteResult:
    """Every solve integrates to one, meets its mean and has divergence −log Z_dual."""
    refs = builtin_references()
    cases = [(kind, a, mv, name)
             for name in refs
             for kind in (Kind.C, Kind.G)
             for a in _pick(ALPHAS, alpha)
             for mv in _pick(NORMALIZATION_MS[name], m)]

    def run(case):
        kind, a, mv, name = case
        sol = solve(ProblemSpec(kind=kind, alpha=a, m=mv, ref=refs[name]))
        return {
            'mass': abs(total_mass(sol.density) - 1.0),
            'mean': sol.mean_residual,
            'dual': abs(sol.divergence + np.log(sol.Z_dual)),
        }

    worst = _worst(run_batch(run, cases, threads))
    passed = worst['mass'] <= 1e-8 and worst['mean'] <= 1e-6 and worst['dual'] <= 1e-8
    return SuiteResult(name='normalization', passed=passed, residuals=worst, detail=f'{len(cases)} solves')


def convexity_suite(alpha: Optional[float] = None, m: Optional[float] = None,
                    threads: Optional[int] = None, seed: Optional[int] = None) -> SuiteResult:
    """Midpoint convexity in γ of Z_{ξ+1} and Z_{−ξ} on random triples."""
    refs = builtin_references()
    rng = np.random.default_rng(Config.SEED if seed is None else seed)
    cases = []
    for name, ref in refs.items():
        lo, hi = CONVEXITY_GAMMAS[name]
        for a in _pick(ALPHAS, alpha):
            xi = 1.0 / (a - 1.0)
            ends = rng.uniform(lo, hi, size=(CONVEXITY_TRIPLES, 2))
            for nu in (xi + 1.0, -xi):
                cases.extend((ref, nu, CONVEXITY_XBAR[name], float(g1), float(g2)) for g1, g2 in ends)

    def run(case) -> float:
        ref, nu, xbar, g1, g2 = case

        def z(g: float) -> float:
            return partition_value(PartitionQuery(nu=nu, gamma=g, xbar=xbar, ref=ref)).value

        chord = 0.5 * (z(g1) + z(g2))
        return (z(0.5 * (g1 + g2)) - chord) / max(1.0, chord)

    violations = run_batch(run, cases, threads)
    worst = max(0.0, max(violations))
    return SuiteResult(name='convexity', passed=worst <= 1e-9, residuals={'violation': worst},
                       detail=f'{len(cases)} triples')


def duality_suite(alpha: Optional[float] = None, m: Optional[float] = None,
                  threads: Optional[int] = None, seed: Optional[int] = None) -> SuiteResult:
    """Kind C of index α against kind G of index 1/α on uniform(0, 1)."""
    ref = builtin_references()['uniform']
    cases = [(a, mv) for a in _pick(DUALITY_ALPHAS, alpha) for mv in _pick(DUALITY_MS, m)]

    def run(case):
        a, mv = case
        sol_c = solve(ProblemSpec(kind=Kind.C, alpha=a, m=mv, ref=ref))
        sol_g = solve(ProblemSpec(kind=Kind.G, alpha=1.0 / a, m=mv, ref=ref))
        report = check_duality(sol_c, sol_g)
        return {
            'gamma_gap': report.gamma_gap,
            'escort_gap': max(report.escort_gap_g, report.escort_gap_c),
            'divergence_gap': report.divergence_gap,
        }

    worst = _worst(run_batch(run, cases, threads))
    passed = worst['gamma_gap'] <= 1e-6 and worst['escort_gap'] <= 1e-6 and worst['divergence_gap'] <= 1e-8
    return SuiteResult(name='duality', passed=passed, residuals=worst, detail=f'{len(cases)} pairs')


def legendre_suite(alpha: Optional[float] = None, m: Optional[float] = None,
                   threads: Optional[int] = None, seed: Optional[int] = None) -> SuiteResult:
    """Finite-difference Legendre relations on families of nine constraint values."""
    a = 0.5 if alpha is None else alpha
    residuals: List[Dict[str, float]] = []
    failed = []
    for name, ref in builtin_references().items():
        for kind in (Kind.C, Kind.G):
            report = legendre_check(ProblemSpec(kind=kind, alpha=a, m=ref.mean, ref=ref),
                                    default_family(ref, center=m), threads=threads)
            scale = report.scale
            residuals.append({
                'euler': report.residual_euler / scale,
                'dS_dx': report.residual_dSdx / scale,
                'dphi_dlambda': report.residual_dphidlam / scale,
                'dphi_dx': report.residual_dphidx / scale,
            })
            if not report.passed:
                failed.append(f'{name}/{kind.value}')
    detail = 'failed: ' + ', '.join(failed) if failed else '4 families'
    return SuiteResult(name='legendre', passed=not failed, residuals=_worst(residuals), detail=detail)


def _total_variation(weights: np.ndarray, density, nodes: np.ndarray) -> float:
    cell = np.asarray(density(nodes), dtype=float)
    cell = cell / cell.sum()
    return 0.5 * float(np.abs(weights - cell).sum())


def oracle_suite(alpha: Optional[float] = None, m: Optional[float] = None,
                 threads: Optional[int] = None, seed: Optional[int] = None) -> SuiteResult:
    """Closed-form solutions against brute-force minimisation on a 1000-node grid."""
    ref = builtin_references()['uniform']
    cases = [(kind, a if alpha is None else alpha, mv if m is None else m) for kind, a, mv in ORACLE_CASES]
    residuals = []
    for kind, a, mv in cases:
        sol = solve(ProblemSpec(kind=kind, alpha=a, m=mv, ref=ref))
        gp = grid_problem(ref, a, mv, kind, n=ORACLE_GRID)
        found = oracle_solve(gp, seed=seed, threads=threads)
        residuals.append({
            'divergence_gap': abs(found.divergence - sol.divergence),
            'total_variation': _total_variation(found.weights, sol.density, gp.nodes),
        })
        logger.debug(f'oracle case {kind.value} alpha={a:g} m={mv:g}: {residuals[-1]}')
    worst = _worst(residuals)
    passed = worst['divergence_gap'] <= 1e-3 and worst['total_variation'] <= 1e-2
    return SuiteResult(name='oracle', passed=passed, residuals=worst, detail=f'{len(cases)} cases')


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    'normalization': normalization_suite,
    'convexity': convexity_suite,
    'duality': duality_suite,
    'legendre': legendre_suite,
    'oracle': oracle_suite,
}


def run_suite(name: str, **options) -> SuiteResult:
    """Run one suite; library failures become a failed result naming the error."""
    try:
        return SUITES[name](**options)
    except RenyiMaxentError as exc:
        logger.error(f'suite {name} raised {type(exc).__name__}: {exc}')
        return SuiteResult(name=name, passed=False, residuals={}, detail=f'{type(exc).__name__}: {exc}')
