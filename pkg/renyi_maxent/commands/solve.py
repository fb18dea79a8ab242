"""``solve`` and ``sweep``: single problems and tabulated dual scans."""

from __future__ import annotations

import logging
import math
from typing import List, Optional, Tuple

import click
import numpy as np

from ..errors import RenyiMaxentError
from ..models import Kind, PartitionQuery, ProblemSpec
from ..services.partition import classical_mean, generalized_mean, partition_value
from ..services.solver import scan_dual, solve
from ..services.thermo import lambda_of_solution
from ..utils import density_samples, parse_ref_spec
from . import emit, problem_options, run_config


logger = logging.getLogger(__name__)

NON_INJECTIVE_TOL = 1e-9


@click.command('solve')
@problem_options()
@click.pass_context
def solve_command(ctx: click.Context, **flags) -> int:
    """Solve one problem and report γ*, λ, the partition functions and the density."""
    cfg = run_config(ctx, 'solve', **flags)
    cfg.require('ref_spec', 'alpha', 'm')
    spec = ProblemSpec(kind=cfg.kind, alpha=cfg.alpha, m=cfg.m, ref=parse_ref_spec(cfg.ref_spec))
    lo, hi = cfg.gamma_range or (None, None)
    sol = solve(spec, lo, hi, cfg.grid_n)

    samples = density_samples(sol.density)
    summary = {
        'alpha': spec.alpha,
        'xi': spec.xi,
        'kind': spec.kind.value,
        'gamma_star': sol.gamma_star,
        'lambda': lambda_of_solution(sol),
        'Z_solution': sol.Z_solution,
        'Z_dual': sol.Z_dual,
        'divergence': sol.divergence,
        'achieved_mean': sol.achieved_mean,
        'route': sol.route,
    }
    emit(cfg, dict(summary, density_samples=samples), ('x', 'p'), samples, summary)
    return 0


def _sweep_row(spec: ProblemSpec, gamma: float, dual: float):
    if not math.isfinite(dual):
        return [gamma, None, None, None, None, False]
    query = PartitionQuery(nu=spec.solution_exponent, gamma=gamma, xbar=spec.m, ref=spec.ref)
    try:
        z = partition_value(query).value
        e_classical = classical_mean(query)
        e_generalized = generalized_mean(query, spec.alpha)
    except RenyiMaxentError as exc:
        logger.debug(f'sweep row gamma={gamma:.12g}: {exc}')
        return [gamma, dual, None, None, None, True]
    return [gamma, dual, z, e_classical, e_generalized, True]


def non_injective_pairs(gammas: List[float], means: List[Optional[float]],
                        tol: float = NON_INJECTIVE_TOL) -> List[Tuple[float, float]]:
    """γ pairs whose constrained means coincide within ``tol``."""
    known = sorted((m, g) for g, m in zip(gammas, means) if m is not None)
    pairs = []
    for (m1, g1), (m2, g2) in zip(known, known[1:]):
        if m2 - m1 <= tol:
            pairs.append((min(g1, g2), max(g1, g2)))
    return pairs


@click.command('sweep')
@problem_options()
@click.pass_context
def sweep_command(ctx: click.Context, **flags) -> int:
    """Tabulate the dual, Z and both means over a γ grid."""
    cfg = run_config(ctx, 'sweep', **flags)
    cfg.require('ref_spec', 'alpha', 'm', 'gamma_range')
    spec = ProblemSpec(kind=cfg.kind, alpha=cfg.alpha, m=cfg.m, ref=parse_ref_spec(cfg.ref_spec))
    lo, hi = cfg.gamma_range
    scan = scan_dual(spec, lo, hi, cfg.grid_n)

    rows = [_sweep_row(spec, float(g), float(v)) for g, v in zip(scan.gammas, scan.values)]
    constrained = 3 if spec.kind is Kind.C else 4
    pairs = non_injective_pairs([r[0] for r in rows], [r[constrained] for r in rows])
    if pairs:
        logger.warning(f'gamma to mean map is not injective on {len(pairs)} pairs')

    columns = ('gamma', 'dual', 'Z', 'E_classical', 'E_generalized', 'defined')
    summary = {
        'alpha': spec.alpha,
        'xi': spec.xi,
        'kind': spec.kind.value,
        'm': spec.m,
        'intervals': [list(iv) for iv in scan.intervals],
        'maxima': [list(mx) for mx in scan.maxima],
        'selected': scan.selected,
        'unimodal': list(scan.unimodal),
        'non_injective': [list(p) for p in pairs],
    }
    record = dict(summary, rows=[dict(zip(columns, r)) for r in rows])
    emit(cfg, record, columns, [[np.nan if v is None else v for v in r] for r in rows], summary)
    return 0
