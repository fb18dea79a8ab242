"""``verify``, ``duality``, ``thermo`` and ``divergence``."""

from __future__ import annotations

import logging
from typing import Callable, Dict, Optional

import click

from ..errors import RenyiMaxentError
from ..models import Kind, ProblemSpec
from ..services.analysis import (check_duality, kl_divergence, make_pair, renyi_divergence, renyi_from_tsallis,
                                 shannon_entropy, tsallis_divergence, tsallis_entropy)
from ..services.solver import solve
from ..services.suites import SUITES, run_suite
from ..services.thermo import default_family, legendre_check
from ..utils import parse_ref_spec
from . import EXIT_FAILURE, emit, output_options, problem_options, run_config


logger = logging.getLogger(__name__)

DUALITY_TOL = 1e-6
DIVERGENCE_GAP_TOL = 1e-8


@click.command('verify')
@click.option('--suite', 'suites', multiple=True, type=click.Choice(sorted(SUITES)),
              help='Suite to run; repeat for several.  All suites run by default.')
@click.option('--alpha', type=float, default=None, help='Restrict the suites to this index.')
@click.option('--m', 'm', type=float, default=None, help='Restrict the suites to this constraint value.')
@output_options
@click.pass_context
def verify_command(ctx: click.Context, suites, alpha: Optional[float], m: Optional[float],
                   output_format: str, output: Optional[str]) -> int:
    """Run the verification suites and report pass/fail with residuals."""
    cfg = run_config(ctx, 'verify', alpha=alpha, m=m, output_format=output_format, output=output)
    names = list(suites) or list(SUITES)
    results = []
    for name in names:
        result = run_suite(name, alpha=cfg.alpha, m=cfg.m, threads=cfg.threads, seed=cfg.seed)
        logger.info(f'suite {name}: {"pass" if result.passed else "FAIL"} {result.residuals}')
        results.append(result)

    passed = all(r.passed for r in results)
    record = {
        'passed': passed,
        'suites': [{'name': r.name, 'passed': r.passed, 'residuals': r.residuals, 'detail': r.detail}
                   for r in results],
    }
    rows = [[r.name, r.passed, key, value] for r in results for key, value in sorted(r.residuals.items())]
    emit(cfg, record, ('suite', 'passed', 'residual', 'value'), rows, {'passed': passed})
    if not passed:
        first = next(r for r in results if not r.passed)
        click.echo(f'suite {first.name} failed: {first.detail}', err=True)
        return EXIT_FAILURE
    return 0


@click.command('duality')
@problem_options(with_kind=False)
@click.pass_context
def duality_command(ctx: click.Context, **flags) -> int:
    """Solve kind C with --alpha and kind G with 1/alpha and compare them."""
    if flags.get('ref') is None:
        flags['ref'] = 'uniform:0,1'
    cfg = run_config(ctx, 'duality', **flags)
    cfg.require('alpha', 'm')
    ref = parse_ref_spec(cfg.ref_spec)
    lo, hi = cfg.gamma_range or (None, None)
    sol_c = solve(ProblemSpec(kind=Kind.C, alpha=cfg.alpha, m=cfg.m, ref=ref), lo, hi, cfg.grid_n)
    sol_g = solve(ProblemSpec(kind=Kind.G, alpha=1.0 / cfg.alpha, m=cfg.m, ref=ref), lo, hi, cfg.grid_n)
    report = check_duality(sol_c, sol_g)

    record = report.as_dict()
    record.update(
        gamma_star_c=sol_c.gamma_star,
        gamma_star_g=sol_g.gamma_star,
        divergence_c=sol_c.divergence,
        divergence_g=sol_g.divergence,
        passed=max(report.gamma_gap, report.escort_gap_c, report.escort_gap_g) <= DUALITY_TOL
        and report.divergence_gap <= DIVERGENCE_GAP_TOL,
    )
    emit(cfg, record, ('quantity', 'value'), sorted(record.items()), {})
    if not record['passed']:
        click.echo(f'duality check failed: gamma gap {report.gamma_gap:.3e}, '
                   f'divergence gap {report.divergence_gap:.3e}', err=True)
        return EXIT_FAILURE
    return 0


@click.command('thermo')
@problem_options()
@click.option('--count', type=int, default=9, show_default=True, help='Number of family members.')
@click.pass_context
def thermo_command(ctx: click.Context, count: int, **flags) -> int:
    """Legendre relations along a family of constraint values centred on --m."""
    cfg = run_config(ctx, 'thermo', **flags)
    cfg.require('ref_spec', 'alpha')
    ref = parse_ref_spec(cfg.ref_spec)
    ms = default_family(ref, center=cfg.m, count=count)
    spec = ProblemSpec(kind=cfg.kind, alpha=cfg.alpha, m=ms[len(ms) // 2], ref=ref)
    report = legendre_check(spec, ms, gamma_range=cfg.gamma_range, n=cfg.grid_n, threads=cfg.threads)

    columns = ('m', 'lambda', 'xbar', 'entropy', 'massieu', 'interior')
    rows = [list(r) for r in zip(report.ms, report.lambdas, report.xbars, report.entropies,
                                 report.massieu, report.interior)]
    summary = {
        'alpha': report.alpha,
        'kind': report.kind.value,
        'residual_euler': report.residual_euler,
        'residual_dSdx': report.residual_dSdx,
        'residual_dphidlam': report.residual_dphidlam,
        'residual_dphidx': report.residual_dphidx,
        'entropy_consistency': report.entropy_consistency,
        'passed': report.passed,
        'notes': list(report.notes),
    }
    emit(cfg, dict(summary, family=[dict(zip(columns, r)) for r in rows]), columns, rows, summary)
    return 0


def _attempt(quantities: Dict[str, Optional[float]], undefined: Dict[str, str], name: str,
             compute: Callable[[], float]) -> None:
    try:
        quantities[name] = compute()
    except RenyiMaxentError as exc:
        logger.warning(f'{name} is undefined: {exc}')
        quantities[name] = None
        undefined[name] = str(exc)


@click.command('divergence')
@click.option('--ref', 'ref', default=None, help='Reference Q.')
@click.option('--other', 'other', required=True, help='Distribution P compared against Q.')
@click.option('--alpha', type=float, default=None, help='Order of the Rényi and Tsallis quantities.')
@output_options
@click.pass_context
def divergence_command(ctx: click.Context, ref: Optional[str], other: str, alpha: Optional[float],
                       output_format: str, output: Optional[str]) -> int:
    """Rényi, Tsallis and Kullback-Leibler quantities of P=--other against Q=--ref."""
    cfg = run_config(ctx, 'divergence', ref=ref, alpha=alpha, output_format=output_format, output=output)
    cfg.require('ref_spec', 'alpha')
    q = parse_ref_spec(cfg.ref_spec)
    p = parse_ref_spec(other)
    pair = make_pair(p, q)

    quantities: Dict[str, Optional[float]] = {}
    undefined: Dict[str, str] = {}
    _attempt(quantities, undefined, 'renyi', lambda: renyi_divergence(pair, cfg.alpha))
    _attempt(quantities, undefined, 'tsallis', lambda: tsallis_divergence(pair, cfg.alpha))
    if quantities['tsallis'] is not None:
        _attempt(quantities, undefined, 'renyi_from_tsallis',
                 lambda: renyi_from_tsallis(quantities['tsallis'], cfg.alpha))
    _attempt(quantities, undefined, 'kl', lambda: kl_divergence(pair))
    _attempt(quantities, undefined, 'shannon_p', lambda: shannon_entropy(p, p.support))
    _attempt(quantities, undefined, 'shannon_q', lambda: shannon_entropy(q, q.support))
    _attempt(quantities, undefined, 'tsallis_entropy_p', lambda: tsallis_entropy(p, cfg.alpha, p.support))

    record = dict(quantities, alpha=cfg.alpha, undefined=undefined)
    emit(cfg, record, ('quantity', 'value'), sorted(quantities.items()), {'alpha': cfg.alpha})
    return 0
