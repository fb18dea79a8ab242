"""Command-line front end and the glue shared by its commands.

Exit status is 0 on success, 1 for usage errors (bad flags, missing
settings, invalid parameters) and 2 for computational failures.
"""

from __future__ import annotations

import logging
import sys
from typing import Any, Callable, Dict, Optional, Sequence

import click

from ..config import Config
from ..errors import RenyiMaxentError
from ..models import FORMATS, RunConfig
from ..utils import parse_pair, render_csv, render_json


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class RenyiMaxentGroup(click.Group):
    """Click group that maps library errors onto the documented exit codes."""

    def main(self, args=None, prog_name=None, complete_var=None, **extra):
        extra.pop('standalone_mode', None)
        try:
            rv = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                              standalone_mode=False, **extra)
        except click.ClickException as exc:
            exc.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            click.echo('Aborted!', err=True)
            sys.exit(EXIT_USAGE)
        except RenyiMaxentError as exc:
            click.echo(f'error: {exc}', err=True)
            sys.exit(EXIT_USAGE if exc.usage else EXIT_FAILURE)
        except (ArithmeticError, ValueError) as exc:
            logger.exception(f'numerical failure: {exc}')
            click.echo(f'error: {exc}', err=True)
            sys.exit(EXIT_FAILURE)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


def problem_options(with_kind: bool = True) -> Callable[[Callable], Callable]:
    """Flags shared by every command that sets up a maximisation problem."""
    options = [
        click.option('--ref', 'ref', default=None, help='Reference Q: family:params or @path to a tabulated file.'),
        click.option('--alpha', type=float, default=None, help='Entropic index, positive and not 1.'),
        click.option('--m', 'm', type=float, default=None, help='Constraint value.'),
        click.option('--gamma-range', default=None, help='Dual scan range as "lo,hi".'),
        click.option('--grid-n', type=int, default=Config.GRID_N, show_default=True, help='Dual scan grid size.'),
    ]
    if with_kind:
        options.insert(2, click.option('--kind', type=click.Choice(['C', 'G'], case_sensitive=False), default='C',
                                       show_default=True, help='C constrains the classical mean, G the generalized mean.'))

    def decorate(func: Callable) -> Callable:
        for option in reversed(options):
            func = option(func)
        return output_options(func)

    return decorate


def output_options(func: Callable) -> Callable:
    func = click.option('--output', 'output', type=click.Path(dir_okay=False), default=None,
                        help='Write the report here instead of stdout.')(func)
    return click.option('--format', 'output_format', type=click.Choice(FORMATS, case_sensitive=False),
                        default=Config.OUTPUT_FORMAT, show_default=True)(func)


def run_config(ctx: click.Context, command: str, *, ref: Optional[str] = None, alpha: Optional[float] = None,
               kind: str = 'C', m: Optional[float] = None, gamma_range: Optional[str] = None,
               grid_n: int = Config.GRID_N, output_format: str = 'json',
               output: Optional[str] = None) -> RunConfig:
    """Validate every flag before any computation starts."""
    obj = ctx.find_root().obj or {}
    return RunConfig(
        command=command,
        ref_spec=ref,
        alpha=alpha,
        kind=kind.upper(),
        m=m,
        gamma_range=parse_pair(gamma_range, 'gamma-range'),
        grid_n=grid_n,
        output_format=output_format.lower(),
        output_path=output,
        threads=obj.get('threads', Config.THREADS),
        seed=obj.get('seed', Config.SEED),
    )


def emit(cfg: RunConfig, record: Dict[str, Any], columns: Sequence[str] = (), rows: Sequence[Sequence[Any]] = (),
         summary: Optional[Dict[str, Any]] = None) -> None:
    """Write the JSON record, or the CSV table plus summary lines."""
    if cfg.output_format == 'json':
        text = render_json(record)
    else:
        text = render_csv(columns, rows, summary if summary is not None else record)
    with click.open_file(cfg.output_path or '-', 'w', encoding='utf-8') as handle:
        handle.write(text)
    if cfg.output_path:
        logger.info(f'{cfg.command} report written to {cfg.output_path}')


def create_cli() -> click.Group:
    """Build the command group behind ``python -m renyi_maxent``."""

    @click.group(cls=RenyiMaxentGroup)
    @click.option('--threads', type=int, default=None,
                  help='Worker threads; defaults to RENYI_MAXENT_THREADS, then the core count.')
    @click.option('--seed', type=int, default=None, help='Seed for randomised checks and oracle restarts.')
    @click.pass_context
    def cli(ctx: click.Context, threads: Optional[int], seed: Optional[int]) -> None:
        """Rényi Q-entropy maximisation under classical and generalized mean constraints."""
        logging.basicConfig(level=Config.LOG_LEVEL, stream=sys.stderr,
                            format='%(levelname)s %(name)s: %(message)s')
        ctx.obj = {
            'threads': Config.THREADS if threads is None else threads,
            'seed': Config.SEED if seed is None else seed,
        }

    from .solve import solve_command, sweep_command
    from .verify import divergence_command, duality_command, thermo_command, verify_command
    for command in (solve_command, sweep_command, verify_command, duality_command,
                    thermo_command, divergence_command):
        cli.add_command(command)
    return cli


def main() -> None:
    create_cli().main(prog_name='python -m renyi_maxent')
