"""Reference distributions Q: built-in analytic families and tabulated input.

Every reference leaves this module with a bounded support.  Families with
infinite tails are truncated where the omitted mass drops below 1e-30 and
renormalised, so downstream integrals are always proper.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.integrate import trapezoid
from scipy.special import gammaln

from ..config import Config
from ..errors import InvalidParameterError
from ..models import IntervalSet, ReferenceDistribution
from .quadrature import integrate


logger = logging.getLogger(__name__)

FAMILIES = ('uniform', 'exponential', 'gaussian', 'gamma')
TAIL_MASS = 1e-30
GAUSSIAN_HALF_WIDTH = 12.0


def _require(condition: bool, parameter: str, message: str) -> None:
    if not condition:
        raise InvalidParameterError(parameter, message)


def _moments(pdf: Callable, support: IntervalSet, points: Sequence[float]) -> Tuple[float, float, float]:
    mass = integrate(pdf, support, points).value
    mean = integrate(lambda x: x * pdf(x), support, points).value / mass
    var = integrate(lambda x: (x - mean) ** 2 * pdf(x), support, points).value / mass
    return mass, mean, math.sqrt(max(var, 0.0))


def _finish(pdf, support: IntervalSet, label: str, points: Sequence[float], **meta) -> ReferenceDistribution:
    mass, mean, std = _moments(pdf, support, points)
    if abs(mass - 1.0) > Config.NORM_TOL:
        raise InvalidParameterError('density', f'{label} integrates to {mass:.12g}, not 1')
    ref = ReferenceDistribution(pdf=pdf, support=support, label=label, breakpoints=tuple(points),
                                mean=mean, std=std, **meta)
    logger.debug(f'built reference {label}: mean={mean:.12g} std={std:.12g}')
    return ref


def make_builtin(family: str, params: Sequence[float]) -> ReferenceDistribution:
    """Build one of the analytic reference families.

    ``uniform(lo, hi)``, ``exponential(rate)``, ``gaussian(mu, sigma)`` and
    ``gamma(shape, rate)``.
    """
    family = family.lower()
    params = tuple(float(p) for p in params)
    if family not in FAMILIES:
        raise InvalidParameterError('family', f'unknown family {family!r}; expected one of {FAMILIES}')
    builder = {
        'uniform': _uniform,
        'exponential': _exponential,
        'gaussian': _gaussian,
        'gamma': _gamma,
    }[family]
    return builder(params)


def _count(params: Tuple[float, ...], n: int, names: str) -> None:
    _require(len(params) == n, 'params', f'expected {n} value(s) ({names}), got {len(params)}')
    for value in params:
        _require(math.isfinite(value), 'params', f'non-finite value {value}')


def _uniform(params: Tuple[float, ...]) -> ReferenceDistribution:
    _count(params, 2, 'lo, hi')
    lo, hi = params
    _require(lo < hi, 'hi', f'uniform needs lo < hi, got lo={lo:g}, hi={hi:g}')
    height = 1.0 / (hi - lo)

    def pdf(x):
        return np.full_like(np.asarray(x, dtype=float), height)

    return _finish(pdf, IntervalSet.single(lo, hi), f'uniform({lo:g}, {hi:g})', (),
                   family='uniform', params=params)


def _exponential(params: Tuple[float, ...]) -> ReferenceDistribution:
    _count(params, 1, 'rate')
    (rate,) = params
    _require(rate > 0, 'rate', f'exponential rate must be positive, got {rate:g}')
    upper = 70.0 / rate
    tail = math.exp(-rate * upper)
    norm = 1.0 - tail

    def pdf(x):
        return rate * np.exp(-rate * np.asarray(x, dtype=float)) / norm

    label = f'exponential(rate={rate:g}) truncated to [0, {upper:.6g}], omitted mass {tail:.3e}'
    return _finish(pdf, IntervalSet.single(0.0, upper), label, (),
                   family='exponential', params=params, truncation_mass=tail, truncated=True)


def _gaussian(params: Tuple[float, ...]) -> ReferenceDistribution:
    _count(params, 2, 'mu, sigma')
    mu, sigma = params
    _require(sigma > 0, 'sigma', f'gaussian sigma must be positive, got {sigma:g}')
    tail = 2.0 * float(stats.norm.sf(GAUSSIAN_HALF_WIDTH))
    coef = 1.0 / (sigma * math.sqrt(2.0 * math.pi) * (1.0 - tail))
    lo, hi = mu - GAUSSIAN_HALF_WIDTH * sigma, mu + GAUSSIAN_HALF_WIDTH * sigma

    # scipy.stats pdfs cost tens of microseconds per scalar call, too slow
    # inside nested quadrature, so the formula is written out
    def pdf(x):
        z = (np.asarray(x, dtype=float) - mu) / sigma
        return coef * np.exp(-0.5 * z * z)

    label = f'gaussian(mu={mu:g}, sigma={sigma:g}) truncated to ±12 sigma, omitted mass {tail:.3e}'
    return _finish(pdf, IntervalSet.single(lo, hi), label, (mu,),
                   family='gaussian', params=params, truncation_mass=tail, truncated=True)


def _gamma(params: Tuple[float, ...]) -> ReferenceDistribution:
    _count(params, 2, 'shape, rate')
    shape, rate = params
    _require(shape > 0, 'shape', f'gamma shape must be positive, got {shape:g}')
    _require(rate > 0, 'rate', f'gamma rate must be positive, got {rate:g}')
    frozen = stats.gamma(a=shape, scale=1.0 / rate)
    upper = float(frozen.isf(TAIL_MASS / 10.0))
    tail = float(frozen.sf(upper))
    log_coef = shape * math.log(rate) - gammaln(shape) - math.log1p(-tail)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.exp(log_coef + (shape - 1.0) * np.log(x) - rate * x)

    mode = (shape - 1.0) / rate
    points = (mode,) if 0.0 < mode < upper else ()
    label = f'gamma(shape={shape:g}, rate={rate:g}) truncated to [0, {upper:.6g}], omitted mass {tail:.3e}'
    return _finish(pdf, IntervalSet.single(0.0, upper), label, points,
                   family='gamma', params=params, truncation_mass=tail, truncated=True)


def load_tabulated(rows: Iterable[Tuple[float, float]], label: str = 'tabulated') -> ReferenceDistribution:
    """Piecewise-linear reference through the tabulated ``(x, q)`` rows.

    The table is rescaled so that its trapezoid integral, which is the exact
    integral of the interpolant, equals one.
    """
    table = np.asarray([(float(x), float(q)) for x, q in rows], dtype=float)
    _require(table.ndim == 2 and len(table) >= 4, 'rows', f'need at least 4 rows, got {len(table)}')
    xs, qs = table[:, 0], table[:, 1]
    _require(bool(np.all(np.isfinite(table))), 'rows', 'non-finite entries')
    steps = np.diff(xs)
    if np.any(steps <= 0):
        bad = int(np.argmax(steps <= 0)) + 1
        raise InvalidParameterError('x', f'abscissae must be strictly increasing (row {bad}, x={xs[bad]:g})')
    if np.any(qs < 0):
        bad = int(np.argmax(qs < 0))
        raise InvalidParameterError('q', f'negative density {qs[bad]:g} at x={xs[bad]:g}')
    area = float(trapezoid(qs, xs))
    _require(area > 0, 'q', 'all density values are zero')
    scaled = qs / area

    def pdf(x):
        return np.interp(x, xs, scaled)

    support = IntervalSet.single(xs[0], xs[-1])
    return _finish(pdf, support, f'{label} ({len(xs)} knots)', tuple(xs[1:-1]),
                   family='tabulated', params=(), scale_factor=1.0 / area)
