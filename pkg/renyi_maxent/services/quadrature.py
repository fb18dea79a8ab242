"""Adaptive quadrature over interval sets.

Thin layer over QUADPACK (``scipy.integrate.quad``).  Each interval of the
domain is integrated separately, split at the supplied breakpoints.  When
the integrand carries an algebraic factor ``|x - z|**nu`` that vanishes or
blows up at an interval end ``z``, the panel touching ``z`` is handed to the
algebraic-weight rule (QAWS) so the endpoint behaviour is integrated
exactly instead of by brute subdivision.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from scipy.integrate import quad

from ..config import Config
from ..models import IntervalSet


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EndpointSingularity:
    """Algebraic factor ``|x - location| ** exponent`` multiplying the integrand."""

    location: float
    exponent: float

    def factor(self, x: float) -> float:
        return abs(x - self.location) ** self.exponent


@dataclass(frozen=True)
class QuadResult:
    value: float
    abserr: float
    converged: bool


def _touches(x: float, z: float) -> bool:
    return abs(x - z) <= 1e-13 * max(1.0, abs(z))


def _quad(func, a: float, b: float, points: Sequence[float] = (), **kwargs):
    epsabs = kwargs.pop('epsabs', Config.QUAD_EPSABS)
    epsrel = kwargs.pop('epsrel', Config.QUAD_EPSREL)
    limit = max(kwargs.pop('limit', Config.QUAD_LIMIT), 2 * len(points) + 50)
    if points:
        kwargs['points'] = list(points)
    out = quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1, **kwargs)
    # quad returns a fourth element (the warning message) only on trouble
    return out[0], out[1], len(out) == 3


def integrate(
    func: Callable[[float], float],
    domain: IntervalSet,
    points: Sequence[float] = (),
    singularity: Optional[EndpointSingularity] = None,
    **kwargs,
) -> QuadResult:
    """Integrate ``func`` (times the optional singular factor) over ``domain``.

    The domain must be bounded.  ``points`` are interior breakpoints where
    the integrand is not smooth; points outside an interval are ignored.
    """
    total = 0.0
    abserr = 0.0
    converged = True
    for lo, hi in domain:
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f'cannot integrate over unbounded interval [{lo}, {hi}]')
        if hi <= lo:
            continue
        inner = sorted(p for p in set(points) if lo < p < hi)
        if singularity is None:
            value, err, ok = _quad(func, lo, hi, inner, **kwargs)
        else:
            value, err, ok = _integrate_singular(func, lo, hi, inner, singularity, **kwargs)
        total += value
        abserr += err
        converged = converged and ok
    return QuadResult(total, abserr, converged)


def _integrate_singular(func, lo, hi, inner, singularity, **kwargs):
    z, nu = singularity.location, singularity.exponent

    def regular(x: float) -> float:
        return func(x) * singularity.factor(x)

    at_lo, at_hi = _touches(lo, z), _touches(hi, z)
    if not (at_lo or at_hi) or nu <= -1.0:
        # Either the factor is smooth here or QAWS cannot take it; caller
        # decides beforehand whether the latter case is integrable at all.
        return _quad(regular, lo, hi, inner, **kwargs)

    total, err, ok = 0.0, 0.0, True
    cuts = [lo] + list(inner) + [hi]
    panels = list(zip(cuts[:-1], cuts[1:]))
    if at_lo:
        a, b = panels.pop(0)
        wvar = (nu, 0.0)
    else:
        a, b = panels.pop()
        wvar = (0.0, nu)
    value, e, good = _quad(func, a, b, weight='alg', wvar=wvar, **kwargs)
    logger.debug(f'algebraic panel [{a:.6g}, {b:.6g}] exponent {nu:.6g}: {value:.12g}')
    total, err, ok = total + value, err + e, ok and good
    if panels:
        rest_lo, rest_hi = panels[0][0], panels[-1][1]
        rest_points = [p for p, _ in panels[1:]]
        value, e, good = _quad(regular, rest_lo, rest_hi, rest_points, **kwargs)
        total, err, ok = total + value, err + e, ok and good
    return total, err, ok
