"""Partition functions and moments of the Tsallis factor.

For exponent ν, tilt γ and centre x̄ the (unnormalised) Tsallis factor is
``[γ(x - x̄) + 1]**ν * Q(x)`` on the set where the bracket is nonnegative.
Its integral is the partition function Z_ν(γ, x̄).
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Tuple

from ..config import Config
from ..errors import DivergentIntegralError, EmptyDomainError
from ..models import IntervalSet, PartitionQuery, PartitionResult, ReferenceDistribution
from .quadrature import EndpointSingularity, QuadResult, integrate


logger = logging.getLogger(__name__)


def bracket_zero(gamma: float, xbar: float) -> float:
    """Location where γ(x - x̄) + 1 vanishes (γ must be nonzero)."""
    return xbar - 1.0 / gamma


def gamma_domain(gamma: float, xbar: float, ref: ReferenceDistribution) -> IntervalSet:
    """support(Q) ∩ {x : γ(x - x̄) + 1 ≥ 0}."""
    if gamma == 0.0:
        d_gamma = IntervalSet.full()
    elif gamma > 0.0:
        d_gamma = IntervalSet.single(bracket_zero(gamma, xbar), math.inf)
    else:
        d_gamma = IntervalSet.single(-math.inf, bracket_zero(gamma, xbar))
    return ref.support.intersect(d_gamma)


def _weighted_integral(q: PartitionQuery, weight: Callable[[float], float]) -> Tuple[QuadResult, IntervalSet]:
    """∫_D weight(x) [γ(x - x̄) + 1]^ν Q(x) dx with singularity handling."""
    ref, nu, gamma, xbar = q.ref, q.nu, q.gamma, q.xbar
    domain = gamma_domain(gamma, xbar, ref)
    if domain.is_empty or domain.length <= 0.0:
        raise EmptyDomainError(f'empty domain for gamma={gamma:.12g}, xbar={xbar:.12g} on {ref.label}')
    points = ref.quadrature_points
    pdf = ref.pdf

    if gamma == 0.0 or nu == 0.0:
        return integrate(lambda x: weight(x) * pdf(x), domain, points), domain

    z = bracket_zero(gamma, xbar)
    touches = domain.distance_to(z) == 0.0
    if touches and nu <= -1.0:
        q_at_zero = float(ref(z))
        if q_at_zero > Config.SINGULAR_Q_FLOOR:
            raise DivergentIntegralError(
                f'non-integrable singularity of exponent {nu:.6g} at the bracket zero', location=z)
        logger.debug(f'bracket zero at {z:.12g} with Q={q_at_zero:.3e}; integrating as regular')

    if touches:
        scale = abs(gamma) ** nu
        result = integrate(lambda x: scale * weight(x) * pdf(x), domain, points,
                           singularity=EndpointSingularity(z, nu))
    else:
        def integrand(x: float) -> float:
            return weight(x) * (gamma * (x - xbar) + 1.0) ** nu * pdf(x)

        result = integrate(integrand, domain, points + (z,))
    return result, domain


def _one(x: float) -> float:
    return 1.0


def partition_value(q: PartitionQuery) -> PartitionResult:
    """Z_ν(γ, x̄) = ∫_D [γ(x - x̄) + 1]^ν Q(x) dx."""
    result, domain = _weighted_integral(q, _one)
    if result.value <= 0.0:
        raise EmptyDomainError(f'reference {q.ref.label} has no mass on {domain}')
    return PartitionResult(value=result.value, domain=domain, converged=result.converged,
                           abs_error_estimate=result.abserr)


def centered_moment(q: PartitionQuery, center: float) -> float:
    """E_ν[X] - center, integrated directly to avoid cancellation."""
    z = partition_value(q)
    if not z.converged:
        raise DivergentIntegralError(f'partition integral Z_{q.nu:.6g} did not converge')
    result, _ = _weighted_integral(q, lambda x: x - center)
    return result.value / z.value


def classical_mean(q: PartitionQuery) -> float:
    """E_ν[X], the mean of the normalised Tsallis factor."""
    return q.xbar + centered_moment(q, q.xbar)


def generalized_mean(q: PartitionQuery, alpha: float) -> float:
    """E_ν^(α)[X] = E_{αν}[X], the mean of the α-escort of the Tsallis factor."""
    return classical_mean(q.with_nu(alpha * q.nu))
