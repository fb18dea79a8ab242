"""Divergences, entropies, escort distributions and the α ↔ 1/α duality."""

from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np

from ..config import Config
from ..errors import (DivergentIntegralError, IndexMismatchError, InvalidParameterError,
                      NonConvergenceError, ZeroNormalizerError)
from ..models import Density, DensityPair, DualityReport, IntervalSet, Kind, TsallisSolution
from .quadrature import integrate


logger = logging.getLogger(__name__)

# Divergences amplify quadrature error by 1/|α - 1|, so they get tighter tolerances
TIGHT = {'epsabs': 1e-13, 'epsrel': 1e-12}
DUALITY_GRID = 512


def _check_alpha(alpha: float) -> None:
    if not math.isfinite(alpha) or alpha <= 0 or alpha == 1.0:
        raise InvalidParameterError('alpha', f'must be positive and different from 1, got {alpha}')


def _points(*densities: Density) -> Tuple[float, ...]:
    points = set()
    for density in densities:
        points.update(density.quadrature_points)
    return tuple(sorted(points))


def total_mass(p: Density) -> float:
    return integrate(p, p.support, p.quadrature_points).value


def make_pair(p: Density, q: Density, check: bool = True) -> DensityPair:
    """Pair two densities over the intersection of their supports."""
    if check:
        for name, density in (('p', p), ('q', q)):
            mass = total_mass(density)
            if abs(mass - 1.0) > Config.NORM_TOL:
                raise InvalidParameterError(name, f'{density.label or name} integrates to {mass:.12g}, not 1')
    return DensityPair(p=p, q=q, common_domain=p.support.intersect(q.support))


def _geometric_weight(pv, qv, alpha: float):
    """p**α q**(1-α), zero wherever either density is below the floor."""
    floor = Config.DENSITY_FLOOR
    live = (pv > floor) & (qv > floor)
    with np.errstate(all='ignore'):
        w = np.where(live, np.power(pv, alpha) * np.power(qv, 1.0 - alpha), 0.0)
    return w


def _power_integral(pair: DensityPair, alpha: float) -> float:
    domain = pair.common_domain
    if domain.is_empty or domain.length <= 0.0:
        raise DivergentIntegralError('densities have no common support')
    p, q = pair.p, pair.q

    def integrand(x: float) -> float:
        return float(_geometric_weight(p(x), q(x), alpha))

    result = integrate(integrand, domain, _points(p, q), **TIGHT)
    if not math.isfinite(result.value):
        raise DivergentIntegralError(f'power integral diverges for alpha={alpha:g}')
    return result.value


def _require_contained(pair: DensityPair, what: str) -> None:
    if not pair.p.support.is_subset(pair.q.support, tol=1e-12):
        raise DivergentIntegralError(f'{what}: support of P is not contained in the support of Q')


def renyi_divergence(pair: DensityPair, alpha: float) -> float:
    """D_α(P||Q) = log(∫ P^α Q^(1-α)) / (α - 1)."""
    _check_alpha(alpha)
    if alpha > 1.0:
        _require_contained(pair, f'Renyi divergence of order {alpha:g}')
    value = _power_integral(pair, alpha)
    if value <= 0.0:
        raise DivergentIntegralError(f'power integral vanishes for alpha={alpha:g}')
    return math.log(value) / (alpha - 1.0)


def tsallis_divergence(pair: DensityPair, alpha: float) -> float:
    """(∫ P^α Q^(1-α) - 1) / (α - 1), the Tsallis analogue of the Rényi divergence."""
    _check_alpha(alpha)
    if alpha > 1.0:
        _require_contained(pair, f'Tsallis divergence of order {alpha:g}')
    return (_power_integral(pair, alpha) - 1.0) / (alpha - 1.0)


def renyi_from_tsallis(value: float, alpha: float) -> float:
    """Monotone map taking the Tsallis divergence to the Rényi divergence."""
    return math.log1p((alpha - 1.0) * value) / (alpha - 1.0)


def kl_divergence(pair: DensityPair) -> float:
    """D(P||Q) = ∫ P log(P/Q)."""
    _require_contained(pair, 'Kullback-Leibler divergence')
    p, q = pair.p, pair.q
    floor = Config.DENSITY_FLOOR

    def integrand(x: float) -> float:
        pv = p(x)
        if pv <= floor:
            return 0.0
        qv = q(x)
        if qv <= floor:
            return math.inf
        return pv * math.log(pv / qv)

    result = integrate(integrand, p.support.intersect(q.support), _points(p, q), **TIGHT)
    if not math.isfinite(result.value):
        raise DivergentIntegralError('Kullback-Leibler integral diverges')
    return result.value


def tsallis_entropy(p: Density, alpha: float, domain: IntervalSet) -> float:
    """T_α(P) = (∫ P^α - 1) / (1 - α)."""
    _check_alpha(alpha)
    floor = Config.DENSITY_FLOOR

    def integrand(x: float) -> float:
        pv = p(x)
        return pv ** alpha if pv > floor else 0.0

    result = integrate(integrand, domain, p.quadrature_points, **TIGHT)
    if not (result.converged and math.isfinite(result.value)):
        raise DivergentIntegralError(f'integral of P^{alpha:g} does not converge')
    return (result.value - 1.0) / (1.0 - alpha)


def shannon_entropy(p: Density, domain: IntervalSet) -> float:
    """Differential entropy -∫ P log P, the α → 1 limit of the Tsallis entropy."""
    floor = Config.DENSITY_FLOOR

    def integrand(x: float) -> float:
        pv = p(x)
        return -pv * math.log(pv) if pv > floor else 0.0

    return integrate(integrand, domain, p.quadrature_points, **TIGHT).value


def escort(p: Density, q: Density, alpha: float) -> Density:
    """Normalised geometric interpolation P^α Q^(1-α) / ∫ P^α Q^(1-α).

    α = 1 returns P and α = 0 returns Q; other orders live on the common
    support of the two densities.
    """
    if alpha == 1.0:
        return p
    if alpha == 0.0:
        return q
    support = p.support.intersect(q.support)
    if support.is_empty or support.length <= 0.0:
        raise ZeroNormalizerError('escort of densities without common support')
    breakpoints = _points(p, q)

    def raw(x):
        return _geometric_weight(np.asarray(p(x)), np.asarray(q(x)), alpha)

    norm = integrate(lambda x: float(raw(x)), support, breakpoints, **TIGHT).value
    if not (norm > 0.0 and math.isfinite(norm)):
        raise ZeroNormalizerError(f'escort normaliser is {norm!r} for alpha={alpha:g}')

    def pdf(x):
        return raw(x) / norm

    label = f'escort[{alpha:g}]({p.label or "P"} | {q.label or "Q"})'
    return Density(pdf=pdf, support=support, label=label, breakpoints=breakpoints)


def _duality_grid(sol_c: TsallisSolution, sol_g: TsallisSolution) -> np.ndarray:
    lo, hi = sol_c.spec.ref.support.bounds
    return np.linspace(lo, hi, DUALITY_GRID)


def _sup_gap(a: Density, b: Density, grid: np.ndarray) -> float:
    av, bv = a(grid), b(grid)
    floor = Config.DENSITY_FLOOR
    live = (av > floor) | (bv > floor)
    if not np.any(live):
        return 0.0
    return float(np.max(np.abs(av[live] - bv[live])))


def check_duality(sol_c: TsallisSolution, sol_g: TsallisSolution) -> DualityReport:
    """Compare a classical-mean solution of index α with a generalized-mean one of index 1/α."""
    if sol_c.spec.kind is not Kind.C or sol_g.spec.kind is not Kind.G:
        raise IndexMismatchError('check_duality expects a kind C solution and a kind G solution')
    a1, a2 = sol_c.spec.alpha, sol_g.spec.alpha
    if abs(a2 - 1.0 / a1) > 1e-12:
        raise IndexMismatchError(f'alpha_G={a2:.15g} is not 1/alpha_C={1.0 / a1:.15g}')
    if abs(sol_c.spec.m - sol_g.spec.m) > 1e-12 or sol_c.spec.ref is not sol_g.spec.ref:
        raise IndexMismatchError('both solutions must share the constraint value and the reference')

    ref = sol_c.spec.ref
    grid = _duality_grid(sol_c, sol_g)
    escort_of_c = escort(sol_c.density, ref, a1)
    escort_of_g = escort(sol_g.density, ref, a2)
    divergence_escort = renyi_divergence(make_pair(escort_of_c, ref, check=False), 1.0 / a1)
    divergence_c = renyi_divergence(make_pair(sol_c.density, ref, check=False), a1)
    report = DualityReport(
        alpha_c=a1,
        alpha_g=a2,
        gamma_gap=abs(sol_c.gamma_star - sol_g.gamma_star),
        escort_gap_g=_sup_gap(sol_g.density, escort_of_c, grid),
        escort_gap_c=_sup_gap(sol_c.density, escort_of_g, grid),
        divergence_gap=abs(divergence_escort - divergence_c),
    )
    logger.info(f'duality alpha={a1:g}/{a2:g}: max entry {report.max_entry:.3e}')
    return report


def exponential_tilt(ref: Density, m: float, tol: float = 1e-12, max_iter: int = 100) -> Tuple[float, Density]:
    """Classical MaxEnt solution P ∝ exp(τ x) Q with mean m.

    Newton's method on the log-partition log ∫ exp(τ (x - m)) Q: its first
    derivative is the tilted mean minus m and its second the tilted variance.
    """
    lo, hi = ref.support.bounds
    if not lo < m < hi:
        raise InvalidParameterError('m', f'{m:g} is outside the support ({lo:g}, {hi:g})')
    points = ref.quadrature_points
    domain = ref.support

    def moments(tau: float) -> Tuple[float, float, float]:
        z = integrate(lambda x: math.exp(tau * (x - m)) * ref(x), domain, points, **TIGHT).value
        m1 = integrate(lambda x: (x - m) * math.exp(tau * (x - m)) * ref(x), domain, points, **TIGHT).value / z
        m2 = integrate(lambda x: (x - m) ** 2 * math.exp(tau * (x - m)) * ref(x), domain, points, **TIGHT).value / z
        return z, m1, m2 - m1 * m1

    tau = 0.0
    z, shift, var = moments(tau)
    for _ in range(max_iter):
        if abs(shift) <= tol:
            break
        step = -shift / var
        # halve the step until the residual shrinks
        while True:
            z_new, shift_new, var_new = moments(tau + step)
            if abs(shift_new) < abs(shift) or abs(step) < 1e-15:
                break
            step *= 0.5
        tau, z, shift, var = tau + step, z_new, shift_new, var_new
    else:
        raise NonConvergenceError('exponential tilt Newton iteration did not converge', abs(shift))

    def pdf(x):
        return np.exp(tau * (np.asarray(x, dtype=float) - m)) * ref(x) / z

    return tau, Density(pdf=pdf, support=domain, label=f'tilt[{tau:.6g}]({ref.label})',
                        breakpoints=ref.breakpoints)
