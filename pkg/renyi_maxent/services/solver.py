"""Solutions of the classical (C) and generalized (G) mean problems.

The optimal tilt γ* maximises an alternate dual function, −log Z_{ξ+1}(γ, m)
for kind C and −log Z_{−ξ}(γ, m) for kind G.  The dual may only be defined on
several disjoint γ intervals; each interval holds at most one maximum and
the smallest of those maxima (smallest divergence) is selected.
"""

from __future__ import annotations

import logging
import math
import warnings
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..config import Config
from ..errors import (BoundaryOptimumWarning, ConstraintUnattainableError, DivergentIntegralError,
                      EmptyDomainError, InvalidParameterError, NoDefinedPointError)
from ..models import (Density, DualScan, IntervalSet, Kind, PartitionQuery, ProblemSpec,
                      ReferenceDistribution, ThetaSolution, TsallisSolution)
from .analysis import TIGHT, escort, make_pair, renyi_divergence
from .partition import bracket_zero, centered_moment, gamma_domain, partition_value
from .quadrature import integrate


logger = logging.getLogger(__name__)

UNIMODAL_TOL = 1e-9
EDGE_TOL = 1e-12
UNDEFINED = -math.inf


def default_gamma_range(ref: ReferenceDistribution) -> Tuple[float, float]:
    """±R with R = 50/width on bounded supports and 50/std on truncated tails."""
    scale = ref.std if ref.truncated else ref.width
    radius = Config.GAMMA_RANGE_FACTOR / scale
    return -radius, radius


def _log_partition_dual(gamma: float, spec: ProblemSpec, nu: float) -> float:
    if gamma == 0.0:
        return 0.0
    try:
        result = partition_value(PartitionQuery(nu=nu, gamma=gamma, xbar=spec.m, ref=spec.ref))
    except (EmptyDomainError, DivergentIntegralError):
        return UNDEFINED
    if not result.converged or not math.isfinite(result.value):
        return UNDEFINED
    return -math.log(result.value)


def _require_kind(spec: ProblemSpec, kind: Kind) -> None:
    if spec.kind is not kind:
        raise InvalidParameterError('kind', f'expected a kind {kind.value} problem, got {spec.kind.value}')


def dual_C(gamma: float, spec: ProblemSpec) -> float:
    """−log Z_{ξ+1}(γ, m); −inf where the partition function is undefined."""
    _require_kind(spec, Kind.C)
    return _log_partition_dual(gamma, spec, spec.xi + 1.0)


def mu_tilde(gamma: float, spec: ProblemSpec) -> float:
    """Normalisation multiplier that makes the alternate dual tight for kind C."""
    _require_kind(spec, Kind.C)
    return -(spec.xi + 1.0) * (1.0 - gamma * spec.m)


def dual_G(gamma: float, spec: ProblemSpec) -> float:
    """−log Z_{−ξ}(γ, m); −inf where the partition function is undefined."""
    _require_kind(spec, Kind.G)
    return _log_partition_dual(gamma, spec, -spec.xi)


def dual_value(gamma: float, spec: ProblemSpec) -> float:
    return dual_C(gamma, spec) if spec.kind is Kind.C else dual_G(gamma, spec)


def admissible(gamma: float, spec: ProblemSpec) -> bool:
    """Whether the solution, dual and constraint partition functions can all be finite at γ.

    A bracket zero inside the support with Q > 0 there is a non-integrable
    singularity for every exponent ≤ −1.  Where Q vanishes at the zero the
    quadrature decides.
    """
    if gamma == 0.0:
        return True
    nu = min(spec.solution_exponent, spec.dual_exponent, spec.constraint_exponent)
    if nu > -1.0:
        return True
    z = bracket_zero(gamma, spec.m)
    if spec.ref.support.distance_to(z) > 0.0:
        return True
    return float(spec.ref(z)) <= 0.0


def scan_value(gamma: float, spec: ProblemSpec) -> float:
    """The alternate dual where γ is admissible, −inf elsewhere."""
    return dual_value(gamma, spec) if admissible(gamma, spec) else UNDEFINED


def stationarity(gamma: float, spec: ProblemSpec) -> float:
    """Constrained mean at γ minus m; zero exactly at the optimal γ."""
    query = PartitionQuery(nu=spec.constraint_exponent, gamma=gamma, xbar=spec.m, ref=spec.ref)
    return centered_moment(query, spec.m)


def _refine_edge(spec: ProblemSpec, defined: float, undefined: float) -> float:
    """Bisect between a defined and an undefined γ; returns the defined side."""
    while abs(defined - undefined) > EDGE_TOL * max(1.0, abs(defined)):
        mid = 0.5 * (defined + undefined)
        if mid in (defined, undefined):
            break
        if math.isfinite(scan_value(mid, spec)):
            defined = mid
        else:
            undefined = mid
    return defined


def _runs(values: np.ndarray):
    finite = np.isfinite(values)
    start = None
    for i, ok in enumerate(finite):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            yield start, i - 1
            start = None
    if start is not None:
        yield start, len(values) - 1


def _is_unimodal(values: np.ndarray) -> bool:
    k = int(np.argmax(values))
    rising = np.diff(values[:k + 1])
    falling = np.diff(values[k:])
    return bool(np.all(rising >= -UNIMODAL_TOL) and np.all(falling <= UNIMODAL_TOL))


def _interval_maximum(spec: ProblemSpec, gammas: np.ndarray, values: np.ndarray,
                      start: int, stop: int, edges: Tuple[float, float]) -> Tuple[float, float]:
    """Bracketed search around the best grid point, then the stationarity root."""
    k = start + int(np.argmax(values[start:stop + 1]))
    a = gammas[k - 1] if k > start else edges[0]
    b = gammas[k + 1] if k < stop else edges[1]
    best = (float(gammas[k]), float(values[k]))
    if b <= a:
        return best

    def objective(g: float) -> float:
        v = scan_value(g, spec)
        return -v if math.isfinite(v) else 1e300

    res = minimize_scalar(objective, bounds=(a, b), method='bounded',
                          options={'xatol': 1e-10 * max(1.0, abs(best[0])), 'maxiter': 500})
    if res.success and -res.fun >= best[1]:
        best = (float(res.x), float(-res.fun))

    # polish to the root of the stationarity condition
    root = _polish(spec, best[0], edges, float(b - a))
    if root != best[0] and edges[0] <= root <= edges[1]:
        value = scan_value(root, spec)
        if math.isfinite(value) and value >= best[1] - UNIMODAL_TOL:
            best = (root, value)
    return best


def scan_dual(spec: ProblemSpec, gamma_lo: float, gamma_hi: float, n: int) -> DualScan:
    """Tabulate the alternate dual on a grid and locate the per-interval maxima."""
    if not gamma_lo < gamma_hi:
        raise InvalidParameterError('gamma_range', f'need gamma_lo < gamma_hi, got {gamma_lo}, {gamma_hi}')
    if n < 64:
        raise InvalidParameterError('n', f'grid needs at least 64 points, got {n}')
    gammas = np.linspace(gamma_lo, gamma_hi, n)
    values = np.array([scan_value(float(g), spec) for g in gammas])

    intervals, maxima, unimodal = [], [], []
    for start, stop in _runs(values):
        left = gammas[start] if start == 0 else _refine_edge(spec, gammas[start], gammas[start - 1])
        right = gammas[stop] if stop == n - 1 else _refine_edge(spec, gammas[stop], gammas[stop + 1])
        edges = (float(left), float(right))
        intervals.append(edges)
        maxima.append(_interval_maximum(spec, gammas, values, start, stop, edges))
        unimodal.append(_is_unimodal(values[start:stop + 1]))
        logger.debug(f'dual interval [{left:.12g}, {right:.12g}] max at {maxima[-1][0]:.12g}')
    if not maxima:
        raise NoDefinedPointError(
            f'dual undefined on the whole grid [{gamma_lo:g}, {gamma_hi:g}] for {spec.kind.value}, '
            f'alpha={spec.alpha:g}, m={spec.m:g}')
    selected = min(range(len(maxima)), key=lambda i: maxima[i][1])
    return DualScan(spec=spec, gammas=gammas, values=values, intervals=IntervalSet(intervals),
                    maxima=tuple(maxima), selected=selected, unimodal=tuple(unimodal))


def _polish(spec: ProblemSpec, gamma: float, edges: Tuple[float, float], step: float) -> float:
    """Sharpen γ* to the root of the stationarity condition near the scan optimum."""
    lo_edge, hi_edge = edges
    for width in (step, 4 * step, hi_edge - lo_edge):
        a, b = max(lo_edge, gamma - width), min(hi_edge, gamma + width)
        if b <= a:
            continue
        try:
            fa, fb = stationarity(a, spec), stationarity(b, spec)
        except (DivergentIntegralError, EmptyDomainError):
            continue
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if fa * fb < 0:
            try:
                return float(brentq(stationarity, a, b, args=(spec,), xtol=1e-15, rtol=4 * np.finfo(float).eps))
            except (DivergentIntegralError, EmptyDomainError, ValueError):
                break
    return gamma


def tsallis_density(ref: ReferenceDistribution, gamma: float, xbar: float, nu: float, z_value: float) -> Density:
    """Normalised [γ(x − x̄) + 1]^ν Q(x) / Z on its effective domain."""
    domain = gamma_domain(gamma, xbar, ref)
    pdf_q = ref.pdf

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.power(gamma * (x - xbar) + 1.0, nu) * pdf_q(x) / z_value

    points = ref.breakpoints
    if gamma != 0.0:
        points = tuple(sorted(set(points) | {bracket_zero(gamma, xbar)}))
    return Density(pdf=pdf, support=domain, label=f'tsallis[nu={nu:.6g}, gamma={gamma:.6g}]({ref.label})',
                   breakpoints=points)


def _build(spec: ProblemSpec, gamma: float, edges: Tuple[float, float], scan_edges: Tuple[float, float]) -> TsallisSolution:
    ref, m = spec.ref, spec.m
    z_solution = partition_value(PartitionQuery(nu=spec.solution_exponent, gamma=gamma, xbar=m, ref=ref))
    z_dual = partition_value(PartitionQuery(nu=spec.companion_exponent, gamma=gamma, xbar=m, ref=ref))
    density = tsallis_density(ref, gamma, m, spec.solution_exponent, z_solution.value)
    achieved = m + stationarity(gamma, spec)
    divergence = renyi_divergence(make_pair(density, ref, check=False), spec.alpha)
    tol = 1e-9 * max(1.0, abs(gamma))
    interior = all(abs(gamma - e) > tol for e in edges) and all(abs(gamma - e) > tol for e in scan_edges)
    return TsallisSolution(spec=spec, gamma_star=gamma, Z_solution=z_solution.value, Z_dual=z_dual.value,
                           divergence=divergence, density=density, achieved_mean=achieved,
                           interval=edges, interior=interior)


def _closest_mean(spec: ProblemSpec, scan: DualScan) -> Optional[float]:
    """Constrained mean nearest m among the interval edges and maxima of a scan."""
    candidates = [g for edges in scan.intervals for g in edges] + [g for g, _ in scan.maxima]
    best = None
    for gamma in candidates:
        try:
            mean = spec.m + stationarity(gamma, spec)
        except (DivergentIntegralError, EmptyDomainError):
            continue
        if best is None or abs(mean - spec.m) < abs(best - spec.m):
            best = mean
    return best


def _solve_direct(spec: ProblemSpec, gamma_lo: float, gamma_hi: float, n: int) -> TsallisSolution:
    scan = scan_dual(spec, gamma_lo, gamma_hi, n)
    edges = scan.intervals.intervals[scan.selected]
    step = (gamma_hi - gamma_lo) / (n - 1)
    unattainable = (f'no gamma in [{gamma_lo:g}, {gamma_hi:g}] attains m={spec.m:.12g} '
                    f'for kind {spec.kind.value}, alpha={spec.alpha:g}')
    gamma = scan.gamma_star
    try:
        solution = _build(spec, gamma, edges, (gamma_lo, gamma_hi))
        if solution.mean_residual > Config.MEAN_TOL:
            # second pass on a finer local grid around the first estimate
            fine = min(step, 1e-3 * max(1.0, abs(gamma)))
            gamma = _polish(spec, gamma, edges, fine)
            solution = _build(spec, gamma, edges, (gamma_lo, gamma_hi))
    except (DivergentIntegralError, EmptyDomainError) as exc:
        raise ConstraintUnattainableError(f'{unattainable}: {exc}',
                                          closest_mean=_closest_mean(spec, scan)) from exc
    if solution.mean_residual > Config.MEAN_TOL:
        raise ConstraintUnattainableError(unattainable, closest_mean=solution.achieved_mean)
    logger.info(f'solved {spec.kind.value} alpha={spec.alpha:g} m={spec.m:g}: gamma*={gamma:.12g}, '
                f'divergence={solution.divergence:.12g}')
    return solution


def _solve_via_classical(spec: ProblemSpec, gamma_lo: float, gamma_hi: float, n: int) -> TsallisSolution:
    """Kind G of index α through kind C of index 1/α and the escort map."""
    dual_spec = ProblemSpec(kind=Kind.C, alpha=1.0 / spec.alpha, m=spec.m, ref=spec.ref)
    classical = _solve_direct(dual_spec, gamma_lo, gamma_hi, n)
    density = escort(classical.density, spec.ref, dual_spec.alpha)
    generalized = escort(density, spec.ref, spec.alpha)
    achieved = integrate(lambda x: x * generalized(x), generalized.support,
                         generalized.quadrature_points, **TIGHT).value
    return TsallisSolution(spec=spec, gamma_star=classical.gamma_star, Z_solution=classical.Z_dual,
                           Z_dual=classical.Z_solution,
                           divergence=renyi_divergence(make_pair(density, spec.ref, check=False), spec.alpha),
                           density=density, achieved_mean=achieved, interval=classical.interval,
                           interior=classical.interior, route='dual')


def solve(spec: ProblemSpec, gamma_lo: Optional[float] = None, gamma_hi: Optional[float] = None,
          n: Optional[int] = None, route: str = 'auto') -> TsallisSolution:
    """Solve a kind C or kind G problem.

    ``route`` is ``direct``, ``dual`` (kind G with α > 1 only: solve the
    classical problem of index 1/α and map through the escort) or ``auto``,
    which tries the direct route and falls back to the dual one when a
    kind G problem with α > 1 hits a divergent integral.
    """
    if gamma_lo is None or gamma_hi is None:
        default_lo, default_hi = default_gamma_range(spec.ref)
        gamma_lo = default_lo if gamma_lo is None else gamma_lo
        gamma_hi = default_hi if gamma_hi is None else gamma_hi
    n = n or Config.GRID_N
    dual_allowed = spec.kind is Kind.G and spec.alpha > 1.0
    if route == 'dual':
        if not dual_allowed:
            raise InvalidParameterError('route', 'the dual route applies to kind G with alpha > 1')
        return _solve_via_classical(spec, gamma_lo, gamma_hi, n)
    if route not in ('auto', 'direct'):
        raise InvalidParameterError('route', f'unknown route {route!r}')
    try:
        return _solve_direct(spec, gamma_lo, gamma_hi, n)
    except (DivergentIntegralError, NoDefinedPointError, ConstraintUnattainableError) as exc:
        if route == 'direct' or not dual_allowed:
            raise
        logger.warning(f'direct kind G solve failed ({exc}); retrying through kind C with alpha={1.0 / spec.alpha:g}')
        return _solve_via_classical(spec, gamma_lo, gamma_hi, n)


def _log_geometric_integral(p1: Density, q: Density, alpha: float, domain: IntervalSet, points) -> float:
    floor = Config.DENSITY_FLOOR

    def integrand(x: float) -> float:
        pv, qv = p1(x), q(x)
        if pv <= floor or qv <= floor:
            return 0.0
        return pv ** alpha * qv ** (1.0 - alpha)

    return math.log(integrate(integrand, domain, points, **TIGHT).value)


def _log_ratio_mean(p1: Density, q: Density, alpha: float, domain: IntervalSet, points) -> float:
    """∫ P* log(P₁/Q) for the escort P* of order α."""
    floor = Config.DENSITY_FLOOR
    norm = math.exp(_log_geometric_integral(p1, q, alpha, domain, points))

    def integrand(x: float) -> float:
        pv, qv = p1(x), q(x)
        if pv <= floor or qv <= floor:
            return 0.0
        return pv ** alpha * qv ** (1.0 - alpha) * math.log(pv / qv)

    return integrate(integrand, domain, points, **TIGHT).value / norm


def solve_theta(theta: float, p1: Density, q: Density, alpha_lo: float = 0.0,
                alpha_hi: float = 1.0) -> ThetaSolution:
    """Maximise g(α) = αθ − log ∫ P₁^α Q^(1−α) over [alpha_lo, alpha_hi] ⊆ [0, 1].

    g is concave, its derivative θ − ∫ P* log(P₁/Q) is decreasing, and at an
    interior optimum the escort P* meets the log-likelihood constraint.
    """
    if not (0.0 <= alpha_lo < alpha_hi <= 1.0):
        raise InvalidParameterError('alpha_range', f'need 0 <= alpha_lo < alpha_hi <= 1, got {alpha_lo}, {alpha_hi}')
    domain = p1.support.intersect(q.support)
    if domain.is_empty or domain.length <= 0.0:
        raise InvalidParameterError('p1', 'P1 and Q have no common support')
    points = tuple(sorted(set(p1.quadrature_points) | set(q.quadrature_points)))

    def g(alpha: float) -> float:
        return alpha * theta - _log_geometric_integral(p1, q, alpha, domain, points)

    def slope(alpha: float) -> float:
        return theta - _log_ratio_mean(p1, q, alpha, domain, points)

    res = minimize_scalar(lambda a: -g(a), bounds=(alpha_lo, alpha_hi), method='bounded',
                          options={'xatol': 1e-10})
    alpha_star, boundary = float(res.x), False
    d_lo, d_hi = slope(alpha_lo), slope(alpha_hi)
    flat = 1e-9
    if abs(d_lo) <= flat and abs(d_hi) <= flat:
        logger.info('theta problem is flat in alpha; every order is optimal')
    elif d_lo <= flat:
        alpha_star, boundary = alpha_lo, True
    elif d_hi >= -flat:
        alpha_star, boundary = alpha_hi, True
    else:
        alpha_star = float(brentq(slope, alpha_lo, alpha_hi, xtol=1e-14))
    if boundary:
        warnings.warn(f'theta={theta:.6g} is not attainable inside ({alpha_lo:g}, {alpha_hi:g}); '
                      f'optimum on the bound alpha={alpha_star:g}', BoundaryOptimumWarning, stacklevel=2)
    return ThetaSolution(alpha_star=alpha_star, escort=escort(p1, q, alpha_star), value=g(alpha_star),
                         boundary=boundary)
