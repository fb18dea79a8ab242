"""Brute-force check of the closed-form solutions on a discretised simplex.

The oracle never uses the Tsallis-factor family.  It minimises the discrete
Rényi divergence directly by entropic mirror descent (multiplicative
updates), which keeps every iterate strictly inside the simplex.  After
each step the iterate is sent back onto the mean constraint by its
Kullback-Leibler projection, an exponential tilt exp(τ x) whose τ is found
by a one-dimensional root search.

Kind G constrains the mean of the escort w ∝ p^α q^(1−α), which is
nonlinear in p.  The escort map is a bijection of the simplex, and in the
shifted variable w the constraint is linear while D_α(p||q) equals
D_{1/α}(w||q); kind G is therefore solved as a kind C problem in w and
mapped back.
"""

from __future__ import annotations

import logging
import math
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from ..config import Config
from ..errors import InfeasibleConstraintError, NonConvergenceError
from ..models import GridProblem, Kind, OracleResult, ReferenceDistribution
from ..tasks import run_batch


logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-6
KKT_TOL = 1e-10


def grid_problem(ref: ReferenceDistribution, alpha: float, m: float, kind: Kind, n: int = 1000) -> GridProblem:
    """Discretise ``ref`` on ``n`` cell midpoints of its support."""
    lo, hi = ref.support.bounds
    edges = np.linspace(lo, hi, n + 1)
    nodes = 0.5 * (edges[:-1] + edges[1:])
    weights = np.asarray(ref(nodes), dtype=float)
    weights = weights / weights.sum()
    return GridProblem(nodes=nodes, q_weights=weights, alpha=alpha, m=m, kind=kind)


def discrete_renyi(p: np.ndarray, q: np.ndarray, alpha: float) -> float:
    live = (p > 0) & (q > 0)
    s = float(np.sum(p[live] ** alpha * q[live] ** (1.0 - alpha)))
    return math.log(s) / (alpha - 1.0)


def escort_weights(p: np.ndarray, q: np.ndarray, alpha: float) -> np.ndarray:
    w = np.where(q > 0, p ** alpha * q ** (1.0 - alpha), 0.0)
    return w / w.sum()


def _tilt_to_mean(p: np.ndarray, x: np.ndarray, m: float) -> np.ndarray:
    """KL projection of ``p`` onto {Σ p = 1, Σ x p = m}."""
    d = x - m
    logp = np.log(p)

    def shifted(tau: float) -> np.ndarray:
        e = logp + tau * d
        return np.exp(e - e.max())

    def gap(tau: float) -> float:
        w = shifted(tau)
        return float(np.dot(w, d) / w.sum())

    g0 = gap(0.0)
    if abs(g0) < 1e-15:
        w = shifted(0.0)
        return w / w.sum()
    direction = -1.0 if g0 > 0 else 1.0
    step = 1.0 / max(np.ptp(x), 1e-300)
    far = direction * step
    while gap(far) * g0 > 0:
        far *= 2.0
        if abs(far) > 1e12:
            raise InfeasibleConstraintError(f'mean {m:.12g} is not reachable by tilting')
    tau = brentq(gap, min(0.0, far), max(0.0, far), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    w = shifted(tau)
    return w / w.sum()


def _objective(p: np.ndarray, q: np.ndarray, alpha: float) -> Tuple[float, np.ndarray]:
    """Convex surrogate sign(α−1) Σ p^α q^(1−α) and its gradient."""
    sign = 1.0 if alpha > 1.0 else -1.0
    p = np.maximum(p, 1e-300)
    base = p ** (alpha - 1.0) * q ** (1.0 - alpha)
    return sign * float(np.dot(p, base)), sign * alpha * base


def _kkt_gap(p: np.ndarray, grad: np.ndarray, x: np.ndarray) -> float:
    """Weighted residual of grad against its best affine fit c0 + c1 x."""
    w = p / p.sum()
    xm = np.dot(w, x)
    gm = np.dot(w, grad)
    var = np.dot(w, (x - xm) ** 2)
    c1 = np.dot(w, (x - xm) * (grad - gm)) / var if var > 0 else 0.0
    resid = grad - gm - c1 * (x - xm)
    scale = max(1.0, float(np.dot(w, np.abs(grad))))
    return float(np.dot(w, np.abs(resid))) / scale


def _descend(start: np.ndarray, x: np.ndarray, q: np.ndarray, alpha: float, m: float,
             iterations: int) -> np.ndarray:
    p = _tilt_to_mean(start, x, m)
    value, grad = _objective(p, q, alpha)
    eta = 1.0 / max(1e-12, float(np.max(np.abs(grad))))
    for it in range(iterations):
        if _kkt_gap(p, grad, x) < KKT_TOL:
            logger.debug(f'oracle restart converged after {it} iterations')
            break
        while True:
            step = np.clip(-eta * grad, -50.0, 50.0)
            trial = _tilt_to_mean(p * np.exp(step - step.max()), x, m)
            trial_value, trial_grad = _objective(trial, q, alpha)
            if trial_value <= value or eta < 1e-18:
                break
            eta *= 0.5
        p, value, grad = trial, trial_value, trial_grad
        eta *= 1.2
    return p


def _solve_classical(nodes, q, alpha, m, iterations, restarts, seed, threads) -> List[np.ndarray]:
    """Seeded restarts of the mirror descent; the first starts from q itself."""
    rng = np.random.default_rng(seed)
    starts = [q.copy()] + [rng.dirichlet(np.ones(len(q))) * 0.5 + 0.5 * q for _ in range(restarts - 1)]
    support = q > 0
    x, qs = nodes[support], q[support]

    def run(start: np.ndarray) -> np.ndarray:
        full = np.zeros_like(q)
        full[support] = _descend(start[support] / start[support].sum(), x, qs, alpha, m, iterations)
        return full

    return run_batch(run, starts, threads)


def oracle_solve(gp: GridProblem, iterations: int = None, restarts: int = None, seed: int = None,
                 threads: int = None) -> OracleResult:
    """Minimise the discrete Rényi divergence under the kind C or kind G mean constraint."""
    iterations = iterations or Config.ORACLE_ITERATIONS
    restarts = restarts or Config.ORACLE_RESTARTS
    seed = Config.SEED if seed is None else seed
    nodes, q = gp.nodes, gp.q_weights
    live = nodes[q > 0]
    if not live.min() < gp.m < live.max():
        raise InfeasibleConstraintError(
            f'm={gp.m:.12g} is outside the node range ({live.min():.12g}, {live.max():.12g})')

    if gp.kind is Kind.C:
        candidates = _solve_classical(nodes, q, gp.alpha, gp.m, iterations, restarts, seed, threads)
    else:
        finals = _solve_classical(nodes, q, 1.0 / gp.alpha, gp.m, iterations, restarts, seed, threads)
        candidates = [escort_weights(w, q, 1.0 / gp.alpha) for w in finals]
    tried = tuple(discrete_renyi(p, q, gp.alpha) for p in candidates)
    best = int(np.argmin(tried))
    p, divergence = candidates[best], tried[best]

    constrained = p if gp.kind is Kind.C else escort_weights(p, q, gp.alpha)
    residual = abs(float(np.dot(nodes, constrained)) - gp.m)
    if residual > FEASIBILITY_TOL:
        raise NonConvergenceError('oracle iterate violates the mean constraint', residual)
    logger.info(f'oracle {gp.kind.value} alpha={gp.alpha:g} m={gp.m:g}: divergence {divergence:.12g}')
    return OracleResult(weights=p, divergence=divergence, residual=residual, restart_divergences=tried)
