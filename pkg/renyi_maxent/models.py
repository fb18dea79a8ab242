"""Domain types shared by the services and the command line."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidParameterError, PreconditionError


Interval = Tuple[float, float]


class IntervalSet:
    """A finite union of disjoint closed intervals on the extended real line.

    Intervals are kept sorted by their lower end.  Overlapping or touching
    intervals are merged on construction, so two equal sets always compare
    equal.  Infinite ends are allowed and are open by nature.
    """

    __slots__ = ('_intervals',)

    def __init__(self, intervals: Sequence[Interval] = ()) -> None:
        cleaned: List[Interval] = []
        for lo, hi in intervals:
            lo, hi = float(lo), float(hi)
            if math.isnan(lo) or math.isnan(hi):
                raise InvalidParameterError('interval', 'NaN bound')
            if lo > hi:
                raise InvalidParameterError('interval', f'lower bound {lo} exceeds upper bound {hi}')
            cleaned.append((lo, hi))
        cleaned.sort()
        merged: List[Interval] = []
        for lo, hi in cleaned:
            if merged and lo <= merged[-1][1]:
                prev_lo, prev_hi = merged[-1]
                merged[-1] = (prev_lo, max(prev_hi, hi))
            else:
                merged.append((lo, hi))
        self._intervals: Tuple[Interval, ...] = tuple(merged)

    @classmethod
    def full(cls) -> 'IntervalSet':
        return cls([(-math.inf, math.inf)])

    @classmethod
    def empty(cls) -> 'IntervalSet':
        return cls()

    @classmethod
    def single(cls, lo: float, hi: float) -> 'IntervalSet':
        return cls([(lo, hi)])

    @property
    def intervals(self) -> Tuple[Interval, ...]:
        return self._intervals

    @property
    def is_empty(self) -> bool:
        return not self._intervals

    @property
    def length(self) -> float:
        return float(sum(hi - lo for lo, hi in self._intervals))

    @property
    def bounds(self) -> Interval:
        if self.is_empty:
            raise ValueError('empty interval set has no bounds')
        return self._intervals[0][0], self._intervals[-1][1]

    @property
    def endpoints(self) -> Tuple[float, ...]:
        points = []
        for lo, hi in self._intervals:
            points.extend(p for p in (lo, hi) if math.isfinite(p))
        return tuple(points)

    def contains(self, x):
        """Membership test; vectorised over numpy arrays."""
        arr = np.asarray(x, dtype=float)
        mask = np.zeros(arr.shape, dtype=bool)
        for lo, hi in self._intervals:
            mask |= (arr >= lo) & (arr <= hi)
        if mask.ndim == 0:
            return bool(mask)
        return mask

    def intersect(self, other: 'IntervalSet') -> 'IntervalSet':
        out: List[Interval] = []
        i = j = 0
        a, b = self._intervals, other._intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def clip(self, lo: float, hi: float) -> 'IntervalSet':
        return self.intersect(IntervalSet.single(lo, hi))

    def is_subset(self, other: 'IntervalSet', tol: float = 0.0) -> bool:
        for lo, hi in self._intervals:
            if hi - lo <= tol:
                continue
            if not any(c <= lo + tol and hi <= d + tol for c, d in other._intervals):
                return False
        return True

    def distance_to(self, x: float) -> float:
        """Distance from ``x`` to the closure of the set (0 when inside)."""
        best = math.inf
        for lo, hi in self._intervals:
            if lo <= x <= hi:
                return 0.0
            best = min(best, abs(x - lo) if math.isfinite(lo) else math.inf,
                       abs(x - hi) if math.isfinite(hi) else math.inf)
        return best

    def __iter__(self):
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntervalSet) and self._intervals == other._intervals

    def __hash__(self) -> int:
        return hash(self._intervals)

    def __repr__(self) -> str:
        body = ' U '.join(f'[{lo:.6g}, {hi:.6g}]' for lo, hi in self._intervals) or 'empty'
        return f'<IntervalSet {body}>'


@dataclass(frozen=True, eq=False)
class Density:
    """An evaluable probability density with a declared support.

    ``pdf`` is the raw formula; calling the density masks it to zero outside
    ``support`` so formulas never need to guard their own domain.
    """

    pdf: Callable[[np.ndarray], np.ndarray]
    support: IntervalSet
    label: str = ''
    breakpoints: Tuple[float, ...] = ()

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        inside = self.support.contains(arr)
        with np.errstate(all='ignore'):
            raw = np.asarray(self.pdf(arr), dtype=float)
        values = np.where(inside, raw, 0.0)
        if values.ndim == 0:
            return float(values)
        return values

    @property
    def quadrature_points(self) -> Tuple[float, ...]:
        return tuple(sorted(set(self.breakpoints) | set(self.support.endpoints)))


@dataclass(frozen=True, eq=False)
class ReferenceDistribution(Density):
    """The reference Q of every divergence in the library.

    Built by ``services.reference``; the density integrates to one over its
    support to within 1e-8 and the support is always bounded, infinite
    tails having been truncated where the omitted mass is below 1e-30.
    """

    family: str = 'tabulated'
    params: Tuple[float, ...] = ()
    mean: float = 0.0
    std: float = 0.0
    truncation_mass: float = 0.0
    scale_factor: float = 1.0
    truncated: bool = False

    @property
    def quadrature_hint(self) -> Tuple[float, ...]:
        return self.breakpoints

    @property
    def width(self) -> float:
        lo, hi = self.support.bounds
        return hi - lo


@dataclass(frozen=True)
class PartitionQuery:
    nu: float
    gamma: float
    xbar: float
    ref: ReferenceDistribution

    def with_nu(self, nu: float) -> 'PartitionQuery':
        return PartitionQuery(nu=nu, gamma=self.gamma, xbar=self.xbar, ref=self.ref)


@dataclass(frozen=True)
class PartitionResult:
    value: float
    domain: IntervalSet
    converged: bool
    abs_error_estimate: float


class Kind(str, Enum):
    C = 'C'
    G = 'G'


@dataclass(frozen=True)
class ProblemSpec:
    """A Rényi Q-entropy maximisation problem under a mean constraint.

    Kind C constrains the classical mean of the solution, kind G the
    generalized α-mean (the mean of its escort distribution).
    """

    kind: Kind
    alpha: float
    m: float
    ref: ReferenceDistribution

    def __post_init__(self) -> None:
        object.__setattr__(self, 'kind', Kind(self.kind))
        if not math.isfinite(self.alpha) or self.alpha <= 0:
            raise InvalidParameterError('alpha', f'must be positive, got {self.alpha}')
        if self.alpha == 1.0:
            raise InvalidParameterError('alpha', 'alpha = 1 is the Shannon limit and is excluded')
        if not math.isfinite(self.m):
            raise InvalidParameterError('m', f'must be finite, got {self.m}')

    @property
    def xi(self) -> float:
        return 1.0 / (self.alpha - 1.0)

    @property
    def solution_exponent(self) -> float:
        return self.xi if self.kind is Kind.C else -self.xi

    @property
    def dual_exponent(self) -> float:
        """Exponent of the partition function whose −log is the alternate dual."""
        return self.xi + 1.0 if self.kind is Kind.C else -self.xi

    @property
    def companion_exponent(self) -> float:
        """Exponent of the partition function equal to −exp(divergence) at the optimum."""
        return self.xi + 1.0 if self.kind is Kind.C else -(self.xi + 1.0)

    @property
    def constraint_exponent(self) -> float:
        """Exponent ν such that the constrained mean is E_ν[X]."""
        return self.xi if self.kind is Kind.C else -(self.xi + 1.0)

    def with_m(self, m: float) -> 'ProblemSpec':
        return ProblemSpec(kind=self.kind, alpha=self.alpha, m=m, ref=self.ref)


@dataclass(frozen=True, eq=False)
class DualScan:
    spec: ProblemSpec
    gammas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    intervals: IntervalSet
    maxima: Tuple[Tuple[float, float], ...]
    selected: int
    unimodal: Tuple[bool, ...] = ()

    @property
    def gamma_star(self) -> float:
        return self.maxima[self.selected][0]

    @property
    def value_star(self) -> float:
        return self.maxima[self.selected][1]


@dataclass(frozen=True, eq=False)
class TsallisSolution:
    spec: ProblemSpec
    gamma_star: float
    Z_solution: float
    Z_dual: float
    divergence: float
    density: Density
    achieved_mean: float
    interval: Interval = (-math.inf, math.inf)
    interior: bool = True
    route: str = 'direct'

    @property
    def mean_residual(self) -> float:
        return abs(self.achieved_mean - self.spec.m)


@dataclass(frozen=True, eq=False)
class DensityPair:
    p: Density
    q: Density
    common_domain: IntervalSet


@dataclass(frozen=True, eq=False)
class ThetaSolution:
    alpha_star: float
    escort: Density
    value: float
    boundary: bool = False


@dataclass(frozen=True)
class DualityReport:
    alpha_c: float
    alpha_g: float
    gamma_gap: float
    escort_gap_g: float
    escort_gap_c: float
    divergence_gap: float

    @property
    def max_entry(self) -> float:
        return max(self.gamma_gap, self.escort_gap_g, self.escort_gap_c, self.divergence_gap)

    def as_dict(self) -> Dict[str, float]:
        return {
            'alpha_c': self.alpha_c,
            'alpha_g': self.alpha_g,
            'gamma_gap': self.gamma_gap,
            'escort_gap_g': self.escort_gap_g,
            'escort_gap_c': self.escort_gap_c,
            'divergence_gap': self.divergence_gap,
        }


@dataclass(frozen=True)
class ThermoReport:
    kind: Kind
    alpha: float
    ms: Tuple[float, ...]
    lambdas: Tuple[float, ...]
    xbars: Tuple[float, ...]
    entropies: Tuple[float, ...]
    massieu: Tuple[float, ...]
    interior: Tuple[bool, ...]
    residual_euler: float
    residual_dSdx: float
    residual_dphidlam: float
    residual_dphidx: float
    entropy_consistency: float
    notes: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        lengths = {len(self.lambdas), len(self.xbars), len(self.entropies), len(self.massieu)}
        if len(lengths) != 1 or len(self.lambdas) < 5:
            raise PreconditionError('thermo report lists must share one length of at least 5')

    @property
    def scale(self) -> float:
        return max(1.0, max(abs(v) for v in self.lambdas))

    @property
    def passed(self) -> bool:
        bound = 1e-3 * self.scale
        return all(r <= bound for r in (self.residual_euler, self.residual_dSdx,
                                         self.residual_dphidlam, self.residual_dphidx))


@dataclass(frozen=True, eq=False)
class GridProblem:
    nodes: np.ndarray = field(repr=False)
    q_weights: np.ndarray = field(repr=False)
    alpha: float
    m: float
    kind: Kind

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.q_weights, dtype=float)
        object.__setattr__(self, 'nodes', nodes)
        object.__setattr__(self, 'q_weights', weights)
        object.__setattr__(self, 'kind', Kind(self.kind))
        if nodes.ndim != 1 or nodes.size < 200:
            raise InvalidParameterError('nodes', 'at least 200 grid nodes are required')
        if weights.shape != nodes.shape:
            raise InvalidParameterError('q_weights', 'must match the node grid')
        if np.any(np.diff(nodes) <= 0):
            raise InvalidParameterError('nodes', 'must be strictly increasing')
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidParameterError('q_weights', 'must be nonnegative and sum to one')
        if self.alpha <= 0 or self.alpha == 1.0:
            raise InvalidParameterError('alpha', f'must be positive and not 1, got {self.alpha}')


@dataclass(frozen=True, eq=False)
class OracleResult:
    weights: np.ndarray = field(repr=False)
    divergence: float
    residual: float
    restart_divergences: Tuple[float, ...] = ()


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    residuals: Dict[str, float]
    detail: str = ''


COMMANDS = ('solve', 'sweep', 'verify', 'duality', 'thermo', 'divergence')
FORMATS = ('json', 'csv')
_FLAGS = {'ref_spec': 'ref', 'gamma_range': 'gamma-range', 'grid_n': 'grid-n'}


@dataclass(frozen=True)
class RunConfig:
    """Validated command-line settings for one invocation."""

    command: str
    ref_spec: Optional[str] = None
    alpha: Optional[float] = None
    kind: Kind = Kind.C
    m: Optional[float] = None
    gamma_range: Optional[Tuple[float, float]] = None
    grid_n: int = 2048
    output_format: str = 'json'
    output_path: Optional[str] = None
    threads: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, 'kind', Kind(self.kind))
        if self.command not in COMMANDS:
            raise InvalidParameterError('command', f'unknown command {self.command!r}')
        if self.output_format not in FORMATS:
            raise InvalidParameterError('format', f'expected one of {FORMATS}')
        if self.alpha is not None and (not math.isfinite(self.alpha) or self.alpha <= 0 or self.alpha == 1.0):
            raise InvalidParameterError('alpha', f'must be positive and different from 1, got {self.alpha}')
        if self.m is not None and not math.isfinite(self.m):
            raise InvalidParameterError('m', 'must be finite')
        if self.gamma_range is not None:
            lo, hi = self.gamma_range
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InvalidParameterError('gamma-range', f'need finite lo < hi, got {lo}, {hi}')
        if self.grid_n < 64:
            raise InvalidParameterError('grid-n', f'must be at least 64, got {self.grid_n}')
        if self.threads < 1:
            raise InvalidParameterError('threads', f'must be at least 1, got {self.threads}')

    def require(self, *names: str) -> None:
        """Fail with a usage error unless every named setting was given."""
        for name in names:
            if getattr(self, name) is None:
                flag = _FLAGS.get(name, name)
                raise InvalidParameterError(flag, f'--{flag} is required for {self.command}')
