"""Rényi Q-entropy maximisation under classical and generalized mean constraints.

The solutions are Tsallis-factor densities [γ(x − m) + 1]^ν Q(x) whose
tilt γ is found by maximising an alternate dual built from partition
functions.  The public API below covers the references, the partition
functions, both solvers, the escort duality, the Legendre checks and the
brute-force oracle; ``python -m renyi_maxent`` exposes
the same operations on the command line.
"""

import logging

from .config import Config
from .errors import (BoundaryOptimumWarning, ConstraintUnattainableError, DivergentIntegralError,
                     EmptyDomainError, IndexMismatchError, InfeasibleConstraintError, InvalidParameterError,
                     NoDefinedPointError, NonConvergenceError, PreconditionError, RenyiMaxentError,
                     ZeroNormalizerError)
from .models import (Density, DensityPair, DualityReport, DualScan, GridProblem, IntervalSet, Kind,
                     OracleResult, PartitionQuery, PartitionResult, ProblemSpec, ReferenceDistribution,
                     RunConfig, ThermoReport, ThetaSolution, TsallisSolution)
from .services.analysis import (check_duality, escort, exponential_tilt, kl_divergence, make_pair,
                                renyi_divergence, renyi_from_tsallis, shannon_entropy, tsallis_divergence,
                                tsallis_entropy)
from .services.oracle import grid_problem, oracle_solve
from .services.partition import classical_mean, gamma_domain, generalized_mean, partition_value
from .services.reference import load_tabulated, make_builtin
from .services.solver import (default_gamma_range, dual_C, dual_G, mu_tilde, scan_dual, solve, solve_theta,
                              stationarity)
from .services.thermo import default_family, legendre_check


__version__ = '1.0.0'

logging.getLogger(__name__).addHandler(logging.NullHandler())
