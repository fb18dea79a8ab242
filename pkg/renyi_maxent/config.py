"""Configuration definitions for the library and the command line.

Configuration values are pulled from environment variables with sensible
defaults.  A `.env` file in the working directory is loaded first so that
local overrides do not need to be exported by hand.  Command-line flags
take precedence over everything defined here.
"""

import os

import psutil
from dotenv import load_dotenv


load_dotenv()


def _default_threads() -> int:
    return psutil.cpu_count(logical=True) or 1


class Config:
    # Parallelism
    THREADS = int(os.getenv('RENYI_MAXENT_THREADS', str(_default_threads())))

    # Dual scan
    GRID_N = int(os.getenv('RENYI_MAXENT_GRID_N', '2048'))
    GAMMA_RANGE_FACTOR = float(os.getenv('RENYI_MAXENT_GAMMA_RANGE_FACTOR', '50'))

    # Quadrature
    QUAD_EPSABS = float(os.getenv('RENYI_MAXENT_QUAD_EPSABS', '1e-10'))
    QUAD_EPSREL = float(os.getenv('RENYI_MAXENT_QUAD_EPSREL', '1e-9'))
    QUAD_LIMIT = int(os.getenv('RENYI_MAXENT_QUAD_LIMIT', '200'))

    # Oracle
    SEED = int(os.getenv('RENYI_MAXENT_SEED', '20240101'))
    ORACLE_ITERATIONS = int(os.getenv('RENYI_MAXENT_ORACLE_ITERATIONS', '100000'))
    ORACLE_RESTARTS = int(os.getenv('RENYI_MAXENT_ORACLE_RESTARTS', '8'))

    # Output
    OUTPUT_FORMAT = os.getenv('RENYI_MAXENT_FORMAT', 'json').lower()
    LOG_LEVEL = os.getenv('RENYI_MAXENT_LOG_LEVEL', 'WARNING').upper()

    # Tolerances shared by solver, thermo and the verification suites
    MEAN_TOL = 1e-6
    NORM_TOL = 1e-8
    DENSITY_FLOOR = 1e-300
    SINGULAR_Q_FLOOR = 1e-12
