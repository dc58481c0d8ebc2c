"""Hybridtele constants."""

from pathlib import Path

# Default config location
DEFAULT_CONFIG_PATH = Path.home() / ".config" / "hybridtele.conf"

# Truncation
DEFAULT_CUTOFF = 24
MAX_FACTORIAL = 170  # largest n with a finite double-precision n!
TAIL_TOLERANCE = 1e-10
DISPLACEMENT_MARGIN = 10  # free levels required above the occupied support
EXPM_PADDING = 40  # extra levels for the truncated displacement generator
PRUNE_TOLERANCE = 1e-18  # sparse amplitudes below this are dropped

# Probability bookkeeping
UNDERFLOW_PROBABILITY = 1e-15
NEGATIVE_PROBABILITY_SLACK = 1e-10
PROBABILITY_SLACK = 1e-10
NORM_TOLERANCE = 1e-10
SUM_TOLERANCE = 1e-9

# Outcome enumeration
DEFAULT_N_MAX = 12
DISTRIBUTION_N_MAX = 40

# Demodulation
MAX_DEMOD_ALPHA = 0.8
GAMMA_GRID_POINTS = 2002  # even count keeps gamma = 0 off the grid
GAMMA_RESIDUAL = 1e-10
ORIGINAL_FIDELITY = 1 - 1e-6
ORACLE_TOLERANCE = 1e-2
ORTHOGONALITY_TOLERANCE = 1e-9
DEMOD_TRANSMITTANCE = 1 - 1e-9  # HTBS of the coherent demodulation

# Channel generation
DEFAULT_HERALD_MAX = 3
GENERATION_CUTOFF = 8  # modes 5 and 6 in the closed-form ideal state

# Sweep defaults
DEFAULT_BETA = 0.3
DEFAULT_PRECISION = 12
DEFAULT_WORKERS = 1
DEFAULT_ALPHA_GRID = (0.06, 0.1, 0.2, 0.3)
DEFAULT_T_GRID = (0.9, 0.95, 0.99, 0.995, 1.0)
DEFAULT_A1_GRID = tuple(round(0.05 * k, 2) for k in range(21))
MAX_SWEEP_ALPHA = 0.8
MIN_SWEEP_T = 0.5

# Figure parameter sets
COHERENT_ALPHA_GRID = (0.1, 0.3, 0.5)
SWAP_ALPHA_GRID = (0.2, 0.4, 0.6)
SURFACE_A0 = complex(0.5**0.5, 0.0)
SURFACE_A1 = complex(0.0, 0.5**0.5)

VALID_MODELS = frozenset({"ideal", "fock-basis", "apd-pair"})
VALID_METHODS = frozenset({"coherent", "swap"})

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2
