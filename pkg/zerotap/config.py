"""Configuration constants for zerotap."""

import math
from pathlib import Path

# Report schema (bumped whenever a report field changes meaning)
SCHEMA_VERSION = 1

# Extended-exponent arithmetic
MANTISSA_BITS = 53
# Exponent gap beyond which ext_add returns the larger operand unchanged
SWAMP_BITS = MANTISSA_BITS + 1
# ldexp shifts are clipped to this range; anything shifted further is 0 or inf anyway
LDEXP_CLIP = 1100

# Root finding
DEFAULT_RESIDUAL_TOL_LOG = math.log(1e-10)
DEFAULT_MAX_ITER = 200
DEFAULT_POLISH_ITER = 8
INITIAL_ANGLE_OFFSET = 0.5
CLUSTER_RADIUS = 1e-6

# Measures
MERGE_RADIUS = 1e-9
MASS_TOLERANCE = 1e-12
UNIFORM_CIRCLE_ATOMS = 4096
ANNULUS_DELTA = 0.1
QUANTILE_LEVELS = (0.1, 0.25, 0.5, 0.75, 0.9)
EMD_MAX_ITER = 10_000_000

# Profiles and detection
DEFAULT_GRID = (-1.0, 2.0, 301)
MIN_PIECE_INTERVALS = 3
MIN_DETECTOR_TOL = 1e-3
# Slopes closer than this belong to one piece even when the profile gap is wider
MAX_SLOPE_TOL = 0.5
# Truncated members are profiled up to ln(truncation radius) + GRID_MARGIN
GRID_MARGIN = 1.0

# Truncation of entire functions
TRUNCATION_MARGIN = 700.0
TRUNCATION_RADIUS = 4.0
TRUNCATION_K_MAX = 4096

# Tutte polynomials: degree n(n-1)/2 stays <= 120
TUTTE_MAX_N = 16

# Ruelle zeta normalization: smallest n with p^(n+1)(0)/p^n(0) >= RUELLE_RATIO
RUELLE_RATIO = 36.0
RUELLE_MAX_ITERATES = 64

# Derivative comparison
EXCLUSION_FACTOR = 0.05

# Figures
SVG_SIZE_PX = 1000
SVG_DPI = 100
SVG_HASH_SALT = "zerotap"

# Packaged defaults
DEFAULT_SETTINGS_PATH = Path(__file__).parent / "defaults.json"

# Output file names
MANIFEST_NAME = "manifest.json"
