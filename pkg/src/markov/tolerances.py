"""
Numerical Tolerances

Fixed constants shared by the chain, spectral, Kato and León-Perron modules.
Unlike runtime settings in ``src/config.py`` these are not read from the
environment: test baselines depend on them being bit-stable.
"""

# ---------------------------------------------------------------------------
# Chain validation
# ---------------------------------------------------------------------------
ROW_SUM_TOL = 1e-12
SUPPORT_FLOOR = 1e-14
STATIONARY_RESIDUAL_TOL = 1e-10
REVERSIBILITY_TOL = 1e-10
CENTERING_TOL = 1e-12
DECLARED_PI_TOL = 1e-8

# Relative singular-value cutoff for the dimension of ker(P' - I)
NULLSPACE_RCOND = 1e-10

# ---------------------------------------------------------------------------
# Spectral gaps
# ---------------------------------------------------------------------------
# Gap parameters below this are treated as exactly zero (A2 = 1/3 branch)
ZERO_GAP_TOL = 1e-12
# lambda at or above this means "no gap"
NO_GAP_THRESHOLD = 1.0 - 1e-10
CONDITION_WARNING = 1e12

# ---------------------------------------------------------------------------
# Kato series / combinatorics
# ---------------------------------------------------------------------------
MAX_KATO_ORDER = 8

# ---------------------------------------------------------------------------
# León-Perron reductions
# ---------------------------------------------------------------------------
PUSHFORWARD_MERGE_TOL = 1e-14

# ---------------------------------------------------------------------------
# Exact oracles
# ---------------------------------------------------------------------------
OVERFLOW_GUARD = 1e300
EXACT_TAIL_MAX_PATHS = 2**30
# Lattice detection for exact_tail (values must sit on k * step within this)
LATTICE_TOL = 1e-9

# ---------------------------------------------------------------------------
# Conjugates
# ---------------------------------------------------------------------------
CONJUGATE_XATOL_FACTOR = 1e-12
CONJUGATE_DISCREPANCY_TOL = 1e-6
