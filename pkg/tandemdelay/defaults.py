# coding: utf-8

"""
This module provides a central location for defining default behavior.

Throughout the package, these defaults take effect only when the user
does not otherwise specify a value.  Model parameters (matrices, buffer
sizes) never have defaults; only numerical and simulation settings do.

"""

from tandemdelay.common import SolverMethod


# Tolerance on the row sums of D0 + D1, of alpha, and of t e + t0.
STOCHASTIC_TOL = 1e-12

# Tolerance on the row sums of the assembled kernel P.
KERNEL_TOL = 1e-12

# Tolerance on the row sums of the non-absorbing rows of the tilde kernel.
TILDE_TOL = 1e-10

# Successive substitution for R: stop when the max entrywise change is
# below R_TOL.
R_TOL = 1e-13
R_MAX_ITER = 100000

# A level rate within LEVEL_RATE_TOL of R is replaced by R.
LEVEL_RATE_TOL = 1e-13

# Jacobi iteration for the boundary levels.
JACOBI_TOL = 1e-12
JACOBI_MAX_ITER = 100000
# Give up when the residual has grown for this many consecutive iterations.
JACOBI_DIVERGENCE_WINDOW = 1000

# Negative probabilities above -NEGATIVE_CLAMP are floating-point noise and
# are clamped to zero; anything lower is an error.
NEGATIVE_CLAMP = 1e-12

# The stationary-solver method: 'direct' or 'mg' (matrix-geometric).
METHOD = SolverMethod.direct

# The delay recursion stops once 1 - CPD(n) < TAIL_EPS or n reaches N_MAX.
TAIL_EPS = 1e-10
N_MAX = 100000

# Averages computed from the delay pmf are trusted only when
# n * (1 - CPD(n)) < TAIL_TRUST at the truncation point.
TAIL_TRUST = 1e-6

# Relative disagreement allowed between the pmf-based and the Little's-law
# average delay before a ConsistencyError is raised.
AVERAGE_DELAY_RTOL = 1e-4

# PMF ripples smaller than this are ignored when checking unimodality.
UNIMODAL_NOISE_FLOOR = 1e-12

# The tail of a delay pmf is summarized by the delay bound that this share
# of the tasks meets.
TAIL_QUANTILE = 0.99

# The length of one slot in milliseconds (reporting only).
SLOT_MS = 1.0

# The delay bounds (slots) reported when a config does not list any.
BOUNDS = (10, 20, 30, 40, 50, 60)

# Simulation: sequential procedure settings.
CONFIDENCE = 0.95
RELATIVE_ACCURACY = 0.05
WARMUP_SLOTS = 10000
SEGMENT_SLOTS = 200000
MIN_SEGMENTS = 5
MAX_SLOTS = 50000000
SEED = 1
# Either 'replications' (independent runs, each with its own warmup) or
# 'batch_means' (one long run cut into consecutive batches).
ESTIMATION_POLICY = 'replications'

# The number of worker processes used by sweeps and simulation rounds.
WORKERS = 1
