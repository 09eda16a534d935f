"""Numerical tolerances and defaults shared across modules."""

# Hermiticity deviation allowed in constructed operators, relative to norm
HERMITICITY_TOL = 1e-12

# density-matrix sanity bounds used by the master-equation solver
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-6

# master-equation integration defaults
RK_RTOL = 1e-8
RK_ATOL = 1e-12

# default evolution horizon and settling window for steady rates [s]
DEFAULT_DURATION = 3e-6
DEFAULT_SETTLE_WINDOW = 5e-7
DEFAULT_SAMPLE_EVERY = 2e-8
