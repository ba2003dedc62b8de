"""Common constants."""

# Document format written and read by the command line interface
DOCUMENT_SCHEMA = "seriesflow/coefficients"
DOCUMENT_VERSION = 1

# Default absolute tolerance for float residual checks, scaled by (1 + largest input magnitude)
FLOAT_TOLERANCE = 1e-10

# Number of significant digits used when writing float coefficients
FLOAT_DIGITS = 17

# Exit statuses
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2

# Axis names
PVI_AXES = ("x",)
FLOW_AXES = ("x", "y", "z", "t")
BOUNDARY_LAYER_AXES = ("x", "y", "t")
WALL_AXES = ("x", "t")
