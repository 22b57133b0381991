"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies.
"""


class SgceError(Exception):
    """Base class for all package errors."""


class ConfigError(SgceError):
    """Invalid configuration, arguments, or missing required inputs (exit 2)."""


class NumericError(SgceError):
    """Numeric failure: divergence, degenerate input, non-finite values (exit 3)."""


class TrainingDivergedError(NumericError):
    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"training diverged at step {step}")


class DegenerateInputError(NumericError):
    """Input is numerically degenerate (zero-norm latent, collinear points, ...)."""


class TopologyMismatchError(SgceError):
    """Mesh topology does not match the expected topology (exit 4)."""


class MeshIOError(SgceError):
    """Malformed or unsupported mesh file content (exit 5)."""
