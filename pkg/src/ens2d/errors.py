"""Failure modes that carry physical meaning.

Plain precondition violations (bad argument values, mismatched grids) raise
ValueError; the classes here mark conditions a caller may want to catch and
handle, e.g. by enlarging the box or shortening the run.
"""


class EnsError(Exception):
    """Base class for solver-specific failures."""


class MeanNotZeroError(EnsError, ValueError):
    """Periodic inversion of a field whose mean does not vanish."""


class EdgeDecayError(EnsError, ValueError):
    """Field does not decay at the box edge; weighted quadrature would blow up."""


class BlowupError(EnsError, RuntimeError):
    """Time step produced non-finite values or runaway sup-norm growth."""


class ConservationBreachError(EnsError, RuntimeError):
    """A step moved the conserved masses beyond the allowed drift."""


class NegativeVorticityError(EnsError, ValueError):
    """Entropy diagnostics called on a field with genuinely negative values."""


class ConfigError(EnsError, ValueError):
    """Scenario configuration failed validation."""
