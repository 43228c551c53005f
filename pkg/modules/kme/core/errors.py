"""
Error types for the KME engine.

Every error subclasses KMEError plus the builtin that best describes it, so
callers can catch either the project-wide base or the familiar builtin.
"""


class KMEError(Exception):
    """Base class for all KME errors"""


class InvalidHyperparameterError(KMEError, ValueError):
    """A hyperparameter is outside its valid range or not finite"""


class DimensionMismatchError(KMEError, ValueError):
    """A state vector does not match the model dimension"""


class InvalidDistributionError(KMEError, ValueError):
    """A synthetic distribution spec violates its invariants"""


class UnsupportedDimensionError(KMEError, ValueError):
    """A grid-based routine was asked to run in too many dimensions"""


class ZeroMeasureCellError(KMEError, ArithmeticError):
    """A cluster cell received no Monte-Carlo samples (mc_samples too small)"""


class EntropyUnavailableError(KMEError, ValueError):
    """No closed-form entropy exists for the requested distribution"""


class NoCommitsError(KMEError, RuntimeError):
    """An instrumentation ratio was requested before any commit"""


class InvalidStateError(KMEError, ValueError):
    """A state vector or cluster index is malformed (non-finite, out of range)"""


class SweepFailedError(KMEError, RuntimeError):
    """One or more seeds of a multi-seed run raised"""
