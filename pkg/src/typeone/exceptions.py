"""Exception taxonomy shared across the package."""


class TypeOneError(Exception):
    """Base class for all package errors."""


class InvalidInputError(TypeOneError):
    """Argument violates a documented precondition (shape, dimension, range)."""


class ConfigError(TypeOneError):
    """Experiment or attack configuration is inconsistent or incomplete."""


class TrainingError(TypeOneError):
    """Training diverged (non-finite loss). Carries the offending epoch."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class NumericalError(TypeOneError):
    """Non-finite value hit inside an attack loop. Carries the iteration."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class CheckpointError(TypeOneError):
    """Checkpoint file missing, corrupt, or written by an unknown version."""


class DataError(TypeOneError):
    """Dataset ingestion or file output failed. Names the offending path."""


class DegenerateReferenceError(TypeOneError):
    """Reference vector contains (near-)zero entries; relative deviation undefined."""
