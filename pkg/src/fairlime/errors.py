"""Exception types shared across the toolkit."""


class DataError(ValueError):
    """Malformed input data or a violated dataset contract."""


class ModelFormatError(ValueError):
    """Corrupt, truncated, or wrong-variant model file."""


class MetricUndefinedError(ValueError):
    """A fairness metric's conditioning population is empty.

    Raised instead of silently returning 0, which would fake fairness.
    Attributes identify the metric, the offending group counts, and
    (for mismatch computations) which side failed.
    """

    def __init__(self, message, *, metric=None, group_counts=None, side=None):
        super().__init__(message)
        self.metric = metric
        self.group_counts = group_counts
        self.side = side


class OptimizationError(RuntimeError):
    """Numeric failure inside a solver: divergence or rank deficiency."""

    def __init__(self, message, *, restart_index=None):
        super().__init__(message)
        self.restart_index = restart_index
