"""Exception types shared across the simulator."""


class StpmError(Exception):
    """Base class for all simulator errors."""


class ConfigError(StpmError):
    """Invalid parameter values or a malformed input document."""


class CapacityError(StpmError):
    """A workload does not fit the target geometry.

    ``dimension`` names the bound that was violated ("blocks", "steps",
    "patterns" or "word_lines").
    """

    def __init__(self, message: str, dimension: str | None = None):
        super().__init__(message)
        self.dimension = dimension


class DimensionError(StpmError):
    """Mismatched or empty pattern/sequence dimensions."""


class MissingBlockError(StpmError):
    """Cross-block aggregation was given an incomplete hit map."""
