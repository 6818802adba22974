"""Exception types raised by the package."""


class DimensionError(ValueError):
    """Array shapes or lengths do not agree."""


class ModelError(ValueError):
    """An exponential model or signal is unusable (empty, zero, bad separation)."""


class RankError(ValueError):
    """Requested rank is outside what the data can support."""


class ConfigError(ValueError):
    """Solver or experiment configuration violates its constraints."""


class NumericalError(RuntimeError):
    """A linear-algebra kernel failed."""
