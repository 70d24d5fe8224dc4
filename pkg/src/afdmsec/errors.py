"""Exception types shared across the package."""


class InputShapeError(ValueError):
    """An array argument has the wrong length or shape."""


class ConfigurationError(ValueError):
    """A parameter set violates a documented invariant."""


class UnsupportedOperationError(TypeError):
    """The operation is not defined for this variant (e.g. wrong phase kind)."""


class NumericalRankError(RuntimeError):
    """A linear system is numerically singular (zero-noise MMSE on a rank-deficient channel)."""
