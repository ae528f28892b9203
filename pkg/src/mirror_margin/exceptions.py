"""Exception hierarchy shared by every module of the package."""


class MirrorMarginError(Exception):
    """Base class for all errors raised by mirror_margin."""


class ContractError(MirrorMarginError, ValueError):
    """A precondition on the arguments was violated (shape, sign, zero vector...)."""


class NumericError(MirrorMarginError, ArithmeticError):
    """An iterative numerical routine failed to converge or produced non-finite values."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class LimitError(NumericError):
    """The horizon limit did not stabilise before the step schedule was exhausted."""

    def __init__(self, message, last_values=None):
        super().__init__(message)
        self.last_values = last_values


class GeometryError(NumericError):
    """A radial bisection could not bracket the level set boundary."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class DegenerateShapeError(MirrorMarginError):
    """The normalised sublevel sets flatten out; the horizon shape has empty interior."""

    def __init__(self, message, min_radial=None):
        super().__init__(message)
        self.min_radial = min_radial


class InfeasibleError(MirrorMarginError):
    """The data are not linearly separable (or an LP has an empty feasible set)."""


class GenerationError(MirrorMarginError):
    """The synthetic data generator could not produce a separable sample."""
