"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Parameters outside the admissible range."""


class BracketError(ArithmeticError):
    """Endpoint signs of the critical-dimension bracket are wrong."""


class NoRootError(ArithmeticError):
    """The scan found no sign change inside the bracket."""


class GammaNonpositive(ParameterError):
    """The singular solution does not exist for these parameters."""


class RangeError(ValueError):
    """A radius lies outside the grid, or an integral diverges at the origin."""


class StencilError(RangeError):
    """Evaluation radii too close to the grid ends for a centered stencil."""


class SupportError(ValueError):
    """A test function is not compactly supported inside the grid."""


class DegreeOverflow(OverflowError):
    """Polynomial degree above ``identities.MAX_DEGREE``."""


class ParseError(ValueError):
    """Malformed sweep input; carries the 1-based line and the column name."""

    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column!r}: {message}")
