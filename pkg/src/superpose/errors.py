"""Exception hierarchy shared by every module of the package."""


class SuperposeError(Exception):
    """Base class for all errors raised by this package."""


# linalg
class LinalgError(SuperposeError, ValueError):
    pass


class NonSquare(LinalgError):
    pass


class NotHermitian(LinalgError):
    pass


class NotPositiveSemidefinite(NotHermitian):
    """Eigenvalue of a Gram matrix is negative beyond roundoff."""


class NoConvergence(SuperposeError, ArithmeticError):
    pass


class ZeroMatrix(LinalgError):
    pass


class ShapeMismatch(LinalgError):
    pass


class NonFinite(LinalgError):
    pass


# states
class LengthMismatch(SuperposeError, ValueError):
    pass


class ZeroVector(SuperposeError, ValueError):
    pass


class NotNormalized(SuperposeError, ValueError):
    pass


class ShrinkNotAllowed(SuperposeError, ValueError):
    pass


class DegenerateSuperposition(SuperposeError, ArithmeticError):
    """The superposed matrix is (numerically) zero; its concurrence is undefined."""


class FormulaMismatch(SuperposeError, ArithmeticError):
    """The equivalent concurrence formulas disagreed beyond tolerance."""


# bounds
class DomainError(SuperposeError, ValueError):
    pass


class AlphaZero(DomainError):
    pass


class RelationViolation(SuperposeError, ValueError):
    """A theorem was applied to states that do not satisfy its premise."""


# generators
class DimensionTooSmall(SuperposeError, ValueError):
    pass


class EmptyRange(SuperposeError, ValueError):
    pass


# harness / cli
class ConfigInvalid(SuperposeError, ValueError):
    pass


class EmptyStream(SuperposeError, ValueError):
    pass


class ParseError(SuperposeError, ValueError):
    pass
