"""Exception hierarchy shared by all modules."""


class SuperintError(Exception):
    """Base class for all errors raised by this package."""


class LevelMismatchError(SuperintError):
    """Operands live in algebras with different generator budgets."""


class LevelBudgetError(SuperintError):
    """A computation needs more anticommuting generators than available."""


class ParityError(SuperintError):
    """An argument violates a declared even/odd parity constraint."""


class ZeroBodyError(SuperintError):
    """Inversion of an element whose scalar part vanishes."""


class DimensionError(SuperintError):
    """Matrix or map dimensions do not line up."""


class BodySingularError(SuperintError):
    """Neither diagonal block of a supermatrix is body-invertible."""


class DomainError(SuperintError):
    """The body of an evaluation point leaves the declared domain."""


class OracleOrderError(SuperintError):
    """A derivative-oracle coefficient was asked beyond its declared order."""


class ExactModeError(SuperintError):
    """The exact pipeline cannot represent the result; use quadrature."""


class ToleranceError(SuperintError):
    """Quadrature failed to meet the requested absolute tolerance."""


class ProblemFormatError(SuperintError):
    """A problem file or text form failed to parse."""
