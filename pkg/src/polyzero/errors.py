"""Exception hierarchy shared by all modules."""


class PolyzeroError(Exception):
    """Base class for every error raised by this package."""


class InvalidSpec(PolyzeroError, ValueError):
    pass


class NotAPolynomial(PolyzeroError, ArithmeticError):
    pass


class NegativeCoefficient(PolyzeroError, ValueError):
    pass


class DegenerateVariance(PolyzeroError, ArithmeticError):
    pass


class Underflow(PolyzeroError, ArithmeticError):
    pass


class InvalidRank(PolyzeroError, ValueError):
    pass


class NotProductForm(PolyzeroError, ValueError):
    pass


class UnsupportedRange(PolyzeroError, ValueError):
    pass


class TooLarge(PolyzeroError, ValueError):
    pass


class NoReference(PolyzeroError, LookupError):
    pass


class NegativeMultiplicity(PolyzeroError, ArithmeticError):
    pass


class NonConvergence(PolyzeroError, ArithmeticError):
    pass


class TailUnderflow(PolyzeroError, ArithmeticError):
    pass


class IncompatibleStatistic(PolyzeroError, ValueError):
    pass


class FamilyParseError(PolyzeroError, ValueError):
    pass
