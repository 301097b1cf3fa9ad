"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line can map failures
onto its documented exit statuses without a lookup table.
"""


class CPGraphError(Exception):
    exit_code = 1


class UsageError(CPGraphError):
    exit_code = 2


class DataValidationError(CPGraphError, ValueError):
    exit_code = 3


class NumericalError(CPGraphError, ArithmeticError):
    exit_code = 4


# data validation
class EmptySet(DataValidationError):
    pass


class InvalidScale(DataValidationError):
    pass


class InvalidVariance(DataValidationError):
    pass


class InvalidWeights(DataValidationError):
    pass


class ShapeMismatch(DataValidationError):
    pass


class NonBinaryAttributes(DataValidationError):
    pass


class EmptyData(DataValidationError):
    pass


class NotPSD(DataValidationError):
    pass


class ZeroVector(DataValidationError):
    pass


class NonFinite(DataValidationError):
    pass


# numerical failures
class NoConvergence(NumericalError):
    pass


class NotPD(NumericalError):
    pass


class InfeasibleStart(NumericalError):
    pass


class Infeasible(NumericalError):
    pass


class SingularAtZeroPenalty(NumericalError):
    pass


class ZeroGraphWarning(UserWarning):
    """A graph with no nonzero entries could not be normalized."""
