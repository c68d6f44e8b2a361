"""Exception hierarchy shared by every solver in the toolkit."""


class QSDError(Exception):
    """Base class for all toolkit errors."""


# operator validation
class NotHermitian(QSDError, ValueError):
    pass


class NotPositive(QSDError, ValueError):
    pass


class TraceNotOne(QSDError, ValueError):
    pass


class WrongDimension(QSDError, ValueError):
    pass


class DimensionMismatch(QSDError, ValueError):
    pass


class DimensionCapExceeded(QSDError, ValueError):
    pass


class VectorOutsideBall(QSDError, ValueError):
    pass


class NotDistribution(QSDError, ValueError):
    pass


class NotUnitary(QSDError, ValueError):
    pass


class InvalidOperator(QSDError, ValueError):
    pass


class IncompleteMeasurement(QSDError, ValueError):
    pass


class WrongCount(QSDError, ValueError):
    pass


class BadCoefficients(QSDError, ValueError):
    pass


class OutOfRange(QSDError, ValueError):
    pass


class MissingPairs(QSDError, ValueError):
    pass


# solver outcomes
class NoConvergence(QSDError, RuntimeError):
    """Raised by strict solvers; ``result`` holds the partial answer."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class CertificateFailed(QSDError, RuntimeError):
    pass


class ReconstructionFailed(QSDError, RuntimeError):
    pass


class Infeasible(QSDError, ValueError):
    pass


class SingularEnsemble(QSDError, ValueError):
    pass


class ZeroClickProbability(QSDError, ValueError):
    pass


class NotFound(QSDError, LookupError):
    pass


# scenario files
class ParseError(QSDError, ValueError):
    pass


class ValidationError(QSDError, ValueError):
    pass
