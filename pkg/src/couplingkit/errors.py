"""Exception hierarchy shared by all modules."""


class CouplingError(Exception):
    """Base class for every error raised by couplingkit."""


class FloatKindUnsupported(CouplingError):
    pass


class UnsortedInput(CouplingError):
    pass


class PoleHit(CouplingError):
    pass


class NotHerglotz(CouplingError):
    pass


class ZeroRemainderUnexpected(CouplingError):
    pass


class NotAdmissible(CouplingError):
    pass


class HasZeroOrInfiniteEta(CouplingError):
    pass


class InternalConsistency(CouplingError):
    pass


class BudgetExhausted(CouplingError):
    pass


class OutOfInterval(CouplingError):
    pass


class KinkCountMismatch(CouplingError):
    pass


class DegenerateSpectrum(CouplingError):
    pass


class SchemaError(CouplingError):
    """Malformed input document; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class DuplicateLambda(SchemaError):
    pass


class ZeroLambda(SchemaError):
    pass
