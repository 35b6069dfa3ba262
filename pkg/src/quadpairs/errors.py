"""Exception hierarchy.

Everything raised on purpose by the library derives from ``QuadPairsError``.
Validation problems additionally derive from ``ValueError`` and cost-limit
problems from ``BudgetError`` so the CLI can map them to exit codes 2 and 3.
"""


class QuadPairsError(Exception):
    pass


class ValidationError(QuadPairsError, ValueError):
    pass


class BudgetError(QuadPairsError):
    pass


class NotInvertible(ValidationError):
    pass


class BadModulus(ValidationError):
    pass


class BadPrime(ValidationError):
    pass


class ModulusTooLarge(BudgetError):
    pass


class DegeneratePair(ValidationError):
    pass


class BoxTooLarge(BudgetError):
    pass


class BudgetExceeded(BudgetError):
    pass


class MethodUnavailable(ValidationError):
    pass


class SupportMismatch(ValidationError):
    pass


class NotCoprimeToDiscriminant(ValidationError):
    pass


class PreconditionViolated(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class UnsupportedWeight(ValidationError):
    pass


class IntegerOverflow(QuadPairsError, OverflowError):
    pass
