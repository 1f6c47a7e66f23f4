"""Exception types raised across the package."""


class AreaError(Exception):
    """Base class for all errors raised by locc_areas."""


class InputError(AreaError, ValueError):
    """Malformed or invalid user input (CLI exit code 2)."""


class ParseError(InputError):
    pass


class SumNotOne(InputError):
    pass


class NegativeCoefficient(InputError):
    pass


class NonIntegerLabel(AreaError, ValueError):
    pass


class DomainError(AreaError, ValueError):
    pass


class RegionOutOfBounds(AreaError, ValueError):
    pass


class DestinationOccupied(AreaError, ValueError):
    pass


class ResolutionTooFine(AreaError, ValueError):
    pass


class NotReachable(AreaError):
    """Target profile would need a net downward movement of area."""


class NotConvertible(AreaError):
    """Start state does not satisfy the majorization condition for the target."""


class InternalColouringFailure(AreaError, RuntimeError):
    """A colouring invariant that should always hold was violated (bug sentinel)."""


class RowsNotDistinct(AreaError):
    pass


class SlicesNotDistinct(AreaError):
    pass


class ToleranceExceeded(AreaError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ZeroProbabilityOutcome(UserWarning):
    """Emitted (not raised) when a protocol outcome has probability zero."""
