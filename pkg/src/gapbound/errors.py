"""Exception hierarchy shared by all gapbound modules."""


class GapboundError(ValueError):
    """Base class for invalid inputs and violated preconditions."""


class NegativeEntry(GapboundError):
    pass


class RowSumViolation(GapboundError):
    pass


class Reducible(GapboundError):
    pass


class NotStationary(GapboundError):
    pass


class NotCentered(GapboundError):
    pass


class BadExponent(GapboundError):
    pass


class BadParams(GapboundError):
    pass


class ShortTrajectory(GapboundError):
    pass


class TooLarge(GapboundError):
    pass


class NotIntegrable(GapboundError):
    pass
