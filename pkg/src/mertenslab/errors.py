"""Exception types shared across the package."""


class RangeError(ValueError):
    """An argument lies outside the operation's admissible range."""


class CapabilityError(RuntimeError):
    """A request exceeds what the built tables can answer.

    Carries ``max_usable`` so callers can clamp and retry.
    """

    def __init__(self, message, max_usable=None):
        super().__init__(message)
        self.max_usable = max_usable


class CrossCheckError(RuntimeError):
    """Two independent computations of the same quantity disagree."""

    def __init__(self, message, worst_n=None, discrepancy=None):
        super().__init__(message)
        self.worst_n = worst_n
        self.discrepancy = discrepancy
