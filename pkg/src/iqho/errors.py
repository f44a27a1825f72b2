"""Exception types shared across the package."""


class IncompatiblePair(ValueError):
    """The product conj(f)*g is not integrable over the real line."""


class DegreeTooLarge(ValueError):
    pass


class DomainError(ValueError):
    pass


class RegimeError(ValueError):
    """Operation not defined for the requested theta regime."""


class SpanError(ValueError):
    pass


class MembershipError(ValueError):
    """Function outside the weighted space required by the operation."""


class ScheduleError(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass
