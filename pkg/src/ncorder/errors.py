"""Exception hierarchy shared by all modules."""


class NCOrderError(Exception):
    """Base class for every error raised by :mod:`ncorder`."""


class InputError(NCOrderError, ValueError):
    """Malformed input: wrong shape, not hermitian, not a projection, ..."""


class DomainError(NCOrderError, ValueError):
    """A function was evaluated outside the set where it is defined."""


class ResourceError(NCOrderError, RuntimeError):
    """An enumeration would exceed its documented size bound."""


class UnsupportedMorphismError(NCOrderError, ValueError):
    pass


class DegenerateLatticeError(NCOrderError, ValueError):
    """The two projections commute, so the 16-element lattice collapses."""


class AmbiguityError(NCOrderError):
    """Oracle evidence is contradictory; ``witnesses`` holds the culprits."""

    def __init__(self, message, witnesses=None):
        super().__init__(message)
        self.witnesses = list(witnesses or [])


class InconsistencyError(NCOrderError):
    pass
