"""Exception hierarchy shared by every geoprox module."""


class GeoproxError(Exception):
    """Base class for all library errors."""


class InvalidPoint(GeoproxError, ValueError):
    pass


class InvalidParameter(GeoproxError, ValueError):
    pass


class InvalidSet(GeoproxError, ValueError):
    pass


class UnsupportedSpace(GeoproxError):
    """Operation is not offered for this space (or set/space combination)."""


class NoConvergence(GeoproxError, RuntimeError):
    pass


class OutOfDomain(GeoproxError, ValueError):
    """Map evaluated at a point outside A ∪ B."""


class WrongMode(GeoproxError, ValueError):
    """Solver given a cyclic map where a noncyclic one is required, or vice versa."""


class DegenerateInput(GeoproxError, ValueError):
    pass
