class CuspflatError(Exception):
    """Base class for errors raised by cuspflat."""


class DomainError(CuspflatError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class InfeasibleConfigurationError(CuspflatError, ValueError):
    """The requested cusp power is at or above the critical power."""


class SingularPointError(CuspflatError, ValueError):
    """Evaluation at a point where the map or its differential blows up."""
