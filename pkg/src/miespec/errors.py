# exception hierarchy shared by every miespec module


# base class so callers can catch anything raised by the library
class MieSpecError(Exception):
    """Base error for miespec"""


# bad input: out-of-range parameter, argument or channel
class DomainError(MieSpecError, ValueError):
    """Argument outside the domain of an operation"""


class NonPositiveCoupling(DomainError):
    """Coulomb coefficient A must be positive"""


class NonPositiveMass(DomainError):
    """Reduced mass and hbar must be positive"""


class UnphysicalChannel(DomainError):
    """Channel with a non-positive radicand"""


class PreconditionError(DomainError):
    """A specialized formula was called outside its parameter family"""


class EmptyGrid(DomainError):
    """Grid with no nodes"""


# numerical iteration did not settle
class ConvergenceError(MieSpecError, RuntimeError):
    """Iteration or order escalation failed to converge"""


class ResolutionError(MieSpecError):
    """Finite-difference grid does not resolve the requested bound state"""


class FamilyError(MieSpecError):
    """Ladder operation on a state outside a fixed-epsilon family"""


class ConfigError(MieSpecError):
    """Malformed run configuration"""
