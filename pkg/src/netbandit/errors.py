"""Exception types raised by the simulation library."""


class NetbanditError(Exception):
    """Base class for all library-specific errors."""


class SelfLoopError(NetbanditError):
    """An edge connects a unit to itself."""


class DisconnectedError(NetbanditError):
    """The graph is not connected."""


class IndexOutOfRangeError(NetbanditError):
    """A unit index falls outside [0, n_units)."""


class InfeasibleError(NetbanditError):
    """A generator cannot satisfy its structural constraints."""


class ArmOutOfRangeError(NetbanditError):
    """An arm index falls outside [0, k)."""


class TooLargeError(NetbanditError):
    """The assignment space exceeds the configured enumeration budget."""


class UnexploredError(NetbanditError):
    """A required local configuration has never been observed."""


class InvalidColoringError(NetbanditError):
    """A color class violates the doubly-independent requirement."""


class HorizonTooShortError(NetbanditError):
    """The horizon cannot accommodate the requested schedule or gaps."""


class DecoyArmError(NetbanditError):
    """A decoy assignment uses the rewarded arm."""


class ConfigError(NetbanditError):
    """An experiment configuration is malformed."""
