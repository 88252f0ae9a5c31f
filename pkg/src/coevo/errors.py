"""Exception types shared across the simulation modules."""


class ParameterError(ValueError):
    """A model parameter or argument is outside its documented domain."""


class CapacityError(ValueError):
    """The request exceeds a brute-force enumeration limit."""


class ConfigError(ValueError):
    """An experiment configuration failed to load or validate."""


class StateError(RuntimeError):
    """An operation was applied to a simulation state that cannot accept it."""


class SelectionError(RuntimeError):
    """A biased random draw had no candidates to select from."""


class DegeneratePopulationError(RuntimeError):
    """Replicator weights vanished for every live group."""


class ReportError(OSError):
    """Report files could not be written."""
