"""Error types shared across the package.

Everything subclasses ValueError so callers (notably the CLI) can treat any
of these as a usage/configuration problem with one except clause.
"""


class GeometryError(ValueError):
    """Invalid lattice geometry (zero/negative extent, bad dimension)."""


class CapacityError(ValueError):
    """A size cap was exceeded (site count, dense-simulation qubit count)."""


class StrategyError(ValueError):
    """Unsupported qubit-placement strategy for the requested layout."""


class PulseError(ValueError):
    """Ill-formed pulse or schedule layer (empty controls, clashing targets)."""


class RootError(ValueError):
    """Broadcast root is not a participant."""


class TrivialFanoutError(ValueError):
    """Fanout requested with fewer than two data qubits."""


class DomainError(ValueError):
    """Parameter outside the domain of a scaling-law formula."""


class ParameterError(ValueError):
    """Generic invalid parameter (band out of range, empty region, ...)."""
