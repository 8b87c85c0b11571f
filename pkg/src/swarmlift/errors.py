"""Exception types shared across the library."""


class SwarmliftError(Exception):
    """Base class for all library-specific errors."""


class CoincidentAgents(SwarmliftError):
    """Two neighboring vehicles are closer than the coincidence threshold.

    Unit vectors along the edge are numerically meaningless below the
    threshold, so computation stops instead of producing garbage.
    """


class DimensionMismatch(SwarmliftError):
    """An array argument does not match the formation's dimensions."""


class InfeasibleVelocity(SwarmliftError):
    """A requested vehicle velocity is not in the span of its incident edges."""


class SingularG(SwarmliftError):
    """The control effectiveness matrix is not invertible (extreme attitude)."""


class NonFiniteState(SwarmliftError):
    """Simulation state left the finite range (blown-up integration).

    ``partial_trace`` carries whatever was recorded before the abort, or None.
    """

    def __init__(self, message, partial_trace=None):
        super().__init__(message)
        self.partial_trace = partial_trace


class Overloaded(SwarmliftError):
    """Vertical load meets or exceeds the total thrust budget."""


class RopeInfeasible(SwarmliftError):
    """Requested vehicle separation is geometrically impossible for the ropes."""


class NoMargin(SwarmliftError):
    """Horizontal force budget does not exceed the tension bound."""


class NotRunning(SwarmliftError):
    """A live command was sent to a simulation that is not running."""


class EmptyTrace(SwarmliftError):
    """Metrics were requested for a trace with no records."""
