"""Exception types shared across the package."""


class ConnectivityViolation(ValueError):
    """Measured or unmeasured edge set is not connected.

    ``step`` and ``edge`` are filled in by the simulator when the violation
    happens at a known step of a measurement sequence.
    """

    def __init__(self, message, step=None, edge=None):
        super().__init__(message)
        self.step = step
        self.edge = edge


class OddDefect(ValueError):
    """A connected component carries an odd number of defect vertices."""


class NonPlanarGluing(ConnectivityViolation):
    """No single face of G_E touches every boundary vertex.

    Happens when the complement is connected only through a vertex shared by
    two faces of G_E. glue_doubled raises it; partial_overlap only raises it
    when too many boundary vertices sit off the gluing face.
    """


class EmbeddingError(ValueError):
    """A rotation system fails the Euler check."""


class DegenerateHistory(RuntimeError):
    """The recorded outcome history has probability zero."""


class ResourceGuard(ValueError):
    """Brute-force oracle requested beyond its size limit."""
