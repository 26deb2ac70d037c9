"""Classical simulation of adaptive single-qubit measurements on the planar code.

Probabilities of measurement outcomes reduce to weighted cycle sums on planar
graphs, evaluated exactly through Pfaffians of Kasteleyn-oriented matrices.
"""

from .codestate import (
    X_BASIS,
    Z_BASIS,
    MeasurementBasis,
    QubitState,
    glue_doubled,
    overlap_abs,
    partial_overlap,
    syndrome_count,
)
from .errors import (
    ConnectivityViolation,
    DegenerateHistory,
    EmbeddingError,
    NonPlanarGluing,
    OddDefect,
    ResourceGuard,
)
from .lattice import EdgeId, Lattice, boundary_vertices, build_lattice, is_connected
from .mqc import (
    CallbackStrategy,
    Measurement,
    ScriptedStrategy,
    SimulationTrace,
    conditional_probability,
    outcome_probabilities,
    raster_basis,
    raster_order,
    raster_x,
    raster_z,
    simulate,
    validate_strategy,
)
from .pfaffian import log_abs_partition

__all__ = [
    "CallbackStrategy",
    "ConnectivityViolation",
    "DegenerateHistory",
    "EdgeId",
    "EmbeddingError",
    "Lattice",
    "Measurement",
    "MeasurementBasis",
    "NonPlanarGluing",
    "OddDefect",
    "QubitState",
    "ResourceGuard",
    "ScriptedStrategy",
    "SimulationTrace",
    "X_BASIS",
    "Z_BASIS",
    "boundary_vertices",
    "build_lattice",
    "conditional_probability",
    "glue_doubled",
    "is_connected",
    "log_abs_partition",
    "outcome_probabilities",
    "overlap_abs",
    "partial_overlap",
    "raster_basis",
    "raster_order",
    "raster_x",
    "raster_z",
    "simulate",
    "syndrome_count",
    "validate_strategy",
]
