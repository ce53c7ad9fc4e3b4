"""Two-path matter-wave interference with unstable particles.

Propagation amplitudes for decaying beams, Mach-Zehnder-style detection
probabilities, fringe visibility and path predictability with their
duality audit, an independent split-step Schrodinger oracle, and a small
text format for layouts.
"""

from .core import (
    DECAY_EXPONENT_CAP,
    HADAMARD_SPLITTER,
    HIERARCHY_MIN,
    SYMMETRIC_SPLITTER,
    TOL_GEOM,
    BeamSplitterConvention,
    PathSegment,
    TwoPathLayout,
    UnstableParticle,
    custom_splitter,
    free_amplitude,
    junction_factors,
    path_amplitude,
    potential_phase,
    segment_amplitude,
)
from .dsl import LayoutDocument, SweepSpec, parse, serialize
from .errors import (
    BoundaryContamination,
    ConfigurationError,
    DomainError,
    RegimeError,
    UndefinedResultError,
    UnstableMziError,
)
from .interferometer import (
    DUALITY_TOL,
    THETA_SATURATION,
    DetectionProbabilities,
    DualityReport,
    FringeNormalization,
    FringeScan,
    detection_probabilities,
    detection_probabilities_closed_form,
    duality_audit,
    fringe_scan,
    predictability,
    predictability_closed_form,
    theta_cav,
    visibility_closed_form,
    visibility_operational,
)
from .oracle import (
    ORACLE_TOL,
    STEP_BOUND,
    OracleReport,
    OracleSettings,
    SpatialGrid,
    SplittingStudy,
    WavepacketState,
    gaussian_packet,
    propagate,
    splitting_convergence_study,
    verify_cavity_traversal,
    verify_free_amplitude,
    write_field_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
