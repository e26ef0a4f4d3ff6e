"""Detection and profiling of statistically significant hot and cold spots
of momentary travel experience from geo-referenced experience-sampling
reports."""

from .agreement import fleiss_kappa
from .errors import (
    AllNeighborsWarning,
    DegenerateMarginals,
    DegenerateValues,
    EmptyDataset,
    EsmSpotsError,
    IdOutOfRange,
    InputMismatch,
    InsufficientPoints,
    InvalidBand,
    InvalidConfig,
    InvalidPValue,
    MonotoneCurveWarning,
    NoNeighbors,
    NoSignificantPeakWarning,
    SchemaError,
    SmallSampleWarning,
)
from .geo import GeoPoint, PlanarPoint, SpatialIndex, project, unproject
from .pipeline import AnalysisConfig, AnalysisResult, analyze_reports
from .reports import (
    EsmReport,
    EventCategory,
    ParseResult,
    Rejection,
    experience_score,
    experience_scores,
    locational_outliers,
    parse_reports,
    write_reports,
)
from .spots import Spot, group_spots, spot_report
from .stats import (
    ALPHA_LEVELS,
    BandSelection,
    FdrLevel,
    FdrOutcome,
    GiResult,
    MoranResult,
    NeighborGraph,
    build_graph,
    classify,
    fdr_correct,
    fdr_outcome,
    gi_star,
    incremental_autocorrelation,
    morans_i,
)
from .synth import (
    CalibrationResult,
    CalibrationRow,
    ClusterSpec,
    GroundTruth,
    SyntheticScenario,
    generate,
    null_scenario,
    run_calibration,
    standard_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_LEVELS",
    "AllNeighborsWarning",
    "AnalysisConfig",
    "AnalysisResult",
    "BandSelection",
    "CalibrationResult",
    "CalibrationRow",
    "ClusterSpec",
    "DegenerateMarginals",
    "DegenerateValues",
    "EmptyDataset",
    "EsmReport",
    "EsmSpotsError",
    "EventCategory",
    "FdrLevel",
    "FdrOutcome",
    "GeoPoint",
    "GiResult",
    "GroundTruth",
    "IdOutOfRange",
    "InputMismatch",
    "InsufficientPoints",
    "InvalidBand",
    "InvalidConfig",
    "InvalidPValue",
    "MonotoneCurveWarning",
    "MoranResult",
    "NeighborGraph",
    "NoNeighbors",
    "NoSignificantPeakWarning",
    "ParseResult",
    "PlanarPoint",
    "Rejection",
    "SchemaError",
    "SmallSampleWarning",
    "SpatialIndex",
    "Spot",
    "SyntheticScenario",
    "analyze_reports",
    "build_graph",
    "classify",
    "experience_score",
    "experience_scores",
    "fdr_correct",
    "fdr_outcome",
    "fleiss_kappa",
    "generate",
    "gi_star",
    "group_spots",
    "incremental_autocorrelation",
    "locational_outliers",
    "morans_i",
    "null_scenario",
    "parse_reports",
    "project",
    "run_calibration",
    "spot_report",
    "standard_scenario",
    "unproject",
    "write_reports",
]
