"""Hierarchy-distance metrics between clinical code sets.

The toolkit loads a subsumption terminology (SNOMED CT RF2 snapshots or
a plain edge list) into a validated is-a DAG, measures least-common-
ancestor hop distances between concepts and average-minimum distances
between code sets, and reproduces a full inter-coder agreement
evaluation: distance-band tables, micro-averages, similarity matrices,
and qualitative cross-tabulations.
"""

from .errors import (
    ConfigError,
    CycleDetected,
    DanglingEdge,
    DuplicateRecord,
    GraphValidationError,
    HierdistError,
    IngestIOError,
    InvalidThresholds,
    MalformedLine,
    MissingRating,
    NoCommonAncestor,
    OutOfFocus,
    SelfEdge,
    UnknownCoder,
    UnknownConcept,
)
from .hierarchy import (
    FocusView,
    HierarchyGraph,
    ancestor_distances,
    build_hierarchy,
    cached_concept_distance,
    concept_distance,
    concept_distance_witness,
    focus_subgraph,
    transitive_reduction,
)
from .ingest import (
    ConceptRow,
    IngestConfig,
    IngestReport,
    IngestResult,
    ingest,
    parse_edge_list,
    parse_rf2_concepts,
    parse_rf2_relationships,
    write_edge_list,
)
from .metric import (
    DEFAULT_THRESHOLDS,
    CodeSet,
    DenominatorPolicy,
    DistanceResult,
    NormalizationReport,
    band_labels,
    band_of_value,
    code_set_distance,
    distance_band,
    normalize_code_set,
    normalize_thresholds,
)
from .evaluation import (
    AnnotationRecord,
    AnnotationSet,
    BandTable,
    ComparisonRow,
    CountMatrix,
    ExclusionReason,
    ExclusionRecord,
    Rating,
    Stratum,
    acceptability_summary,
    band_table,
    cross_band_matrix,
    distance_vs_rating,
    load_annotations,
    micro_average,
    pair_comparison,
    rating_crosstab,
)
from .config import CLINICAL_FINDING_ROOT, RunConfig, load_run_config
from .report import run_report

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "AnnotationSet",
    "BandTable",
    "CLINICAL_FINDING_ROOT",
    "CodeSet",
    "ComparisonRow",
    "ConceptRow",
    "ConfigError",
    "CountMatrix",
    "CycleDetected",
    "DanglingEdge",
    "DEFAULT_THRESHOLDS",
    "DenominatorPolicy",
    "DistanceResult",
    "DuplicateRecord",
    "ExclusionReason",
    "ExclusionRecord",
    "FocusView",
    "GraphValidationError",
    "HierarchyGraph",
    "HierdistError",
    "IngestConfig",
    "IngestIOError",
    "IngestReport",
    "IngestResult",
    "InvalidThresholds",
    "MalformedLine",
    "MissingRating",
    "NoCommonAncestor",
    "NormalizationReport",
    "OutOfFocus",
    "Rating",
    "RunConfig",
    "SelfEdge",
    "Stratum",
    "UnknownCoder",
    "UnknownConcept",
    "acceptability_summary",
    "ancestor_distances",
    "band_labels",
    "band_of_value",
    "band_table",
    "build_hierarchy",
    "cached_concept_distance",
    "code_set_distance",
    "concept_distance",
    "concept_distance_witness",
    "cross_band_matrix",
    "distance_band",
    "distance_vs_rating",
    "focus_subgraph",
    "ingest",
    "load_annotations",
    "load_run_config",
    "micro_average",
    "normalize_code_set",
    "normalize_thresholds",
    "pair_comparison",
    "parse_edge_list",
    "parse_rf2_concepts",
    "parse_rf2_relationships",
    "rating_crosstab",
    "run_report",
    "transitive_reduction",
    "write_edge_list",
]
