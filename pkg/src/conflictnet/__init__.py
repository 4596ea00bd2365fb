"""Signed-network and event-chain analysis for conflict event data.

Two pipelines over ACLED-style incident tables:

* a signed directed network of alliance and attack ties, with per-layer
  centralities, category-mixing tests, spectral embedding, and per-actor
  aggression scores;
* chronological event chains with great-circle step distances, border
  proximity, per-year movement tables, and a movement-scenario classifier.

The ``cnl`` command line drives both as a reproducible artifact pipeline.
"""

__version__ = "0.1.0"

from .errors import (
    ChainTooShort,
    ConflictNetError,
    DegenerateGraph,
    DimensionTooLarge,
    EigFailure,
    EmptyAfterIsolateRemoval,
    EmptyBorderSet,
    EmptyChain,
    EmptyName,
    MalformedHeader,
    MissingNode,
    MissingPrincipal,
    NoConvergence,
    NoTies,
    SchemaMismatch,
)
from .ingest import (
    CATEGORIES,
    VIOLENT_TYPES,
    ActorCatalog,
    ColumnMapping,
    EventRecord,
    EventType,
    RowError,
    canonicalize_actor,
    filter_events,
    parse_events,
)
from .graph import (
    NEGATIVE,
    POSITIVE,
    Node,
    SignedDiGraph,
    Tie,
    TieMode,
    WeightScheme,
    build_graph,
    directed_expand,
    extract_ties,
    split_id,
    subgraph,
    symmetrize,
)
from .metrics import (
    EIResult,
    LayerView,
    MetricReport,
    TransitivityReport,
    TriadCensus,
    betweenness_centrality,
    clustering_coefficient,
    degree_centrality,
    density,
    ei_index,
    eigenvector_centrality,
    signed_transitivity,
    triad_census,
)
from .spectral import (
    GREEN,
    ORANGE,
    RED,
    AggressionScore,
    Embedding,
    SignedLaplacian,
    aggression_scores,
    classify,
    eigh_ascending,
    embed,
    embed_directed,
    embed_graph,
    embedding_csv,
    embedding_svg,
    scores_csv,
    signed_laplacian,
)
from .geo import (
    EARTH_RADIUS_KM,
    INDETERMINATE,
    MOBILITY,
    SANCTUARY,
    BorderSet,
    EventChain,
    GeoPoint,
    ScenarioReport,
    YearMetrics,
    chain_events,
    classify_scenario,
    distance_to_border,
    export_chain_geojson,
    haversine_km,
    year_metrics,
    year_metrics_csv,
)
from .estimators import AggressionScorer, SignedSpectralEmbedding
from .datasets import make_star_attack, make_two_block_graph

__all__ = [
    "__version__",
    # errors
    "ConflictNetError",
    "MalformedHeader",
    "EmptyName",
    "MissingPrincipal",
    "DegenerateGraph",
    "NoConvergence",
    "NoTies",
    "EmptyAfterIsolateRemoval",
    "DimensionTooLarge",
    "EigFailure",
    "MissingNode",
    "EmptyBorderSet",
    "ChainTooShort",
    "EmptyChain",
    "SchemaMismatch",
    # ingest
    "CATEGORIES",
    "VIOLENT_TYPES",
    "ActorCatalog",
    "ColumnMapping",
    "EventRecord",
    "EventType",
    "RowError",
    "canonicalize_actor",
    "parse_events",
    "filter_events",
    # graph
    "POSITIVE",
    "NEGATIVE",
    "Node",
    "Tie",
    "TieMode",
    "WeightScheme",
    "SignedDiGraph",
    "build_graph",
    "extract_ties",
    "subgraph",
    "symmetrize",
    "split_id",
    "directed_expand",
    # metrics
    "LayerView",
    "MetricReport",
    "EIResult",
    "TriadCensus",
    "TransitivityReport",
    "degree_centrality",
    "eigenvector_centrality",
    "betweenness_centrality",
    "density",
    "clustering_coefficient",
    "signed_transitivity",
    "ei_index",
    "triad_census",
    # spectral
    "SignedLaplacian",
    "Embedding",
    "AggressionScore",
    "eigh_ascending",
    "signed_laplacian",
    "embed",
    "embed_graph",
    "embed_directed",
    "aggression_scores",
    "classify",
    "GREEN",
    "ORANGE",
    "RED",
    "embedding_csv",
    "scores_csv",
    "embedding_svg",
    # geo
    "EARTH_RADIUS_KM",
    "GeoPoint",
    "BorderSet",
    "EventChain",
    "YearMetrics",
    "ScenarioReport",
    "haversine_km",
    "chain_events",
    "distance_to_border",
    "year_metrics",
    "year_metrics_csv",
    "export_chain_geojson",
    "classify_scenario",
    "SANCTUARY",
    "MOBILITY",
    "INDETERMINATE",
    # estimators & datasets
    "SignedSpectralEmbedding",
    "AggressionScorer",
    "make_two_block_graph",
    "make_star_attack",
]
