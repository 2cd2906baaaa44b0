"""nevo: neighborhood-evolution analysis for time-sliced dynamic networks.

The pipeline: slice raw temporal edges into a dynamic network, detect
the six neighborhood events (birth, death, merge, split, expansion,
contraction) for every node and interval, then characterize nodes by
mining sequential patterns over their event itemsets and by clustering
their event-count series with DTW distances and silhouette-selected
cuts.
"""

from .clustering import (
    BestCut,
    Dendrogram,
    SilhouetteReport,
    agglomerate,
    distance_matrix,
    dtw_distance,
    select_best_cut,
    silhouette,
)
from .ego_events import (
    EventDatabase,
    EventKind,
    EventMatrix,
    EventRecord,
    NeighborhoodPartition,
    build_event_db,
    detect_events,
    ego_components,
    event_matrix,
    partitions_identical,
)
from .errors import ContractError, NevoError, ParseError
from .evolution_stats import (
    EventCountTable,
    RegressionResult,
    alive_and_density,
    correlate,
    per_interval_counts,
)
from .pattern_mining import (
    MiningConfig,
    SequentialPattern,
    attach_growth_rates,
    brute_force_patterns,
    brute_force_topk,
    format_pattern,
    mine_closed,
    mine_topk_longest,
    min_sup_scan,
)
from .sequence_db import (
    CountSeries,
    NodeSequence,
    SequenceDatabase,
    all_count_series,
    event_count_series,
    growth_rate,
    is_subsequence,
    restrict,
    support,
    to_sequence_db,
)
from .temporal_graph import (
    DynamicNetwork,
    SliceConfig,
    TimeSlice,
    build_slices,
    load_presliced,
    parse_temporal_edges,
    serialize_presliced,
    serialize_temporal_edges,
)
from .toy import toy_network

__version__ = "0.1.0"

__all__ = [
    "BestCut", "ContractError", "CountSeries", "Dendrogram", "DynamicNetwork",
    "EventCountTable", "EventDatabase", "EventKind", "EventMatrix", "EventRecord",
    "MiningConfig", "NeighborhoodPartition", "NevoError", "NodeSequence", "ParseError",
    "RegressionResult", "SequenceDatabase", "SequentialPattern", "SilhouetteReport",
    "SliceConfig", "TimeSlice", "agglomerate", "alive_and_density", "all_count_series",
    "attach_growth_rates", "brute_force_patterns", "brute_force_topk", "build_event_db",
    "build_slices", "correlate", "detect_events", "distance_matrix", "dtw_distance",
    "ego_components", "event_count_series", "event_matrix", "format_pattern",
    "growth_rate", "is_subsequence", "load_presliced", "mine_closed",
    "mine_topk_longest", "min_sup_scan", "parse_temporal_edges", "partitions_identical",
    "per_interval_counts", "restrict", "select_best_cut", "serialize_presliced",
    "serialize_temporal_edges", "silhouette", "support", "to_sequence_db", "toy_network",
]
