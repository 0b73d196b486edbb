"""Instant catalog search with behavioral recommendations and organized rows."""

from .catalog import Catalog, Collection, EntityId, Talent, Video, load_catalog
from .behavior import (
    CoPlayModel,
    InteractionLog,
    PlayEvent,
    QueryAssociationModel,
    SearchEvent,
    SearchRecommendation,
    build_associations,
    build_coplay,
    item_similarity,
    load_logs,
    query_associations,
    recommend_for_context,
    similar_videos,
)
from .facet import Facet, FacetEstimate, IntentEstimate, detect_facet, estimate_intent, estimate_specificity
from .instant_index import InstantIndex, SearchMatch, build_index, match_prefix, normalize
from .organizer import (
    GroupDefinition,
    GroupKind,
    GroupingParams,
    ResultGroup,
    SearchPage,
    compose_page,
    default_group_definitions,
    generate_candidates,
    make_pills,
    rank_groups,
)
from .ranker import (
    FeatureVector,
    Provenance,
    RelevanceModel,
    ScoredResult,
    TrainConfig,
    blend_and_rank,
    extract_features,
    score,
    train,
)
from .service import Engine, EngineConfig, EngineSnapshot, build_snapshot, handle_search, run_search

__version__ = "0.1.0"
