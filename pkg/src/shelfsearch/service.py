"""Per-keystroke search pipeline behind an HTTP API with hot-swapped snapshots.

Every request runs against one immutable EngineSnapshot, so concurrent reads
never see a half-built model. Reloads build a complete replacement off to the
side and swap it in atomically; a failed build leaves the old snapshot
serving.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .behavior import (
    CoPlayModel,
    InteractionLog,
    QueryAssociationModel,
    build_associations,
    build_coplay,
    load_logs_file,
    recommend_for_context,
)
from .catalog import Catalog, load_catalog_file
from .facet import Facet, argmax_facet, detect_facet, estimate_intent
from .instant_index import InstantIndex, build_index, match_prefix
from .organizer import (
    GroupDefinition,
    GroupingParams,
    SearchPage,
    compose_page,
    default_group_definitions,
    generate_candidates,
    load_group_definitions_file,
    make_pills,
    rank_groups,
)
from .ranker import RelevanceModel, ScoredResult, blend_and_rank, load_model_file


@dataclass(frozen=True)
class EngineConfig:
    default_k: int = 40
    recommendation_k: int = 40
    min_support: int = 1
    max_groups: int = 10
    lambda_div: float = 0.5
    tau_narrow: float = 0.6
    max_pills: int = 8


@dataclass(frozen=True)
class EngineSnapshot:
    catalog: Catalog
    index: InstantIndex
    coplay: CoPlayModel
    associations: QueryAssociationModel
    model: RelevanceModel
    definitions: tuple[GroupDefinition, ...]
    config: EngineConfig
    version: int


def build_snapshot(
    catalog: Catalog,
    log: InteractionLog,
    model: Optional[RelevanceModel] = None,
    definitions: Optional[Sequence[GroupDefinition]] = None,
    config: EngineConfig = EngineConfig(),
    version: int = 1,
) -> EngineSnapshot:
    return EngineSnapshot(
        catalog=catalog,
        index=build_index(catalog),
        coplay=build_coplay(log, config.min_support),
        associations=build_associations(log),
        model=model or RelevanceModel(),
        definitions=tuple(definitions) if definitions is not None else default_group_definitions(),
        config=config,
        version=version,
    )


@dataclass(frozen=True)
class PipelineResult:
    page: SearchPage
    ranked: list[ScoredResult]


def run_search(
    snapshot: EngineSnapshot,
    query: str,
    k: Optional[int] = None,
    include_recommendations: bool = True,
) -> PipelineResult:
    """The full per-keystroke pipeline; deterministic for a fixed snapshot.

    include_recommendations=False is the matches-only policy used by the
    dead-end evaluation.
    """
    cfg = snapshot.config
    k = k if k is not None else cfg.default_k
    matches = match_prefix(snapshot.index, query)
    facets = detect_facet(query, matches, snapshot.associations, snapshot.catalog)
    if include_recommendations:
        anchors = [
            (anchor, facets.distribution[f])
            for f in Facet
            for anchor in [facets.anchor.get(f)]
            if anchor is not None
        ]
        recs = recommend_for_context(
            anchors, query, snapshot.coplay, snapshot.associations, snapshot.catalog, cfg.recommendation_k
        )
    else:
        recs = []
    ranked = blend_and_rank(matches, recs, snapshot.model, facets, query, snapshot.catalog, k)
    candidates = generate_candidates(ranked, facets, snapshot.catalog, snapshot.definitions)
    groups = rank_groups(
        candidates,
        ranked,
        GroupingParams(
            max_groups=cfg.max_groups,
            lambda_div=cfg.lambda_div,
            specificity=facets.specificity,
            tau_narrow=cfg.tau_narrow,
        ),
    )
    pills: list[str] = []
    top_facet = argmax_facet(facets)
    anchor = facets.anchor.get(top_facet)
    if top_facet == Facet.UNAVAILABLE_VIDEO and anchor is not None:
        pills = make_pills(anchor, snapshot.catalog, ranked, cfg.max_pills)
    page = compose_page(groups, facets, estimate_intent(facets), pills)
    return PipelineResult(page=page, ranked=ranked)


def response_body(
    query: str,
    result: PipelineResult,
    snapshot: EngineSnapshot,
    timing_ms: float,
) -> dict:
    """Wire form of a SearchPage; field order is fixed for reproducible bodies."""
    by_video = {r.video: r for r in result.ranked}
    groups = []
    for group in result.page.groups:
        videos = []
        for video_id in group.videos:
            scored = by_video[video_id]
            video = snapshot.catalog.videos[video_id]
            videos.append(
                {
                    "id": video_id,
                    "title": video.title,
                    "available": video.available,
                    "score": scored.score,
                    "provenance": scored.provenance.value,
                }
            )
        groups.append(
            {
                "header": group.header,
                "evidence": {"definition": group.definition_id, "anchor": group.anchor},
                "videos": videos,
            }
        )
    facets = result.page.facets
    return {
        "query": query,
        "facets": {
            "distribution": {f.value: facets.distribution[f] for f in Facet},
            "specificity": facets.specificity,
            "fetch_probability": result.page.intent.fetch_probability,
        },
        "groups": groups,
        "pills": list(result.page.pills),
        "timing_ms": timing_ms,
        "snapshot": snapshot.version,
    }


def handle_search(query: str, k: int, snapshot: EngineSnapshot) -> dict:
    start = time.perf_counter()
    result = run_search(snapshot, query, k)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return response_body(query, result, snapshot, elapsed_ms)


@dataclass(frozen=True)
class EngineSources:
    catalog_path: str
    logs_path: Optional[str] = None
    model_path: Optional[str] = None
    groups_path: Optional[str] = None


class Engine:
    """Owns the current snapshot; builds replacements and swaps them atomically.

    Readers grab self._snapshot once per request; rebinding the attribute is
    atomic, so in-flight requests simply finish on the old snapshot.
    """

    def __init__(self, sources: EngineSources, config: EngineConfig = EngineConfig()):
        self._sources = sources
        self._config = config
        self._started = time.time()
        self._snapshot = self._build(version=1)

    def _build(self, version: int) -> EngineSnapshot:
        catalog = load_catalog_file(self._sources.catalog_path)
        if self._sources.logs_path:
            log = load_logs_file(self._sources.logs_path, catalog)
        else:
            log = InteractionLog()
        model = load_model_file(self._sources.model_path) if self._sources.model_path else None
        definitions = (
            load_group_definitions_file(self._sources.groups_path)
            if self._sources.groups_path
            else None
        )
        return build_snapshot(catalog, log, model, definitions, self._config, version)

    @property
    def snapshot(self) -> EngineSnapshot:
        return self._snapshot

    def reload(self) -> EngineSnapshot:
        """Build a fresh snapshot; any failure leaves the old one serving."""
        fresh = self._build(version=self._snapshot.version + 1)
        self._snapshot = fresh
        return fresh

    def health(self) -> dict:
        snapshot = self._snapshot
        return {
            "snapshot": snapshot.version,
            "entities": snapshot.catalog.entity_count(),
            "videos": len(snapshot.catalog.videos),
            "talents": len(snapshot.catalog.talents),
            "collections": len(snapshot.catalog.collections),
            "uptime_s": time.time() - self._started,
        }


def create_app(engine: Engine):
    from fastapi import FastAPI, Query
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse

    app = FastAPI(title="shelfsearch")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/search")
    def search(q: str = "", k: Optional[int] = Query(default=None, ge=1)):
        snapshot = engine.snapshot
        return handle_search(q, k if k is not None else snapshot.config.default_k, snapshot)

    @app.get("/health")
    def health():
        return engine.health()

    @app.post("/reload")
    def reload():
        try:
            fresh = engine.reload()
        except Exception as exc:  # keep serving the old snapshot
            return JSONResponse(
                status_code=500,
                content={"error": str(exc), "snapshot": engine.snapshot.version},
            )
        return {"snapshot": fresh.version, "entities": fresh.catalog.entity_count()}

    return app
