"""Replay-based evaluation: fetch success, dead ends, popularity skew.

Held-out fetch sessions are replayed keystroke by keystroke against a
snapshot whose association model never saw them. The dead-end metric counts
pages with zero groups, because the page is what the user actually sees:
a query can have zero keyword matches and still rescue the user through
recommendation rows.
"""

from __future__ import annotations

import json
import random
import statistics
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .behavior import InteractionLog, SearchEvent
from .catalog import Catalog
from .organizer import GroupDefinition
from .ranker import Provenance, RelevanceModel
from .service import EngineConfig, EngineSnapshot, build_snapshot, run_search

MAX_PREFIX = 12


@dataclass(frozen=True)
class EvalReport:
    fetch_success_at_k: dict[int, float]      # prefix length -> success rate
    dead_end_rate: dict[str, float]           # policy -> rate
    recommendation_gini: float
    mean_groups_per_page: float
    dedup_violations: int
    counts: dict[str, int]
    provenance: dict

    def to_json(self) -> str:
        payload = {
            "fetch_success_at_k": {str(k): v for k, v in self.fetch_success_at_k.items()},
            "dead_end_rate": self.dead_end_rate,
            "recommendation_gini": self.recommendation_gini,
            "mean_groups_per_page": self.mean_groups_per_page,
            "dedup_violations": self.dedup_violations,
            "counts": self.counts,
            "provenance": self.provenance,
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def gini(values: Sequence[float]) -> float:
    """Gini coefficient over non-negative values; 0 when mass is uniform."""
    n = len(values)
    if n == 0:
        return 0.0
    total = sum(values)
    if total <= 0.0:
        return 0.0
    ordered = sorted(values)
    cumulative = sum((2 * (i + 1) - n - 1) * x for i, x in enumerate(ordered))
    return cumulative / (n * total)


def holdout_split(
    searches: Sequence[SearchEvent], holdout: float, seed: int
) -> tuple[list[SearchEvent], list[SearchEvent]]:
    """Deterministic split of search events into (training, held_out)."""
    if not (0.0 < holdout < 1.0):
        raise ValueError("holdout must be in (0, 1)")
    rng = random.Random(seed)
    indices = list(range(len(searches)))
    rng.shuffle(indices)
    n_held = int(round(len(searches) * holdout))
    held = set(indices[:n_held])
    training = [e for i, e in enumerate(searches) if i not in held]
    held_out = [e for i, e in enumerate(searches) if i in held]
    return training, held_out


def _page_dedup_violations(page) -> int:
    seen: set[int] = set()
    violations = 0
    for group in page.groups:
        for video in group.videos:
            if video in seen:
                violations += 1
            seen.add(video)
    return violations


def run_eval(
    catalog: Catalog,
    log: InteractionLog,
    holdout: float,
    seed: int,
    model: Optional[RelevanceModel] = None,
    definitions: Optional[Sequence[GroupDefinition]] = None,
    config: EngineConfig = EngineConfig(),
    k: int = 10,
    max_prefix: int = MAX_PREFIX,
    sim_provenance: Optional[dict] = None,
) -> EvalReport:
    """Replay held-out fetch sessions and aggregate the report metrics.

    The replay snapshot keeps all plays but drops held-out search events from
    the association model, so success numbers are not self-fulfilling.
    """
    training, held_out = holdout_split(log.searches, holdout, seed)
    snapshot = build_snapshot(
        catalog,
        InteractionLog(plays=log.plays, searches=tuple(training)),
        model,
        definitions,
        config,
    )

    success_hits = {p: 0 for p in range(1, max_prefix + 1)}
    fetch_sessions = 0
    skipped_targets = 0
    exposures: dict[int, int] = {}
    group_counts: list[int] = []
    dedup_violations = 0

    for event in held_out:
        target = catalog.videos.get(event.selected)
        if target is None:
            skipped_targets += 1
            continue
        if target.available:
            fetch_sessions += 1
        for p in range(1, max_prefix + 1):
            query = target.title[: min(p, len(target.title))]
            result = run_search(snapshot, query, k=k)
            if target.available and any(r.video == target.id for r in result.ranked):
                success_hits[p] += 1
            group_counts.append(len(result.page.groups))
            dedup_violations += _page_dedup_violations(result.page)
            for scored in result.ranked:
                if scored.provenance in (Provenance.RECOMMENDATION, Provenance.BOTH):
                    exposures[scored.video] = exposures.get(scored.video, 0) + 1

    fetch_success = {
        p: (success_hits[p] / fetch_sessions if fetch_sessions else 0.0)
        for p in range(1, max_prefix + 1)
    }

    unavailable_events = [
        e for e in held_out
        if e.selected in catalog.videos and not catalog.videos[e.selected].available
    ]
    dead_ends = {"matches_only": 0, "full": 0}
    for event in unavailable_events:
        for policy, include_recs in (("matches_only", False), ("full", True)):
            result = run_search(snapshot, event.query, k=k, include_recommendations=include_recs)
            if not result.page.groups:
                dead_ends[policy] += 1
    n_unavailable = len(unavailable_events)
    dead_end_rate = {
        policy: (count / n_unavailable if n_unavailable else 0.0)
        for policy, count in dead_ends.items()
    }

    exposure_values = [float(exposures.get(v.id, 0)) for v in catalog.videos.values() if v.available]

    provenance = {
        "holdout": holdout,
        "seed": seed,
        "k": k,
        "max_prefix": max_prefix,
        "simulation": sim_provenance or {},
    }
    return EvalReport(
        fetch_success_at_k=fetch_success,
        dead_end_rate=dead_end_rate,
        recommendation_gini=gini(exposure_values),
        mean_groups_per_page=(statistics.fmean(group_counts) if group_counts else 0.0),
        dedup_violations=dedup_violations,
        counts={
            "search_events": len(log.searches),
            "held_out_sessions": len(held_out),
            "fetch_sessions_evaluated": fetch_sessions,
            "unavailable_target_queries": n_unavailable,
            "pages_evaluated": len(group_counts),
            "skipped_non_video_targets": skipped_targets,
        },
        provenance=provenance,
    )


@dataclass(frozen=True)
class LatencyStats:
    count: int
    mean_ms: float
    p50_ms: float
    p95_ms: float
    max_ms: float


def percentile(samples: Sequence[float], q: float) -> float:
    """Nearest-rank percentile; q in [0, 100]."""
    if not samples:
        return 0.0
    ordered = sorted(samples)
    rank = max(1, int(-(-q * len(ordered) // 100)))  # ceil without math import
    return ordered[min(rank, len(ordered)) - 1]


def latency_benchmark(snapshot: EngineSnapshot, queries: Sequence[str], k: int = 40) -> LatencyStats:
    """Wall-clock handle_search timings over a query replay."""
    samples = []
    for query in queries:
        start = time.perf_counter()
        run_search(snapshot, query, k=k)
        samples.append((time.perf_counter() - start) * 1000.0)
    return LatencyStats(
        count=len(samples),
        mean_ms=statistics.fmean(samples) if samples else 0.0,
        p50_ms=percentile(samples, 50),
        p95_ms=percentile(samples, 95),
        max_ms=max(samples) if samples else 0.0,
    )


def replay_queries(catalog: Catalog, n_queries: int, seed: int, max_prefix: int = MAX_PREFIX) -> list[str]:
    """Keystroke-style query sample: random title prefixes of varied length."""
    rng = random.Random(seed)
    videos = list(catalog.videos.values())
    queries = []
    for _ in range(n_queries):
        title = rng.choice(videos).title
        length = rng.randint(1, min(max_prefix, len(title)))
        queries.append(title[:length])
    return queries
