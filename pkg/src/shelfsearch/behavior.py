"""Interaction logs, item-item co-play similarity, and query associations.

Co-play counts are over distinct profiles, not raw play counts, which keeps
rewatch-heavy titles from dominating. Similarity is plain cosine over the
count matrix. Query associations remember which entities users selected for
a given typed prefix; both signals combine into search recommendations that
only ever surface available videos, even when the anchor is not playable.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import IO, Iterable, Union

from .catalog import Catalog, EntityId
from .instant_index import normalize


class LogError(ValueError):
    """An interaction-log source failed validation."""


class UndefinedItemError(KeyError):
    """Similarity requested for an item with no recorded plays."""


@dataclass(frozen=True)
class PlayEvent:
    profile: str
    video: EntityId
    ts: int


@dataclass(frozen=True)
class SearchEvent:
    profile: str
    query: str
    selected: EntityId
    position: int


@dataclass(frozen=True)
class InteractionLog:
    plays: tuple[PlayEvent, ...] = ()
    searches: tuple[SearchEvent, ...] = ()


def load_logs(
    source: Union[IO[bytes], IO[str], Iterable[Union[str, bytes]]],
    catalog: Catalog,
) -> InteractionLog:
    """Parse a JSONL event stream, rejecting dangling entity references."""
    plays: list[PlayEvent] = []
    searches: list[SearchEvent] = []
    for line_no, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogError(f"line {line_no}: malformed JSON ({exc.msg})") from exc
        kind = record.get("kind")
        if kind == "play":
            video = record.get("video")
            if video not in catalog.videos:
                raise LogError(f"line {line_no}: play references unknown video id {video}")
            plays.append(PlayEvent(str(record.get("profile", "")), video, int(record.get("ts", 0))))
        elif kind == "search":
            selected = record.get("selected")
            if selected not in catalog:
                raise LogError(f"line {line_no}: search references unknown entity id {selected}")
            position = int(record.get("position", 0))
            if position < 0:
                raise LogError(f"line {line_no}: position must be >= 0")
            searches.append(
                SearchEvent(str(record.get("profile", "")), str(record.get("query", "")), selected, position)
            )
        else:
            raise LogError(f"line {line_no}: unknown kind {kind!r}")
    return InteractionLog(plays=tuple(plays), searches=tuple(searches))


def load_logs_file(path: str, catalog: Catalog) -> InteractionLog:
    with io.open(path, "rb") as handle:
        return load_logs(handle, catalog)


@dataclass(frozen=True)
class CoPlayModel:
    item_counts: dict[EntityId, int]                      # c(i,i): distinct profiles that played i
    pair_counts: dict[EntityId, dict[EntityId, int]]      # c(i,j) stored under both i and j
    min_support: int = 1


def build_coplay(log: InteractionLog, min_support: int = 1) -> CoPlayModel:
    """Count distinct profiles per item and per item pair, dropping weak pairs."""
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    profile_items: dict[str, set[EntityId]] = {}
    for event in log.plays:
        profile_items.setdefault(event.profile, set()).add(event.video)

    item_counts: dict[EntityId, int] = {}
    pair_counts_flat: dict[tuple[EntityId, EntityId], int] = {}
    for items in profile_items.values():
        for item in items:
            item_counts[item] = item_counts.get(item, 0) + 1
        for i, j in combinations(sorted(items), 2):
            pair_counts_flat[(i, j)] = pair_counts_flat.get((i, j), 0) + 1

    pair_counts: dict[EntityId, dict[EntityId, int]] = {}
    for (i, j), count in pair_counts_flat.items():
        if count < min_support:
            continue
        pair_counts.setdefault(i, {})[j] = count
        pair_counts.setdefault(j, {})[i] = count
    return CoPlayModel(item_counts=item_counts, pair_counts=pair_counts, min_support=min_support)


def item_similarity(model: CoPlayModel, i: EntityId, j: EntityId) -> float:
    """Cosine over co-play counts: c(i,j) / sqrt(c(i,i) * c(j,j))."""
    ci = model.item_counts.get(i, 0)
    cj = model.item_counts.get(j, 0)
    if ci == 0:
        raise UndefinedItemError(i)
    if cj == 0:
        raise UndefinedItemError(j)
    if i == j:
        return 1.0
    cij = model.pair_counts.get(i, {}).get(j, 0)
    return cij / math.sqrt(ci * cj)


def similar_videos(
    model: CoPlayModel,
    anchor: EntityId,
    k: int,
    catalog: Catalog,
) -> list[tuple[EntityId, float]]:
    """Top-k available videos by co-play similarity to the anchor, anchor excluded."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if model.item_counts.get(anchor, 0) == 0:
        raise UndefinedItemError(anchor)
    scored = []
    for other in model.pair_counts.get(anchor, {}):
        if other == anchor:
            continue
        video = catalog.videos.get(other)
        if video is None or not video.available:
            continue
        scored.append((other, item_similarity(model, anchor, other)))
    scored.sort(key=lambda pair: (-pair[1], -catalog.videos[pair[0]].popularity, pair[0]))
    return scored[:k]


@dataclass(frozen=True)
class QueryAssociationModel:
    selections: dict[str, dict[EntityId, int]] = field(default_factory=dict)


def build_associations(log: InteractionLog) -> QueryAssociationModel:
    selections: dict[str, dict[EntityId, int]] = {}
    for event in log.searches:
        key = normalize(event.query)
        if not key:
            continue
        bucket = selections.setdefault(key, {})
        bucket[event.selected] = bucket.get(event.selected, 0) + 1
    return QueryAssociationModel(selections=selections)


def query_associations(model: QueryAssociationModel, query: str) -> list[tuple[EntityId, float]]:
    """Selections historically made for this prefix, max-normalized to [0, 1]."""
    counts = model.selections.get(normalize(query))
    if not counts:
        return []
    top = max(counts.values())
    scored = [(entity, count / top) for entity, count in counts.items()]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


@dataclass(frozen=True)
class SearchRecommendation:
    video: EntityId
    association_score: float
    anchors: tuple[EntityId, ...] = ()


def _expand_anchor(anchor: EntityId, catalog: Catalog) -> list[tuple[EntityId, float]]:
    """Talent spreads over credits, collections over members, videos map to themselves."""
    if anchor in catalog.videos:
        return [(anchor, 1.0)]
    talent = catalog.talents.get(anchor)
    if talent is not None and talent.credits:
        share = 1.0 / len(talent.credits)
        return [(credit, share) for credit in talent.credits]
    collection = catalog.collections.get(anchor)
    if collection is not None and collection.members:
        share = 1.0 / len(collection.members)
        return [(member, share) for member in collection.members]
    return []


def recommend_for_context(
    anchors: list[tuple[EntityId, float]],
    query: str,
    coplay: CoPlayModel,
    assoc: QueryAssociationModel,
    catalog: Catalog,
    k: int,
) -> list[SearchRecommendation]:
    """Blend co-play similarity around the anchors with query-selection history.

    Per candidate the two evidence channels combine by max, keeping scores in
    [0, 1] without a tuned mixing weight. A video anchor never recommends
    itself (so a single video anchor reduces exactly to similar_videos), but
    expanded credits and members do count their own self-similarity: a talent
    anchor surfaces the credits themselves, not just videos near them.
    """
    cf_scores: dict[EntityId, float] = {}
    contributors: dict[EntityId, set[EntityId]] = {}

    item_counts = coplay.item_counts
    sqrt = math.sqrt
    for anchor, weight in anchors:
        if weight <= 0.0:
            continue
        for source, share in _expand_anchor(anchor, catalog):
            count_source = item_counts.get(source, 0)
            if count_source == 0:
                continue
            if source != anchor:
                cf_scores[source] = cf_scores.get(source, 0.0) + weight * share
                contributors.setdefault(source, set()).add(anchor)
            scale = weight * share
            for other, pair_count in coplay.pair_counts.get(source, {}).items():
                # same float expression as item_similarity, so a single video
                # anchor reduces to similar_videos bit for bit
                gain = scale * (pair_count / sqrt(count_source * item_counts[other]))
                cf_scores[other] = cf_scores.get(other, 0.0) + gain
                contributors.setdefault(other, set()).add(anchor)

    assoc_scores = dict(query_associations(assoc, query))

    ordered = []
    for candidate in set(cf_scores) | set(assoc_scores):
        video = catalog.videos.get(candidate)
        if video is None or not video.available:
            continue
        score = min(1.0, max(cf_scores.get(candidate, 0.0), assoc_scores.get(candidate, 0.0)))
        if score <= 0.0:
            continue
        ordered.append(((-score, -video.popularity, candidate), candidate, score))
    ordered.sort(key=lambda item: item[0])
    return [
        SearchRecommendation(
            video=candidate,
            association_score=score,
            anchors=tuple(sorted(contributors.get(candidate, ()))),
        )
        for _, candidate, score in ordered[:k]
    ]
