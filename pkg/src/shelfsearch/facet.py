"""Query facet detection, specificity, and the fetch-vs-explore estimate.

A facet is the kind of entity the query seems to target: an available video,
an unavailable one, talent, or a collection. Evidence per facet mixes the
best lexical match with the selection history for the prefix, half and half
by default. Fetch probability is simply the specificity score: it only
steers broad-vs-narrow organization and makes no claim about the user's
actual goal.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

from .behavior import QueryAssociationModel, query_associations
from .catalog import Catalog, Entity, EntityId, Talent, Video
from .instant_index import SearchMatch, normalize

LEXICAL_WEIGHT = 0.5
BEHAVIOR_WEIGHT = 0.5
LENGTH_SATURATION = 12


class Facet(Enum):
    AVAILABLE_VIDEO = "available_video"
    UNAVAILABLE_VIDEO = "unavailable_video"
    TALENT = "talent"
    COLLECTION = "collection"


def facet_of(entity: Entity) -> Facet:
    if isinstance(entity, Video):
        return Facet.AVAILABLE_VIDEO if entity.available else Facet.UNAVAILABLE_VIDEO
    if isinstance(entity, Talent):
        return Facet.TALENT
    return Facet.COLLECTION


@dataclass(frozen=True)
class FacetEstimate:
    distribution: dict[Facet, float]
    anchor: dict[Facet, Optional[EntityId]]
    specificity: float


@dataclass(frozen=True)
class IntentEstimate:
    fetch_probability: float


def evidence_distribution(raw: Mapping[Facet, float]) -> dict[Facet, float]:
    """Normalize raw evidence to a distribution; uniform when all evidence is zero."""
    total = sum(raw.get(f, 0.0) for f in Facet)
    if total <= 0.0:
        return {f: 1.0 / len(Facet) for f in Facet}
    return {f: raw.get(f, 0.0) / total for f in Facet}


def argmax_facet(estimate: FacetEstimate) -> Facet:
    """Highest-probability facet; ties resolve in declaration order."""
    best = None
    best_probability = -1.0
    for facet in Facet:
        probability = estimate.distribution.get(facet, 0.0)
        if probability > best_probability:
            best = facet
            best_probability = probability
    return best


def estimate_specificity(query: str, matches: list[SearchMatch]) -> float:
    """Half query length (saturating at 12 chars), half top-two score margin."""
    length_term = min(len(normalize(query)), LENGTH_SATURATION) / LENGTH_SATURATION
    if matches:
        top = matches[0].lexical_score
        second = matches[1].lexical_score if len(matches) > 1 else 0.0
        margin = top - second
    else:
        margin = 0.0
    value = 0.5 * length_term + 0.5 * margin
    return min(1.0, max(0.0, value))


def detect_facet(
    query: str,
    matches: list[SearchMatch],
    assoc: QueryAssociationModel,
    catalog: Catalog,
) -> FacetEstimate:
    """Score each facet from lexical and behavioral evidence and pick anchors.

    matches must come from match_prefix for the same query so lexical scores
    are sorted best-first per entity class.
    """
    videos = catalog.videos
    talents = catalog.talents

    def classify(entity_id: EntityId) -> tuple[Facet, float]:
        video = videos.get(entity_id)
        if video is not None:
            facet = Facet.AVAILABLE_VIDEO if video.available else Facet.UNAVAILABLE_VIDEO
            return facet, video.popularity
        if entity_id in talents:
            return Facet.TALENT, 0.0
        return Facet.COLLECTION, 0.0

    lexical_best: dict[Facet, float] = {f: 0.0 for f in Facet}
    entity_lexical: dict[EntityId, float] = {}
    for match in matches:
        facet, _ = classify(match.entity)
        if match.lexical_score > lexical_best[facet]:
            lexical_best[facet] = match.lexical_score
        prior = entity_lexical.get(match.entity, 0.0)
        if match.lexical_score > prior:
            entity_lexical[match.entity] = match.lexical_score

    assoc_scores = dict(query_associations(assoc, query))
    class_mass: dict[Facet, float] = {f: 0.0 for f in Facet}
    for entity_id, score in assoc_scores.items():
        class_mass[classify(entity_id)[0]] += score
    top_mass = max(class_mass.values())
    behavior_norm = {
        f: (class_mass[f] / top_mass if top_mass > 0.0 else 0.0) for f in Facet
    }

    raw = {
        f: LEXICAL_WEIGHT * lexical_best[f] + BEHAVIOR_WEIGHT * behavior_norm[f]
        for f in Facet
    }
    distribution = evidence_distribution(raw)

    anchors: dict[Facet, Optional[EntityId]] = {f: None for f in Facet}
    best_order: dict[Facet, tuple] = {}
    candidate_ids = sorted(set(entity_lexical) | set(assoc_scores))
    for entity_id in candidate_ids:
        evidence = (
            LEXICAL_WEIGHT * entity_lexical.get(entity_id, 0.0)
            + BEHAVIOR_WEIGHT * assoc_scores.get(entity_id, 0.0)
        )
        if evidence <= 0.0:
            continue
        facet, popularity = classify(entity_id)
        order = (evidence, popularity, -entity_id)
        if anchors[facet] is None or order > best_order[facet]:
            anchors[facet] = entity_id
            best_order[facet] = order

    return FacetEstimate(
        distribution=distribution,
        anchor=anchors,
        specificity=estimate_specificity(query, matches),
    )


def estimate_intent(facets: FacetEstimate) -> IntentEstimate:
    """Specificity as a fetch-probability proxy; drives group ordering only."""
    return IntentEstimate(fetch_probability=facets.specificity)
