"""Group ranked results into labeled rows under editorial constraints.

Candidate rows come from editorially defined group kinds; a greedy loop then
picks rows one at a time, weighing priority, member scores, and overlap with
rows already on the page. Selecting a row removes its members from every
remaining candidate, so no video appears twice on a page. Overlap is judged
against the pre-removal member sets: two thematically identical rows stay
penalized even after dedup has emptied one of them.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO, Optional, Sequence, Union

from .catalog import Catalog, Collection, EntityId, Talent, display_name
from .facet import Facet, FacetEstimate, IntentEstimate, argmax_facet
from .ranker import ScoredResult


class OrganizerError(ValueError):
    """A group definition or assembly step is invalid."""


class GroupKind(Enum):
    EXACT_MATCH = "exact_match"
    SIMILAR_TO_ANCHOR = "similar_to_anchor"
    TAG_ROW = "tag_row"
    TALENT_CREDITS = "talent_credits"
    COLLECTION_MEMBERS = "collection_members"
    FANS_OF_UNAVAILABLE = "fans_of_unavailable"


# Kinds tied to a concrete anchor entity; boosted for narrow queries.
ANCHOR_KINDS = frozenset(
    {
        GroupKind.EXACT_MATCH,
        GroupKind.SIMILAR_TO_ANCHOR,
        GroupKind.FANS_OF_UNAVAILABLE,
        GroupKind.TALENT_CREDITS,
        GroupKind.COLLECTION_MEMBERS,
    }
)

_PLACEHOLDER = re.compile(r"\{(\w+)\}")
_KNOWN_PLACEHOLDERS = {"anchor", "tag"}


@dataclass(frozen=True)
class GroupDefinition:
    id: str
    kind: GroupKind
    label_template: str
    min_size: int = 3
    max_size: int = 20
    priority: float = 0.5
    applicable_facets: frozenset[Facet] = frozenset(Facet)

    def __post_init__(self):
        if self.min_size < 1 or self.min_size > self.max_size:
            raise OrganizerError(f"definition {self.id}: need 1 <= min_size <= max_size")
        if not (0.0 < self.priority <= 1.0):
            raise OrganizerError(f"definition {self.id}: priority must be in (0, 1]")
        if not self.label_template.strip():
            raise OrganizerError(f"definition {self.id}: empty label template")
        for name in _PLACEHOLDER.findall(self.label_template):
            if name not in _KNOWN_PLACEHOLDERS:
                raise OrganizerError(f"definition {self.id}: unknown placeholder {{{name}}}")


@dataclass(frozen=True)
class CandidateGroup:
    definition: GroupDefinition
    header: str
    videos: tuple[EntityId, ...]        # current members, in ranked order
    original: frozenset[EntityId]       # members as generated, for overlap
    anchor: Optional[EntityId] = None


@dataclass(frozen=True)
class ResultGroup:
    header: str
    videos: tuple[EntityId, ...]
    definition_id: str
    anchor: Optional[EntityId] = None


@dataclass(frozen=True)
class SearchPage:
    groups: tuple[ResultGroup, ...]
    pills: tuple[str, ...]
    facets: FacetEstimate
    intent: IntentEstimate


def default_group_definitions() -> tuple[GroupDefinition, ...]:
    return (
        GroupDefinition(
            id="exact_match",
            kind=GroupKind.EXACT_MATCH,
            label_template="Top Matches",
            min_size=1,
            priority=1.0,
        ),
        GroupDefinition(
            id="fans_of_unavailable",
            kind=GroupKind.FANS_OF_UNAVAILABLE,
            label_template="Fans of '{anchor}' have watched these",
            priority=0.9,
            applicable_facets=frozenset({Facet.UNAVAILABLE_VIDEO}),
        ),
        GroupDefinition(
            id="similar_to_anchor",
            kind=GroupKind.SIMILAR_TO_ANCHOR,
            label_template="More Like '{anchor}'",
            priority=0.8,
            applicable_facets=frozenset({Facet.AVAILABLE_VIDEO}),
        ),
        GroupDefinition(
            id="talent_credits",
            kind=GroupKind.TALENT_CREDITS,
            label_template="Featuring {anchor}",
            min_size=2,
            priority=0.85,
            applicable_facets=frozenset({Facet.TALENT}),
        ),
        GroupDefinition(
            id="collection_members",
            kind=GroupKind.COLLECTION_MEMBERS,
            label_template="{anchor}",
            priority=0.85,
            applicable_facets=frozenset({Facet.COLLECTION}),
        ),
        GroupDefinition(
            id="tag_row",
            kind=GroupKind.TAG_ROW,
            label_template="{tag}",
            priority=0.5,
        ),
    )


def load_group_definitions(
    source: Union[IO[bytes], IO[str], str],
) -> tuple[GroupDefinition, ...]:
    """Read the editorial group-definition file (JSON list of records)."""
    if isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    try:
        records = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OrganizerError(f"group definitions: malformed JSON ({exc.msg})") from exc
    if not isinstance(records, list):
        raise OrganizerError("group definitions must be a JSON list")
    definitions = []
    for record in records:
        try:
            kind = GroupKind(record["kind"])
            facets = record.get("applicable_facets")
            applicable = (
                frozenset(Facet(f) for f in facets) if facets is not None else frozenset(Facet)
            )
            definitions.append(
                GroupDefinition(
                    id=str(record["id"]),
                    kind=kind,
                    label_template=str(record["label_template"]),
                    min_size=int(record.get("min_size", 3)),
                    max_size=int(record.get("max_size", 20)),
                    priority=float(record.get("priority", 0.5)),
                    applicable_facets=applicable,
                )
            )
        except (KeyError, ValueError) as exc:
            raise OrganizerError(f"bad group definition record {record!r}: {exc}") from exc
    return tuple(definitions)


def load_group_definitions_file(path: str) -> tuple[GroupDefinition, ...]:
    with io.open(path, "rb") as handle:
        return load_group_definitions(handle)


def render_header(template: str, anchor_name: Optional[str] = None, tag: Optional[str] = None) -> str:
    values = {"anchor": anchor_name, "tag": tag}

    def substitute(match: re.Match) -> str:
        name = match.group(1)
        value = values.get(name)
        if value is None:
            raise OrganizerError(f"unknown placeholder {{{name}}} in template {template!r}")
        return value

    header = _PLACEHOLDER.sub(substitute, template)
    if not header.strip():
        raise OrganizerError(f"template {template!r} rendered empty")
    return header


def _anchor_reachable(ranked: Sequence[ScoredResult], anchor: EntityId) -> list[EntityId]:
    return [r.video for r in ranked if anchor in r.anchors]


def generate_candidates(
    ranked: Sequence[ScoredResult],
    facets: FacetEstimate,
    catalog: Catalog,
    definitions: Sequence[GroupDefinition],
) -> list[CandidateGroup]:
    """Instantiate every applicable definition against the ranked results."""
    if not ranked:
        return []
    top_facet = argmax_facet(facets)
    anchor_id = facets.anchor.get(top_facet)
    anchor_entity = catalog.get_entity(anchor_id) if anchor_id is not None else None
    anchor_name = display_name(anchor_entity) if anchor_entity is not None else None

    candidates: list[CandidateGroup] = []

    def add(definition: GroupDefinition, header: str, members: list[EntityId], anchor: Optional[EntityId]):
        if len(members) < definition.min_size:
            return
        members = members[: definition.max_size]
        candidates.append(
            CandidateGroup(
                definition=definition,
                header=header,
                videos=tuple(members),
                original=frozenset(members),
                anchor=anchor,
            )
        )

    for definition in definitions:
        if top_facet not in definition.applicable_facets:
            continue
        if definition.kind == GroupKind.EXACT_MATCH:
            members = [r.video for r in ranked if r.features.full_match == 1.0]
            add(definition, render_header(definition.label_template, anchor_name), members, anchor_id)
        elif definition.kind == GroupKind.TAG_ROW:
            tags = sorted({tag for r in ranked for tag in catalog.videos[r.video].tags})
            for tag in tags:
                members = [r.video for r in ranked if tag in catalog.videos[r.video].tags]
                if len(members) >= definition.min_size:
                    add(definition, render_header(definition.label_template, anchor_name, tag), members, None)
        elif definition.kind in (GroupKind.SIMILAR_TO_ANCHOR, GroupKind.FANS_OF_UNAVAILABLE):
            if anchor_id is None:
                continue
            members = _anchor_reachable(ranked, anchor_id)
            add(definition, render_header(definition.label_template, anchor_name), members, anchor_id)
        elif definition.kind == GroupKind.TALENT_CREDITS:
            if not isinstance(anchor_entity, Talent):
                continue
            credits = set(anchor_entity.credits)
            members = [r.video for r in ranked if r.video in credits]
            add(definition, render_header(definition.label_template, anchor_name), members, anchor_id)
        elif definition.kind == GroupKind.COLLECTION_MEMBERS:
            if not isinstance(anchor_entity, Collection):
                continue
            collection_members = set(anchor_entity.members)
            members = [r.video for r in ranked if r.video in collection_members]
            add(definition, render_header(definition.label_template, anchor_name), members, anchor_id)
    return candidates


@dataclass(frozen=True)
class GroupingParams:
    max_groups: int = 10
    lambda_div: float = 0.5
    specificity: float = 0.0
    tau_narrow: float = 0.6

    def __post_init__(self):
        if self.max_groups < 1:
            raise OrganizerError("max_groups must be >= 1")
        if not (0.0 <= self.lambda_div <= 1.0):
            raise OrganizerError("lambda_div must be in [0, 1]")


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def group_value(
    candidate: CandidateGroup,
    selected_originals: Sequence[frozenset[EntityId]],
    scores: dict[EntityId, float],
    params: GroupingParams,
) -> float:
    """Priority times member score mass, damped by overlap with chosen rows.

    Narrow queries (specificity >= tau_narrow) boost anchor-kind groups;
    broad ones boost tag rows.
    """
    mass = sum(scores.get(v, 0.0) for v in candidate.videos)
    overlap = max(
        (_jaccard(candidate.original, original) for original in selected_originals),
        default=0.0,
    )
    value = candidate.definition.priority * mass * (1.0 - params.lambda_div * overlap)
    narrow = params.specificity >= params.tau_narrow
    if narrow and candidate.definition.kind in ANCHOR_KINDS:
        value *= 1.5
    elif not narrow and candidate.definition.kind == GroupKind.TAG_ROW:
        value *= 1.5
    return value


def greedy_select(
    candidates: Sequence[CandidateGroup],
    scores: dict[EntityId, float],
    params: GroupingParams,
) -> tuple[list[CandidateGroup], float]:
    """Greedy loop with dedup-by-removal; returns selections and total value."""
    pool = [c for c in candidates if len(c.videos) >= c.definition.min_size]
    selected: list[CandidateGroup] = []
    selected_originals: list[frozenset[EntityId]] = []
    total = 0.0
    while pool and len(selected) < params.max_groups:
        valued = [
            (group_value(c, selected_originals, scores, params), c) for c in pool
        ]
        # Ties break by definition id, then header, for reproducibility.
        valued.sort(key=lambda pair: (-pair[0], pair[1].definition.id, pair[1].header))
        best_value, best = valued[0]
        selected.append(best)
        selected_originals.append(best.original)
        total += best_value
        taken = set(best.videos)
        next_pool = []
        for candidate in pool:
            if candidate is best:
                continue
            remaining = tuple(v for v in candidate.videos if v not in taken)
            if len(remaining) >= candidate.definition.min_size:
                next_pool.append(replace(candidate, videos=remaining))
        pool = next_pool
    return selected, total


def rank_groups(
    candidates: Sequence[CandidateGroup],
    ranked: Sequence[ScoredResult],
    params: GroupingParams,
) -> list[ResultGroup]:
    scores = {r.video: r.score for r in ranked}
    selected, _ = greedy_select(candidates, scores, params)
    return [
        ResultGroup(
            header=c.header,
            videos=c.videos,
            definition_id=c.definition.id,
            anchor=c.anchor,
        )
        for c in selected
    ]


def make_pills(
    anchor: EntityId,
    catalog: Catalog,
    ranked: Sequence[ScoredResult],
    max_pills: int,
) -> list[str]:
    """The anchor video's tags, most-represented-in-results first."""
    entity = catalog.videos.get(anchor)
    if entity is None:
        raise OrganizerError(f"pill anchor {anchor} is not a video in the catalog")
    tag_counts = {tag: 0 for tag in entity.tags}
    for result in ranked:
        video = catalog.videos[result.video]
        for tag in video.tags:
            if tag in tag_counts:
                tag_counts[tag] += 1
    ordered = sorted(tag_counts, key=lambda tag: (-tag_counts[tag], tag))
    return ordered[:max_pills]


def compose_page(
    groups: Sequence[ResultGroup],
    facets: FacetEstimate,
    intent: IntentEstimate,
    pills: Sequence[str],
) -> SearchPage:
    """Assemble the page; pills only accompany unavailable-video queries."""
    seen_headers: dict[str, int] = {}
    unique_groups = []
    for group in groups:
        count = seen_headers.get(group.header, 0) + 1
        seen_headers[group.header] = count
        header = group.header if count == 1 else f"{group.header} · {count}"
        unique_groups.append(replace(group, header=header))
    attach_pills = argmax_facet(facets) == Facet.UNAVAILABLE_VIDEO
    return SearchPage(
        groups=tuple(unique_groups),
        pills=tuple(pills) if attach_pills else (),
        facets=facets,
        intent=intent,
    )
