"""Entity catalog: videos, talent, and collections loaded from JSONL.

The catalog is the searchable universe. Unavailable videos are loaded and
indexed like everything else (they can anchor a query); keeping them out of
result lists is the job of downstream stages.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Union

EntityId = int


class CatalogError(ValueError):
    """A catalog source failed validation."""


class UnknownEntityError(KeyError):
    """An entity id does not resolve to anything in the catalog."""


@dataclass(frozen=True)
class Video:
    id: EntityId
    title: str
    aliases: tuple[str, ...] = ()
    available: bool = True
    tags: frozenset[str] = frozenset()
    release_year: int = 0
    popularity: float = 0.0


@dataclass(frozen=True)
class Talent:
    id: EntityId
    name: str
    credits: tuple[EntityId, ...] = ()


@dataclass(frozen=True)
class Collection:
    id: EntityId
    label: str
    members: tuple[EntityId, ...] = ()


Entity = Union[Video, Talent, Collection]


@dataclass(frozen=True)
class Catalog:
    """Immutable after load; safe to share across request handlers."""

    videos: dict[EntityId, Video] = field(default_factory=dict)
    talents: dict[EntityId, Talent] = field(default_factory=dict)
    collections: dict[EntityId, Collection] = field(default_factory=dict)

    def get_entity(self, entity_id: EntityId) -> Entity:
        for store in (self.videos, self.talents, self.collections):
            if entity_id in store:
                return store[entity_id]
        raise UnknownEntityError(entity_id)

    def __contains__(self, entity_id: EntityId) -> bool:
        return (
            entity_id in self.videos
            or entity_id in self.talents
            or entity_id in self.collections
        )

    def entity_count(self) -> int:
        return len(self.videos) + len(self.talents) + len(self.collections)

    def all_entities(self) -> Iterable[Entity]:
        yield from self.videos.values()
        yield from self.talents.values()
        yield from self.collections.values()


def display_name(entity: Entity) -> str:
    """Human-facing name: video title, talent name, or collection label."""
    if isinstance(entity, Video):
        return entity.title
    if isinstance(entity, Talent):
        return entity.name
    return entity.label


def _require(condition: bool, line_no: int, message: str) -> None:
    if not condition:
        raise CatalogError(f"line {line_no}: {message}")


def _parse_video(record: dict, line_no: int) -> Video:
    title = record.get("title")
    _require(isinstance(title, str) and title != "", line_no, "video title must be a non-empty string")
    aliases = record.get("aliases", [])
    _require(
        isinstance(aliases, list) and all(isinstance(a, str) for a in aliases),
        line_no,
        "aliases must be a list of strings",
    )
    tags = record.get("tags", [])
    _require(
        isinstance(tags, list) and all(isinstance(t, str) and t != "" for t in tags),
        line_no,
        "tags must be a list of non-empty strings",
    )
    _require(len(set(tags)) == len(tags), line_no, "tags must be distinct")
    popularity = record.get("popularity", 0.0)
    _require(isinstance(popularity, (int, float)) and not isinstance(popularity, bool), line_no, "popularity must be a number")
    _require(0.0 <= float(popularity) <= 1.0, line_no, f"popularity {popularity} out of range [0, 1]")
    return Video(
        id=record["id"],
        title=title,
        aliases=tuple(aliases),
        available=bool(record.get("available", True)),
        tags=frozenset(tags),
        release_year=int(record.get("release_year", 0)),
        popularity=float(popularity),
    )


def _parse_talent(record: dict, line_no: int) -> Talent:
    name = record.get("name")
    _require(isinstance(name, str) and name != "", line_no, "talent name must be a non-empty string")
    credits = record.get("credits", [])
    _require(
        isinstance(credits, list) and all(isinstance(c, int) for c in credits),
        line_no,
        "credits must be a list of integer video ids",
    )
    return Talent(id=record["id"], name=name, credits=tuple(credits))


def _parse_collection(record: dict, line_no: int) -> Collection:
    label = record.get("label")
    _require(isinstance(label, str) and label != "", line_no, "collection label must be a non-empty string")
    members = record.get("members", [])
    _require(
        isinstance(members, list) and all(isinstance(m, int) for m in members),
        line_no,
        "members must be a list of integer video ids",
    )
    _require(len(set(members)) == len(members), line_no, "collection members must be distinct")
    return Collection(id=record["id"], label=label, members=tuple(members))


def load_catalog(source: Union[IO[bytes], IO[str], Iterable[Union[str, bytes]]]) -> Catalog:
    """Parse and validate a JSONL entity stream into a Catalog.

    Each line carries one record discriminated by "kind" (video, talent or
    collection). Validation is total: either every invariant holds on the
    returned catalog, or a CatalogError naming the offending line or id is
    raised.
    """
    videos: dict[EntityId, Video] = {}
    talents: dict[EntityId, Talent] = {}
    collections: dict[EntityId, Collection] = {}
    seen: set[EntityId] = set()

    for line_no, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"line {line_no}: malformed JSON ({exc.msg})") from exc
        _require(isinstance(record, dict), line_no, "record must be a JSON object")
        entity_id = record.get("id")
        _require(
            isinstance(entity_id, int) and not isinstance(entity_id, bool) and entity_id >= 0,
            line_no,
            "id must be a non-negative integer",
        )
        if entity_id in seen:
            raise CatalogError(f"line {line_no}: duplicate id {entity_id}")
        seen.add(entity_id)
        kind = record.get("kind")
        if kind == "video":
            videos[entity_id] = _parse_video(record, line_no)
        elif kind == "talent":
            talents[entity_id] = _parse_talent(record, line_no)
        elif kind == "collection":
            collections[entity_id] = _parse_collection(record, line_no)
        else:
            raise CatalogError(f"line {line_no}: unknown kind {kind!r}")

    for talent in talents.values():
        for credit in talent.credits:
            if credit not in videos:
                raise CatalogError(f"talent {talent.id}: dangling credit reference {credit}")
    for collection in collections.values():
        for member in collection.members:
            if member not in videos:
                raise CatalogError(f"collection {collection.id}: dangling member reference {member}")

    return Catalog(videos=videos, talents=talents, collections=collections)


def load_catalog_file(path: str) -> Catalog:
    with io.open(path, "rb") as handle:
        return load_catalog(handle)
