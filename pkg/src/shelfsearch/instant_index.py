"""Prefix index over entity names and per-keystroke keyword matching.

An entity full-matches a query when every query token is a prefix of its own
distinct name token. A query whose trailing token matches nothing still
surfaces entities whose remaining tokens match, at a score penalty, so a
keystroke like a trailing "t" never blanks the page. The lexical score is a
coverage measure, not a learned quantity; the ranker is free to reweight it.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import NamedTuple

from .catalog import Catalog, EntityId, Video, display_name

# Penalty applied when the trailing query token matches no entity token.
# Arbitrary but documented: tune via evaluation, not by hand.
PARTIAL_MATCH_PENALTY = 0.5


def normalize(text: str) -> str:
    """Lowercase, fold diacritics, turn punctuation into spaces, collapse runs."""
    decomposed = unicodedata.normalize("NFKD", text)
    chars = []
    for ch in decomposed:
        if unicodedata.combining(ch):
            continue
        category = unicodedata.category(ch)
        if category[0] in ("L", "N"):
            chars.append(ch.lower())
        else:
            chars.append(" ")
    return " ".join("".join(chars).split())


class SearchMatch(NamedTuple):
    entity: EntityId
    lexical_score: float
    full_match: bool
    matched_tokens: int


@dataclass(frozen=True)
class _IndexedEntity:
    entity: EntityId
    name: str                  # normalized primary name
    tokens: tuple[str, ...]    # pooled tokens of primary name plus aliases
    popularity: float


@dataclass(frozen=True)
class InstantIndex:
    """Token-prefix postings plus a normalized-name store, built once per snapshot."""

    postings: dict[str, tuple[tuple[EntityId, int], ...]]
    entities: dict[EntityId, _IndexedEntity]
    # Derived id sets per prefix, kept alongside for fast intersection.
    prefix_ids: dict[str, frozenset[EntityId]]

    def posting_list(self, prefix: str) -> tuple[tuple[EntityId, int], ...]:
        return self.postings.get(prefix, ())


def _entity_sources(entity) -> list[str]:
    if isinstance(entity, Video):
        return [entity.title, *entity.aliases]
    return [display_name(entity)]


def build_index(catalog: Catalog) -> InstantIndex:
    """Index every token of every name under all of its prefixes (length >= 1)."""
    raw_postings: dict[str, list[tuple[EntityId, int]]] = {}
    entities: dict[EntityId, _IndexedEntity] = {}

    for entity in catalog.all_entities():
        tokens: list[str] = []
        for source in _entity_sources(entity):
            tokens.extend(normalize(source).split())
        name = normalize(display_name(entity))
        popularity = entity.popularity if isinstance(entity, Video) else 0.0
        entities[entity.id] = _IndexedEntity(
            entity=entity.id,
            name=name,
            tokens=tuple(tokens),
            popularity=popularity,
        )
        for position, token in enumerate(tokens):
            for end in range(1, len(token) + 1):
                raw_postings.setdefault(token[:end], []).append((entity.id, position))

    postings = {
        prefix: tuple(sorted(entries))
        for prefix, entries in raw_postings.items()
    }
    prefix_ids = {
        prefix: frozenset(eid for eid, _ in entries)
        for prefix, entries in postings.items()
    }
    return InstantIndex(postings=postings, entities=entities, prefix_ids=prefix_ids)


def _assign_tokens(query_tokens: list[str], entity_tokens: tuple[str, ...]) -> bool:
    """Each query token must prefix its own entity token.

    Prefix-compatibility sets of two query tokens are either nested or
    disjoint, so assigning longest query tokens first is exact.
    """
    used = [False] * len(entity_tokens)
    for qt in sorted(query_tokens, key=len, reverse=True):
        for i, et in enumerate(entity_tokens):
            if not used[i] and et.startswith(qt):
                used[i] = True
                break
        else:
            return False
    return True


def _score(indexed: _IndexedEntity, matched_chars: int, penalty: float, query_norm: str) -> float:
    if query_norm == indexed.name:
        return 1.0
    if len(indexed.name) == 0:
        return 0.0
    coverage = min(1.0, matched_chars / len(indexed.name))
    return coverage * penalty


def match_prefix(index: InstantIndex, query: str) -> list[SearchMatch]:
    """All entities matching the query so far, best lexical evidence first.

    Ordering is (lexical_score desc, popularity desc, id asc) so output is
    reproducible. The empty query matches nothing.
    """
    query_norm = normalize(query)
    if not query_norm:
        return []
    query_tokens = query_norm.split()

    token_id_sets = []
    for token in query_tokens:
        token_id_sets.append(index.prefix_ids.get(token, frozenset()))

    full_candidates: frozenset[EntityId] = frozenset.intersection(*token_id_sets)
    if len(query_tokens) > 1:
        leading = frozenset.intersection(*token_id_sets[:-1])
        partial_candidates = leading - full_candidates
    else:
        partial_candidates = frozenset()

    full_chars = sum(len(t) for t in query_tokens)
    leading_chars = full_chars - len(query_tokens[-1])
    keyed: list[tuple[tuple, SearchMatch]] = []

    def emit(indexed: _IndexedEntity, score: float, full: bool, matched: int) -> None:
        keyed.append(
            ((-score, -indexed.popularity, indexed.entity), SearchMatch(indexed.entity, score, full, matched))
        )

    for eid in full_candidates:
        indexed = index.entities[eid]
        if len(query_tokens) == 1 or _assign_tokens(query_tokens, indexed.tokens):
            score = _score(indexed, full_chars, 1.0, query_norm)
            if score > 0.0:
                emit(indexed, score, True, len(query_tokens))
            continue
        # Tokens each match something but not distinctly: trailing-token
        # forgiveness still applies when the leading tokens fit.
        if _assign_tokens(query_tokens[:-1], indexed.tokens):
            score = _score(indexed, leading_chars, PARTIAL_MATCH_PENALTY, query_norm)
            if score > 0.0:
                emit(indexed, score, False, len(query_tokens) - 1)

    for eid in partial_candidates:
        indexed = index.entities[eid]
        if not _assign_tokens(query_tokens[:-1], indexed.tokens):
            continue
        score = _score(indexed, leading_chars, PARTIAL_MATCH_PENALTY, query_norm)
        if score > 0.0:
            emit(indexed, score, False, len(query_tokens) - 1)

    keyed.sort(key=lambda pair: pair[0])
    return [match for _, match in keyed]
