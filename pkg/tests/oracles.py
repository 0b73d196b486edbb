"""Independent brute-force reference implementations used by the tests.

Everything here deliberately avoids the production code paths: matching
scans every entity with backtracking assignment, co-play counts come from a
pairwise profile scan, and group selection is exhaustive. These are the
oracles the fast implementations are checked against.
"""

from __future__ import annotations

from itertools import combinations

from shelfsearch.catalog import Catalog, Video, display_name
from shelfsearch.instant_index import PARTIAL_MATCH_PENALTY, normalize


def _entity_tokens(entity) -> list[str]:
    if isinstance(entity, Video):
        sources = [entity.title, *entity.aliases]
    else:
        sources = [display_name(entity)]
    tokens: list[str] = []
    for source in sources:
        tokens.extend(normalize(source).split())
    return tokens


def _can_assign(query_tokens: list[str], entity_tokens: list[str]) -> bool:
    """Exact injective prefix assignment via backtracking."""
    used = [False] * len(entity_tokens)

    def recurse(i: int) -> bool:
        if i == len(query_tokens):
            return True
        for j, token in enumerate(entity_tokens):
            if not used[j] and token.startswith(query_tokens[i]):
                used[j] = True
                if recurse(i + 1):
                    return True
                used[j] = False
        return False

    return recurse(0)


def brute_force_match(catalog: Catalog, query: str) -> list[tuple[int, float, bool, int]]:
    """Full-scan matcher applying the documented predicate and scoring."""
    query_norm = normalize(query)
    if not query_norm:
        return []
    query_tokens = query_norm.split()
    results = []
    for entity in catalog.all_entities():
        tokens = _entity_tokens(entity)
        name = normalize(display_name(entity))
        full = _can_assign(query_tokens, tokens)
        if full:
            matched_chars = sum(len(t) for t in query_tokens)
            penalty = 1.0
            matched_tokens = len(query_tokens)
        elif len(query_tokens) >= 2 and _can_assign(query_tokens[:-1], tokens):
            matched_chars = sum(len(t) for t in query_tokens[:-1])
            penalty = PARTIAL_MATCH_PENALTY
            matched_tokens = len(query_tokens) - 1
        else:
            continue
        if query_norm == name:
            score = 1.0
        elif len(name) == 0:
            score = 0.0
        else:
            score = min(1.0, matched_chars / len(name)) * penalty
        if score > 0.0:
            results.append((entity.id, score, full, matched_tokens))
    popularity = {
        e.id: (e.popularity if isinstance(e, Video) else 0.0) for e in catalog.all_entities()
    }
    results.sort(key=lambda r: (-r[1], -popularity[r[0]], r[0]))
    return results


def brute_force_coplay(
    plays: list[tuple[str, int]], min_support: int
) -> tuple[dict[int, int], dict[tuple[int, int], int]]:
    """Distinct-profile co-occurrence counts from a flat (profile, video) list."""
    videos = sorted({video for _, video in plays})
    profiles = sorted({profile for profile, _ in plays})
    played = {
        (profile, video): True
        for profile, video in plays
    }
    item_counts = {
        v: sum(1 for p in profiles if (p, v) in played) for v in videos
    }
    item_counts = {v: c for v, c in item_counts.items() if c > 0}
    pair_counts = {}
    for i, j in combinations(videos, 2):
        count = sum(1 for p in profiles if (p, i) in played and (p, j) in played)
        if count >= min_support:
            pair_counts[(i, j)] = count
    return item_counts, pair_counts


def brute_force_cosine(
    item_counts: dict[int, int], pair_counts: dict[tuple[int, int], int], i: int, j: int
) -> float:
    if i == j:
        return 1.0
    key = (i, j) if i < j else (j, i)
    numerator = pair_counts.get(key, 0)
    return numerator / (item_counts[i] * item_counts[j]) ** 0.5


def oracle_group_value(candidate, selected_originals, scores, params) -> float:
    """The sequential objective, restated from scratch for the exhaustive search."""
    mass = sum(scores.get(v, 0.0) for v in candidate.videos)
    overlap = 0.0
    for original in selected_originals:
        union = candidate.original | original
        if union:
            overlap = max(overlap, len(candidate.original & original) / len(union))
    value = candidate.definition.priority * mass * (1.0 - params.lambda_div * overlap)
    anchor_kinds = {
        "exact_match", "similar_to_anchor", "fans_of_unavailable",
        "talent_credits", "collection_members",
    }
    if params.specificity >= params.tau_narrow:
        if candidate.definition.kind.value in anchor_kinds:
            value *= 1.5
    elif candidate.definition.kind.value == "tag_row":
        value *= 1.5
    return value


def exhaustive_best_total(candidates, scores, params) -> float:
    """Maximum achievable total value over every selection order."""
    best = 0.0

    def recurse(pool, selected_originals, total, depth):
        nonlocal best
        best = max(best, total)
        if depth >= params.max_groups:
            return
        for index, candidate in enumerate(pool):
            value = oracle_group_value(candidate, selected_originals, scores, params)
            taken = set(candidate.videos)
            next_pool = []
            for other_index, other in enumerate(pool):
                if other_index == index:
                    continue
                remaining = tuple(v for v in other.videos if v not in taken)
                if len(remaining) >= other.definition.min_size:
                    next_pool.append(type(other)(
                        definition=other.definition,
                        header=other.header,
                        videos=remaining,
                        original=other.original,
                        anchor=other.anchor,
                    ))
            recurse(next_pool, selected_originals + [candidate.original], total + value, depth + 1)

    viable = [c for c in candidates if len(c.videos) >= c.definition.min_size]
    recurse(viable, [], 0.0, 0)
    return best


def central_difference_gradient(fn, point: list[float], h: float = 1e-5) -> list[float]:
    """Central finite differences of a scalar function of a float vector.

    h near cube-root machine epsilon balances truncation against roundoff.
    """
    gradient = []
    for i in range(len(point)):
        forward = list(point)
        backward = list(point)
        forward[i] += h
        backward[i] -= h
        gradient.append((fn(forward) - fn(backward)) / (2.0 * h))
    return gradient
