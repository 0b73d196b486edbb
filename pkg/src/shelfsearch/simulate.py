"""Synthetic catalogs and interaction logs for desk-scale evaluation.

Real logs are proprietary, so evaluation runs on simulated sessions built
around the two intent archetypes: fetch sessions type a title prefix until
they select one specific target, explore sessions play a handful of videos
clustered around a tag. Everything is driven by one seed; the same config
always produces byte-identical output.
"""

from __future__ import annotations

import bisect
import json
import random
from dataclasses import dataclass, asdict
from typing import Iterator

from .catalog import Catalog, Collection, Talent, Video


@dataclass(frozen=True)
class SimConfig:
    n_profiles: int = 100
    n_fetch_sessions: int = 500
    n_explore_sessions: int = 500
    seed: int = 7
    explore_plays_per_session: int = 3
    min_select_prefix: int = 3

    def expected_event_counts(self) -> dict[str, int]:
        """Event arithmetic: one search and one play per fetch session,
        a fixed number of plays per explore session."""
        return {
            "search": self.n_fetch_sessions,
            "play": self.n_fetch_sessions + self.n_explore_sessions * self.explore_plays_per_session,
        }


_ADJECTIVES = [
    "Midnight", "Golden", "Silent", "Electric", "Crimson", "Lost", "Iron",
    "Paper", "Wild", "Frozen", "Neon", "Ancient", "Broken", "Lucky",
    "Secret", "Velvet", "Savage", "Gentle", "Hollow", "Radiant",
]
_NOUNS = [
    "River", "Empire", "Garden", "Signal", "Harbor", "Canyon", "Circus",
    "Engine", "Kingdom", "Voyage", "Shadow", "Meadow", "Fortune", "Arcade",
    "Summit", "Lantern", "Outlaw", "Orchard", "Compass", "Monsoon",
]
_SUFFIXES = ["", "", "", " II", " Returns", " Forever", " Story", " Files"]
_TAGS = [
    "Action", "Comedy", "Drama", "Documentary", "Thriller", "Family",
    "Sci-Fi", "Romance", "Crime", "Animation", "Adventure", "Mystery",
]
_FIRST_NAMES = ["Ava", "Ben", "Cleo", "Dev", "Elif", "Finn", "Gia", "Hugo", "Ines", "Jon"]
_LAST_NAMES = ["Stone", "Reyes", "Okafor", "Lindqvist", "Marsh", "Tanaka", "Beck", "Ferraro"]


def synthesize_catalog(
    n_videos: int,
    seed: int = 0,
    unavailable_fraction: float = 0.1,
    n_talents: int = 0,
    n_collections: int = 0,
) -> Catalog:
    """Generate a plausible catalog with distinct titles and tag clusters."""
    rng = random.Random(seed)
    videos: dict[int, Video] = {}
    used_titles: set[str] = set()
    next_id = 1
    while len(videos) < n_videos:
        title = rng.choice(_ADJECTIVES) + " " + rng.choice(_NOUNS) + rng.choice(_SUFFIXES)
        if title in used_titles:
            title = f"{title} {len(used_titles) % 97 + 2}"
            if title in used_titles:
                continue
        used_titles.add(title)
        tags = frozenset(rng.sample(_TAGS, rng.randint(1, 3)))
        videos[next_id] = Video(
            id=next_id,
            title=title,
            aliases=(),
            available=rng.random() >= unavailable_fraction,
            tags=tags,
            release_year=rng.randint(1970, 2024),
            popularity=round(rng.random(), 4),
        )
        next_id += 1

    talents: dict[int, Talent] = {}
    for _ in range(n_talents):
        name = rng.choice(_FIRST_NAMES) + " " + rng.choice(_LAST_NAMES)
        credits = tuple(sorted(rng.sample(sorted(videos), min(len(videos), rng.randint(2, 6)))))
        talents[next_id] = Talent(id=next_id, name=f"{name}", credits=credits)
        next_id += 1

    collections: dict[int, Collection] = {}
    for _ in range(n_collections):
        tag = rng.choice(_TAGS)
        members = tuple(sorted(v.id for v in videos.values() if tag in v.tags)[:12])
        if len(members) < 2:
            continue
        collections[next_id] = Collection(id=next_id, label=f"{tag} Picks", members=members)
        next_id += 1

    return Catalog(videos=videos, talents=talents, collections=collections)


def catalog_to_jsonl(catalog: Catalog) -> Iterator[str]:
    for video in catalog.videos.values():
        yield json.dumps(
            {
                "kind": "video",
                "id": video.id,
                "title": video.title,
                "aliases": list(video.aliases),
                "available": video.available,
                "tags": sorted(video.tags),
                "release_year": video.release_year,
                "popularity": video.popularity,
            }
        )
    for talent in catalog.talents.values():
        yield json.dumps(
            {"kind": "talent", "id": talent.id, "name": talent.name, "credits": list(talent.credits)}
        )
    for collection in catalog.collections.values():
        yield json.dumps(
            {
                "kind": "collection",
                "id": collection.id,
                "label": collection.label,
                "members": list(collection.members),
            }
        )


def _popularity_sampler(videos: list[Video]):
    cumulative = []
    running = 0.0
    for video in videos:
        running += video.popularity + 0.01
        cumulative.append(running)

    def sample(rng: random.Random) -> Video:
        return videos[bisect.bisect_left(cumulative, rng.random() * cumulative[-1])]

    return sample


def generate_log(config: SimConfig, catalog: Catalog) -> Iterator[dict]:
    """Yield play/search event records; deterministic per seed.

    Fetch targets are popularity-weighted and may be unavailable: the
    selection then models a detail-page visit, and the play models historical
    viewing from when the title was streamable.
    """
    if not catalog.videos:
        raise ValueError("cannot simulate sessions over an empty catalog")
    rng = random.Random(config.seed)
    profiles = [f"p{i:05d}" for i in range(config.n_profiles)]
    videos = list(catalog.videos.values())
    videos_by_tag: dict[str, list[Video]] = {}
    for video in videos:
        for tag in sorted(video.tags):
            videos_by_tag.setdefault(tag, []).append(video)
    all_tags = sorted(videos_by_tag)
    # Per-profile tag affinity: a favorite tag plus a fallback draw.
    favorite_tag = {p: rng.choice(all_tags) if all_tags else "" for p in profiles}

    sample_target = _popularity_sampler(videos)
    ts = 1_600_000_000
    for _ in range(config.n_fetch_sessions):
        profile = rng.choice(profiles)
        target = sample_target(rng)
        title = target.title
        lo = min(config.min_select_prefix, len(title))
        prefix_len = rng.randint(lo, len(title))
        ts += rng.randint(1, 60)
        yield {
            "kind": "search",
            "profile": profile,
            "query": title[:prefix_len],
            "selected": target.id,
            "position": 0,
        }
        ts += rng.randint(1, 60)
        yield {"kind": "play", "profile": profile, "video": target.id, "ts": ts}

    for _ in range(config.n_explore_sessions):
        profile = rng.choice(profiles)
        tag = favorite_tag[profile] if rng.random() < 0.8 else rng.choice(all_tags)
        cluster = videos_by_tag.get(tag) or videos
        for _ in range(config.explore_plays_per_session):
            video = rng.choice(cluster)
            ts += rng.randint(1, 60)
            yield {"kind": "play", "profile": profile, "video": video.id, "ts": ts}


def write_log_jsonl(config: SimConfig, catalog: Catalog, handle) -> int:
    """Serialize the generated log as JSONL; returns the event count."""
    count = 0
    for record in generate_log(config, catalog):
        handle.write(json.dumps(record) + "\n")
        count += 1
    return count


def sim_provenance(config: SimConfig) -> dict:
    """Generator parameters, recorded into reports for provenance."""
    return asdict(config)
