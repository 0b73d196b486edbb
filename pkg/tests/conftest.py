"""Shared fixtures, centered on the Sonic catalog that reproduces the
unavailable-video behavior end to end."""

from __future__ import annotations

import json

import pytest

from shelfsearch.behavior import InteractionLog, PlayEvent, SearchEvent
from shelfsearch.catalog import Catalog, Collection, Talent, Video
from shelfsearch.service import build_snapshot

SONIC_X = 1
SONIC_HEDGEHOG = 2
MEGA_QUEST = 10
PIXEL_RACERS = 11
RING_RUNNERS = 12
CHAOS_CROWN = 13
GOOFY_CREW = 14
TALENT_ID = 20
COLLECTION_ID = 30

FANS_HEADER = "Fans of 'Sonic the Hedgehog' have watched these"


def make_sonic_catalog() -> Catalog:
    videos = {
        SONIC_X: Video(
            id=SONIC_X,
            title="Sonic X",
            available=True,
            tags=frozenset({"Based on a Video Game", "Goofy Movies"}),
            release_year=2003,
            popularity=0.85,
        ),
        SONIC_HEDGEHOG: Video(
            id=SONIC_HEDGEHOG,
            title="Sonic the Hedgehog",
            available=False,
            tags=frozenset({"Myths & Legends", "Chases", "Based on a Video Game", "Goofy Movies"}),
            release_year=2020,
            popularity=0.9,
        ),
        MEGA_QUEST: Video(
            id=MEGA_QUEST,
            title="Mega Quest",
            available=True,
            tags=frozenset({"Based on a Video Game", "Chases"}),
            release_year=2018,
            popularity=0.8,
        ),
        PIXEL_RACERS: Video(
            id=PIXEL_RACERS,
            title="Pixel Racers",
            available=True,
            tags=frozenset({"Based on a Video Game", "Goofy Movies"}),
            release_year=2019,
            popularity=0.75,
        ),
        RING_RUNNERS: Video(
            id=RING_RUNNERS,
            title="Ring Runners",
            available=True,
            tags=frozenset({"Goofy Movies", "Chases"}),
            release_year=2017,
            popularity=0.7,
        ),
        CHAOS_CROWN: Video(
            id=CHAOS_CROWN,
            title="Chaos Crown",
            available=True,
            tags=frozenset({"Based on a Video Game", "Myths & Legends"}),
            release_year=2021,
            popularity=0.65,
        ),
        GOOFY_CREW: Video(
            id=GOOFY_CREW,
            title="Goofy Quest Crew",
            available=True,
            tags=frozenset({"Goofy Movies"}),
            release_year=2015,
            popularity=0.6,
        ),
    }
    talents = {
        TALENT_ID: Talent(id=TALENT_ID, name="Jim Carrey", credits=(MEGA_QUEST, CHAOS_CROWN)),
    }
    collections = {
        COLLECTION_ID: Collection(
            id=COLLECTION_ID,
            label="Video Game Adventures",
            members=(SONIC_X, MEGA_QUEST, PIXEL_RACERS, CHAOS_CROWN),
        ),
    }
    return Catalog(videos=videos, talents=talents, collections=collections)


def make_sonic_log() -> InteractionLog:
    coplay_profiles = {
        "u1": [SONIC_HEDGEHOG, MEGA_QUEST, PIXEL_RACERS, SONIC_X],
        "u2": [SONIC_HEDGEHOG, MEGA_QUEST, RING_RUNNERS],
        "u3": [SONIC_HEDGEHOG, PIXEL_RACERS, CHAOS_CROWN],
        "u4": [SONIC_HEDGEHOG, CHAOS_CROWN, GOOFY_CREW],
        "u5": [SONIC_HEDGEHOG, MEGA_QUEST, GOOFY_CREW],
        "u6": [SONIC_HEDGEHOG, RING_RUNNERS],
    }
    plays = []
    ts = 1_600_000_000
    for profile, videos in coplay_profiles.items():
        for video in videos:
            ts += 60
            plays.append(PlayEvent(profile=profile, video=video, ts=ts))
    searches = []
    for i in range(9):
        searches.append(SearchEvent(profile=f"s{i}", query="sonic t", selected=SONIC_HEDGEHOG, position=0))
    for i in range(3):
        searches.append(SearchEvent(profile=f"t{i}", query="sonic t", selected=SONIC_X, position=1))
    return InteractionLog(plays=tuple(plays), searches=tuple(searches))


def sonic_catalog_jsonl() -> str:
    catalog = make_sonic_catalog()
    lines = []
    for video in catalog.videos.values():
        lines.append(
            json.dumps(
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
        )
    for talent in catalog.talents.values():
        lines.append(
            json.dumps({"kind": "talent", "id": talent.id, "name": talent.name, "credits": list(talent.credits)})
        )
    for collection in catalog.collections.values():
        lines.append(
            json.dumps(
                {
                    "kind": "collection",
                    "id": collection.id,
                    "label": collection.label,
                    "members": list(collection.members),
                }
            )
        )
    return "\n".join(lines) + "\n"


def sonic_log_jsonl() -> str:
    log = make_sonic_log()
    lines = []
    for play in log.plays:
        lines.append(json.dumps({"kind": "play", "profile": play.profile, "video": play.video, "ts": play.ts}))
    for search in log.searches:
        lines.append(
            json.dumps(
                {
                    "kind": "search",
                    "profile": search.profile,
                    "query": search.query,
                    "selected": search.selected,
                    "position": search.position,
                }
            )
        )
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def sonic_catalog() -> Catalog:
    return make_sonic_catalog()


@pytest.fixture(scope="session")
def sonic_log() -> InteractionLog:
    return make_sonic_log()


@pytest.fixture(scope="session")
def sonic_snapshot(sonic_catalog, sonic_log):
    return build_snapshot(sonic_catalog, sonic_log)


@pytest.fixture()
def sonic_files(tmp_path):
    catalog_path = tmp_path / "catalog.jsonl"
    logs_path = tmp_path / "logs.jsonl"
    catalog_path.write_text(sonic_catalog_jsonl())
    logs_path.write_text(sonic_log_jsonl())
    return catalog_path, logs_path
