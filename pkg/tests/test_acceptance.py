"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; the latency criterion builds a 10k-entity catalog with 100k events
and takes the better part of a minute.
"""

from __future__ import annotations

import json
import random

import pytest

from shelfsearch.behavior import InteractionLog, PlayEvent, SearchEvent, build_coplay, item_similarity
from shelfsearch.catalog import Catalog, Video
from shelfsearch.evaluate import latency_benchmark, replay_queries, run_eval
from shelfsearch.facet import Facet, argmax_facet, detect_facet
from shelfsearch.instant_index import build_index, match_prefix
from shelfsearch.organizer import greedy_select
from shelfsearch.ranker import FEATURE_COUNT, TrainConfig, loss_and_gradient, train
from shelfsearch.service import build_snapshot, handle_search, run_search
from shelfsearch.simulate import SimConfig, generate_log, synthesize_catalog

from conftest import FANS_HEADER, SONIC_HEDGEHOG, SONIC_X, make_sonic_catalog, make_sonic_log
from oracles import (
    brute_force_coplay,
    brute_force_cosine,
    brute_force_match,
    central_difference_gradient,
    exhaustive_best_total,
)
from test_instant_index import _random_catalog
from test_organizer import CURATED_FIXTURES, _random_disjoint_fixture
from test_ranker import _separable_examples


def _report(line: str) -> None:
    print(f"[acceptance] PASS  {line}")


def _sim_log(config: SimConfig, catalog: Catalog) -> InteractionLog:
    plays, searches = [], []
    for record in generate_log(config, catalog):
        if record["kind"] == "play":
            plays.append(PlayEvent(record["profile"], record["video"], record["ts"]))
        else:
            searches.append(
                SearchEvent(record["profile"], record["query"], record["selected"], record["position"])
            )
    return InteractionLog(plays=tuple(plays), searches=tuple(searches))


def test_index_oracle_equivalence():
    """match_prefix equals the brute-force matcher on 50 randomized catalogs."""
    rng = random.Random(1001)
    sizes = [rng.randint(5, 60) for _ in range(44)] + [100, 120, 150, 180, 200, 200]
    assert len(sizes) == 50
    mismatches = 0
    queries_checked = 0
    for size in sizes:
        catalog = _random_catalog(rng, max_entities=size)
        index = build_index(catalog)
        titles = [v.title for v in catalog.videos.values()]
        titles += [t.name for t in catalog.talents.values()]
        titles += [c.label for c in catalog.collections.values()]
        for title in titles:
            for cut in range(1, len(title) + 1):
                query = title[:cut]
                fast = [
                    (m.entity, m.lexical_score, m.full_match, m.matched_tokens)
                    for m in match_prefix(index, query)
                ]
                slow = brute_force_match(catalog, query)
                queries_checked += 1
                if fast != pytest.approx(slow):
                    mismatches += 1
    assert mismatches == 0
    _report(f"index oracle: 0 mismatches over {queries_checked} prefix queries on 50 catalogs")


def test_cf_oracle_equivalence():
    """build_coplay and item_similarity match brute force on 20 random logs."""
    rng = random.Random(2002)
    for trial in range(20):
        n_videos = rng.randint(2, 20)
        n_profiles = rng.randint(1, 50)
        flat = []
        for p in range(n_profiles):
            count = rng.randint(0, min(8, n_videos))
            for video in rng.sample(range(1, n_videos + 1), count):
                flat.append((f"p{p}", video))
        min_support = rng.randint(1, 3)
        log = InteractionLog(plays=tuple(PlayEvent(p, v, 0) for p, v in flat))
        model = build_coplay(log, min_support=min_support)
        item_counts, pair_counts = brute_force_coplay(flat, min_support)
        assert model.item_counts == item_counts
        got_pairs = {
            (i, j): c
            for i, neighbors in model.pair_counts.items()
            for j, c in neighbors.items()
            if i < j
        }
        assert got_pairs == pair_counts
        for (i, j), _ in pair_counts.items():
            expected = brute_force_cosine(item_counts, pair_counts, i, j)
            assert abs(item_similarity(model, i, j) - expected) < 1e-9
    _report("CF oracle: counts and cosine similarities match brute force on 20 random logs")


def test_ranker_gradient_and_loss_criteria():
    """Analytic gradient within 1e-6 of central differences at 100 random points."""
    rng = random.Random(3003)
    examples = _separable_examples(n=30, seed=17)
    l2 = 1e-3
    worst = 0.0
    for _ in range(100):
        weights = [rng.uniform(-2, 2) for _ in range(FEATURE_COUNT)]
        bias = rng.uniform(-2, 2)
        _, grad_w, grad_b = loss_and_gradient(weights, bias, examples, l2)

        def as_loss(point):
            return loss_and_gradient(point[:-1], point[-1], examples, l2)[0]

        numeric = central_difference_gradient(as_loss, weights + [bias])
        for analytic, approximate in zip(list(grad_w) + [grad_b], numeric):
            rel = abs(analytic - approximate) / max(abs(analytic), abs(approximate), 1e-8)
            worst = max(worst, rel)
            assert rel < 1e-6
    result = train(examples, TrainConfig(learning_rate=0.01, epochs=300, l2=1e-4))
    for earlier, later in zip(result.losses, result.losses[1:]):
        assert later <= earlier + 1e-12
    _report(f"ranker gradients: max relative error {worst:.2e} < 1e-6; loss non-increasing at lr=0.01")


def _random_pipeline_inputs(rng: random.Random):
    n_videos = rng.randint(4, 20)
    words = ["astro", "blaze", "comet", "drift", "ember", "flare", "gale", "haze"]
    tags = ["Action", "Comedy", "Drama", "Family"]
    videos = {
        i: Video(
            id=i,
            title=f"{rng.choice(words)} {rng.choice(words)}",
            available=rng.random() > 0.25,
            tags=frozenset(rng.sample(tags, rng.randint(1, 3))),
            popularity=round(rng.random(), 3),
        )
        for i in range(1, n_videos + 1)
    }
    catalog = Catalog(videos=videos)
    plays = []
    for p in range(rng.randint(2, 12)):
        for video in rng.sample(sorted(videos), rng.randint(1, min(5, n_videos))):
            plays.append(PlayEvent(f"p{p}", video, 0))
    searches = []
    for s in range(rng.randint(0, 6)):
        target = rng.choice(sorted(videos))
        query = videos[target].title[: rng.randint(1, 8)]
        searches.append(SearchEvent(f"s{s}", query, target, 0))
    log = InteractionLog(plays=tuple(plays), searches=tuple(searches))
    return catalog, log


def test_organizer_dedup_on_randomized_pipeline_runs():
    """No video appears in two groups across 1,000 randomized pipeline runs."""
    rng = random.Random(4004)
    runs = 0
    while runs < 1000:
        catalog, log = _random_pipeline_inputs(rng)
        snapshot = build_snapshot(catalog, log)
        for _ in range(20):
            video = catalog.videos[rng.choice(sorted(catalog.videos))]
            query = video.title[: rng.randint(1, len(video.title))]
            result = run_search(snapshot, query, k=rng.choice([5, 10, 40]))
            seen = set()
            for group in result.page.groups:
                for member in group.videos:
                    assert member not in seen, f"duplicate {member} for query {query!r}"
                    seen.add(member)
                assert catalog.videos[member].available
            runs += 1
            if runs >= 1000:
                break
    _report("organizer dedup: 0 violations over 1000 randomized pipeline runs")


def test_organizer_greedy_equals_exhaustive_on_suite_fixtures():
    """Greedy selection attains the exhaustive optimum on every suite fixture."""
    checked = 0
    for candidates, scores, params in CURATED_FIXTURES:
        assert len(candidates) <= 6
        _, greedy_total = greedy_select(candidates, scores, params)
        assert greedy_total == pytest.approx(exhaustive_best_total(candidates, scores, params))
        checked += 1
    rng = random.Random(5005)
    for _ in range(40):
        candidates, scores, params = _random_disjoint_fixture(rng, rng.randint(1, 6))
        _, greedy_total = greedy_select(candidates, scores, params)
        assert greedy_total == pytest.approx(exhaustive_best_total(candidates, scores, params))
        checked += 1
    _report(f"organizer greedy = exhaustive optimum on {checked} fixtures with <= 6 candidates")


def test_unavailable_video_fixture_end_to_end():
    """The unavailable-video behavior reproduces end to end."""
    catalog = make_sonic_catalog()
    log = make_sonic_log()
    snapshot = build_snapshot(catalog, log)

    matches = match_prefix(snapshot.index, "sonic t")
    playable = [
        m.entity for m in matches
        if m.entity in catalog.videos and catalog.videos[m.entity].available
    ]
    assert playable == [SONIC_X]

    facets = detect_facet("sonic t", matches, snapshot.associations, catalog)
    assert argmax_facet(facets) == Facet.UNAVAILABLE_VIDEO
    assert facets.anchor[Facet.UNAVAILABLE_VIDEO] == SONIC_HEDGEHOG

    body = handle_search("sonic t", 40, snapshot)
    assert body["groups"], "full pipeline page must be non-empty"
    headers = [group["header"] for group in body["groups"]]
    assert FANS_HEADER in headers
    assert "Myths & Legends" in body["pills"]
    assert "Chases" in body["pills"]
    _report("unavailable-video fixture: matches-only = {Sonic X}; fans header and pills present; "
            "facet = unavailable video anchored at Sonic the Hedgehog")


def test_dead_end_rates_on_simulated_corpus():
    """Recommendations strictly reduce dead ends on unavailable-target queries."""
    catalog = synthesize_catalog(300, seed=5, unavailable_fraction=0.15)
    config = SimConfig(
        n_profiles=60, n_fetch_sessions=400, n_explore_sessions=400, seed=11, min_select_prefix=8
    )
    log = _sim_log(config, catalog)
    report = run_eval(catalog, log, holdout=0.3, seed=3)
    matches_only = report.dead_end_rate["matches_only"]
    full = report.dead_end_rate["full"]
    assert report.counts["unavailable_target_queries"] > 0
    assert matches_only > 0.0
    assert full < matches_only
    _report(f"dead ends: full pipeline {full:.3f} < matches-only {matches_only:.3f} "
            f"on {report.counts['unavailable_target_queries']} unavailable-target queries")


@pytest.fixture(scope="module")
def bench_snapshot():
    catalog = synthesize_catalog(9600, seed=21, n_talents=300, n_collections=100)
    config = SimConfig(
        n_profiles=2000, n_fetch_sessions=20000, n_explore_sessions=20000, seed=22, min_select_prefix=8
    )
    log = _sim_log(config, catalog)
    assert catalog.entity_count() == 10000
    assert len(log.plays) + len(log.searches) == 100000
    return build_snapshot(catalog, log)


def test_latency_budget(bench_snapshot):
    """p95 handle_search under 50 ms on a 10k-entity catalog with 100k events."""
    queries = replay_queries(bench_snapshot.catalog, 1000, seed=23)
    stats = latency_benchmark(bench_snapshot, queries, k=40)
    assert stats.count == 1000
    assert stats.p95_ms < 50.0, f"p95 {stats.p95_ms:.2f} ms exceeds budget"
    _report(f"latency: p95 {stats.p95_ms:.2f} ms (p50 {stats.p50_ms:.2f}, "
            f"max {stats.max_ms:.2f}) over 1000 queries on 10k entities")


def test_determinism_of_reports_and_responses(bench_snapshot):
    """Same inputs and seeds produce identical bytes, timing aside."""
    catalog = synthesize_catalog(120, seed=31, unavailable_fraction=0.1)
    config = SimConfig(n_profiles=20, n_fetch_sessions=120, n_explore_sessions=80, seed=32)
    log = _sim_log(config, catalog)
    first = run_eval(catalog, log, holdout=0.4, seed=33)
    second = run_eval(catalog, log, holdout=0.4, seed=33)
    assert first.to_json().encode() == second.to_json().encode()

    queries = replay_queries(bench_snapshot.catalog, 25, seed=34)
    for query in queries:
        a = handle_search(query, 40, bench_snapshot)
        b = handle_search(query, 40, bench_snapshot)
        a["timing_ms"] = b["timing_ms"] = 0.0
        assert json.dumps(a, sort_keys=True).encode() == json.dumps(b, sort_keys=True).encode()
    _report("determinism: eval reports and response bodies byte-identical (timing excluded)")
