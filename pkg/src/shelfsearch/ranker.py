"""Feature extraction, a trainable logistic relevance model, and blending.

Matches and recommendations merge into a single candidate pool per query,
get a fixed 8-feature vector each, and are ranked by a pointwise logistic
model trained on click logs. Full-batch gradient descent from zero weights
keeps training exactly reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .behavior import SearchRecommendation
from .catalog import Catalog, Collection, EntityId, Talent, Video
from .facet import FacetEstimate, argmax_facet
from .instant_index import SearchMatch

FEATURE_COUNT = 8
SCHEMA_VERSION = 1
QUERY_LENGTH_SATURATION = 20


class FeatureVector(NamedTuple):
    lexical_score: float
    full_match: float
    association_score: float
    popularity: float
    facet_alignment: float
    is_match: float
    is_recommendation: float
    query_length_norm: float


@dataclass(frozen=True)
class RelevanceModel:
    weights: tuple[float, ...] = (0.0,) * FEATURE_COUNT
    bias: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if len(self.weights) != FEATURE_COUNT:
            raise ValueError(f"expected {FEATURE_COUNT} weights, got {len(self.weights)}")
        if not all(math.isfinite(w) for w in (*self.weights, self.bias)):
            raise ValueError("model parameters must be finite")

    def to_json(self) -> str:
        return json.dumps(
            {"weights": list(self.weights), "bias": self.bias, "schema_version": self.schema_version}
        )

    @classmethod
    def from_json(cls, text: str) -> "RelevanceModel":
        payload = json.loads(text)
        return cls(
            weights=tuple(float(w) for w in payload["weights"]),
            bias=float(payload["bias"]),
            schema_version=int(payload.get("schema_version", SCHEMA_VERSION)),
        )


def load_model_file(path: str) -> RelevanceModel:
    with open(path, "r", encoding="utf-8") as handle:
        return RelevanceModel.from_json(handle.read())


class Provenance(Enum):
    MATCH = "match"
    RECOMMENDATION = "recommendation"
    BOTH = "both"


@dataclass(frozen=True)
class ScoredResult:
    video: EntityId
    provenance: Provenance
    features: FeatureVector
    score: float
    anchors: tuple[EntityId, ...] = ()  # recommendation anchors, for group assembly


class FeatureContext:
    """Per-query constants for feature extraction, computed once per request."""

    __slots__ = ("query_length_norm", "aligned")

    def __init__(self, facets: FacetEstimate, query: str, catalog: Catalog):
        self.query_length_norm = min(len(query), QUERY_LENGTH_SATURATION) / QUERY_LENGTH_SATURATION
        top_facet = argmax_facet(facets)
        anchor_id = facets.anchor.get(top_facet)
        aligned: set[EntityId] = set()
        if anchor_id is not None:
            aligned.add(anchor_id)
            anchor = catalog.get_entity(anchor_id)
            if isinstance(anchor, Talent):
                aligned.update(anchor.credits)
            elif isinstance(anchor, Collection):
                aligned.update(anchor.members)
        self.aligned = aligned

    def features(
        self,
        video: Video,
        match: Optional[SearchMatch],
        rec: Optional[SearchRecommendation],
    ) -> FeatureVector:
        if match is None and rec is None:
            raise ValueError(f"video {video.id} arrived from neither matches nor recommendations")
        return FeatureVector(
            lexical_score=match.lexical_score if match else 0.0,
            full_match=1.0 if match and match.full_match else 0.0,
            association_score=rec.association_score if rec else 0.0,
            popularity=video.popularity,
            facet_alignment=1.0 if video.id in self.aligned else 0.0,
            is_match=1.0 if match else 0.0,
            is_recommendation=1.0 if rec else 0.0,
            query_length_norm=self.query_length_norm,
        )


def extract_features(
    video: Video,
    match: Optional[SearchMatch],
    rec: Optional[SearchRecommendation],
    facets: FacetEstimate,
    query: str,
    catalog: Catalog,
) -> FeatureVector:
    """Fixed 8-feature schema; fields from an absent source stay 0."""
    return FeatureContext(facets, query, catalog).features(video, match, rec)


def score(model: RelevanceModel, features: FeatureVector) -> float:
    z = model.bias
    for w, x in zip(model.weights, features):
        z += w * x
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


TrainingExample = tuple[FeatureVector, int]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 500
    l2: float = 1e-4


@dataclass(frozen=True)
class TrainResult:
    model: RelevanceModel
    losses: tuple[float, ...]   # mean regularized log-loss after each epoch

    @property
    def final_loss(self) -> float:
        return self.losses[-1]


def loss_and_gradient(
    weights: Sequence[float],
    bias: float,
    examples: Sequence[TrainingExample],
    l2: float,
) -> tuple[float, np.ndarray, float]:
    """Mean log-loss plus l2*||w||^2, with its analytic gradient."""
    x = np.asarray([f for f, _ in examples], dtype=np.float64)
    y = np.asarray([label for _, label in examples], dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    z = x @ w + bias
    # log(1 + e^z) - y*z, computed stably
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + l2 * np.dot(w, w))
    p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
    grad_w = x.T @ (p - y) / len(examples) + 2.0 * l2 * w
    grad_b = float(np.mean(p - y))
    return loss, grad_w, grad_b


def train(examples: Sequence[TrainingExample], config: TrainConfig = TrainConfig()) -> TrainResult:
    """Full-batch gradient descent from zero initialization.

    Deterministic: the same examples and config always yield the same model.
    """
    labels = {label for _, label in examples}
    if labels != {0, 1}:
        raise ValueError("training needs at least one example of each label")
    w = np.zeros(FEATURE_COUNT, dtype=np.float64)
    b = 0.0
    losses = []
    for _ in range(config.epochs):
        _, grad_w, grad_b = loss_and_gradient(w, b, examples, config.l2)
        w -= config.learning_rate * grad_w
        b -= config.learning_rate * grad_b
        losses.append(loss_and_gradient(w, b, examples, config.l2)[0])
    if not losses:
        losses = [loss_and_gradient(w, b, examples, config.l2)[0]]
    model = RelevanceModel(weights=tuple(float(v) for v in w), bias=float(b))
    return TrainResult(model=model, losses=tuple(losses))


def training_accuracy(model: RelevanceModel, examples: Sequence[TrainingExample]) -> float:
    correct = sum(1 for f, label in examples if (score(model, f) >= 0.5) == bool(label))
    return correct / len(examples)


def label_from_logs(
    searches: Sequence,
    replay: Callable[[str], list["ScoredResult"]],
    near_click_window: int = 2,
) -> tuple[list[TrainingExample], int]:
    """Turn logged selections into labeled examples by replaying the pipeline.

    The clicked result is a positive; results shown above or up to
    near_click_window positions below the click are negatives. Events whose
    selection no longer appears in the replayed impressions are skipped and
    counted.
    """
    examples: list[TrainingExample] = []
    skipped = 0
    for event in searches:
        results = replay(event.query)
        click_position = next(
            (i for i, r in enumerate(results) if r.video == event.selected), None
        )
        if click_position is None:
            skipped += 1
            continue
        examples.append((results[click_position].features, 1))
        for position in range(min(len(results), click_position + near_click_window + 1)):
            if position != click_position:
                examples.append((results[position].features, 0))
    return examples, skipped


def blend_and_rank(
    matches: list[SearchMatch],
    recs: list[SearchRecommendation],
    model: RelevanceModel,
    facets: FacetEstimate,
    query: str,
    catalog: Catalog,
    k: int,
) -> list[ScoredResult]:
    """Union matches and recommendations by video, score, sort, truncate.

    Only available videos survive; a video arriving from both sources keeps
    one entry with provenance BOTH and both feature channels populated.
    """
    match_by_video: dict[EntityId, SearchMatch] = {}
    for match in matches:
        video = catalog.videos.get(match.entity)
        if video is None or not video.available:
            continue
        existing = match_by_video.get(match.entity)
        if existing is None or match.lexical_score > existing.lexical_score:
            match_by_video[match.entity] = match
    rec_by_video = {rec.video: rec for rec in recs}

    context = FeatureContext(facets, query, catalog)
    ordered = []
    for video_id in set(match_by_video) | set(rec_by_video):
        video = catalog.videos[video_id]
        match = match_by_video.get(video_id)
        rec = rec_by_video.get(video_id)
        if match and rec:
            provenance = Provenance.BOTH
        elif match:
            provenance = Provenance.MATCH
        else:
            provenance = Provenance.RECOMMENDATION
        features = context.features(video, match, rec)
        relevance = score(model, features)
        ordered.append(
            (
                (-relevance, -video.popularity, video_id),
                ScoredResult(
                    video=video_id,
                    provenance=provenance,
                    features=features,
                    score=relevance,
                    anchors=rec.anchors if rec else (),
                ),
            )
        )
    ordered.sort(key=lambda pair: pair[0])
    return [result for _, result in ordered[:k]]
