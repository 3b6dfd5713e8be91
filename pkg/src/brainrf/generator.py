"""Synthetic cohort generator for desk-scale experiments.

Each query gets a handful of intent clusters in embedding space and one
designated session intent; documents sit near their cluster center, the query
embedding near the middle of all centers (broad query). User grades, clicks
(with a clickbait rate producing bad clicks), third-party labels, and brain
emissions are drawn from that structure. Brain emissions are class-conditional
in DE-feature space along a per-user direction that mixes a shared component
with a private one, so a generalized decoder transfers imperfectly and a
personalized one can overtake it; the class separation is calibrated so a
trained decoder lands near the configured target AUC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sp_signal
from scipy.stats import norm

from .decoder import binarize_grade
from .eeg import BANDS, EegSegment, FEATURE_DIM, FEATURE_SHAPE, bandpass_sos
from .sessions import DatasetBundle, ExaminedDoc, Session
from .types import Document, ValidationError

EEG_MODES = ("features", "raw", "scores")

# trained-decoder shortfall vs the Bayes-optimal AUC of the decisive-response
# model, measured on cohorts of this size (~220 training samples per user in
# 310 dims); scales the class separation up so the decoder itself lands on
# the target rather than the Bayes bound
AUC_CALIBRATION = 1.6


def _check_prob(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must be in [0, 1], got {value}")


def _check_dist(name, dist):
    if any(p < 0 for p in dist) or abs(sum(dist) - 1.0) > 1e-9:
        raise ValidationError(f"{name} must be a probability distribution, got {dist}")


@dataclass(frozen=True)
class GeneratorConfig:
    n_users: int = 20
    n_queries: int = 50
    sessions_per_user: int = 25
    docs_per_query: int = 30
    embedding_dim: int = 32
    clusters_per_query: tuple[int, ...] = (2, 3, 4)
    cluster_spread: float = 0.30   # sin of the doc-to-center angle, dimension-free
    query_intent_bias: float = 0.0  # extra lean of the query toward the session intent
    examined_mean: float = 10.9
    examined_min: int = 2
    # click probability given the user's snippet grade 1..4: rare false
    # clicks on grade-1 snippets, roughly half of relevant snippets clicked
    p_click_by_grade: tuple[float, float, float, float] = (0.02, 0.36, 0.48, 0.52)
    clickbait_rate: float = 0.218
    grade_dist_relevant: tuple[float, float, float, float] = (0.20, 0.20, 0.25, 0.35)
    grade_dist_irrelevant: tuple[float, float, float, float] = (0.92, 0.04, 0.02, 0.02)
    landing_bad_dist: tuple[float, float] = (0.70, 0.30)    # grades 1, 2
    landing_good_dist: tuple[float, float] = (0.35, 0.65)   # grades 3, 4
    external_label_flip: float = 0.05
    target_auc: float = 0.69
    # probability that a stimulus of each grade 1..4 elicits a decisive,
    # decodable response; strong impressions (clearly bad / clearly good
    # pages) register, lukewarm ones leave no discriminative trace
    decisive_rate_by_grade: tuple[float, float, float, float] = (0.35, 0.10, 0.60, 0.75)
    cross_subject_weight: float = 0.5  # shared fraction of each user's direction
    eeg_mode: str = "features"
    raw_rate_hz: float = 1000.0
    raw_pre_stimulus_ms: float = 500.0
    raw_post_ms: float = 2000.0
    score_sigma: float = 0.15  # spread of emitted scores in "scores" mode

    def __post_init__(self):
        for name in ("n_users", "n_queries", "sessions_per_user", "docs_per_query",
                     "embedding_dim", "examined_min"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        for name in ("clickbait_rate", "external_label_flip", "target_auc",
                     "cross_subject_weight", "query_intent_bias"):
            _check_prob(name, getattr(self, name))
        for p in self.p_click_by_grade:
            _check_prob("p_click_by_grade", p)
        _check_dist("grade_dist_relevant", self.grade_dist_relevant)
        _check_dist("grade_dist_irrelevant", self.grade_dist_irrelevant)
        _check_dist("landing_bad_dist", self.landing_bad_dist)
        _check_dist("landing_good_dist", self.landing_good_dist)
        for p in self.decisive_rate_by_grade:
            _check_prob("decisive_rate_by_grade", p)
        if not 0.0 < self.cluster_spread < 1.0:
            raise ValidationError("cluster_spread must be in (0, 1)")
        if self.eeg_mode not in EEG_MODES:
            raise ValidationError(f"eeg_mode must be one of {EEG_MODES}")
        if not 0.5 < self.target_auc < 1.0:
            raise ValidationError("target_auc must be in (0.5, 1.0)")
        if self.examined_min >= self.docs_per_query:
            raise ValidationError("examined_min must leave unseen documents")


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _near(center: np.ndarray, spread: float, rng) -> np.ndarray:
    """Unit vector at angle asin(spread) from center, in a random direction."""
    noise = _unit(rng.normal(size=center.shape[0]))
    return _unit(math.sqrt(1.0 - spread**2) * center + spread * noise)


def class_separation(target_auc: float, mean_decisive_rate: float) -> float:
    """Feature-space separation of decisive responses targeting the decoder's AUC.

    Overall AUC ~ rate * AUC_decisive + (1 - rate) / 2, so the decisive
    subpopulation must reach AUC_decisive = (target - (1 - rate)/2) / rate.
    """
    needed = (target_auc - (1.0 - mean_decisive_rate) / 2.0) / mean_decisive_rate
    if not 0.5 < needed < 1.0:
        raise ValidationError(
            f"target AUC {target_auc} unreachable with decisive rate {mean_decisive_rate}"
        )
    return math.sqrt(2.0) * float(norm.ppf(needed)) * AUC_CALIBRATION


def score_separation(target_auc: float, sigma: float) -> float:
    """Gap between emitted score means whose own AUC is the target (no decoder)."""
    return math.sqrt(2.0) * sigma * float(norm.ppf(target_auc))


def _feature_emission(
    label: int, direction: np.ndarray, delta: float, decisive_rate: float, rng
) -> np.ndarray:
    # bimodal response: a stimulus either elicits a decisive neural response
    # or carries no discriminative trace. Overall decoding AUC is roughly
    # pi * AUC_decisive + (1 - pi) / 2, while decisive stimuli get
    # near-extreme calibrated probabilities, so the decoder's output spread
    # matches real score spreads instead of hugging the class prior.
    strength = delta if rng.random() < decisive_rate else 0.0
    flat = rng.normal(size=FEATURE_DIM) + (2 * label - 1) * (strength / 2.0) * direction
    return flat.reshape(FEATURE_SHAPE)


def _score_emission(label: int, sep: float, sigma: float, rng) -> float:
    mu = 0.5 + (2 * label - 1) * sep / 2.0
    return float(np.clip(rng.normal(mu, sigma), 0.0, 1.0))


def _raw_emission(feature: np.ndarray, config: GeneratorConfig, rng) -> EegSegment:
    """Raw segment whose per-(channel, band) variance encodes the DE feature."""
    rate = config.raw_rate_hz
    n_t = int(round((config.raw_pre_stimulus_ms + config.raw_post_ms) * rate / 1000.0))
    data = np.zeros((feature.shape[0], n_t))
    for b, (_, low, high) in enumerate(BANDS):
        sos = bandpass_sos(low, high, rate)
        noise = sp_signal.sosfiltfilt(sos, rng.normal(size=(feature.shape[0], n_t)), axis=1)
        std = noise.std(axis=1, keepdims=True)
        std[std < 1e-12] = 1.0
        target_var = np.exp(2.0 * feature[:, b]) / (2.0 * math.pi * math.e)
        data += noise / std * np.sqrt(target_var)[:, None]
    data += rng.uniform(-20.0, 20.0, size=(feature.shape[0], 1))  # per-channel DC offset
    return EegSegment(
        data, rate, pre_stimulus_ms=config.raw_pre_stimulus_ms,
        channel_count=feature.shape[0],
    )


def generate_cohort(config: GeneratorConfig, seed: int = 0) -> DatasetBundle:
    """Reproducible synthetic dataset: documents, queries, and sessions."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xB41A]))
    dim = config.embedding_dim

    documents: dict[str, Document] = {}
    queries: dict[str, np.ndarray] = {}
    query_doc_ids: dict[str, list[str]] = {}
    query_intent: dict[str, int] = {}

    for qi in range(config.n_queries):
        qid = f"q{qi:03d}"
        q_m = int(rng.choice(config.clusters_per_query))
        centers = np.array([_unit(rng.normal(size=dim)) for _ in range(q_m)])
        intent = int(rng.integers(q_m))
        query_intent[qid] = intent
        # broad query near the middle of all intents; query_intent_bias > 0
        # optionally leans it toward the designated intent
        b = config.query_intent_bias
        mean_center = _unit(centers.sum(axis=0))
        queries[qid] = _near(
            _unit((1.0 - b) * mean_center + b * centers[intent]), 0.05, rng
        )
        ids = []
        for di in range(config.docs_per_query):
            cluster = int(rng.integers(q_m))
            emb = _near(centers[cluster], config.cluster_spread, rng)
            truly_relevant = cluster == intent
            label = int(truly_relevant)
            if rng.random() < config.external_label_flip:
                label = 1 - label
            doc_id = f"{qid}_d{di:03d}"
            documents[doc_id] = Document(
                doc_id, emb, snippet_relevant_external=label, cluster=cluster
            )
            ids.append(doc_id)
        query_doc_ids[qid] = ids

    # per-user decoder signal directions: shared component + private component
    mean_decisive = float(np.mean(config.decisive_rate_by_grade))
    delta = class_separation(config.target_auc, mean_decisive)
    shared = _unit(rng.normal(size=FEATURE_DIM))
    alpha = config.cross_subject_weight
    user_dirs = {}
    for ui in range(config.n_users):
        private = _unit(rng.normal(size=FEATURE_DIM))
        user_dirs[f"u{ui:02d}"] = _unit(alpha * shared + (1.0 - alpha) * private)

    grades = np.arange(1, 5)
    sessions: list[Session] = []
    for ui in range(config.n_users):
        user_id = f"u{ui:02d}"
        direction = user_dirs[user_id]
        n_sessions = config.sessions_per_user
        if n_sessions <= config.n_queries:
            user_queries = rng.choice(config.n_queries, size=n_sessions, replace=False)
        else:
            user_queries = rng.choice(config.n_queries, size=n_sessions, replace=True)
        for order, q_idx in enumerate(user_queries):
            qid = f"q{int(q_idx):03d}"
            intent = query_intent[qid]
            doc_ids = query_doc_ids[qid]
            presented = [doc_ids[i] for i in rng.permutation(len(doc_ids))]
            m = int(
                np.clip(
                    rng.poisson(config.examined_mean),
                    config.examined_min,
                    len(presented) - 1,
                )
            )
            examined, unseen = presented[:m], presented[m:]

            records = []
            for doc_id in examined:
                doc = documents[doc_id]
                dist = (
                    config.grade_dist_relevant
                    if doc.cluster == intent
                    else config.grade_dist_irrelevant
                )
                snippet_grade = int(rng.choice(grades, p=dist))
                clicked = bool(rng.random() < config.p_click_by_grade[snippet_grade - 1])
                landing_grade = None
                if clicked:
                    if rng.random() < config.clickbait_rate:  # bad click
                        landing_grade = int(rng.choice([1, 2], p=config.landing_bad_dist))
                    else:
                        landing_grade = int(rng.choice([3, 4], p=config.landing_good_dist))

                kwargs = {}
                s_label = binarize_grade(snippet_grade)
                s_rate = config.decisive_rate_by_grade[snippet_grade - 1]
                if config.eeg_mode == "features":
                    kwargs["snippet_feature"] = _feature_emission(
                        s_label, direction, delta, s_rate, rng
                    )
                elif config.eeg_mode == "raw":
                    feat = _feature_emission(s_label, direction, delta, s_rate, rng)
                    kwargs["snippet_segment"] = _raw_emission(feat, config, rng)
                else:
                    kwargs["snippet_score"] = _score_emission(
                        s_label, score_separation(config.target_auc, config.score_sigma),
                        config.score_sigma, rng,
                    )
                if clicked:
                    l_label = binarize_grade(landing_grade)
                    l_rate = config.decisive_rate_by_grade[landing_grade - 1]
                    if config.eeg_mode == "features":
                        kwargs["landing_feature"] = _feature_emission(
                            l_label, direction, delta, l_rate, rng
                        )
                    elif config.eeg_mode == "raw":
                        feat = _feature_emission(l_label, direction, delta, l_rate, rng)
                        kwargs["landing_segment"] = _raw_emission(feat, config, rng)
                    else:
                        kwargs["landing_score"] = _score_emission(
                            l_label, score_separation(config.target_auc, config.score_sigma),
                            config.score_sigma, rng,
                        )
                records.append(
                    ExaminedDoc(
                        doc_id=doc_id,
                        clicked=clicked,
                        snippet_grade=snippet_grade,
                        landing_grade=landing_grade,
                        **kwargs,
                    )
                )
            sessions.append(
                Session(
                    session_id=f"{user_id}_s{order:03d}",
                    user_id=user_id,
                    query_id=qid,
                    order=order,
                    records=tuple(records),
                    unseen_ids=tuple(unseen),
                    intent_cluster=intent,
                )
            )

    bundle = DatasetBundle(documents=documents, queries=queries, sessions=sessions)
    bundle.validate()
    return bundle
