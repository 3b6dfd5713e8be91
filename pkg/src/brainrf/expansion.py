"""Feedback-driven re-ranking of unseen documents.

From the combined scores of examined documents: take the top k as feedback,
softmax their combined scores into weights, score each unseen doc as the
weighted sum of its similarity to the feedback docs, then trade that off
against plain query similarity:

    r_f(u)  = sum_j softmax(combined)_j * score(feedback_j, u)
    r_it(u) = c * r_f(u) + (1 - c) * score(query, u)

Documents are represented by their snippet embeddings on both sides.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .signals import DEFAULT_SCORER
from .types import Document, ScoreVector, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpansionConfig:
    k: int = 10       # max feedback documents
    c: float = 0.1    # feedback vs original-query trade-off

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.c <= 1.0:
            raise ValidationError(f"c must be in [0, 1], got {self.c}")


def select_feedback(combined: ScoreVector, k: int) -> tuple[str, ...]:
    """Ids of the min(k, h) highest-scored docs; ties keep examination order."""
    if len(combined) == 0:
        raise ValidationError("cannot select feedback from an empty score vector")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    combined.require_unmasked("feedback selection")
    order = np.argsort(-combined.scores, kind="stable")[: min(k, len(combined))]
    return tuple(combined.doc_ids[i] for i in order)


def softmax_weights(scores: Sequence[float]) -> np.ndarray:
    """exp(s_j) / sum_l exp(s_l), computed with max-subtraction for stability."""
    s = np.asarray(scores, dtype=np.float64)
    if s.size == 0:
        raise ValidationError("softmax over an empty list")
    if not np.all(np.isfinite(s)):
        raise ValidationError("softmax inputs must be finite")
    w = np.exp(s - s.max())
    return w / w.sum()


def expand_and_score(
    query_embedding: np.ndarray,
    feedback_docs: Sequence[Document],
    feedback_weights: Sequence[float],
    unseen_docs: Sequence[Document],
    scorer=DEFAULT_SCORER,
    config: ExpansionConfig = ExpansionConfig(),
    query_scores: ScoreVector | None = None,
) -> ScoreVector:
    """Score unseen docs from weighted feedback plus the original query.

    ``query_scores`` optionally supplies precomputed query-doc scores over the
    unseen docs (same order) in place of ``scorer(query, doc)``. With no
    feedback docs the result falls back to pseudo-only scores (a warning is
    logged): degenerate feedback sets occur by construction at the start of a
    session.
    """
    unseen_ids = tuple(d.doc_id for d in unseen_docs)
    if not unseen_docs:
        return ScoreVector(unseen_ids, np.zeros(0))

    if query_scores is not None:
        if query_scores.doc_ids != unseen_ids:
            raise ValidationError("query_scores must cover the unseen docs in order")
        query_scores.require_unmasked("query scores")
        q_sim = query_scores.scores
    else:
        unseen_embs = np.vstack([d.embedding for d in unseen_docs])
        q_sim = scorer.matrix(np.asarray(query_embedding)[None, :], unseen_embs)[0]

    if len(feedback_docs) == 0:
        logger.warning("empty feedback set: falling back to pseudo-only scores")
        return ScoreVector(unseen_ids, q_sim)

    weights = np.asarray(feedback_weights, dtype=np.float64)
    if weights.shape != (len(feedback_docs),):
        raise ValidationError("one weight per feedback doc required")

    fb_embs = np.vstack([d.embedding for d in feedback_docs])
    unseen_embs = np.vstack([d.embedding for d in unseen_docs])
    sims = scorer.matrix(fb_embs, unseen_embs)  # (n_feedback, n_unseen)
    r_f = weights @ sims
    r_it = config.c * r_f + (1.0 - config.c) * q_sim
    return ScoreVector(unseen_ids, r_it)


def rerank_unseen(
    query_embedding: np.ndarray,
    combined: ScoreVector,
    docs_by_id: Mapping[str, Document],
    unseen_docs: Sequence[Document],
    scorer=DEFAULT_SCORER,
    config: ExpansionConfig = ExpansionConfig(),
    query_scores: ScoreVector | None = None,
) -> ScoreVector:
    """Full expansion step: select feedback, softmax, expand, score unseen."""
    selected = select_feedback(combined, config.k)
    weights = softmax_weights([combined.score_of(d) for d in selected])
    feedback = [docs_by_id[d] for d in selected]
    return expand_and_score(
        query_embedding, feedback, weights, unseen_docs, scorer, config, query_scores
    )
