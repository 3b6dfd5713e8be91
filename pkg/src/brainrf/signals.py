"""The three base relevance channels over examined documents.

Pseudo-relevance comes from a pluggable query-document similarity scorer
(default: embedding cosine mapped to [0, 1] by (1 + cos) / 2 — any scorer
honoring the [0, 1] contract plugs in, including ingested precomputed
scores). Click scores are the raw click indicator. The brain channel is
selected from snippet/landing decoder outputs: IRF always uses the snippet
response; RRF prefers the landing response when the doc was clicked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .types import Document, RFMode, ScoreVector, ValidationError


class CosineSimilarityScorer:
    """(1 + cos) / 2 over embeddings; symmetric, 1.0 for identical unit vectors."""

    def __call__(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(self.matrix(np.asarray(a)[None, :], np.asarray(b)[None, :])[0, 0])

    def matrix(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Pairwise scores, shape (len(rows), len(cols)). Inputs are unit vectors."""
        r = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        c = np.atleast_2d(np.asarray(cols, dtype=np.float64))
        if r.shape[1] != c.shape[1]:
            raise ValidationError(
                f"embedding dimensions differ: {r.shape[1]} vs {c.shape[1]}"
            )
        # unoptimized einsum keeps each pair's reduction order independent of
        # array layout, so scores are exactly invariant to document order
        sims = (1.0 + np.einsum("md,nd->mn", r, c, optimize=False)) / 2.0
        return np.clip(sims, 0.0, 1.0)


DEFAULT_SCORER = CosineSimilarityScorer()


@dataclass(eq=False)
class ExaminationRecord:
    """Per-document interaction evidence: click plus decoded brain scores.

    ``landing_brain_score`` is None (masked) when the document was not
    clicked — the landing page was never shown, so no response exists.
    """

    doc_id: str
    clicked: bool
    snippet_brain_score: float
    landing_brain_score: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.snippet_brain_score <= 1.0:
            raise ValidationError(
                f"{self.doc_id!r}: snippet brain score must be in [0, 1]"
            )
        if self.landing_brain_score is not None:
            if not self.clicked:
                raise ValidationError(
                    f"{self.doc_id!r}: landing brain score present without a click"
                )
            if not 0.0 <= self.landing_brain_score <= 1.0:
                raise ValidationError(
                    f"{self.doc_id!r}: landing brain score must be in [0, 1]"
                )


def pseudo_scores(
    query_embedding: np.ndarray,
    docs: Sequence[Document],
    scorer=DEFAULT_SCORER,
) -> ScoreVector:
    """Query-document similarity per doc, in the given document order."""
    ids = tuple(d.doc_id for d in docs)
    if not docs:
        return ScoreVector(ids, np.zeros(0))
    embs = np.vstack([d.embedding for d in docs])
    scores = scorer.matrix(np.asarray(query_embedding)[None, :], embs)[0]
    return ScoreVector(ids, scores)


def click_scores(records: Sequence[ExaminationRecord]) -> ScoreVector:
    """1.0 for clicked documents, 0.0 for abandoned ones."""
    ids = tuple(r.doc_id for r in records)
    return ScoreVector(ids, np.array([1.0 if r.clicked else 0.0 for r in records]))


def brain_scores_select(
    records: Sequence[ExaminationRecord], mode: RFMode
) -> ScoreVector:
    """Pick the brain score per document for the given RF setting.

    IRF: snippet score, always (the snippet represents the doc in expansion).
    RRF: landing score when available, else snippet — a doc with an enticing
    snippet but a bad landing page should be judged by the landing response.
    """
    ids = tuple(r.doc_id for r in records)
    if mode is RFMode.IRF:
        scores = [r.snippet_brain_score for r in records]
    elif mode is RFMode.RRF:
        scores = [
            r.landing_brain_score
            if r.landing_brain_score is not None
            else r.snippet_brain_score
            for r in records
        ]
    else:
        raise ValidationError(f"unknown RF mode: {mode!r}")
    return ScoreVector(ids, np.asarray(scores, dtype=np.float64))
