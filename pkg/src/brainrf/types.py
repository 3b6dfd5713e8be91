"""Domain primitives shared across the package.

Documents carry unit-norm embeddings plus optional per-user grades and a
third-party binary label. Per-document score channels travel as ScoreVector
(doc ids + scores + availability mask); rankings as RankedList. All ranking
ties are broken by a stable sort that preserves input order, so every module
ranks identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

GRADE_MIN = 1
GRADE_MAX = 4

EMBEDDING_NORM_TOL = 1e-6


class BrainRFError(Exception):
    """Base class for package errors."""


class ValidationError(BrainRFError):
    """Bad input: violated precondition, malformed value, or config error."""


class DataIntegrityError(ValidationError):
    """A dataset failed referential/shape validation. Carries all violations."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        summary = "; ".join(self.violations[:10])
        if len(self.violations) > 10:
            summary += f"; ... ({len(self.violations)} violations total)"
        super().__init__(f"dataset integrity check failed: {summary}")


class UndefinedMetricError(BrainRFError):
    """The requested metric is undefined for this input (e.g. single-class AUC)."""


class TrainingError(BrainRFError):
    """Decoder training cannot proceed (e.g. single-class training set)."""


class NotTrainedError(BrainRFError):
    """Prediction requested from an untrained model."""


class SynthesisError(BrainRFError):
    """Constrained signal synthesis is infeasible for the given parameters."""


class RFMode(Enum):
    """Relevance-feedback setting: re-rank unseen docs mid-session (IRF) or
    re-rank the examined docs after the session (RRF)."""

    IRF = "irf"
    RRF = "rrf"


def validate_grade(value: int, what: str = "grade") -> int:
    """Check a user relevance judgment on the 1..4 scale (1 = totally irrelevant)."""
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValidationError(f"{what} must be an integer, got {value!r}")
    if not GRADE_MIN <= value <= GRADE_MAX:
        raise ValidationError(f"{what} must be in [{GRADE_MIN}, {GRADE_MAX}], got {value}")
    return int(value)


def _as_unit_embedding(vec, doc_id: str) -> np.ndarray:
    arr = np.asarray(vec, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"document {doc_id!r}: embedding must be a non-empty 1-d vector")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > EMBEDDING_NORM_TOL:
        raise ValidationError(
            f"document {doc_id!r}: embedding norm {norm:.8f} is not unit (tol {EMBEDDING_NORM_TOL})"
        )
    arr.flags.writeable = False
    return arr


@dataclass(eq=False)
class Document:
    """One retrievable unit: id, unit-norm embedding, optional labels.

    ``snippet_grade_user``/``landing_grade_user`` are the user's own 1..4
    judgments (landing only exists for clicked docs); ``snippet_relevant_external``
    is the third-party binary label used as unseen-document ground truth;
    ``cluster`` is an optional intent-cluster index.
    """

    doc_id: str
    embedding: np.ndarray
    snippet_grade_user: int | None = None
    landing_grade_user: int | None = None
    snippet_relevant_external: int | None = None
    cluster: int | None = None

    def __post_init__(self):
        if not self.doc_id:
            raise ValidationError("doc_id must be non-empty")
        self.embedding = _as_unit_embedding(self.embedding, self.doc_id)
        if self.snippet_grade_user is not None:
            self.snippet_grade_user = validate_grade(self.snippet_grade_user, "snippet_grade_user")
        if self.landing_grade_user is not None:
            self.landing_grade_user = validate_grade(self.landing_grade_user, "landing_grade_user")
        if self.snippet_relevant_external is not None:
            if self.snippet_relevant_external not in (0, 1):
                raise ValidationError(
                    f"document {self.doc_id!r}: external label must be 0/1, "
                    f"got {self.snippet_relevant_external!r}"
                )
            self.snippet_relevant_external = int(self.snippet_relevant_external)
        if self.cluster is not None:
            if int(self.cluster) < 0:
                raise ValidationError(f"document {self.doc_id!r}: cluster must be >= 0")
            self.cluster = int(self.cluster)


def rank_order(scores: np.ndarray) -> np.ndarray:
    """Indices that sort scores descending, stable: ties keep input order."""
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


@dataclass(eq=False)
class ScoreVector:
    """Per-document scores in a fixed document order, with a per-entry mask.

    Unmasked scores lie in [0, 1] unless ``bounded`` is False — combined
    (weighted-sum) vectors may exceed 1 and are created unbounded on purpose.
    """

    doc_ids: tuple[str, ...]
    scores: np.ndarray
    mask: np.ndarray = field(default=None)  # True = unavailable
    bounded: bool = True

    def __post_init__(self):
        self.doc_ids = tuple(str(d) for d in self.doc_ids)
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise ValidationError("ScoreVector doc_ids must be unique")
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.shape != (len(self.doc_ids),):
            raise ValidationError(
                f"ScoreVector has {len(self.doc_ids)} ids but scores shape {self.scores.shape}"
            )
        if self.mask is None:
            self.mask = np.zeros(len(self.doc_ids), dtype=bool)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != self.scores.shape:
            raise ValidationError("ScoreVector mask shape must match scores")
        live = self.scores[~self.mask]
        if not np.all(np.isfinite(live)):
            raise ValidationError("ScoreVector unmasked scores must be finite")
        if self.bounded and live.size and (live.min() < 0.0 or live.max() > 1.0):
            raise ValidationError(
                f"ScoreVector unmasked scores must lie in [0, 1]; "
                f"saw [{live.min():.6g}, {live.max():.6g}]"
            )
        self.scores.flags.writeable = False
        self.mask.flags.writeable = False

    def __len__(self) -> int:
        return len(self.doc_ids)

    def score_of(self, doc_id: str) -> float:
        idx = self.doc_ids.index(doc_id)
        if self.mask[idx]:
            raise ValidationError(f"score for {doc_id!r} is masked")
        return float(self.scores[idx])

    def require_unmasked(self, what: str = "ScoreVector") -> None:
        if self.mask.any():
            masked = [d for d, m in zip(self.doc_ids, self.mask) if m]
            raise ValidationError(f"{what} has masked entries: {masked[:5]}")


@dataclass(eq=False)
class RankedList:
    """Doc ids ordered by non-increasing score."""

    doc_ids: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self):
        self.doc_ids = tuple(str(d) for d in self.doc_ids)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.shape != (len(self.doc_ids),):
            raise ValidationError("RankedList ids and scores disagree in length")
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise ValidationError("RankedList doc_ids must be unique")
        if self.scores.size and np.any(np.diff(self.scores) > 0):
            raise ValidationError("RankedList scores must be non-increasing")
        self.scores.flags.writeable = False

    @classmethod
    def from_scores(cls, sv: ScoreVector) -> "RankedList":
        """Rank by descending score; ties keep the vector's document order."""
        sv.require_unmasked("ranking input")
        order = rank_order(sv.scores)
        return cls(tuple(sv.doc_ids[i] for i in order), sv.scores[order])

    def __len__(self) -> int:
        return len(self.doc_ids)


def ranked_ids(ranked: "RankedList | Sequence[str]") -> tuple[str, ...]:
    """Accept a RankedList or a plain ordered id sequence."""
    if isinstance(ranked, RankedList):
        return ranked.doc_ids
    return tuple(str(d) for d in ranked)
