"""Session records and the in-memory dataset bundle.

A Session is one query's examination trace for one user: the ordered examined
documents (with clicks, the user's snippet/landing grades, and brain evidence
as raw segments, DE features, or precomputed scores) plus the pool of
documents never examined. Sessions of one user are ordered by ``order``; the
split-by-timepoint decoder protocol folds over that order.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .eeg import EegSegment
from .types import (
    DataIntegrityError,
    Document,
    ValidationError,
    validate_grade,
)

BAD_CLICK_MAX_GRADE = 2  # a clicked doc whose landing grade is 1 or 2 was a bad click


@dataclass(eq=False)
class ExaminedDoc:
    """One examined document within a session.

    Exactly one kind of brain evidence per stimulus is needed downstream:
    a precomputed score, a DE feature vector, or a raw EEG segment. Landing
    fields exist only for clicked documents.
    """

    doc_id: str
    clicked: bool
    snippet_grade: int
    landing_grade: int | None = None
    snippet_feature: np.ndarray | None = None
    landing_feature: np.ndarray | None = None
    snippet_segment: EegSegment | None = None
    landing_segment: EegSegment | None = None
    snippet_score: float | None = None
    landing_score: float | None = None

    def __post_init__(self):
        self.snippet_grade = validate_grade(self.snippet_grade, "snippet_grade")
        if self.clicked:
            if self.landing_grade is None:
                raise ValidationError(f"{self.doc_id!r}: clicked doc needs a landing grade")
            self.landing_grade = validate_grade(self.landing_grade, "landing_grade")
        else:
            for name in ("landing_grade", "landing_feature", "landing_segment", "landing_score"):
                if getattr(self, name) is not None:
                    raise ValidationError(
                        f"{self.doc_id!r}: {name} present but the doc was not clicked"
                    )
        for name in ("snippet_score", "landing_score"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValidationError(f"{self.doc_id!r}: {name} must be in [0, 1]")

    @property
    def is_bad_click(self) -> bool:
        return self.clicked and self.landing_grade <= BAD_CLICK_MAX_GRADE


@dataclass(eq=False)
class Session:
    session_id: str
    user_id: str
    query_id: str
    order: int
    records: tuple[ExaminedDoc, ...]
    unseen_ids: tuple[str, ...]
    intent_cluster: int | None = None
    pseudo: dict[str, float] | None = None  # optional precomputed query-doc scores

    def __post_init__(self):
        self.records = tuple(self.records)
        self.unseen_ids = tuple(str(d) for d in self.unseen_ids)
        if not self.records:
            raise ValidationError(f"session {self.session_id!r} has no examined documents")
        if self.order < 0:
            raise ValidationError(f"session {self.session_id!r}: order must be >= 0")
        seen = [r.doc_id for r in self.records]
        all_ids = seen + list(self.unseen_ids)
        if len(set(all_ids)) != len(all_ids):
            raise ValidationError(
                f"session {self.session_id!r} repeats document ids"
            )
        if self.pseudo is not None:
            bad = {d: s for d, s in self.pseudo.items() if not 0.0 <= s <= 1.0}
            if bad:
                raise ValidationError(
                    f"session {self.session_id!r}: pseudo scores outside [0, 1]: {bad}"
                )

    @property
    def h_max(self) -> int:
        return len(self.records)

    @property
    def examined_ids(self) -> tuple[str, ...]:
        return tuple(r.doc_id for r in self.records)

    @property
    def n_clicks(self) -> int:
        return sum(1 for r in self.records if r.clicked)

    @property
    def n_bad_clicks(self) -> int:
        return sum(1 for r in self.records if r.is_bad_click)


@dataclass(eq=False)
class DatasetBundle:
    """Documents, query embeddings, and sessions, with referential integrity."""

    documents: dict[str, Document]
    queries: dict[str, np.ndarray]
    sessions: list[Session]

    def validate(self) -> None:
        """Collect every integrity violation; raise them together."""
        problems: list[str] = []
        dims = set()
        for doc in self.documents.values():
            dims.add(doc.embedding.shape[0])
        for qid, emb in self.queries.items():
            arr = np.asarray(emb)
            if arr.ndim != 1:
                problems.append(f"query {qid!r}: embedding must be 1-d")
            else:
                dims.add(arr.shape[0])
        if len(dims) > 1:
            problems.append(f"embedding dimensions are not uniform: {sorted(dims)}")

        clicked_ids = set()
        seen_keys = set()
        for s in self.sessions:
            if s.query_id not in self.queries:
                problems.append(f"session {s.session_id!r}: unknown query {s.query_id!r}")
            key = (s.user_id, s.order)
            if key in seen_keys:
                problems.append(
                    f"session {s.session_id!r}: duplicate order {s.order} for user {s.user_id!r}"
                )
            seen_keys.add(key)
            for d in (*s.examined_ids, *s.unseen_ids):
                if d not in self.documents:
                    problems.append(f"session {s.session_id!r}: unknown document {d!r}")
            for r in s.records:
                if r.clicked:
                    clicked_ids.add(r.doc_id)
            if s.pseudo is not None:
                covered = set(s.pseudo)
                missing = (set(s.examined_ids) | set(s.unseen_ids)) - covered
                if missing:
                    problems.append(
                        f"session {s.session_id!r}: pseudo scores missing for "
                        f"{sorted(missing)[:5]}"
                    )
        for doc in self.documents.values():
            if doc.landing_grade_user is not None and doc.doc_id not in clicked_ids:
                problems.append(
                    f"document {doc.doc_id!r}: landing grade present but never clicked"
                )
        if problems:
            raise DataIntegrityError(problems)

    def sessions_by_user(self) -> dict[str, list[Session]]:
        """User id -> sessions sorted by temporal order."""
        streams: dict[str, list[Session]] = {}
        for s in self.sessions:
            streams.setdefault(s.user_id, []).append(s)
        for user in streams:
            streams[user].sort(key=lambda s: s.order)
        return streams

    def pseudo_score_map(self, session: Session, scorer) -> dict[str, float]:
        """Query-doc scores for all of a session's docs: precomputed or scored."""
        ids = (*session.examined_ids, *session.unseen_ids)
        if session.pseudo is not None:
            return {d: float(session.pseudo[d]) for d in ids}
        q = np.asarray(self.queries[session.query_id])
        embs = np.vstack([self.documents[d].embedding for d in ids])
        scores = scorer.matrix(q[None, :], embs)[0]
        return {d: float(v) for d, v in zip(ids, scores)}
