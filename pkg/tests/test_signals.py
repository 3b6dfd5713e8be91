"""Base score channel tests: pseudo similarity, clicks, brain-score selection."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brainrf.signals import (
    CosineSimilarityScorer,
    ExaminationRecord,
    brain_scores_select,
    click_scores,
    pseudo_scores,
)
from brainrf.types import Document, RFMode, ValidationError


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def doc(doc_id, emb, **kw):
    return Document(doc_id, unit(emb), **kw)


def test_cosine_identical_is_one():
    q = unit([1.0, 2.0, 3.0])
    sv = pseudo_scores(q, [doc("a", q)])
    assert sv.score_of("a") == pytest.approx(1.0)


def test_cosine_orthogonal_is_half():
    q = unit([1.0, 0.0])
    sv = pseudo_scores(q, [doc("a", [0.0, 1.0])])
    assert sv.score_of("a") == pytest.approx(0.5)


def test_cosine_antipodal_is_zero():
    q = unit([1.0, 0.0])
    sv = pseudo_scores(q, [doc("a", [-1.0, 0.0])])
    assert sv.score_of("a") == pytest.approx(0.0, abs=1e-12)


def test_pseudo_scores_order_invariant():
    rng = np.random.default_rng(0)
    q = unit(rng.normal(size=8))
    docs = [doc(f"d{i}", rng.normal(size=8)) for i in range(6)]
    fwd = pseudo_scores(q, docs)
    rev = pseudo_scores(q, docs[::-1])
    for d in docs:
        assert fwd.score_of(d.doc_id) == rev.score_of(d.doc_id)


def test_scorer_symmetry():
    rng = np.random.default_rng(1)
    s = CosineSimilarityScorer()
    a, b = unit(rng.normal(size=5)), unit(rng.normal(size=5))
    assert s(a, b) == pytest.approx(s(b, a))


def test_click_scores_patterns():
    recs = [
        ExaminationRecord("a", True, 0.5, 0.5),
        ExaminationRecord("b", False, 0.5),
        ExaminationRecord("c", True, 0.5, 0.5),
    ]
    assert click_scores(recs).scores.tolist() == [1.0, 0.0, 1.0]
    all_click = [ExaminationRecord(f"d{i}", True, 0.5, 0.5) for i in range(3)]
    assert click_scores(all_click).scores.tolist() == [1.0, 1.0, 1.0]
    no_click = [ExaminationRecord(f"d{i}", False, 0.5) for i in range(3)]
    assert click_scores(no_click).scores.tolist() == [0.0, 0.0, 0.0]


def test_brain_select_irf_uses_snippet():
    rec = ExaminationRecord("a", True, 0.8, 0.2)
    sv = brain_scores_select([rec], RFMode.IRF)
    assert sv.score_of("a") == 0.8


def test_brain_select_rrf_prefers_landing():
    rec = ExaminationRecord("a", True, 0.8, 0.2)
    sv = brain_scores_select([rec], RFMode.RRF)
    assert sv.score_of("a") == 0.2


def test_brain_select_rrf_falls_back_to_snippet():
    rec = ExaminationRecord("a", False, 0.8)
    sv = brain_scores_select([rec], RFMode.RRF)
    assert sv.score_of("a") == 0.8


def test_landing_score_without_click_rejected():
    with pytest.raises(ValidationError):
        ExaminationRecord("a", False, 0.5, 0.9)


@given(
    st.lists(
        st.tuples(
            st.booleans(),
            st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
            st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        ),
        min_size=1,
        max_size=20,
    )
)
@settings(max_examples=100)
def test_irf_never_reads_landing(rows):
    # poison the landing slot of clicked docs with a sentinel; IRF output
    # must match the same records with the sentinel removed
    poisoned, clean = [], []
    for i, (clicked, s, sentinel) in enumerate(rows):
        poisoned.append(
            ExaminationRecord(f"d{i}", clicked, s, sentinel if clicked else None)
        )
        clean.append(ExaminationRecord(f"d{i}", clicked, s, None if not clicked else 0.0))
    a = brain_scores_select(poisoned, RFMode.IRF)
    b = brain_scores_select(clean, RFMode.IRF)
    assert np.array_equal(a.scores, b.scores)
    assert not a.mask.any()
