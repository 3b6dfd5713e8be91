"""Synthetic cohort statistics and emission-mode mechanics."""

import numpy as np
import pytest

from brainrf.eeg import extract_de, preprocess
from brainrf.generator import GeneratorConfig, generate_cohort
from brainrf.types import ValidationError


def test_deterministic_given_seed():
    cfg = GeneratorConfig(n_users=3, sessions_per_user=4, n_queries=10)
    a = generate_cohort(cfg, seed=42)
    b = generate_cohort(cfg, seed=42)
    assert [s.session_id for s in a.sessions] == [s.session_id for s in b.sessions]
    for sa, sb in zip(a.sessions, b.sessions):
        assert sa.examined_ids == sb.examined_ids
        assert sa.unseen_ids == sb.unseen_ids
        for ra, rb in zip(sa.records, sb.records):
            assert ra.clicked == rb.clicked
            assert ra.snippet_grade == rb.snippet_grade
            assert np.array_equal(ra.snippet_feature, rb.snippet_feature)
    for did in a.documents:
        assert np.array_equal(a.documents[did].embedding, b.documents[did].embedding)


def test_seed_changes_output():
    cfg = GeneratorConfig(n_users=2, sessions_per_user=3, n_queries=6)
    a = generate_cohort(cfg, seed=1)
    b = generate_cohort(cfg, seed=2)
    assert [s.examined_ids for s in a.sessions] != [s.examined_ids for s in b.sessions]


def test_examined_mean_matches_target():
    cfg = GeneratorConfig(n_users=20, sessions_per_user=25, n_queries=50, eeg_mode="scores")
    bundle = generate_cohort(cfg, seed=7)
    assert len(bundle.sessions) == 500
    mean_examined = np.mean([s.h_max for s in bundle.sessions])
    assert 10.4 <= mean_examined <= 11.4


def test_bad_click_fraction_matches_target():
    cfg = GeneratorConfig(n_users=20, sessions_per_user=25, n_queries=50, eeg_mode="scores")
    bundle = generate_cohort(cfg, seed=7)
    clicks = sum(s.n_clicks for s in bundle.sessions)
    bad = sum(s.n_bad_clicks for s in bundle.sessions)
    assert 0.18 <= bad / clicks <= 0.26
    # clicks per session in the neighborhood of the 1.9 target
    assert 1.5 <= clicks / len(bundle.sessions) <= 2.4


def test_structure_invariants():
    cfg = GeneratorConfig(n_users=3, sessions_per_user=5, n_queries=10)
    bundle = generate_cohort(cfg, seed=3)
    bundle.validate()
    for s in bundle.sessions:
        assert s.h_max >= 1
        assert len(s.unseen_ids) >= 1
        for rec in s.records:
            if rec.clicked:
                assert rec.landing_grade is not None
                assert rec.landing_feature is not None
            assert rec.snippet_feature is not None
    for doc in bundle.documents.values():
        assert doc.snippet_relevant_external in (0, 1)
        assert doc.cluster is not None


def test_scores_mode_emits_probabilities():
    cfg = GeneratorConfig(n_users=2, sessions_per_user=3, n_queries=6, eeg_mode="scores")
    bundle = generate_cohort(cfg, seed=5)
    for s in bundle.sessions:
        for rec in s.records:
            assert rec.snippet_feature is None
            assert 0.0 <= rec.snippet_score <= 1.0
            if rec.clicked:
                assert 0.0 <= rec.landing_score <= 1.0


def test_raw_mode_round_trips_through_preprocessing():
    cfg = GeneratorConfig(
        n_users=1, sessions_per_user=1, n_queries=2, docs_per_query=8,
        examined_mean=3, eeg_mode="raw",
    )
    bundle = generate_cohort(cfg, seed=9)
    rec = bundle.sessions[0].records[0]
    assert rec.snippet_segment is not None
    seg = rec.snippet_segment
    assert seg.channel_count == 62
    assert seg.sampling_rate_hz == 1000.0
    feats = extract_de(preprocess(seg))
    assert feats.shape == (62, 5)
    assert np.all(np.isfinite(feats))


def test_config_validation():
    with pytest.raises(ValidationError):
        GeneratorConfig(clickbait_rate=1.5)
    with pytest.raises(ValidationError):
        GeneratorConfig(grade_dist_relevant=(0.5, 0.5, 0.5, 0.5))
    with pytest.raises(ValidationError):
        GeneratorConfig(eeg_mode="telepathy")
    with pytest.raises(ValidationError):
        GeneratorConfig(cluster_spread=0.0)
