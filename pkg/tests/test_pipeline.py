"""End-to-end harness behavior: row structure, temporal integrity, projections."""

import numpy as np
import pytest

from brainrf.combine import CombinationWeights
from brainrf.decoder import PERSONALIZATION_THRESHOLD
from brainrf.expansion import ExpansionConfig
from brainrf.metrics import ndcg_at_k
from brainrf.pipeline import (
    PipelineConfig,
    decode_bundle,
    paired_metric_test,
    run_adaptive_irf,
    run_irf,
    run_rrf,
)
from brainrf.adaptive import SynthesisParams
from brainrf.sessions import DatasetBundle, ExaminedDoc, Session
from brainrf.signals import DEFAULT_SCORER
from brainrf.types import Document, RankedList, ScoreVector, ValidationError

DIM = 8


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def score_bundle(
    n_users=2, n_sessions=3, n_examined=6, n_unseen=5, seed=0, external_labels=True
):
    """Small bundle with precomputed brain scores (no decoder involved)."""
    rng = np.random.default_rng(seed)
    documents, queries, sessions = {}, {}, []
    for u in range(n_users):
        user = f"u{u}"
        for s_i in range(n_sessions):
            qid = f"q_{user}_{s_i}"
            queries[qid] = unit(rng.normal(size=DIM))
            doc_ids = []
            for d_i in range(n_examined + n_unseen):
                did = f"{qid}_d{d_i}"
                documents[did] = Document(
                    did,
                    unit(rng.normal(size=DIM)),
                    snippet_relevant_external=(
                        int(rng.random() < 0.4) if external_labels else None
                    ),
                    cluster=int(rng.integers(2)),
                )
                doc_ids.append(did)
            records = []
            for d_i in range(n_examined):
                grade = int(rng.integers(1, 5))
                clicked = bool(rng.random() < 0.3)
                records.append(
                    ExaminedDoc(
                        doc_id=doc_ids[d_i],
                        clicked=clicked,
                        snippet_grade=grade,
                        landing_grade=int(rng.integers(1, 5)) if clicked else None,
                        snippet_score=float(rng.random()),
                        landing_score=float(rng.random()) if clicked else None,
                    )
                )
            sessions.append(
                Session(
                    session_id=f"{user}_s{s_i}",
                    user_id=user,
                    query_id=qid,
                    order=s_i,
                    records=tuple(records),
                    unseen_ids=tuple(doc_ids[n_examined:]),
                )
            )
    return DatasetBundle(documents=documents, queries=queries, sessions=sessions)


def test_irf_row_count_is_h_max_per_session():
    bundle = score_bundle(n_users=1, n_sessions=1, n_examined=6, n_unseen=5)
    report = run_irf(bundle, PipelineConfig(weights=CombinationWeights(0.6, 0.2, 0.2)))
    assert len(report.rows) == 6
    assert [r.h for r in report.rows] == [1, 2, 3, 4, 5, 6]
    assert report.rows[0].n_candidates == 10  # 5 later-examined + 5 pool
    assert report.rows[-1].n_candidates == 5


def test_rrf_one_row_per_session():
    bundle = score_bundle(n_users=2, n_sessions=3)
    report = run_rrf(bundle)
    assert len(report.rows) == 6
    assert all(r.h is None for r in report.rows)


def test_pseudo_only_projection_reproduces_baseline():
    bundle = score_bundle(seed=3)
    config = PipelineConfig(
        weights=CombinationWeights(0, 0, 1.0),
        expansion=ExpansionConfig(k=10, c=0.0),
    )
    report = run_irf(bundle, config)
    by_session = {s.session_id: s for s in bundle.sessions}
    for row in report.rows:
        session = by_session[row.session_id]
        pseudo = bundle.pseudo_score_map(session, DEFAULT_SCORER)
        unseen = (*session.examined_ids[row.h:], *session.unseen_ids)
        ranked = RankedList.from_scores(
            ScoreVector(unseen, np.array([pseudo[d] for d in unseen]))
        )
        labels = {d: bundle.documents[d].snippet_relevant_external for d in unseen}
        expected = ndcg_at_k(ranked, labels, 10)
        assert row.metrics["ndcg@10"] == pytest.approx(expected, abs=1e-12)


def test_rrf_bad_click_truth_honored():
    # clicked doc with snippet grade 4 but landing grade 1 counts as irrelevant
    emb = unit(np.ones(DIM))
    perp = unit(np.eye(DIM)[0] - np.ones(DIM) / DIM)
    documents = {
        "good": Document("good", emb, snippet_relevant_external=1),
        "bait": Document("bait", perp, snippet_relevant_external=1),
    }
    queries = {"q": emb}
    records = (
        ExaminedDoc("bait", True, snippet_grade=4, landing_grade=1,
                    snippet_score=0.9, landing_score=0.1),
        ExaminedDoc("good", False, snippet_grade=3, snippet_score=0.8),
    )
    bundle = DatasetBundle(
        documents=documents,
        queries=queries,
        sessions=[Session("s", "u", "q", 0, records, ())],
    )
    report = run_rrf(bundle, PipelineConfig(weights=CombinationWeights(1.0, 0.0, 0.0)))
    # RRF brain channel uses the landing score for the clicked doc: 0.1 < 0.8,
    # so "good" ranks first, and truth grades are landing=1 (gain 0) vs snippet=3
    row = report.rows[0]
    assert row.metrics["ndcg@1"] == 1.0
    assert row.n_bad_clicks == 1


def test_aggregates_match_recomputation():
    bundle = score_bundle(seed=7)
    report = run_irf(bundle)
    recomputed = report.recompute_aggregates()
    for name, value in report.aggregates.items():
        assert value == pytest.approx(recomputed[name], abs=1e-12)
    manual = np.mean([r.metrics["ndcg@10"] for r in report.rows])
    assert report.aggregates["ndcg@10"] == pytest.approx(manual, abs=1e-12)


def test_reports_deterministic():
    bundle = score_bundle(seed=11)
    a = run_irf(bundle, seed=4)
    b = run_irf(bundle, seed=4)
    assert a.to_tsv() == b.to_tsv()
    assert a.summary_dict() == b.summary_dict()
    assert a.fingerprint == b.fingerprint


def test_duplicate_session_order_rejected():
    bundle = score_bundle(n_users=1, n_sessions=2)
    bundle.sessions[1].order = bundle.sessions[0].order
    with pytest.raises(ValidationError):
        run_irf(bundle)


def test_missing_external_labels_fails_actionably():
    bundle = score_bundle(external_labels=False)
    with pytest.raises(ValidationError, match="external"):
        run_irf(bundle)


def test_empty_unseen_rows_skipped():
    bundle = score_bundle(n_users=1, n_sessions=1, n_examined=4, n_unseen=0)
    report = run_irf(bundle)
    # at h = h_max there is nothing left to rank
    assert len(report.rows) == 3
    assert report.warnings["empty_unseen_rows"] == 1


def test_scenario_policy_weights_recorded():
    bundle = score_bundle(seed=13)
    report = run_irf(bundle, PipelineConfig(scenario_policy=True))
    for row in report.rows:
        expected = (1.0, 0.2, 0.2) if row.n_clicks == 0 else (0.6, 0.2, 0.2)
        assert row.weights == expected


# ------------------------------------------------------------ decoder staging


def feature_bundle(n_users=2, sessions_per_user=11, per_session=10, seed=0):
    """Feature-mode bundle engineered so personal pools grow 10 samples/session."""
    rng = np.random.default_rng(seed)
    documents, queries, sessions = {}, {}, []
    for u in range(n_users):
        user = f"u{u}"
        direction = unit(rng.normal(size=310))
        for s_i in range(sessions_per_user):
            qid = f"q_{user}_{s_i}"
            queries[qid] = unit(rng.normal(size=DIM))
            records = []
            for d_i in range(per_session):
                did = f"{qid}_d{d_i}"
                documents[did] = Document(
                    did, unit(rng.normal(size=DIM)), snippet_relevant_external=int(d_i % 2)
                )
                grade = 4 if d_i % 2 else 1
                label = 1 if grade >= 2 else 0
                feat = rng.normal(size=310) + (2 * label - 1) * 1.5 * direction
                records.append(
                    ExaminedDoc(
                        doc_id=did, clicked=False, snippet_grade=grade,
                        snippet_feature=feat.reshape(62, 5),
                    )
                )
            pool_id = f"{qid}_pool"
            documents[pool_id] = Document(
                pool_id, unit(rng.normal(size=DIM)), snippet_relevant_external=1
            )
            sessions.append(
                Session(
                    session_id=f"{user}_s{s_i:02d}", user_id=user, query_id=qid,
                    order=s_i, records=tuple(records), unseen_ids=(pool_id,),
                )
            )
    return DatasetBundle(documents=documents, queries=queries, sessions=sessions)


def test_personalized_switch_at_exactly_100_samples():
    bundle = feature_bundle()
    decoded = decode_bundle(bundle, seed=1, generalized_max_samples=300)
    for session in bundle.sessions:
        pool_before = decoded.pool_size[session.session_id]
        scope = decoded.scope[session.session_id]
        if pool_before >= PERSONALIZATION_THRESHOLD:
            assert scope == "personalized", (session.session_id, pool_before)
        else:
            assert scope == "generalized", (session.session_id, pool_before)
    # the switch happens exactly at the 100-sample boundary: session index 10
    by_user = bundle.sessions_by_user()
    for user, stream in by_user.items():
        scopes = [decoded.scope[s.session_id] for s in stream]
        assert scopes[:10] == ["generalized"] * 10
        assert scopes[10:] == ["personalized"] * (len(stream) - 10)


def test_no_temporal_leakage_within_user():
    bundle = feature_bundle(seed=5)
    decoded_before = decode_bundle(bundle, seed=2, generalized_max_samples=300)
    # sentinel-perturb the LAST session of user u0: flip features and labels
    target = [s for s in bundle.sessions if s.user_id == "u0"][-1]
    rng = np.random.default_rng(99)
    perturbed = tuple(
        ExaminedDoc(
            doc_id=r.doc_id, clicked=r.clicked,
            snippet_grade=1 if r.snippet_grade == 4 else 4,
            snippet_feature=rng.normal(size=(62, 5)) * 100.0,
        )
        for r in target.records
    )
    target.records = perturbed
    decoded_after = decode_bundle(bundle, seed=2, generalized_max_samples=300)
    for session in bundle.sessions:
        if session.user_id != "u0" or session.order >= target.order:
            continue
        for pos in range(session.h_max):
            key = (session.session_id, pos)
            assert decoded_before.snippet[key] == decoded_after.snippet[key], key


def test_precomputed_scores_bypass_decoder():
    bundle = score_bundle()
    decoded = decode_bundle(bundle, seed=0)
    assert set(decoded.scope.values()) == {"precomputed"}
    session = bundle.sessions[0]
    assert decoded.snippet[(session.session_id, 0)] == session.records[0].snippet_score


# ------------------------------------------------------------ adaptive run


def test_adaptive_single_candidate_matches_fixed():
    bundle = score_bundle(seed=17)
    params = SynthesisParams(n_synth=2)
    fixed = run_irf(bundle, PipelineConfig(weights=CombinationWeights(0.6, 0.2, 0.2)))
    adaptive = run_adaptive_irf(bundle, params, grid=(0.2, 0.6), seed=3, q_m=2)
    # degenerate grid: a single candidate forces identical ranking only when
    # grid has one triple; here just check structure + determinism instead
    again = run_adaptive_irf(bundle, params, grid=(0.2, 0.6), seed=3, q_m=2)
    assert adaptive.to_tsv() == again.to_tsv()
    assert len(adaptive.rows) == len(fixed.rows)


def test_adaptive_degenerate_grid_equals_fixed_run():
    bundle = score_bundle(seed=19)
    params = SynthesisParams(n_synth=2)
    adaptive = run_adaptive_irf(bundle, params, grid=(0.6,), seed=5, q_m=2)
    fixed = run_irf(bundle, PipelineConfig(weights=CombinationWeights(0.6, 0.6, 0.6)))
    for ra, rf in zip(adaptive.rows, fixed.rows):
        assert ra.key() == rf.key()
        assert ra.metrics == rf.metrics
        assert ra.weights == (0.6, 0.6, 0.6)


# ------------------------------------------------------------ comparisons


def test_paired_test_identical_reports():
    bundle = score_bundle(seed=23)
    a = run_irf(bundle)
    b = run_irf(bundle)
    cmp = paired_metric_test(a, b)
    assert cmp.mean_diff == 0.0
    assert cmp.p_value == 1.0


def test_paired_test_rejects_mismatched_rows():
    a = run_irf(score_bundle(seed=29))
    b = run_irf(score_bundle(n_users=1, seed=29))
    with pytest.raises(ValidationError):
        paired_metric_test(a, b)
