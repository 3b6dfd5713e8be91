"""End-to-end evaluation: split-by-timepoint decoding, per-step IRF rows,
post-session RRF rows, and report aggregation.

Per user, sessions are processed in temporal order. The decoder used for a
session is trained only on strictly earlier data of that user (personalized,
once 100 labeled samples have accumulated) or on other users' data
(generalized, frozen per cohort). For each session, IRF evaluates a row per
examined prefix h = 1..h_max by re-ranking the not-yet-examined documents
against third-party labels; RRF evaluates one row by re-ranking the examined
documents against the user's own grades (landing grade if clicked, snippet
grade otherwise).
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .adaptive import (
    ClusterAssignment,
    Scenario,
    SynthesisParams,
    adaptive_search,
    cluster_documents,
)
from .combine import CombinationWeights, WEIGHT_GRID, combine, default_weights, scenario_weights
from .decoder import (
    DecoderConfig,
    DecoderScope,
    PERSONALIZATION_THRESHOLD,
    binarize_grade,
    train,
)
from .eeg import extract_de, flatten_features, preprocess
from .expansion import ExpansionConfig, rerank_unseen
from .metrics import mean_average_precision, ndcg_at_k
from .sessions import DatasetBundle, ExaminedDoc, Session
from .signals import DEFAULT_SCORER, ExaminationRecord, brain_scores_select, click_scores
from .types import (
    RankedList,
    RFMode,
    ScoreVector,
    TrainingError,
    ValidationError,
)

logger = logging.getLogger(__name__)

SCOPE_PRECOMPUTED = "precomputed"


@dataclass(frozen=True)
class PipelineConfig:
    weights: CombinationWeights | None = None  # None -> per-mode default
    scenario_policy: bool = False              # opt-in scenario-dependent weights
    expansion: ExpansionConfig = field(default_factory=ExpansionConfig)
    cutoffs: tuple[int, ...] = (1, 3, 5, 10)
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    retrain_every: int = 1
    generalized_max_samples: int | None = 1500

    def resolved(self, mode: RFMode) -> dict:
        """JSON-serializable view with per-mode defaults filled in."""
        if self.scenario_policy:
            weights = "scenario"
        elif self.weights is not None:
            weights = list(self.weights.as_tuple())
        else:
            weights = list(default_weights(mode).as_tuple())
        return {
            "mode": mode.value,
            "weights": weights,
            "expansion": {"k": self.expansion.k, "c": self.expansion.c},
            "cutoffs": list(self.cutoffs),
            "decoder": {
                "c": self.decoder.c,
                "gamma": self.decoder.gamma,
                "standardize": self.decoder.standardize,
                "seed": self.decoder.seed,
            },
            "retrain_every": self.retrain_every,
            "generalized_max_samples": self.generalized_max_samples,
        }


@dataclass(eq=False)
class ReportRow:
    user_id: str
    session_id: str
    query_id: str
    h: int | None  # examined prefix for IRF rows; None for RRF rows
    n_candidates: int
    n_clicks: int
    n_bad_clicks: int
    decoder_scope: str
    weights: tuple[float, float, float]
    metrics: dict[str, float]

    def key(self) -> tuple:
        return (self.user_id, self.session_id, -1 if self.h is None else self.h)


@dataclass(eq=False)
class ExperimentReport:
    mode: str
    rows: list[ReportRow]
    aggregates: dict[str, float]
    seed: int
    config: dict
    fingerprint: str
    warnings: dict[str, int]

    def recompute_aggregates(self) -> dict[str, float]:
        if not self.rows:
            return {}
        names = list(self.rows[0].metrics)
        return {
            m: float(np.mean([r.metrics[m] for r in self.rows])) for m in names
        }

    def metric_by_key(self, metric: str) -> dict[tuple, float]:
        return {r.key(): r.metrics[metric] for r in self.rows}

    def to_tsv(self) -> str:
        names = list(self.rows[0].metrics) if self.rows else []
        header = [
            "user", "session", "query", "h", "n_candidates",
            "n_clicks", "n_bad_clicks", "decoder", "weights", *names,
        ]
        lines = ["\t".join(header)]
        for r in self.rows:
            lines.append(
                "\t".join(
                    [
                        r.user_id,
                        r.session_id,
                        r.query_id,
                        "" if r.h is None else str(r.h),
                        str(r.n_candidates),
                        str(r.n_clicks),
                        str(r.n_bad_clicks),
                        r.decoder_scope,
                        ",".join(repr(w) for w in r.weights),
                        *[repr(r.metrics[m]) for m in names],
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def summary_dict(self) -> dict:
        return {
            "mode": self.mode,
            "seed": self.seed,
            "config": self.config,
            "fingerprint": self.fingerprint,
            "rows": len(self.rows),
            "aggregates": self.aggregates,
            "warnings": self.warnings,
        }


def config_fingerprint(config: dict, seed: int) -> str:
    canonical = json.dumps({"config": config, "seed": seed}, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------- decoding


@dataclass(eq=False)
class DecodedScores:
    """Brain scores per (session, record position) plus decoder bookkeeping."""

    snippet: dict[tuple[str, int], float]
    landing: dict[tuple[str, int], float]
    scope: dict[str, str]            # session_id -> scope used for that session
    pool_size: dict[str, int]        # session_id -> personal samples available before it
    warnings: dict[str, int]


def _record_feature(record: ExaminedDoc, kind: str, post_ms: float, rate: float):
    """Flat DE feature for one stimulus, or None when a precomputed score exists."""
    score = getattr(record, f"{kind}_score")
    if score is not None:
        return None
    feature = getattr(record, f"{kind}_feature")
    if feature is not None:
        return flatten_features(feature)
    segment = getattr(record, f"{kind}_segment")
    if segment is not None:
        return flatten_features(extract_de(preprocess(segment, post_ms, rate)))
    raise ValidationError(
        f"record {record.doc_id!r} has no {kind} brain evidence "
        "(score, feature, or segment)"
    )


def _session_stimuli(session: Session, post_ms: float, rate: float):
    """(position, kind, feature-or-None, precomputed-score-or-None, label)."""
    out = []
    for pos, rec in enumerate(session.records):
        feat = _record_feature(rec, "snippet", post_ms, rate)
        out.append((pos, "snippet", feat, rec.snippet_score, binarize_grade(rec.snippet_grade)))
        if rec.clicked:
            feat = _record_feature(rec, "landing", post_ms, rate)
            out.append((pos, "landing", feat, rec.landing_score, binarize_grade(rec.landing_grade)))
    return out


def decode_bundle(
    bundle: DatasetBundle,
    config: DecoderConfig = DecoderConfig(),
    seed: int = 0,
    *,
    generalized_max_samples: int | None = 1500,
    retrain_every: int = 1,
    post_ms: float = 2000.0,
    target_rate_hz: float = 500.0,
) -> DecodedScores:
    """Produce brain scores for every stimulus under the split-by-timepoint protocol."""
    streams = bundle.sessions_by_user()
    users = sorted(streams)
    warnings = {"single_class_personal_pool": 0}

    # extract features once per stimulus; keyed by (session_id, position, kind)
    features: dict[tuple[str, int, str], np.ndarray | None] = {}
    labels: dict[tuple[str, int, str], int] = {}
    precomputed: dict[tuple[str, int, str], float] = {}
    per_session_stimuli: dict[str, list] = {}
    for user in users:
        for session in streams[user]:
            stims = _session_stimuli(session, post_ms, target_rate_hz)
            per_session_stimuli[session.session_id] = stims
            for pos, kind, feat, score, label in stims:
                key = (session.session_id, pos, kind)
                features[key] = feat
                labels[key] = label
                if score is not None:
                    precomputed[key] = float(score)

    def user_feature_pool(user: str):
        xs, ys = [], []
        for session in streams[user]:
            for pos, kind, feat, score, label in per_session_stimuli[session.session_id]:
                if feat is not None:
                    xs.append(feat)
                    ys.append(label)
        return xs, ys

    # generalized model per user: everyone else's feature data, subsampled
    generalized_cache: dict[str, object] = {}

    def generalized_for(user: str):
        if user in generalized_cache:
            return generalized_cache[user]
        xs, ys = [], []
        for other in users:
            if other == user:
                continue
            ox, oy = user_feature_pool(other)
            xs.extend(ox)
            ys.extend(oy)
        if not xs:
            raise TrainingError(
                f"no feature data from other users to train a generalized model for {user!r}"
            )
        x = np.vstack(xs)
        y = np.asarray(ys)
        cap = generalized_max_samples
        if cap is not None and x.shape[0] > cap:
            rng = np.random.default_rng(
                np.random.SeedSequence([seed, 1, users.index(user)])
            )
            keep = rng.choice(x.shape[0], size=cap, replace=False)
            keep.sort()
            x, y = x[keep], y[keep]
        model = train(x, y, config, scope=DecoderScope.GENERALIZED)
        generalized_cache[user] = model
        return model

    snippet_out: dict[tuple[str, int], float] = {}
    landing_out: dict[tuple[str, int], float] = {}
    scope_out: dict[str, str] = {}
    pool_out: dict[str, int] = {}

    for user in users:
        pool_x: list[np.ndarray] = []
        pool_y: list[int] = []
        personal_model = None
        sessions_since_train = 0
        for session in streams[user]:
            stims = per_session_stimuli[session.session_id]
            pool_out[session.session_id] = len(pool_x)
            needs_decode = any(feat is not None for _, _, feat, _, _ in stims)
            if not needs_decode:
                scope_out[session.session_id] = SCOPE_PRECOMPUTED
            else:
                scope = None
                if len(pool_x) >= PERSONALIZATION_THRESHOLD:
                    if len(set(pool_y)) < 2:
                        warnings["single_class_personal_pool"] += 1
                    else:
                        if personal_model is None or sessions_since_train >= retrain_every:
                            personal_model = train(
                                pool_x, pool_y, config, scope=DecoderScope.PERSONALIZED
                            )
                            sessions_since_train = 0
                        scope = personal_model
                if scope is None:
                    scope = generalized_for(user)
                scope_out[session.session_id] = scope.scope.value
                to_predict = [
                    (pos, kind, feat) for pos, kind, feat, score, _ in stims if feat is not None
                ]
                batch = np.vstack([f for _, _, f in to_predict])
                probs = scope.predict_proba(batch)
                for (pos, kind, _), p in zip(to_predict, probs):
                    if kind == "snippet":
                        snippet_out[(session.session_id, pos)] = float(p)
                    else:
                        landing_out[(session.session_id, pos)] = float(p)
            # precomputed scores pass straight through
            for pos, kind, feat, score, _ in stims:
                if feat is None:
                    if kind == "snippet":
                        snippet_out[(session.session_id, pos)] = precomputed[
                            (session.session_id, pos, kind)
                        ]
                    else:
                        landing_out[(session.session_id, pos)] = precomputed[
                            (session.session_id, pos, kind)
                        ]
            # accumulate this session's labeled features for later sessions
            for pos, kind, feat, score, label in stims:
                if feat is not None:
                    pool_x.append(feat)
                    pool_y.append(label)
            sessions_since_train += 1

    return DecodedScores(
        snippet=snippet_out,
        landing=landing_out,
        scope=scope_out,
        pool_size=pool_out,
        warnings=warnings,
    )


# ---------------------------------------------------------------- shared steps


def _examination_records(session: Session, decoded: DecodedScores, h: int):
    recs = []
    for pos in range(h):
        rec = session.records[pos]
        recs.append(
            ExaminationRecord(
                doc_id=rec.doc_id,
                clicked=rec.clicked,
                snippet_brain_score=decoded.snippet[(session.session_id, pos)],
                landing_brain_score=decoded.landing.get((session.session_id, pos)),
            )
        )
    return recs


def _row_metrics(
    ranked: RankedList,
    gains: Mapping[str, int],
    relevant: set,
    cutoffs: Sequence[int],
) -> dict[str, float]:
    metrics = {f"ndcg@{k}": ndcg_at_k(ranked, gains, k) for k in cutoffs}
    metrics["map"] = mean_average_precision(ranked, relevant)
    return metrics


def _sorted_sessions(bundle: DatasetBundle) -> list[Session]:
    streams = bundle.sessions_by_user()
    ordered = []
    for user in sorted(streams):
        ordered.extend(streams[user])
    return ordered


def _irf_weights(config: PipelineConfig, n_clicks: int) -> CombinationWeights:
    if config.scenario_policy:
        return scenario_weights(RFMode.IRF, n_clicks=n_clicks)
    return config.weights or default_weights(RFMode.IRF)


def _build_report(mode, rows, seed, resolved, warnings) -> ExperimentReport:
    report = ExperimentReport(
        mode=mode,
        rows=rows,
        aggregates={},
        seed=seed,
        config=resolved,
        fingerprint=config_fingerprint(resolved, seed),
        warnings=warnings,
    )
    report.aggregates = report.recompute_aggregates()
    return report


# ---------------------------------------------------------------- IRF


def run_irf(
    bundle: DatasetBundle,
    config: PipelineConfig = PipelineConfig(),
    seed: int = 0,
    decoded: DecodedScores | None = None,
    scorer=DEFAULT_SCORER,
) -> ExperimentReport:
    """One IRF metric row per (session, examined prefix h)."""
    bundle.validate()
    if decoded is None:
        decoded = decode_bundle(
            bundle,
            config.decoder,
            seed,
            generalized_max_samples=config.generalized_max_samples,
            retrain_every=config.retrain_every,
        )
    rows: list[ReportRow] = []
    warnings = {
        "empty_unseen_rows": 0,
        "missing_external_label_rows": 0,
        **decoded.warnings,
    }

    for session in _sorted_sessions(bundle):
        pseudo_map = bundle.pseudo_score_map(session, scorer)
        query_emb = np.asarray(bundle.queries[session.query_id])
        records_all = _examination_records(session, decoded, session.h_max)
        for h in range(1, session.h_max + 1):
            unseen_ids = (*session.examined_ids[h:], *session.unseen_ids)
            if not unseen_ids:
                warnings["empty_unseen_rows"] += 1
                continue
            labels = {
                d: bundle.documents[d].snippet_relevant_external for d in unseen_ids
            }
            if any(v is None for v in labels.values()):
                warnings["missing_external_label_rows"] += 1
                continue
            records = records_all[:h]
            n_clicks = sum(1 for r in records if r.clicked)
            weights = _irf_weights(config, n_clicks)
            r_bs = brain_scores_select(records, RFMode.IRF)
            r_c = click_scores(records)
            examined_ids = session.examined_ids[:h]
            r_p = ScoreVector(examined_ids, np.array([pseudo_map[d] for d in examined_ids]))
            combined = combine(r_bs, r_c, r_p, weights)
            unseen_docs = [bundle.documents[d] for d in unseen_ids]
            pseudo_unseen = ScoreVector(
                unseen_ids, np.array([pseudo_map[d] for d in unseen_ids])
            )
            r_it = rerank_unseen(
                query_emb,
                combined,
                {d: bundle.documents[d] for d in examined_ids},
                unseen_docs,
                scorer,
                config.expansion,
                query_scores=pseudo_unseen,
            )
            ranked = RankedList.from_scores(r_it)
            relevant = {d for d in unseen_ids if labels[d] == 1}
            metrics = _row_metrics(ranked, labels, relevant, config.cutoffs)
            rows.append(
                ReportRow(
                    user_id=session.user_id,
                    session_id=session.session_id,
                    query_id=session.query_id,
                    h=h,
                    n_candidates=len(unseen_ids),
                    n_clicks=n_clicks,
                    n_bad_clicks=sum(
                        1 for rec in session.records[:h] if rec.is_bad_click
                    ),
                    decoder_scope=decoded.scope[session.session_id],
                    weights=weights.as_tuple(),
                    metrics=metrics,
                )
            )

    if not rows and warnings["missing_external_label_rows"] > 0:
        raise ValidationError(
            "no IRF rows could be evaluated: unseen documents lack the "
            "third-party labels used as ground truth (snippet_relevant_external)"
        )
    resolved = config.resolved(RFMode.IRF)
    return _build_report("irf", rows, seed, resolved, warnings)


# ---------------------------------------------------------------- RRF


def run_rrf(
    bundle: DatasetBundle,
    config: PipelineConfig = PipelineConfig(),
    seed: int = 0,
    decoded: DecodedScores | None = None,
    scorer=DEFAULT_SCORER,
) -> ExperimentReport:
    """One RRF metric row per session, re-ranking the examined documents."""
    bundle.validate()
    if decoded is None:
        decoded = decode_bundle(
            bundle,
            config.decoder,
            seed,
            generalized_max_samples=config.generalized_max_samples,
            retrain_every=config.retrain_every,
        )
    rows: list[ReportRow] = []
    warnings = dict(decoded.warnings)

    for session in _sorted_sessions(bundle):
        pseudo_map = bundle.pseudo_score_map(session, scorer)
        records = _examination_records(session, decoded, session.h_max)
        if config.scenario_policy:
            weights = scenario_weights(RFMode.RRF, bad_click_flag=session.n_bad_clicks > 0)
        else:
            weights = config.weights or default_weights(RFMode.RRF)
        r_bs = brain_scores_select(records, RFMode.RRF)
        r_c = click_scores(records)
        ids = session.examined_ids
        r_p = ScoreVector(ids, np.array([pseudo_map[d] for d in ids]))
        combined = combine(r_bs, r_c, r_p, weights)
        ranked = RankedList.from_scores(combined)
        # ground truth: the landing grade judges a clicked doc, else the snippet grade
        truth = {
            rec.doc_id: (rec.landing_grade if rec.clicked else rec.snippet_grade)
            for rec in session.records
        }
        gains = {d: g - 1 for d, g in truth.items()}
        relevant = {d for d, g in truth.items() if g >= 2}
        metrics = _row_metrics(ranked, gains, relevant, config.cutoffs)
        rows.append(
            ReportRow(
                user_id=session.user_id,
                session_id=session.session_id,
                query_id=session.query_id,
                h=None,
                n_candidates=session.h_max,
                n_clicks=session.n_clicks,
                n_bad_clicks=session.n_bad_clicks,
                decoder_scope=decoded.scope[session.session_id],
                weights=weights.as_tuple(),
                metrics=metrics,
            )
        )

    resolved = config.resolved(RFMode.RRF)
    return _build_report("rrf", rows, seed, resolved, warnings)


# ---------------------------------------------------------------- adaptive IRF


def run_adaptive_irf(
    bundle: DatasetBundle,
    synthesis: SynthesisParams,
    config: PipelineConfig = PipelineConfig(),
    grid: Sequence[float] = WEIGHT_GRID,
    seed: int = 0,
    decoded: DecodedScores | None = None,
    scorer=DEFAULT_SCORER,
    q_m: int = 3,
) -> ExperimentReport:
    """IRF with per-(session, h) weights chosen by the adaptive grid search.

    Cluster assignments come from ingested document labels when present,
    otherwise seeded k-means with ``q_m`` clusters per session's documents.
    """
    bundle.validate()
    if decoded is None:
        decoded = decode_bundle(
            bundle,
            config.decoder,
            seed,
            generalized_max_samples=config.generalized_max_samples,
            retrain_every=config.retrain_every,
        )
    rows: list[ReportRow] = []
    warnings = {
        "empty_unseen_rows": 0,
        "missing_external_label_rows": 0,
        **decoded.warnings,
    }
    assignments: dict[str, ClusterAssignment] = {}
    users_sorted = sorted(bundle.sessions_by_user())

    for session in _sorted_sessions(bundle):
        pseudo_map = bundle.pseudo_score_map(session, scorer)
        query_emb = np.asarray(bundle.queries[session.query_id])
        records_all = _examination_records(session, decoded, session.h_max)
        session_docs = [
            bundle.documents[d] for d in (*session.examined_ids, *session.unseen_ids)
        ]
        if session.session_id not in assignments:
            assignments[session.session_id] = cluster_documents(
                session_docs, q_m=min(q_m, len(session_docs)), seed=seed
            )
        assignment = assignments[session.session_id]
        user_idx = users_sorted.index(session.user_id)

        for h in range(1, session.h_max + 1):
            unseen_ids = (*session.examined_ids[h:], *session.unseen_ids)
            if not unseen_ids:
                warnings["empty_unseen_rows"] += 1
                continue
            labels = {
                d: bundle.documents[d].snippet_relevant_external for d in unseen_ids
            }
            if any(v is None for v in labels.values()):
                warnings["missing_external_label_rows"] += 1
                continue
            records = records_all[:h]
            n_clicks = sum(1 for r in records if r.clicked)
            examined_ids = session.examined_ids[:h]
            examined_docs = tuple(bundle.documents[d] for d in examined_ids)
            unseen_docs = tuple(bundle.documents[d] for d in unseen_ids)
            scenario = Scenario(query_emb, examined_docs, unseen_docs, n_clicks)
            pseudo_examined = ScoreVector(
                examined_ids, np.array([pseudo_map[d] for d in examined_ids])
            )
            pseudo_unseen = ScoreVector(
                unseen_ids, np.array([pseudo_map[d] for d in unseen_ids])
            )
            row_seed = np.random.SeedSequence([seed, 2, user_idx, session.order, h])
            weights = adaptive_search(
                scenario,
                assignment,
                synthesis,
                grid=grid,
                seed=np.random.default_rng(row_seed),
                scorer=scorer,
                expansion=config.expansion,
                pseudo_examined=pseudo_examined,
                pseudo_unseen=pseudo_unseen,
            )
            r_bs = brain_scores_select(records, RFMode.IRF)
            r_c = click_scores(records)
            combined = combine(r_bs, r_c, pseudo_examined, weights)
            r_it = rerank_unseen(
                query_emb,
                combined,
                {d.doc_id: d for d in examined_docs},
                unseen_docs,
                scorer,
                config.expansion,
                query_scores=pseudo_unseen,
            )
            ranked = RankedList.from_scores(r_it)
            relevant = {d for d in unseen_ids if labels[d] == 1}
            metrics = _row_metrics(ranked, labels, relevant, config.cutoffs)
            rows.append(
                ReportRow(
                    user_id=session.user_id,
                    session_id=session.session_id,
                    query_id=session.query_id,
                    h=h,
                    n_candidates=len(unseen_ids),
                    n_clicks=n_clicks,
                    n_bad_clicks=sum(
                        1 for rec in session.records[:h] if rec.is_bad_click
                    ),
                    decoder_scope=decoded.scope[session.session_id],
                    weights=weights.as_tuple(),
                    metrics=metrics,
                )
            )

    resolved = config.resolved(RFMode.IRF)
    resolved["adaptive"] = {
        "grid": [float(g) for g in grid],
        "q_m": q_m,
        "synthesis": {
            "p_click_rel": synthesis.p_click_rel,
            "p_click_irrel": synthesis.p_click_irrel,
            "mu_rel": synthesis.mu_rel,
            "sigma_rel": synthesis.sigma_rel,
            "mu_irrel": synthesis.mu_irrel,
            "sigma_irrel": synthesis.sigma_irrel,
            "n_synth": synthesis.n_synth,
        },
    }
    resolved["weights"] = "adaptive"
    return _build_report("adaptive-irf", rows, seed, resolved, warnings)


# ---------------------------------------------------------------- comparison


@dataclass(frozen=True)
class PairedComparison:
    metric: str
    mean_a: float
    mean_b: float
    mean_diff: float  # a - b
    t_stat: float
    p_value: float
    n: int


def paired_metric_test(
    report_a: ExperimentReport,
    report_b: ExperimentReport,
    metric: str = "ndcg@10",
    keys: Iterable[tuple] | None = None,
) -> PairedComparison:
    """Two-sided paired t-test over per-row metric differences.

    Rows are aligned by (user, session, h); both reports must cover the same
    rows. ``keys`` optionally restricts the comparison to a row subset.
    """
    a = report_a.metric_by_key(metric)
    b = report_b.metric_by_key(metric)
    if set(a) != set(b):
        raise ValidationError("reports cover different row sets; cannot pair them")
    use = sorted(a if keys is None else set(keys))
    if keys is not None and (set(use) - set(a)):
        raise ValidationError("requested keys missing from the reports")
    if len(use) < 2:
        raise ValidationError("need at least two paired rows for a t-test")
    va = np.array([a[k] for k in use])
    vb = np.array([b[k] for k in use])
    if np.allclose(va, vb):
        t_stat, p_value = 0.0, 1.0
    else:
        t_stat, p_value = stats.ttest_rel(va, vb)
    return PairedComparison(
        metric=metric,
        mean_a=float(va.mean()),
        mean_b=float(vb.mean()),
        mean_diff=float((va - vb).mean()),
        t_stat=float(t_stat),
        p_value=float(p_value),
        n=len(use),
    )
