"""Scenario-adaptive combination-weight search.

For a search scenario (query, examined docs, unseen docs, click count), the
search assumes each intent cluster in turn to be the relevant one, synthesizes
plausible click and brain scores under that assumption, runs the full
combine -> expansion -> ranking path for every candidate weight triple on the
grid, scores the ranking against cluster-membership ground truth, and returns
the triple with the best average metric. Clusters are weighted uniformly; the
same synthesized draws are reused across all candidates (common random
numbers), which also makes the search reproducible bit-for-bit per seed.

Click synthesis is Bernoulli per document (p depends on assumed-cluster
membership) conditioned on the total equaling the scenario's click count:
rejection sampling with a bounded budget, then exact conditional sampling.
Brain synthesis is Normal per membership class, clamped to [0, 1].
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from sklearn.cluster import KMeans

from .combine import CombinationWeights, WEIGHT_GRID, combine
from .expansion import ExpansionConfig, rerank_unseen
from .signals import DEFAULT_SCORER
from .types import (
    Document,
    RankedList,
    ScoreVector,
    SynthesisError,
    ValidationError,
)

logger = logging.getLogger(__name__)

REJECTION_BUDGET = 100_000
_REJECTION_BATCH = 128
_ENUMERATION_MAX_H = 20


@dataclass(frozen=True)
class SynthesisParams:
    """Click rates and brain-score distributions per relevance class.

    Defaults are configurable placeholders; fit them to labeled data with
    ``estimate_synthesis_params`` when a cohort is available.
    """

    p_click_rel: float = 0.35
    p_click_irrel: float = 0.05
    mu_rel: float = 0.65
    sigma_rel: float = 0.15
    mu_irrel: float = 0.35
    sigma_irrel: float = 0.15
    n_synth: int = 20

    def __post_init__(self):
        for name in ("p_click_rel", "p_click_irrel"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must be in [0, 1], got {v}")
        if self.sigma_rel <= 0 or self.sigma_irrel <= 0:
            raise ValidationError("sigmas must be positive")
        if self.n_synth < 1:
            raise ValidationError("n_synth must be >= 1")
        if self.p_click_rel < self.p_click_irrel:
            logger.warning(
                "p_click_rel (%.3f) < p_click_irrel (%.3f): relevant docs "
                "clicked less often than irrelevant ones",
                self.p_click_rel,
                self.p_click_irrel,
            )


@dataclass(eq=False)
class ClusterAssignment:
    """doc id -> intent cluster index in {0..q_m-1}."""

    labels: dict[str, int]
    q_m: int

    def __post_init__(self):
        if self.q_m < 1:
            raise ValidationError("q_m must be >= 1")
        bad = {d: c for d, c in self.labels.items() if not 0 <= int(c) < self.q_m}
        if bad:
            raise ValidationError(f"cluster labels out of range [0, {self.q_m}): {bad}")
        self.labels = {d: int(c) for d, c in self.labels.items()}

    def membership(self, doc_ids: Sequence[str], cluster: int) -> np.ndarray:
        try:
            return np.array([self.labels[d] == cluster for d in doc_ids], dtype=bool)
        except KeyError as exc:
            raise ValidationError(f"doc {exc.args[0]!r} has no cluster assignment") from exc


@dataclass(eq=False)
class Scenario:
    """One search state: what was examined, what remains, how many clicks."""

    query_embedding: np.ndarray
    examined: tuple[Document, ...]
    unseen: tuple[Document, ...]
    n_clicks: int

    def __post_init__(self):
        self.examined = tuple(self.examined)
        self.unseen = tuple(self.unseen)
        ex_ids = {d.doc_id for d in self.examined}
        un_ids = {d.doc_id for d in self.unseen}
        if ex_ids & un_ids:
            raise ValidationError(f"examined/unseen overlap: {sorted(ex_ids & un_ids)[:5]}")
        if not 0 <= self.n_clicks <= len(self.examined):
            raise ValidationError(
                f"n_clicks {self.n_clicks} outside [0, {len(self.examined)}]"
            )

    @property
    def examined_ids(self) -> tuple[str, ...]:
        return tuple(d.doc_id for d in self.examined)

    @property
    def unseen_ids(self) -> tuple[str, ...]:
        return tuple(d.doc_id for d in self.unseen)


def cluster_documents(
    docs: Sequence[Document], q_m: int, seed: int = 0
) -> ClusterAssignment:
    """Cluster a query's documents into intents.

    Documents that all carry ingested cluster labels are passed through
    unchanged (q_m taken from the labels). Otherwise k-means on the
    embeddings with seeded initialization.
    """
    if not docs:
        raise ValidationError("cannot cluster an empty document list")
    if all(d.cluster is not None for d in docs):
        labels = {d.doc_id: d.cluster for d in docs}
        return ClusterAssignment(labels, max(labels.values()) + 1)
    if not 1 <= q_m <= len(docs):
        raise ValidationError(f"q_m must be in [1, {len(docs)}], got {q_m}")
    embs = np.vstack([d.embedding for d in docs])
    km = KMeans(n_clusters=q_m, n_init=10, random_state=seed)
    fitted = km.fit_predict(embs)
    if len(set(fitted.tolist())) != q_m:
        raise SynthesisError(f"k-means produced an empty cluster for q_m={q_m}")
    return ClusterAssignment({d.doc_id: int(c) for d, c in zip(docs, fitted)}, q_m)


# ------------------------------------------------------------ click synthesis


def _conditional_tail_table(p: np.ndarray, n_h: int) -> np.ndarray:
    """T[i, m] = P(sum of Bernoulli(p_i..p_{h-1}) == m), for m in 0..n_h."""
    h = p.size
    table = np.zeros((h + 1, n_h + 1))
    table[h, 0] = 1.0
    for i in range(h - 1, -1, -1):
        table[i, 0] = (1.0 - p[i]) * table[i + 1, 0]
        for m in range(1, n_h + 1):
            table[i, m] = p[i] * table[i + 1, m - 1] + (1.0 - p[i]) * table[i + 1, m]
    return table


def _exact_conditional_sample(p: np.ndarray, n_h: int, rng: np.random.Generator) -> np.ndarray:
    """Sample the Bernoulli vector conditioned on its sum, without rejection.

    Enumerates subsets when h is small; otherwise draws sequentially using the
    tail-probability table.
    """
    h = p.size
    if h <= _ENUMERATION_MAX_H:
        subsets = list(itertools.combinations(range(h), n_h))
        weights = np.empty(len(subsets))
        for s_idx, subset in enumerate(subsets):
            chosen = np.zeros(h, dtype=bool)
            chosen[list(subset)] = True
            weights[s_idx] = np.prod(np.where(chosen, p, 1.0 - p))
        total = weights.sum()
        if total <= 0.0:
            raise SynthesisError(
                f"click constraint sum={n_h} has zero probability for the given rates"
            )
        pick = rng.choice(len(subsets), p=weights / total)
        out = np.zeros(h)
        out[list(subsets[pick])] = 1.0
        return out

    table = _conditional_tail_table(p, n_h)
    if table[0, n_h] <= 0.0:
        raise SynthesisError(
            f"click constraint sum={n_h} has zero probability for the given rates"
        )
    out = np.zeros(h)
    remaining = n_h
    for i in range(h):
        if remaining == 0:
            break
        p_one = p[i] * table[i + 1, remaining - 1] / table[i, remaining]
        if rng.random() < p_one:
            out[i] = 1.0
            remaining -= 1
    return out


def _synth_clicks_array(
    membership: np.ndarray, n_h: int, params: SynthesisParams, rng: np.random.Generator
) -> np.ndarray:
    h = membership.size
    if not 0 <= n_h <= h:
        raise ValidationError(f"n_h {n_h} outside [0, {h}]")
    p = np.where(membership, params.p_click_rel, params.p_click_irrel)
    # quick feasibility: enough docs able to click / able to abstain
    if n_h > int((p > 0.0).sum()) or (h - n_h) > int((p < 1.0).sum()):
        raise SynthesisError(
            f"click constraint sum={n_h} has zero probability for the given rates"
        )
    attempts = 0
    while attempts < REJECTION_BUDGET:
        batch = min(_REJECTION_BATCH, REJECTION_BUDGET - attempts)
        draws = (rng.random((batch, h)) < p).astype(np.float64)
        hits = np.nonzero(draws.sum(axis=1) == n_h)[0]
        if hits.size:
            return draws[hits[0]]
        attempts += batch
    logger.warning(
        "click rejection budget exhausted (h=%d, n_h=%d); using exact conditional sampling",
        h,
        n_h,
    )
    return _exact_conditional_sample(p, n_h, rng)


def synth_clicks(
    scenario: Scenario,
    assignment: ClusterAssignment,
    assumed_cluster: int,
    params: SynthesisParams,
    seed: int | np.random.Generator = 0,
) -> ScoreVector:
    """Synthetic binary click vector over the examined docs, summing to n_clicks."""
    rng = np.random.default_rng(seed)
    membership = assignment.membership(scenario.examined_ids, assumed_cluster)
    values = _synth_clicks_array(membership, scenario.n_clicks, params, rng)
    return ScoreVector(scenario.examined_ids, values)


def _synth_brain_array(
    membership: np.ndarray, params: SynthesisParams, rng: np.random.Generator
) -> np.ndarray:
    mu = np.where(membership, params.mu_rel, params.mu_irrel)
    sigma = np.where(membership, params.sigma_rel, params.sigma_irrel)
    return np.clip(rng.normal(mu, sigma), 0.0, 1.0)


def synth_brain(
    scenario: Scenario,
    assignment: ClusterAssignment,
    assumed_cluster: int,
    params: SynthesisParams,
    seed: int | np.random.Generator = 0,
) -> ScoreVector:
    """Synthetic brain scores over the examined docs, clamped to [0, 1]."""
    rng = np.random.default_rng(seed)
    membership = assignment.membership(scenario.examined_ids, assumed_cluster)
    return ScoreVector(scenario.examined_ids, _synth_brain_array(membership, params, rng))


def cluster_ground_truth(
    unseen_ids: Sequence[str], assignment: ClusterAssignment, assumed_cluster: int
) -> dict[str, int]:
    """Binary relevance: 1 iff the doc belongs to the assumed cluster."""
    member = assignment.membership(tuple(unseen_ids), assumed_cluster)
    return {d: int(m) for d, m in zip(unseen_ids, member)}


# ------------------------------------------------------------ weight search


@dataclass(eq=False)
class DrawTable:
    """Synthesized draws shared by every candidate: shape (q_m, n_synth, h)."""

    clicks: np.ndarray
    brains: np.ndarray


def synthesize_draw_table(
    scenario: Scenario,
    assignment: ClusterAssignment,
    params: SynthesisParams,
    seed: int | np.random.Generator = 0,
) -> DrawTable:
    """Generate the common-random-number draws, cluster-major then draw-major."""
    rng = np.random.default_rng(seed)
    h = len(scenario.examined)
    clicks = np.empty((assignment.q_m, params.n_synth, h))
    brains = np.empty((assignment.q_m, params.n_synth, h))
    for j in range(assignment.q_m):
        membership = assignment.membership(scenario.examined_ids, j)
        for t in range(params.n_synth):
            clicks[j, t] = _synth_clicks_array(membership, scenario.n_clicks, params, rng)
            brains[j, t] = _synth_brain_array(membership, params, rng)
    return DrawTable(clicks=clicks, brains=brains)


def grid_candidates(grid: Sequence[float] = WEIGHT_GRID) -> list[tuple[float, float, float]]:
    """All weight triples over the grid except all-zero, in lexicographic order."""
    values = sorted(set(float(g) for g in grid))
    if not values:
        raise ValidationError("weight grid must be non-empty")
    if any(v < 0 for v in values):
        raise ValidationError("weight grid values must be >= 0")
    cands = [t for t in itertools.product(values, repeat=3) if any(v != 0.0 for v in t)]
    if not cands:
        raise ValidationError("weight grid has no non-zero triple")
    return cands


def _binary_ndcg_rows(r_it: np.ndarray, truth: np.ndarray, cutoff: int) -> np.ndarray:
    """NDCG@cutoff with binary gains for each row of scores; all-zero truth -> 1.0.

    Matches metrics.ndcg_at_k exactly for binary grades (stable descending
    order, per-term division by log2(rank + 1)).
    """
    n_u = r_it.shape[-1]
    depth = min(cutoff, n_u)
    order = np.argsort(-r_it, axis=-1, kind="stable")[..., :depth]
    gains = truth[order]
    discounts = np.log2(np.arange(depth, dtype=np.float64) + 2.0)
    dcg = (gains / discounts).sum(axis=-1)
    ideal = np.sort(truth)[::-1][:depth]
    idcg = float((ideal / discounts).sum())
    if idcg == 0.0:
        return np.ones(r_it.shape[:-1])
    return dcg / idcg


MetricFn = Callable[[RankedList, Mapping[str, int]], float]


def adaptive_search(
    scenario: Scenario,
    assignment: ClusterAssignment,
    params: SynthesisParams,
    grid: Sequence[float] = WEIGHT_GRID,
    seed: int | np.random.Generator = 0,
    *,
    scorer=DEFAULT_SCORER,
    expansion: ExpansionConfig = ExpansionConfig(),
    metric_cutoff: int = 10,
    metric: MetricFn | None = None,
    pseudo_examined: ScoreVector | None = None,
    pseudo_unseen: ScoreVector | None = None,
    draws: DrawTable | None = None,
) -> CombinationWeights:
    """Exhaustive grid search for the best scenario-specific weight triple.

    The pseudo channel is the real one (from ``scorer`` or the precomputed
    vectors); clicks and brain scores are synthesized per assumed cluster.
    Ties on the average metric go to the lexicographically smallest triple.
    With ``metric=None`` the ranking is scored with binary NDCG@``metric_cutoff``
    on a vectorized path; a custom metric is honored on a per-candidate path.
    """
    if not scenario.unseen:
        raise ValidationError("adaptive search needs a non-empty unseen pool")
    if not scenario.examined:
        raise ValidationError("adaptive search needs examined documents")

    candidates = grid_candidates(grid)
    if draws is None:
        draws = synthesize_draw_table(scenario, assignment, params, seed)

    if pseudo_examined is None:
        pseudo_examined = ScoreVector(
            scenario.examined_ids,
            scorer.matrix(
                np.asarray(scenario.query_embedding)[None, :],
                np.vstack([d.embedding for d in scenario.examined]),
            )[0],
        )
    if pseudo_unseen is None:
        pseudo_unseen = ScoreVector(
            scenario.unseen_ids,
            scorer.matrix(
                np.asarray(scenario.query_embedding)[None, :],
                np.vstack([d.embedding for d in scenario.unseen]),
            )[0],
        )

    if metric is None:
        averages = _search_vectorized(
            scenario, assignment, candidates, draws,
            pseudo_examined, pseudo_unseen, scorer, expansion, metric_cutoff,
        )
    else:
        averages = _search_generic(
            scenario, assignment, candidates, draws,
            pseudo_examined, pseudo_unseen, scorer, expansion, metric,
        )
    best = int(np.argmax(averages))  # first max = lexicographically smallest
    return CombinationWeights(*candidates[best])


def _search_vectorized(
    scenario, assignment, candidates, draws,
    pseudo_examined, pseudo_unseen, scorer, expansion, cutoff,
) -> np.ndarray:
    theta = np.asarray(candidates)  # (n_cand, 3)
    r_p = pseudo_examined.scores
    q_sim = pseudo_unseen.scores
    sims = scorer.matrix(
        np.vstack([d.embedding for d in scenario.examined]),
        np.vstack([d.embedding for d in scenario.unseen]),
    )  # (h, n_u)
    h = len(scenario.examined)
    kk = min(expansion.k, h)
    t_bs = theta[None, :, 0, None]
    t_c = theta[None, :, 1, None]
    t_p = theta[None, :, 2, None]

    totals = np.zeros(len(candidates))
    for j in range(assignment.q_m):
        truth = np.array(
            [cluster_ground_truth(scenario.unseen_ids, assignment, j)[d] for d in scenario.unseen_ids],
            dtype=np.float64,
        )
        brains = draws.brains[j][:, None, :]   # (T, 1, h)
        clicks = draws.clicks[j][:, None, :]
        combined = t_bs * brains + t_c * clicks + t_p * r_p[None, None, :]  # (T, n_cand, h)
        order = np.argsort(-combined, axis=-1, kind="stable")[..., :kk]
        sel_scores = np.take_along_axis(combined, order, axis=-1)
        w = np.exp(sel_scores - sel_scores.max(axis=-1, keepdims=True))
        w /= w.sum(axis=-1, keepdims=True)
        sel_sims = sims[order]  # (T, n_cand, kk, n_u)
        r_f = np.einsum("tck,tckn->tcn", w, sel_sims, optimize=False)
        r_it = expansion.c * r_f + (1.0 - expansion.c) * q_sim[None, None, :]
        ndcg = _binary_ndcg_rows(r_it, truth, cutoff)  # (T, n_cand)
        totals += ndcg.sum(axis=0)
    return totals / (assignment.q_m * draws.clicks.shape[1])


def _search_generic(
    scenario, assignment, candidates, draws,
    pseudo_examined, pseudo_unseen, scorer, expansion, metric,
) -> np.ndarray:
    docs_by_id = {d.doc_id: d for d in scenario.examined}
    n_draws = draws.clicks.shape[1]
    averages = np.zeros(len(candidates))
    for ci, cand in enumerate(candidates):
        weights = CombinationWeights(*cand)
        total = 0.0
        for j in range(assignment.q_m):
            truth = cluster_ground_truth(scenario.unseen_ids, assignment, j)
            for t in range(n_draws):
                r_bs = ScoreVector(scenario.examined_ids, draws.brains[j, t])
                r_c = ScoreVector(scenario.examined_ids, draws.clicks[j, t])
                combined = combine(r_bs, r_c, pseudo_examined, weights)
                r_it = rerank_unseen(
                    scenario.query_embedding, combined, docs_by_id,
                    scenario.unseen, scorer, expansion, query_scores=pseudo_unseen,
                )
                total += metric(RankedList.from_scores(r_it), truth)
        averages[ci] = total / (assignment.q_m * n_draws)
    return averages


# ------------------------------------------------------------ fitting


def estimate_synthesis_params(
    samples: Sequence[tuple[bool, bool, float]],
    n_synth: int = 20,
    min_sigma: float = 1e-3,
) -> SynthesisParams:
    """Fit per-class click frequency and brain-score mean/std from labeled data.

    ``samples``: (relevant, clicked, brain_score) per examined document.
    """
    rel = [(c, b) for r, c, b in samples if r]
    irr = [(c, b) for r, c, b in samples if not r]
    if not rel or not irr:
        raise ValidationError("need labeled samples of both classes to fit parameters")
    rel_clicks = np.array([c for c, _ in rel], dtype=float)
    irr_clicks = np.array([c for c, _ in irr], dtype=float)
    rel_scores = np.array([b for _, b in rel], dtype=float)
    irr_scores = np.array([b for _, b in irr], dtype=float)
    return SynthesisParams(
        p_click_rel=float(rel_clicks.mean()),
        p_click_irrel=float(irr_clicks.mean()),
        mu_rel=float(rel_scores.mean()),
        sigma_rel=max(float(rel_scores.std()), min_sigma),
        mu_irrel=float(irr_scores.mean()),
        sigma_irrel=max(float(irr_scores.std()), min_sigma),
        n_synth=n_synth,
    )
