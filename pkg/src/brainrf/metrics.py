"""Ranking and classification quality metrics.

All three metrics depend only on the ordering (NDCG, MAP) or on pairwise
score comparisons (AUC), so they are invariant under strictly monotone
transforms of the underlying scores.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence, Set

import numpy as np
from scipy.stats import rankdata

from .types import RankedList, UndefinedMetricError, ValidationError, ranked_ids


def ndcg_at_k(
    ranked: RankedList | Sequence[str], grades: Mapping[str, int], k: int
) -> float:
    """NDCG@k with exponential gain 2^g - 1 and discount log2(rank + 1).

    ``grades`` maps every ranked doc id to an integer gain grade >= 0.
    A list whose gains are all zero scores 1.0: no ordering of it can be
    wrong, and the convention keeps averages well-defined.
    """
    ids = ranked_ids(ranked)
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    missing = [d for d in ids if d not in grades]
    if missing:
        raise ValidationError(f"missing grades for ranked documents: {missing[:5]}")
    gains = []
    for d in ids:
        g = int(grades[d])
        if g < 0:
            raise ValidationError(f"gain grade for {d!r} must be >= 0, got {g}")
        gains.append(2.0**g - 1.0)
    depth = min(k, len(gains))
    dcg = sum(gains[i] / math.log2(i + 2) for i in range(depth))
    ideal = sorted(gains, reverse=True)
    idcg = sum(ideal[i] / math.log2(i + 2) for i in range(depth))
    if idcg == 0.0:
        return 1.0
    return dcg / idcg


def mean_average_precision(
    ranked: RankedList | Sequence[str], relevant: Set[str]
) -> float:
    """Mean over relevant docs of precision at their ranks; 0.0 if none relevant."""
    ids = ranked_ids(ranked)
    if not relevant:
        return 0.0
    unknown = set(relevant) - set(ids)
    if unknown:
        raise ValidationError(
            f"relevant ids not present in the ranking: {sorted(unknown)[:5]}"
        )
    hits = 0
    total = 0.0
    for rank, d in enumerate(ids, start=1):
        if d in relevant:
            hits += 1
            total += hits / rank
    return total / len(relevant)


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Probability a random positive outscores a random negative; ties count 0.5."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise ValidationError("scores and labels must be 1-d and the same length")
    if not np.all(np.isfinite(s)):
        raise ValidationError("scores must be finite")
    if not np.isin(y, (0, 1)).all():
        raise ValidationError("labels must be binary 0/1")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs at least one positive and one negative label")
    ranks = rankdata(s, method="average")
    return float((ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))
