"""Linear fusion of the brain, click, and pseudo channels.

combined_i = theta_bs * r_bs_i + theta_c * r_c_i + theta_p * r_p_i

Combined scores are NOT renormalized: the expansion softmax downstream
consumes raw combined values, and softmax is not scale-invariant, so
renormalizing would silently change the feedback weights. For the same
reason the IRF triple is stored as the grid value (0.6, 0.2, 0.2) rather
than any other scaling of the 3:1:1 ratio; RRF re-ranks by the combined
score directly, so only its ratio matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import RFMode, ScoreVector, ValidationError

WEIGHT_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


@dataclass(frozen=True)
class CombinationWeights:
    """Channel weights (brain, click, pseudo); non-negative, not all zero."""

    theta_bs: float
    theta_c: float
    theta_p: float

    def __post_init__(self):
        values = (self.theta_bs, self.theta_c, self.theta_p)
        if any(not np.isfinite(v) or v < 0 for v in values):
            raise ValidationError(f"weights must be finite and >= 0, got {values}")
        if all(v == 0 for v in values):
            raise ValidationError("at least one combination weight must be non-zero")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.theta_bs, self.theta_c, self.theta_p)


def combine(
    r_bs: ScoreVector,
    r_c: ScoreVector,
    r_p: ScoreVector,
    weights: CombinationWeights,
) -> ScoreVector:
    """Weighted sum of the three channels; output is unbounded above 1."""
    if not (r_bs.doc_ids == r_c.doc_ids == r_p.doc_ids):
        raise ValidationError("combine requires identical doc ids and order across channels")
    for name, sv in (("brain", r_bs), ("click", r_c), ("pseudo", r_p)):
        sv.require_unmasked(f"{name} channel")
    scores = (
        weights.theta_bs * r_bs.scores
        + weights.theta_c * r_c.scores
        + weights.theta_p * r_p.scores
    )
    return ScoreVector(r_bs.doc_ids, scores, bounded=False)


def default_weights(mode: RFMode, theta_p: float | None = None) -> CombinationWeights:
    """The fixed per-mode triples: IRF 3:1:1 -> (0.6, 0.2, 0.2); RRF 5:2:0 -> (1.0, 0.4, 0.0).

    ``theta_p`` overrides the pseudo component (e.g. the RRF pseudo weight is
    worth exploring in the 0-0.2 range).
    """
    if mode is RFMode.IRF:
        base = CombinationWeights(0.6, 0.2, 0.2)
    elif mode is RFMode.RRF:
        base = CombinationWeights(1.0, 0.4, 0.0)
    else:
        raise ValidationError(f"unknown RF mode: {mode!r}")
    if theta_p is None:
        return base
    return CombinationWeights(base.theta_bs, base.theta_c, theta_p)


def scenario_weights(
    mode: RFMode,
    n_clicks: int | None = None,
    bad_click_flag: bool = False,
) -> CombinationWeights:
    """Scenario-dependent reweighting that leans harder on the brain channel.

    IRF with zero clicks so far -> 5:1:1 as (1.0, 0.2, 0.2): with no click
    evidence, the brain channel is the only per-document user signal.
    RRF when a bad click is known to have happened -> 5:1:0 as (1.0, 0.2, 0.0).
    Anything else falls back to the mode default. The bad-click flag is an
    input, not detected here.
    """
    if mode is RFMode.IRF and n_clicks == 0:
        return CombinationWeights(1.0, 0.2, 0.2)
    if mode is RFMode.RRF and bad_click_flag:
        return CombinationWeights(1.0, 0.2, 0.0)
    return default_weights(mode)
