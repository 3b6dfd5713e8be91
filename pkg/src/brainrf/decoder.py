"""Brain decoding: binary relevance classifier over DE features.

The classifier is an RBF-kernel max-margin model (SMO-trained) with
Platt-calibrated probability output, operating on per-dimension standardized
features; the standardization statistics live in the trained model. One shared
model scores both snippet and landing-page responses.

The Platt sigmoid is fit by Newton's method on the training decision values
rather than through cross-validated ensembling: a single sigmoid is strictly
monotone in the decision value, so calibration can never reorder predictions
(CV-ensembled calibration does reorder them on small training sets), and
training stays deterministic without refits.

The generalized model (trained on other users' data) hands over to a
personalized one once the user has accumulated PERSONALIZATION_THRESHOLD
labeled samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from sklearn.svm import SVC

from .eeg import flatten_features
from .types import NotTrainedError, TrainingError, ValidationError, validate_grade

PERSONALIZATION_THRESHOLD = 100


class DecoderScope(Enum):
    GENERALIZED = "generalized"
    PERSONALIZED = "personalized"


def binarize_grade(grade: int) -> int:
    """1 -> 0 (irrelevant); 2, 3, 4 -> 1 (relevant)."""
    validate_grade(grade)
    return 0 if grade == 1 else 1


@dataclass(frozen=True)
class DecoderConfig:
    c: float = 1.0
    gamma: str | float = "scale"  # 1 / (d * var) on the standardized features
    standardize: bool = True
    seed: int = 0  # training itself is deterministic; recorded in run fingerprints


def _platt_fit(decision: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    """Newton fit of P(relevant | f) = 1 / (1 + exp(a*f + b)) on decision values."""
    prior1 = float(labels.sum())
    prior0 = float(len(labels) - prior1)
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(labels == 1, hi, lo)
    a, b = 0.0, math.log((prior0 + 1.0) / (prior1 + 1.0))

    def nll(a_, b_):
        f = decision * a_ + b_
        return float(
            np.sum(np.where(f >= 0, t * f + np.log1p(np.exp(-f)),
                            (t - 1.0) * f + np.log1p(np.exp(f))))
        )

    fval = nll(a, b)
    sigma = 1e-12  # keeps the Hessian strictly positive definite
    for _ in range(100):
        f = decision * a + b
        p = np.where(f >= 0, np.exp(-f) / (1.0 + np.exp(-f)), 1.0 / (1.0 + np.exp(f)))
        d2 = p * (1.0 - p)
        h11 = sigma + float(np.sum(decision * decision * d2))
        h22 = sigma + float(np.sum(d2))
        h21 = float(np.sum(decision * d2))
        d1 = t - p
        g1 = float(np.sum(decision * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= 1e-10:
            na, nb = a + step * da, b + step * db
            nf = nll(na, nb)
            if nf < fval + 1e-4 * step * gd:
                a, b, fval = na, nb, nf
                break
            step /= 2.0
        else:
            break
    return a, b


@dataclass(eq=False)
class DecoderModel:
    """Trained classifier state: immutable once built, safe to share."""

    scope: DecoderScope
    trained_sample_count: int
    _svc: SVC
    _mean: np.ndarray
    _std: np.ndarray
    _platt_a: float
    _platt_b: float

    def _transform(self, features: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if x.shape[1] != self._mean.shape[0]:
            raise ValidationError(
                f"feature dimension {x.shape[1]} does not match trained {self._mean.shape[0]}"
            )
        return (x - self._mean) / self._std

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        """Calibrated P(relevant) for a batch of flat feature vectors."""
        if self.trained_sample_count <= 0:
            raise NotTrainedError("decoder has no trained samples")
        decision = self._svc.decision_function(self._transform(features))
        f = decision * self._platt_a + self._platt_b
        return np.where(f >= 0, np.exp(-f) / (1.0 + np.exp(-f)), 1.0 / (1.0 + np.exp(f)))


def _stack_features(features) -> np.ndarray:
    rows = [flatten_features(f) for f in features]
    if not rows:
        raise TrainingError("empty training set")
    dims = {r.shape[0] for r in rows}
    if len(dims) != 1:
        raise ValidationError(f"inconsistent feature dimensions: {sorted(dims)}")
    return np.vstack(rows)


def train(
    features,
    labels,
    config: DecoderConfig = DecoderConfig(),
    scope: DecoderScope = DecoderScope.PERSONALIZED,
) -> DecoderModel:
    """Fit the decoder on flat or (channels, bands) feature vectors.

    Deterministic given the config seed. Raises TrainingError when only one
    class is present.
    """
    x = _stack_features(features)
    y = np.asarray(labels)
    if y.shape != (x.shape[0],):
        raise ValidationError("labels must align one-to-one with features")
    if not np.isin(y, (0, 1)).all():
        raise ValidationError("labels must be binary 0/1")
    classes = np.unique(y)
    if classes.size < 2:
        raise TrainingError(f"training set has a single class: {classes.tolist()}")

    if config.standardize:
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        std[std < 1e-12] = 1.0
    else:
        mean = np.zeros(x.shape[1])
        std = np.ones(x.shape[1])

    svc = SVC(kernel="rbf", C=config.c, gamma=config.gamma)
    standardized = (x - mean) / std
    y_int = y.astype(int)
    svc.fit(standardized, y_int)
    # classes_ is (0, 1), so positive decision values point at the relevant class
    platt_a, platt_b = _platt_fit(svc.decision_function(standardized), y_int)
    return DecoderModel(
        scope=scope,
        trained_sample_count=x.shape[0],
        _svc=svc,
        _mean=mean,
        _std=std,
        _platt_a=platt_a,
        _platt_b=platt_b,
    )


def predict(model: DecoderModel, feature) -> float:
    """Calibrated probability of the relevant class for one feature vector."""
    return float(model.predict_proba(flatten_features(feature)[None, :])[0])


def select_model(
    generalized: DecoderModel,
    personalized: DecoderModel | None,
    personal_sample_count: int,
) -> DecoderModel:
    """Use the personalized model once the user has >= 100 labeled samples."""
    if generalized is None or generalized.trained_sample_count <= 0:
        raise NotTrainedError("generalized model must be trained")
    if personalized is not None and personal_sample_count >= PERSONALIZATION_THRESHOLD:
        return personalized
    return generalized
