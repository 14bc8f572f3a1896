"""Estimator-style wrapper around the from-scratch network.

CompoundMlpClassifier follows the fit/predict/predict_proba protocol so
it composes with pipelines and clone(); the math itself lives in
network.py. Targets may be given as category ids (1..17) or as
probability rows, which is how disagreement 0.5/0.5 targets enter.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .network import TrainConfig, forward_batch, init_model, predict_topk, train
from .taxonomy import CATEGORY_COUNT

__all__ = ["CompoundMlpClassifier", "validate_features", "validate_targets"]


def validate_features(X, expected_dim: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"features must be a 2d array, got ndim {X.ndim}")
    if X.shape[0] == 0:
        raise ValueError("features are empty")
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain non-finite values")
    if expected_dim is not None and X.shape[1] != expected_dim:
        raise ValueError(f"expected {expected_dim} features, got {X.shape[1]}")
    return X


def validate_targets(y, n_rows: int) -> np.ndarray:
    """Normalize targets to (n, 17) probability rows.

    1d input is read as category ids in 1..17 and one-hot encoded; 2d
    input must already be rows of non-negative values summing to 1.
    """
    y = np.asarray(y)
    if y.ndim == 1:
        if len(y) != n_rows:
            raise ValueError(f"got {len(y)} labels for {n_rows} rows")
        ids = y.astype(np.int64)
        if np.any(ids < 1) or np.any(ids > CATEGORY_COUNT):
            raise ValueError(f"category ids must be in 1..{CATEGORY_COUNT}")
        out = np.zeros((n_rows, CATEGORY_COUNT))
        out[np.arange(n_rows), ids - 1] = 1.0
        return out
    if y.ndim == 2:
        if y.shape != (n_rows, CATEGORY_COUNT):
            raise ValueError(f"target shape {y.shape}, expected ({n_rows}, {CATEGORY_COUNT})")
        y = y.astype(np.float64)
        if np.any(y < 0):
            raise ValueError("target rows must be non-negative")
        sums = y.sum(axis=1)
        if not np.allclose(sums, 1.0, atol=1e-9):
            raise ValueError("target rows must each sum to 1")
        return y
    raise ValueError(f"targets must be 1d ids or 2d probability rows, got ndim {y.ndim}")


class CompoundMlpClassifier(BaseEstimator):
    """2-layer MLP over compound feature vectors with soft-label training."""

    def __init__(
        self,
        hidden_size: int = 256,
        learning_rate: float = 0.01,
        epochs: int = 100,
        batch_size: int = 32,
        seed: int = 0,
    ):
        self.hidden_size = hidden_size
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed

    def fit(self, X, y) -> "CompoundMlpClassifier":
        X = validate_features(X)
        targets = validate_targets(y, X.shape[0])
        config = TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed,
        )
        initial = init_model(X.shape[1], self.hidden_size, self.seed)
        data = [(X[i], targets[i]) for i in range(X.shape[0])]
        self.model_, self.loss_history_ = train(initial, data, config)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.arange(1, CATEGORY_COUNT + 1)
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "model_"):
            raise NotFittedError(
                "This CompoundMlpClassifier instance is not fitted yet; call fit first."
            )

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        X = validate_features(X, expected_dim=self.n_features_in_)
        return forward_batch(self.model_, X)

    def predict(self, X) -> np.ndarray:
        probs = self.predict_proba(X)
        # stable argsort: ties resolve to the lower category id
        return np.argsort(-probs, axis=1, kind="stable")[:, 0] + 1

    def predict_topk(self, X, k: int) -> np.ndarray:
        self._check_fitted()
        X = validate_features(X, expected_dim=self.n_features_in_)
        return np.array([predict_topk(self.model_, X[i], k) for i in range(X.shape[0])])
