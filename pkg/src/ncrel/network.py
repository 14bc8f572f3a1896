"""From-scratch 2-layer MLP: relu hidden layer, softmax output, SGD.

All math is plain numpy in double precision. The model maps a compound
feature vector to a probability distribution over the 17 categories and
trains against probability-vector targets with cross-entropy. Nothing
here depends on an ML framework; gradients are derived by hand and
checked against finite differences in the tests.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .taxonomy import CATEGORY_COUNT

__all__ = [
    "MlpModel",
    "TrainConfig",
    "Gradients",
    "TrainingDivergedError",
    "relu",
    "softmax",
    "init_model",
    "forward",
    "forward_batch",
    "loss",
    "backward",
    "backward_batch",
    "train",
    "predict_topk",
    "save_checkpoint",
    "load_checkpoint",
]

LOSS_CLAMP = 1e-12

CHECKPOINT_MAGIC = b"NCRELMLP"
CHECKPOINT_VERSION = 1


class TrainingDivergedError(RuntimeError):
    """Raised when a non-finite loss shows up during training."""

    def __init__(self, epoch: int, batch_start: int):
        self.epoch = epoch
        self.batch_start = batch_start
        super().__init__(
            f"non-finite loss at epoch {epoch}, batch starting at example {batch_start}"
        )


@dataclass
class MlpModel:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    hidden_size: int
    input_dim: int
    seed: int = 0

    def __post_init__(self):
        if self.hidden_size < 1 or self.input_dim < 1:
            raise ValueError("hidden_size and input_dim must be positive")
        expected = {
            "w1": (self.hidden_size, self.input_dim),
            "b1": (self.hidden_size,),
            "w2": (CATEGORY_COUNT, self.hidden_size),
            "b2": (CATEGORY_COUNT,),
        }
        for name, shape in expected.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")

    def copy(self) -> "MlpModel":
        return MlpModel(
            w1=self.w1.copy(),
            b1=self.b1.copy(),
            w2=self.w2.copy(),
            b2=self.b2.copy(),
            hidden_size=self.hidden_size,
            input_dim=self.input_dim,
            seed=self.seed,
        )


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        # lr 0 is allowed so the "zero step is the identity" property stays testable
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be non-negative, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be positive, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")


@dataclass
class Gradients:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax (max subtraction before exponentiation)."""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


def init_model(input_dim: int, hidden_size: int, seed: int) -> MlpModel:
    """Uniform weights in ±1/sqrt(fan_in), zero biases, deterministic per seed."""
    if input_dim < 1 or hidden_size < 1:
        raise ValueError("input_dim and hidden_size must be positive")
    rng = np.random.default_rng(seed)
    bound1 = 1.0 / np.sqrt(input_dim)
    bound2 = 1.0 / np.sqrt(hidden_size)
    return MlpModel(
        w1=rng.uniform(-bound1, bound1, size=(hidden_size, input_dim)),
        b1=np.zeros(hidden_size),
        w2=rng.uniform(-bound2, bound2, size=(CATEGORY_COUNT, hidden_size)),
        b2=np.zeros(CATEGORY_COUNT),
        hidden_size=hidden_size,
        input_dim=input_dim,
        seed=seed,
    )


def _forward_parts(model: MlpModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    z1 = X @ model.w1.T + model.b1
    h = relu(z1)
    logits = h @ model.w2.T + model.b2
    return z1, h, softmax(logits)


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Probability vector over the 17 categories for one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.input_dim,):
        raise ValueError(f"input has shape {x.shape}, expected ({model.input_dim},)")
    _, _, probs = _forward_parts(model, x[None, :])
    return probs[0]


def forward_batch(model: MlpModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise ValueError(f"input has shape {X.shape}, expected (n, {model.input_dim})")
    _, _, probs = _forward_parts(model, X)
    return probs


def loss(probs: np.ndarray, target: np.ndarray) -> float:
    """Cross-entropy −Σ target·ln(probs), probabilities clamped at 1e-12."""
    clamped = np.maximum(np.asarray(probs, dtype=np.float64), LOSS_CLAMP)
    return float(-np.sum(np.asarray(target, dtype=np.float64) * np.log(clamped), axis=-1))


def backward(model: MlpModel, x: np.ndarray, target: np.ndarray) -> Gradients:
    """Analytic gradients of loss(forward(model, x), target).

    Output-layer error is probs − target; the relu derivative is taken
    as 0 at exactly 0.
    """
    x = np.asarray(x, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    z1, h, probs = _forward_parts(model, x[None, :])
    delta2 = probs[0] - target
    delta1 = (model.w2.T @ delta2) * (z1[0] > 0.0)
    return Gradients(
        w1=np.outer(delta1, x),
        b1=delta1,
        w2=np.outer(delta2, h[0]),
        b2=delta2,
    )


def backward_batch(
    model: MlpModel, X: np.ndarray, targets: np.ndarray
) -> tuple[Gradients, float]:
    """Mean gradients over a batch, plus the summed per-example loss."""
    X = np.asarray(X, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    n = X.shape[0]
    z1, h, probs = _forward_parts(model, X)
    clamped = np.maximum(probs, LOSS_CLAMP)
    loss_sum = float(-np.sum(targets * np.log(clamped)))
    delta2 = probs - targets
    delta1 = (delta2 @ model.w2) * (z1 > 0.0)
    grads = Gradients(
        w1=delta1.T @ X / n,
        b1=delta1.mean(axis=0),
        w2=delta2.T @ h / n,
        b2=delta2.mean(axis=0),
    )
    return grads, loss_sum


def train(
    model: MlpModel,
    data: list[tuple[np.ndarray, np.ndarray]],
    config: TrainConfig,
) -> tuple[MlpModel, list[float]]:
    """SGD over seeded shuffles; returns (trained copy, per-epoch mean loss).

    The input model is left untouched. Each epoch draws a fresh
    permutation from one generator seeded with config.seed, walks it in
    batches of batch_size, and applies θ ← θ − lr · mean-batch-gradient.
    The recorded epoch loss is the mean per-example loss as each batch
    was visited (before that batch's update).
    """
    if not data:
        raise ValueError("training data is empty")
    X = np.stack([np.asarray(x, dtype=np.float64) for x, _ in data])
    T = np.stack([np.asarray(t, dtype=np.float64) for _, t in data])
    if X.shape[1] != model.input_dim:
        raise ValueError(f"data dim {X.shape[1]} does not match model input_dim {model.input_dim}")
    if T.shape[1] != CATEGORY_COUNT:
        raise ValueError(f"targets have {T.shape[1]} columns, expected {CATEGORY_COUNT}")

    work = model.copy()
    rng = np.random.default_rng(config.seed)
    n = len(data)
    history: list[float] = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss_sum = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            grads, batch_loss_sum = backward_batch(work, X[idx], T[idx])
            if not np.isfinite(batch_loss_sum):
                raise TrainingDivergedError(epoch, start)
            epoch_loss_sum += batch_loss_sum
            work.w1 -= config.learning_rate * grads.w1
            work.b1 -= config.learning_rate * grads.b1
            work.w2 -= config.learning_rate * grads.w2
            work.b2 -= config.learning_rate * grads.b2
        history.append(epoch_loss_sum / n)
    return work, history


def predict_topk(model: MlpModel, x: np.ndarray, k: int) -> list[int]:
    """Top-k category ids by probability; ties go to the lower id."""
    if not 1 <= k <= CATEGORY_COUNT:
        raise ValueError(f"k must be in 1..{CATEGORY_COUNT}, got {k}")
    probs = forward(model, x)
    order = np.argsort(-probs, kind="stable")
    return [int(i) + 1 for i in order[:k]]


def save_checkpoint(path, model: MlpModel) -> None:
    """Binary checkpoint: magic, version, dims, seed, then float64 LE parameters."""
    header = CHECKPOINT_MAGIC + struct.pack(
        "<IIIIq",
        CHECKPOINT_VERSION,
        model.input_dim,
        model.hidden_size,
        CATEGORY_COUNT,
        model.seed,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for arr in (model.w1, model.b1, model.w2, model.b2):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> MlpModel:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a model checkpoint")
    offset = len(CHECKPOINT_MAGIC)
    version, input_dim, hidden_size, n_out, seed = struct.unpack_from("<IIIIq", blob, offset)
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    if n_out != CATEGORY_COUNT:
        raise ValueError(f"{path}: checkpoint has {n_out} outputs, expected {CATEGORY_COUNT}")
    offset += struct.calcsize("<IIIIq")

    def take(shape):
        nonlocal offset
        size = int(np.prod(shape))
        arr = np.frombuffer(blob, dtype="<f8", count=size, offset=offset)
        offset += size * 8
        return arr.reshape(shape).astype(np.float64)

    w1 = take((hidden_size, input_dim))
    b1 = take((hidden_size,))
    w2 = take((CATEGORY_COUNT, hidden_size))
    b2 = take((CATEGORY_COUNT,))
    if offset != len(blob):
        raise ValueError(f"{path}: {len(blob) - offset} trailing bytes")
    return MlpModel(
        w1=w1, b1=b1, w2=w2, b2=b2,
        hidden_size=hidden_size, input_dim=input_dim, seed=seed,
    )
