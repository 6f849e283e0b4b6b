"""Hashed n-gram featurizer and linear action-chunk predictor.

The text pipeline is intentionally simple: structured observation prompts are
near-tabular, so per-line n-grams hashed into a fixed-width sparse vector give
a linear model enough signal to bind grid positions to depths and semantics.
"""

from __future__ import annotations

import string
import zlib

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .core import ACTIONS, STOP, apply_stop_suffix

CHECKPOINT_VERSION = 1

_STRIP = string.punctuation + string.whitespace


def tokenize_line(line: str) -> list[str]:
    """Whitespace tokens with boundary punctuation removed.

    Interior punctuation survives so "[2,3]:" stays the single token "2,3"
    and "depth=1.8," stays "depth=1.8"; tokens that were pure punctuation
    are dropped.
    """
    out = []
    for raw in line.split():
        token = raw.strip(_STRIP)
        if token:
            out.append(token)
    return out


class PromptHasher(TransformerMixin, BaseEstimator):
    """Hash per-line token n-grams into L2-normalized sparse count rows.

    Stateless: fit only validates parameters. Line n-grams (never crossing a
    newline) are hashed with a seeded crc32 into `dimension` buckets.
    """

    def __init__(self, dimension: int = 65536, ngram_orders=(1, 2, 3), hash_seed: int = 0):
        self.dimension = dimension
        self.ngram_orders = ngram_orders
        self.hash_seed = hash_seed

    def _check_params(self) -> None:
        if not isinstance(self.dimension, int) or self.dimension < 1 or self.dimension & (self.dimension - 1):
            raise ValueError(f"dimension must be a power of two, got {self.dimension!r}")
        orders = tuple(self.ngram_orders)
        if not orders or any(not isinstance(k, int) or k < 1 for k in orders):
            raise ValueError(f"ngram_orders must be positive ints, got {self.ngram_orders!r}")

    def fit(self, X, y=None):
        self._check_params()
        return self

    def _line_buckets(self, line: str) -> list[int]:
        seed = self.hash_seed & 0xFFFFFFFF
        tokens = tokenize_line(line)
        buckets = []
        for k in self.ngram_orders:
            for i in range(len(tokens) - k + 1):
                gram = " ".join(tokens[i : i + k])
                buckets.append(zlib.crc32(gram.encode("utf-8"), seed) % self.dimension)
        return buckets

    def transform(self, X) -> sparse.csr_matrix:
        self._check_params()
        if isinstance(X, str):
            raise TypeError("expected a sequence of prompt strings, got a single str")
        cache: dict[str, list[int]] = {}
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for prompt in X:
            if not isinstance(prompt, str):
                raise TypeError(f"prompts must be str, got {type(prompt).__name__}")
            if not prompt:
                raise ValueError("cannot featurize an empty prompt")
            counts: dict[int, int] = {}
            for line in prompt.split("\n"):
                buckets = cache.get(line)
                if buckets is None:
                    buckets = self._line_buckets(line)
                    cache[line] = buckets
                for b in buckets:
                    counts[b] = counts.get(b, 0) + 1
            row = sorted(counts.items())
            norm = np.sqrt(sum(v * v for _, v in row)) or 1.0
            indices.extend(b for b, _ in row)
            data.extend(v / norm for _, v in row)
            indptr.append(len(indices))
        return sparse.csr_matrix(
            (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
            shape=(len(indptr) - 1, self.dimension),
        )


def balanced_weights(targets: np.ndarray, n_classes: int = len(ACTIONS)) -> np.ndarray:
    """Inverse-frequency class weights pooled across all chunk positions.

    w_c = n / (n_classes * max(n_c, 1)) over the flattened target matrix, so
    rare actions (turns near the goal, the single stop per episode) are not
    drowned out by forward motion.
    """
    flat = np.asarray(targets).ravel()
    if flat.size == 0:
        raise ValueError("cannot balance an empty target set")
    counts = np.bincount(flat, minlength=n_classes).astype(np.float64)
    return flat.size / (n_classes * np.maximum(counts, 1.0))


def chunk_loss_and_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    features: sparse.csr_matrix,
    targets: np.ndarray,
    class_weights: np.ndarray,
    l2: float,
):
    """Weighted cross-entropy over all chunk positions, plus gradients.

    Loss for one sample is the mean over its n_a positions of
    w[y_i] * CE(logits_i, y_i); the batch loss is the sample mean plus an
    l2/2 * ||W||^2 penalty. Gradients are exact, so the same code path backs
    both training and finite-difference verification.
    """
    n_heads, n_classes, dim = weights.shape
    n = features.shape[0]
    if targets.shape != (n, n_heads):
        raise ValueError(f"targets shape {targets.shape} does not match ({n}, {n_heads})")
    d_weights = np.zeros_like(weights)
    d_bias = np.zeros_like(bias)
    total = 0.0
    scale = 1.0 / (n * n_heads)
    for h in range(n_heads):
        logits = features @ weights[h].T + bias[h]
        logits -= logits.max(axis=1, keepdims=True)
        exp = np.exp(logits)
        probs = exp / exp.sum(axis=1, keepdims=True)
        y = targets[:, h]
        sample_w = class_weights[y]
        log_probs = logits - np.log(exp.sum(axis=1, keepdims=True))
        total += float(-(sample_w * log_probs[np.arange(n), y]).sum()) * scale
        grad_logits = probs
        grad_logits[np.arange(n), y] -= 1.0
        grad_logits *= (sample_w * scale)[:, None]
        d_weights[h] = np.asarray(grad_logits.T @ features) + l2 * weights[h]
        d_bias[h] = grad_logits.sum(axis=0)
    total += 0.5 * l2 * float((weights * weights).sum())
    return total, d_weights, d_bias


class ActionChunkPredictor(BaseEstimator):
    """n_actions independent linear heads over hashed prompt features.

    Trained with mini-batch gradient descent on class-weighted cross-entropy;
    the epoch with the best held-out loss wins. Prediction argmaxes each head
    (ties resolve to the smallest action id) and enforces the stop suffix.
    """

    def __init__(
        self,
        n_actions: int = 4,
        dimension: int = 65536,
        ngram_orders=(1, 2, 3),
        hash_seed: int = 0,
        learning_rate: float = 0.5,
        epochs: int = 30,
        batch_size: int = 64,
        l2: float = 1e-6,
        holdout_fraction: float = 0.1,
        rng_seed: int = 0,
    ):
        self.n_actions = n_actions
        self.dimension = dimension
        self.ngram_orders = ngram_orders
        self.hash_seed = hash_seed
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.l2 = l2
        self.holdout_fraction = holdout_fraction
        self.rng_seed = rng_seed

    def _hasher(self) -> PromptHasher:
        return PromptHasher(
            dimension=self.dimension,
            ngram_orders=tuple(self.ngram_orders),
            hash_seed=self.hash_seed,
        )

    def _validate_targets(self, targets) -> np.ndarray:
        arr = np.asarray(targets)
        if arr.ndim != 2 or arr.shape[1] != self.n_actions:
            raise ValueError(f"targets must have shape (n, {self.n_actions}), got {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= len(ACTIONS)):
            raise ValueError("targets contain action ids outside 0..3")
        return arr.astype(np.int64)

    def fit(self, prompts, targets):
        if self.n_actions < 1:
            raise ValueError(f"n_actions must be >= 1, got {self.n_actions}")
        if not 0.0 <= self.holdout_fraction < 1.0:
            raise ValueError(f"holdout_fraction must be in [0, 1), got {self.holdout_fraction}")
        targets = self._validate_targets(targets)
        n = len(prompts)
        if n != targets.shape[0]:
            raise ValueError(f"{n} prompts but {targets.shape[0]} target rows")
        if n < 2:
            raise ValueError("need at least 2 training samples")
        hasher = self._hasher().fit(prompts)
        features = hasher.transform(prompts)
        rng = np.random.default_rng(self.rng_seed)
        order = rng.permutation(n)
        n_hold = max(1, int(round(n * self.holdout_fraction))) if self.holdout_fraction else 0
        n_hold = min(n_hold, n - 1)
        hold_idx, train_idx = order[:n_hold], order[n_hold:]
        x_train, y_train = features[train_idx], targets[train_idx]
        x_hold, y_hold = features[hold_idx], targets[hold_idx]
        class_w = balanced_weights(y_train)
        n_classes = len(ACTIONS)
        weights = np.zeros((self.n_actions, n_classes, self.dimension))
        bias = np.zeros((self.n_actions, n_classes))
        best = (np.inf, weights.copy(), bias.copy())
        n_train = x_train.shape[0]
        for _ in range(self.epochs):
            perm = rng.permutation(n_train)
            for lo in range(0, n_train, self.batch_size):
                batch = perm[lo : lo + self.batch_size]
                _, dw, db = chunk_loss_and_grad(
                    weights, bias, x_train[batch], y_train[batch], class_w, self.l2
                )
                weights -= self.learning_rate * dw
                bias -= self.learning_rate * db
            eval_x, eval_y = (x_hold, y_hold) if n_hold else (x_train, y_train)
            loss, _, _ = chunk_loss_and_grad(weights, bias, eval_x, eval_y, class_w, 0.0)
            if loss < best[0]:
                best = (loss, weights.copy(), bias.copy())
        self.holdout_loss_, self.weights_, self.bias_ = best
        self.class_weights_ = class_w
        self.hasher_ = hasher
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "weights_"):
            raise NotFittedError("predictor is not fitted; call fit() or load()")

    def decision_logits(self, prompts) -> np.ndarray:
        self._check_fitted()
        features = self.hasher_.transform(prompts)
        return np.stack([features @ self.weights_[h].T + self.bias_[h] for h in range(self.n_actions)], axis=1)

    def predict(self, prompts) -> np.ndarray:
        """(n, n_actions) action ids, stop-suffixed per row."""
        logits = self.decision_logits(prompts)
        raw = logits.argmax(axis=2)
        out = np.empty_like(raw)
        for i, row in enumerate(raw):
            out[i] = apply_stop_suffix([int(a) for a in row])
        return out

    def decide_block(self, prompt: str) -> list[int]:
        """Action block for a single prompt."""
        return [int(a) for a in self.predict([prompt])[0]]

    def save(self, path) -> None:
        self._check_fitted()
        np.savez_compressed(
            path,
            version=np.int64(CHECKPOINT_VERSION),
            weights=self.weights_,
            bias=self.bias_,
            class_weights=self.class_weights_,
            n_actions=np.int64(self.n_actions),
            dimension=np.int64(self.dimension),
            ngram_orders=np.asarray(tuple(self.ngram_orders), dtype=np.int64),
            hash_seed=np.int64(self.hash_seed),
        )

    @classmethod
    def load(cls, path) -> "ActionChunkPredictor":
        required = {"version", "weights", "bias", "class_weights", "n_actions", "dimension", "ngram_orders", "hash_seed"}
        with np.load(path) as data:
            missing = required - set(data.files)
            if missing:
                raise ValueError(f"checkpoint is missing fields: {sorted(missing)}")
            version = int(data["version"])
            if version != CHECKPOINT_VERSION:
                raise ValueError(
                    f"checkpoint version {version} is not supported (expected {CHECKPOINT_VERSION})"
                )
            n_actions = int(data["n_actions"])
            dimension = int(data["dimension"])
            weights = np.asarray(data["weights"], dtype=np.float64)
            bias = np.asarray(data["bias"], dtype=np.float64)
            if weights.shape != (n_actions, len(ACTIONS), dimension):
                raise ValueError(
                    f"checkpoint weights shape {weights.shape} does not match "
                    f"n_actions={n_actions}, dimension={dimension}"
                )
            if bias.shape != (n_actions, len(ACTIONS)):
                raise ValueError(f"checkpoint bias shape {bias.shape} is invalid")
            class_weights = np.asarray(data["class_weights"], dtype=np.float64)
            if class_weights.shape != (len(ACTIONS),) or (class_weights <= 0).any():
                raise ValueError("checkpoint class_weights must be 4 positive reals")
            model = cls(
                n_actions=n_actions,
                dimension=dimension,
                ngram_orders=tuple(int(k) for k in data["ngram_orders"]),
                hash_seed=int(data["hash_seed"]),
            )
            model.weights_ = weights
            model.bias_ = bias
            model.class_weights_ = class_weights
            model.hasher_ = model._hasher()
            return model
