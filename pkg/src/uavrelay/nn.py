"""Small dense network for action cloning, written directly on numpy.

Architecture: feature vector -> 40 -> 80 -> 160 -> 80 -> one logit per
user, ReLU between layers, softmax on top.  Everything runs in float64 and
the model file is plain JSON, so training is reproducible bit for bit from
(dataset, TrainConfig).
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .trajectory import FeatureSpec

HIDDEN_DIMS = (40, 80, 160, 80)
PROB_FLOOR = 1e-12  # clip for log() so a confident miss cannot yield inf


def softmax(theta: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction for overflow safety."""
    theta = np.asarray(theta, dtype=np.float64)
    if not np.all(np.isfinite(theta)):
        raise ValueError("softmax input must be finite")
    squeeze = theta.ndim == 1
    if squeeze:
        theta = theta[None, :]
    shifted = theta - theta.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=1, keepdims=True)
    return p[0] if squeeze else p


def ce_loss(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Categorical cross-entropy summed over the batch.

    y_true is one-hot (N, C); y_pred holds probabilities.  Predictions are
    clipped below at PROB_FLOOR before the log.
    """
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    clipped = np.clip(y_pred, PROB_FLOOR, 1.0)
    return float(-(y_true * np.log(clipped)).sum())


def one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and not ((labels >= 0) & (labels < n_classes)).all():
        raise DataError(f"label outside 0..{n_classes - 1}")
    out = np.zeros((labels.shape[0], n_classes), dtype=np.float64)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


@dataclass
class MlpModel:
    feature_spec: FeatureSpec
    dims: list
    weights: list  # weights[l]: (dims[l], dims[l+1])
    biases: list  # biases[l]: (dims[l+1],)

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def n_classes(self) -> int:
        return self.dims[-1]


def init_model(feature_spec: FeatureSpec, n_classes: int, rng: np.random.Generator) -> MlpModel:
    """Fan-in-scaled uniform init, biases zero."""
    dims = [feature_spec.feature_dim, *HIDDEN_DIMS, n_classes]
    weights, biases = [], []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / d_in)
        weights.append(rng.uniform(-limit, limit, size=(d_in, d_out)))
        biases.append(np.zeros(d_out, dtype=np.float64))
    return MlpModel(feature_spec=feature_spec, dims=dims, weights=weights, biases=biases)


def _forward_cached(model: MlpModel, x: np.ndarray):
    """Probabilities plus every layer activation (input included)."""
    acts = [np.asarray(x, dtype=np.float64)]
    h = acts[0]
    last = model.n_layers - 1
    for l in range(model.n_layers):
        z = h @ model.weights[l] + model.biases[l]
        h = z if l == last else np.maximum(z, 0.0)
        acts.append(h)
    return softmax(acts[-1]), acts


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Class probabilities for one state (d,) or a batch (N, d)."""
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    probs, _ = _forward_cached(model, x[None, :] if squeeze else x)
    return probs[0] if squeeze else probs


@dataclass
class Grads:
    weights: list
    biases: list


def backward(model: MlpModel, x: np.ndarray, y_onehot: np.ndarray) -> Grads:
    """Analytic gradients of the MEAN batch cross-entropy."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y_onehot, dtype=np.float64)
    n = x.shape[0]
    probs, acts = _forward_cached(model, x)
    d_w = [None] * model.n_layers
    d_b = [None] * model.n_layers
    delta = (probs - y) / n  # softmax + cross-entropy collapse
    for l in range(model.n_layers - 1, -1, -1):
        d_w[l] = acts[l].T @ delta
        d_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l].T) * (acts[l] > 0.0)
    return Grads(weights=d_w, biases=d_b)


@dataclass
class AdamState:
    m_w: list
    v_w: list
    m_b: list
    v_b: list
    t: int = 0

    @classmethod
    def for_model(cls, model: MlpModel) -> "AdamState":
        return cls(
            m_w=[np.zeros_like(w) for w in model.weights],
            v_w=[np.zeros_like(w) for w in model.weights],
            m_b=[np.zeros_like(b) for b in model.biases],
            v_b=[np.zeros_like(b) for b in model.biases],
        )


def adam_step(
    model: MlpModel,
    grads: Grads,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
):
    """One bias-corrected Adam update, applied in place."""
    state.t += 1
    t = state.t
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for l in range(model.n_layers):
        for param, grad, m, v in (
            (model.weights[l], grads.weights[l], state.m_w[l], state.v_w[l]),
            (model.biases[l], grads.biases[l], state.m_b[l], state.v_b[l]),
        ):
            m *= beta1
            m += (1.0 - beta1) * grad
            v *= beta2
            v += (1.0 - beta2) * grad * grad
            param -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 40
    batch_size: int = 256
    lr0: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 7


@dataclass
class EpochStats:
    epoch: int
    lr: float
    train_loss: float
    train_acc: float
    val_loss: float = float("nan")
    val_acc: float = float("nan")


@dataclass
class EvalReport:
    accuracy: float
    mean_loss: float
    confusion: np.ndarray  # rows: true class, cols: predicted
    n: int


def evaluate(model: MlpModel, x: np.ndarray, y: np.ndarray, batch: int = 4096) -> EvalReport:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape[0] != y.shape[0]:
        raise DataError(f"{x.shape[0]} states but {y.shape[0]} labels")
    if x.shape[0] == 0:
        raise DataError("cannot evaluate on an empty dataset")
    n_classes = model.n_classes
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    loss_sum = 0.0
    for start in range(0, x.shape[0], batch):
        xb = x[start : start + batch]
        yb = y[start : start + batch]
        probs = forward(model, xb)
        loss_sum += ce_loss(one_hot(yb, n_classes), probs)
        pred = probs.argmax(axis=1)
        np.add.at(confusion, (yb, pred), 1)
    correct = int(np.trace(confusion))
    return EvalReport(
        accuracy=correct / x.shape[0],
        mean_loss=loss_sum / x.shape[0],
        confusion=confusion,
        n=x.shape[0],
    )


def train(
    x: np.ndarray,
    y: np.ndarray,
    feature_spec: FeatureSpec,
    cfg: TrainConfig = TrainConfig(),
    x_val: np.ndarray = None,
    y_val: np.ndarray = None,
    n_classes: int = None,
    log=None,
):
    """Minibatch Adam over shuffled epochs; returns (model, history).

    The learning rate decays per epoch as lr0 / (1 + decay * epoch) with
    decay = lr0 / epochs.  History rows carry train and, when a held-out
    set is given, validation loss and accuracy.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or x.shape[1] != feature_spec.feature_dim:
        raise DataError(
            f"feature matrix is {x.shape}, spec expects (*, {feature_spec.feature_dim})"
        )
    if n_classes is None:
        n_classes = feature_spec.n_ues
    rng = np.random.default_rng(cfg.seed)
    model = init_model(feature_spec, n_classes, rng)
    state = AdamState.for_model(model)
    y_hot = one_hot(y, n_classes)
    decay = cfg.lr0 / cfg.epochs
    history = []
    for epoch in range(cfg.epochs):
        lr = cfg.lr0 / (1.0 + decay * epoch)
        order = rng.permutation(x.shape[0])
        for start in range(0, x.shape[0], cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            grads = backward(model, x[idx], y_hot[idx])
            adam_step(model, grads, state, lr, cfg.beta1, cfg.beta2, cfg.eps)
        train_report = evaluate(model, x, y)
        stats = EpochStats(
            epoch=epoch,
            lr=lr,
            train_loss=train_report.mean_loss,
            train_acc=train_report.accuracy,
        )
        if x_val is not None and len(x_val):
            val_report = evaluate(model, x_val, y_val)
            stats.val_loss = val_report.mean_loss
            stats.val_acc = val_report.accuracy
        history.append(stats)
        if log is not None:
            log(stats)
    return model, history


# ---------------------------------------------------------------------------
# Persistence: plain JSON, full float round-trip via repr.
# ---------------------------------------------------------------------------


def save_model(model: MlpModel, path):
    obj = {
        "feature_spec": model.feature_spec.to_obj(),
        "dims": list(model.dims),
        "layers": [
            {"w": w.tolist(), "b": b.tolist()}
            for w, b in zip(model.weights, model.biases)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh)


def load_model(path) -> MlpModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot load model {path}: {exc}") from None
    try:
        spec = FeatureSpec.from_obj(obj["feature_spec"])
        dims = [int(d) for d in obj["dims"]]
        layers = obj["layers"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed model file: {exc}") from None
    if len(dims) < 2 or len(layers) != len(dims) - 1:
        raise DataError(f"{path}: {len(layers)} layers do not match dims {dims}")
    if dims[0] != spec.feature_dim:
        raise DataError(f"{path}: input width {dims[0]} != feature dim {spec.feature_dim}")
    weights, biases = [], []
    for l, layer in enumerate(layers):
        try:
            w = np.asarray(layer["w"], dtype=np.float64)
            b = np.asarray(layer["b"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: layer {l} malformed: {exc}") from None
        if w.shape != (dims[l], dims[l + 1]) or b.shape != (dims[l + 1],):
            raise DataError(
                f"{path}: layer {l} has shape {w.shape}/{b.shape}, "
                f"expected {(dims[l], dims[l + 1])}/({dims[l + 1]},)"
            )
        weights.append(w)
        biases.append(b)
    return MlpModel(feature_spec=spec, dims=dims, weights=weights, biases=biases)
