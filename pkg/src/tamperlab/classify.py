"""From-scratch binary classifiers: a linear SVM trained by subgradient
SGD on the hinge + L2 objective, and a one-hidden-layer MLP trained by
per-sample SGD on binary cross-entropy with manual backprop.

Both trainers are deterministic given (data, config, seed): one
``numpy.random.default_rng(seed)`` generator supplies, in order, any
initialization draws and then one permutation per epoch when shuffling.
All arithmetic is 64-bit.
"""

import zlib
from dataclasses import dataclass

import numpy as np

from tamperlab.errors import (
    ChecksumMismatch,
    DimMismatch,
    EmptyTrainingSet,
    FormatVersionMismatch,
    IoFailure,
    KinkProximity,
)
from tamperlab.features import FeatureVector, ScalingParams, apply_scaling

MODEL_MAGIC = "tamperlab-model 1"

KIND_SVM = "svm"
KIND_MLP = "mlp"


@dataclass
class LinearSvmModel:
    """w, b of a linear decision rule sign(w·x + b); ``lam`` is the L2
    coefficient the model was trained with. Margin exactly 0 → class 1."""

    weights: np.ndarray
    bias: float
    lam: float = 0.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = float(self.bias)
        self.lam = float(self.lam)

    @property
    def input_dim(self) -> int:
        return self.weights.shape[0]


@dataclass
class MlpModel:
    """One hidden relu layer, sigmoid output."""

    hidden_weights: np.ndarray  # (hidden_dim, input_dim)
    hidden_bias: np.ndarray  # (hidden_dim,)
    output_weights: np.ndarray  # (hidden_dim,)
    output_bias: float

    def __post_init__(self):
        self.hidden_weights = np.asarray(self.hidden_weights, dtype=np.float64)
        self.hidden_bias = np.asarray(self.hidden_bias, dtype=np.float64)
        self.output_weights = np.asarray(self.output_weights, dtype=np.float64)
        self.output_bias = float(self.output_bias)

    @property
    def hidden_dim(self) -> int:
        return self.hidden_weights.shape[0]

    @property
    def input_dim(self) -> int:
        return self.hidden_weights.shape[1]


@dataclass(frozen=True)
class TrainConfig:
    """SGD settings shared by both trainers.

    ``lam`` is the L2 coefficient of the SVM objective (the MLP objective
    is plain cross-entropy and ignores it).
    """

    epochs: int = 30
    learning_rate: float = 0.1
    lam: float = 0.0
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be > 0, got {self.learning_rate}")
        if self.lam < 0:
            raise ValueError(f"L2 coefficient must be >= 0, got {self.lam}")


@dataclass(frozen=True)
class LabeledSample:
    """Feature vector plus ground-truth label (0 authentic, 1 tampered)."""

    features: FeatureVector
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


def _vec(features) -> np.ndarray:
    if isinstance(features, FeatureVector):
        return features.values
    return np.asarray(features, dtype=np.float64)


def _stack_samples(samples):
    if not samples:
        raise EmptyTrainingSet("no training samples")
    rows = [_vec(s.features) for s in samples]
    dim = rows[0].shape[0]
    for r in rows[1:]:
        if r.shape[0] != dim:
            raise DimMismatch(f"mixed feature dimensions {dim} and {r.shape[0]}")
    x = np.stack(rows)
    y = np.array([2 * s.label - 1 for s in samples], dtype=np.float64)
    return x, y


# ---------------------------------------------------------------------------
# linear SVM


def hinge_loss(model: LinearSvmModel, s: LabeledSample) -> float:
    """max(0, 1 - y(w·x + b)) + (lam/2)·||w||², with y = 2·label - 1."""
    x = _vec(s.features)
    if x.shape[0] != model.input_dim:
        raise DimMismatch(f"feature dim {x.shape[0]} vs model dim {model.input_dim}")
    y = 2.0 * s.label - 1.0
    margin = y * (float(model.weights @ x) + model.bias)
    return max(0.0, 1.0 - margin) + 0.5 * model.lam * float(model.weights @ model.weights)


def svm_train(samples, cfg: TrainConfig) -> LinearSvmModel:
    """Per-sample subgradient SGD from all-zero parameters:

    w <- w - lr·(lam·w - [margin < 1]·y·x),  b <- b + lr·[margin < 1]·y
    """
    x, y = _stack_samples(samples)
    n, dim = x.shape
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    rng = np.random.default_rng(cfg.seed)
    lr = cfg.learning_rate
    for _ in range(cfg.epochs):
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        for i in order:
            xi = x[i]
            yi = y[i]
            margin = yi * (float(w @ xi) + b)
            if margin < 1.0:
                w -= lr * (cfg.lam * w - yi * xi)
                b += lr * yi
            else:
                w -= lr * (cfg.lam * w)
    return LinearSvmModel(w, b, cfg.lam)


def svm_predict(model: LinearSvmModel, features) -> tuple:
    """(label, margin) with margin = w·x + b; label 1 iff margin >= 0."""
    x = _vec(features)
    if x.shape[0] != model.input_dim:
        raise DimMismatch(f"feature dim {x.shape[0]} vs model dim {model.input_dim}")
    margin = float(model.weights @ x) + model.bias
    return (1 if margin >= 0.0 else 0), margin


# ---------------------------------------------------------------------------
# MLP

PROB_FLOOR = 1e-12


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


def _mlp_logit(model: MlpModel, x: np.ndarray):
    z1 = model.hidden_weights @ x + model.hidden_bias
    h = np.maximum(z1, 0.0)
    z = float(model.output_weights @ h) + model.output_bias
    return z1, h, z


def mlp_forward(model: MlpModel, features) -> float:
    """Probability of class 1: sigmoid(w2·relu(W1 x + b1) + b2), clipped
    into the open interval (0, 1)."""
    x = _vec(features)
    if x.shape[0] != model.input_dim:
        raise DimMismatch(f"feature dim {x.shape[0]} vs model dim {model.input_dim}")
    _, _, z = _mlp_logit(model, x)
    p = _sigmoid(z)
    return float(min(max(p, PROB_FLOOR), 1.0 - PROB_FLOOR))


def mlp_loss(model: MlpModel, s: LabeledSample) -> float:
    """Binary cross-entropy -[y ln p + (1-y) ln(1-p)], evaluated through
    the logit for numerical stability."""
    x = _vec(s.features)
    if x.shape[0] != model.input_dim:
        raise DimMismatch(f"feature dim {x.shape[0]} vs model dim {model.input_dim}")
    _, _, z = _mlp_logit(model, x)
    # max(z,0) - z*y + log(1 + exp(-|z|)) == BCE(sigmoid(z), y)
    return float(max(z, 0.0) - z * s.label + np.log1p(np.exp(-abs(z))))


def _mlp_grads(model: MlpModel, x: np.ndarray, label: int):
    z1, h, z = _mlp_logit(model, x)
    dz = _sigmoid(z) - label
    d_w2 = dz * h
    d_b2 = dz
    dh = dz * model.output_weights
    dz1 = np.where(z1 > 0.0, dh, 0.0)
    d_w1 = np.outer(dz1, x)
    d_b1 = dz1
    return d_w1, d_b1, d_w2, d_b2


def mlp_train(samples, cfg: TrainConfig, hidden_dim: int = 64) -> MlpModel:
    """Per-sample SGD on cross-entropy with manual backprop.

    Initialization draws come first from the seeded generator: hidden
    weights ~ U(-1/sqrt(input_dim), +1/sqrt(input_dim)), then output
    weights ~ U(-1/sqrt(hidden_dim), ...); biases start at 0.
    """
    x, _ = _stack_samples(samples)
    labels = np.array([s.label for s in samples], dtype=np.float64)
    n, dim = x.shape
    rng = np.random.default_rng(cfg.seed)
    a1 = 1.0 / np.sqrt(dim)
    a2 = 1.0 / np.sqrt(hidden_dim)
    model = MlpModel(
        hidden_weights=rng.uniform(-a1, a1, (hidden_dim, dim)),
        hidden_bias=np.zeros(hidden_dim),
        output_weights=rng.uniform(-a2, a2, hidden_dim),
        output_bias=0.0,
    )
    lr = cfg.learning_rate
    for _ in range(cfg.epochs):
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        for i in order:
            d_w1, d_b1, d_w2, d_b2 = _mlp_grads(model, x[i], labels[i])
            model.hidden_weights -= lr * d_w1
            model.hidden_bias -= lr * d_b1
            model.output_weights -= lr * d_w2
            model.output_bias -= lr * d_b2
    return model


# ---------------------------------------------------------------------------
# gradient verification


def gradient_check(model, s: LabeledSample, eps: float = 1e-5) -> float:
    """Max relative disagreement between analytic gradients and central
    finite differences (f(t+eps) - f(t-eps)) / (2 eps) over every
    parameter, using |a - n| / max(1e-12, |a| + |n|).

    For the SVM the loss has a kink at margin 1; evaluation points whose
    margin lies within eps·max(1, max|x|) of 1 raise KinkProximity because
    finite differences straddling the kink are meaningless there.
    """
    if not 0.0 < eps <= 1e-2:
        raise ValueError(f"eps must lie in (0, 1e-2], got {eps}")
    if isinstance(model, LinearSvmModel):
        return _gradient_check_svm(model, s, eps)
    if isinstance(model, MlpModel):
        return _gradient_check_mlp(model, s, eps)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def _rel_err(a: float, n: float) -> float:
    return abs(a - n) / max(1e-12, abs(a) + abs(n))


def _gradient_check_svm(model: LinearSvmModel, s: LabeledSample, eps: float) -> float:
    x = _vec(s.features)
    y = 2.0 * s.label - 1.0
    margin = y * (float(model.weights @ x) + model.bias)
    guard = eps * max(1.0, float(np.abs(x).max()) if x.size else 1.0)
    if abs(margin - 1.0) <= guard:
        raise KinkProximity(f"margin {margin} within {guard} of the hinge kink")
    active = margin < 1.0
    d_w = model.lam * model.weights - (y * x if active else 0.0)
    d_b = -y if active else 0.0

    worst = 0.0
    w = model.weights.copy()
    for i in range(w.shape[0]):
        keep = w[i]
        w[i] = keep + eps
        up = hinge_loss(LinearSvmModel(w, model.bias, model.lam), s)
        w[i] = keep - eps
        down = hinge_loss(LinearSvmModel(w, model.bias, model.lam), s)
        w[i] = keep
        worst = max(worst, _rel_err(float(d_w[i]), (up - down) / (2.0 * eps)))
    up = hinge_loss(LinearSvmModel(w, model.bias + eps, model.lam), s)
    down = hinge_loss(LinearSvmModel(w, model.bias - eps, model.lam), s)
    return max(worst, _rel_err(d_b, (up - down) / (2.0 * eps)))


def _gradient_check_mlp(model: MlpModel, s: LabeledSample, eps: float) -> float:
    x = _vec(s.features)
    analytic = _mlp_grads(model, x, s.label)
    arrays = [
        model.hidden_weights.copy(),
        model.hidden_bias.copy(),
        model.output_weights.copy(),
        np.array([model.output_bias]),
    ]

    def loss_at(params):
        probe = MlpModel(params[0], params[1], params[2], float(params[3][0]))
        return mlp_loss(probe, s)

    grads = [np.asarray(analytic[0]), np.asarray(analytic[1]), np.asarray(analytic[2]),
             np.array([analytic[3]])]
    worst = 0.0
    for arr, grad in zip(arrays, grads):
        flat = arr.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.shape[0]):
            keep = flat[i]
            flat[i] = keep + eps
            up = loss_at(arrays)
            flat[i] = keep - eps
            down = loss_at(arrays)
            flat[i] = keep
            worst = max(worst, _rel_err(float(gflat[i]), (up - down) / (2.0 * eps)))
    return worst


# ---------------------------------------------------------------------------
# model file I/O


@dataclass
class ModelFile:
    """A trained classifier bundled with the feature pipeline id and the
    scaling fitted on its training split, so prediction is self-contained."""

    kind: str
    model: object
    pipeline_id: str
    scaling: ScalingParams


def _fmt(values) -> str:
    return " ".join(format(float(v), ".17g") for v in np.asarray(values, dtype=np.float64).reshape(-1))


def _checksum(chunks) -> int:
    crc = 0
    for chunk in chunks:
        crc = zlib.crc32(np.ascontiguousarray(chunk, dtype=np.float64).reshape(-1).tobytes(), crc)
    return crc & 0xFFFFFFFF


def save_model(mf: ModelFile, path) -> None:
    """Write the line-oriented text format described in load_model."""
    if mf.kind == KIND_SVM:
        m = mf.model
        numeric = [np.array([m.lam]), mf.scaling.lo, mf.scaling.hi, m.weights, np.array([m.bias])]
        body = [
            f"lambda {_fmt([m.lam])}",
            f"scale-lo {_fmt(mf.scaling.lo)}",
            f"scale-hi {_fmt(mf.scaling.hi)}",
            f"weights {_fmt(m.weights)}",
            f"bias {_fmt([m.bias])}",
        ]
        dims = f"dim {m.input_dim}"
    elif mf.kind == KIND_MLP:
        m = mf.model
        numeric = [mf.scaling.lo, mf.scaling.hi, m.hidden_weights, m.hidden_bias,
                   m.output_weights, np.array([m.output_bias])]
        body = [
            f"scale-lo {_fmt(mf.scaling.lo)}",
            f"scale-hi {_fmt(mf.scaling.hi)}",
            f"hidden-weights {_fmt(m.hidden_weights)}",
            f"hidden-bias {_fmt(m.hidden_bias)}",
            f"output-weights {_fmt(m.output_weights)}",
            f"output-bias {_fmt([m.output_bias])}",
        ]
        dims = f"dim {m.input_dim}\nhidden {m.hidden_dim}"
    else:
        raise ValueError(f"unknown model kind {mf.kind!r}")
    text = "\n".join(
        [MODEL_MAGIC, f"pipeline {mf.pipeline_id}", f"kind {mf.kind}", dims]
        + body
        + [f"checksum {_checksum(numeric):08x}", ""]
    )
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write model file: {exc}") from exc


def load_model(path) -> ModelFile:
    """Read a model file back; parameters roundtrip bit-exactly.

    Layout: magic line, `pipeline <id>`, `kind svm|mlp`, dimension lines,
    one line per parameter array (17-significant-digit floats, row-major),
    and a trailing crc32 (hex) over the float64 bytes of every numeric
    line in file order.
    """
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read model file: {exc}") from exc
    if not lines or lines[0] != MODEL_MAGIC:
        raise FormatVersionMismatch("not a recognized model file")
    fields = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        key, _, rest = line.partition(" ")
        fields[key] = rest
    try:
        pipeline_id = fields["pipeline"]
        kind = fields["kind"]
        stated = int(fields["checksum"], 16)
        lo = _parse_floats(fields["scale-lo"])
        hi = _parse_floats(fields["scale-hi"])
        dim = int(fields["dim"])
        if kind == KIND_SVM:
            lam = float(fields["lambda"])
            w = _parse_floats(fields["weights"])
            bias = float(fields["bias"])
            numeric = [np.array([lam]), lo, hi, w, np.array([bias])]
            model = LinearSvmModel(w, bias, lam)
        elif kind == KIND_MLP:
            hidden = int(fields["hidden"])
            w1 = _parse_floats(fields["hidden-weights"]).reshape(hidden, dim)
            b1 = _parse_floats(fields["hidden-bias"])
            w2 = _parse_floats(fields["output-weights"])
            b2 = float(fields["output-bias"])
            numeric = [lo, hi, w1, b1, w2, np.array([b2])]
            model = MlpModel(w1, b1, w2, b2)
        else:
            raise KeyError(f"kind {kind}")
    except (KeyError, ValueError) as exc:
        raise ChecksumMismatch(f"model file truncated or corrupted: {exc}") from exc
    if model.input_dim != dim or lo.shape[0] != dim:
        raise ChecksumMismatch("model file dimensions are inconsistent")
    if _checksum(numeric) != stated:
        raise ChecksumMismatch("model file checksum does not match its parameters")
    return ModelFile(kind=kind, model=model, pipeline_id=pipeline_id,
                     scaling=ScalingParams(lo, hi))


def _parse_floats(text: str) -> np.ndarray:
    parts = text.split()
    if not parts:
        return np.zeros(0, dtype=np.float64)
    return np.array([float(p) for p in parts], dtype=np.float64)


def model_predict(mf: ModelFile, features) -> tuple:
    """(label, score) for an UNSCALED feature vector: applies the stored
    scaling, then the classifier. Score is the SVM margin or the MLP
    probability."""
    scaled = apply_scaling(
        features if isinstance(features, FeatureVector) else FeatureVector(features),
        mf.scaling,
    )
    if mf.kind == KIND_SVM:
        return svm_predict(mf.model, scaled)
    p = mlp_forward(mf.model, scaled)
    return (1 if p >= 0.5 else 0), p
