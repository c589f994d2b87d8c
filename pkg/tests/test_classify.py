import numpy as np
import pytest

from tamperlab import classify
from tamperlab.classify import (
    LabeledSample,
    LinearSvmModel,
    MlpModel,
    ModelFile,
    TrainConfig,
    gradient_check,
    hinge_loss,
    load_model,
    mlp_forward,
    mlp_loss,
    mlp_train,
    model_predict,
    save_model,
    svm_predict,
    svm_train,
)
from tamperlab.errors import (
    ChecksumMismatch,
    DimMismatch,
    EmptyTrainingSet,
    FormatVersionMismatch,
    KinkProximity,
)
from tamperlab.features import FeatureVector, ScalingParams


def sample(vals, label):
    return LabeledSample(FeatureVector(np.asarray(vals, dtype=np.float64)), label)


def blob_samples(rng, n=40, dim=4, gap=3.0):
    """Two well-separated Gaussian blobs, labels 0/1."""
    out = []
    for i in range(n):
        label = i % 2
        center = gap if label else -gap
        out.append(sample(rng.normal(center, 0.5, dim), label))
    return out


# --- hinge loss ---------------------------------------------------------------

def test_hinge_loss_zero_beyond_margin():
    m = LinearSvmModel(np.array([1.0]), 0.0)
    assert hinge_loss(m, sample([2.0], 1)) == 0.0


def test_hinge_loss_on_wrong_side():
    m = LinearSvmModel(np.array([1.0]), 0.0)
    assert hinge_loss(m, sample([0.5], 0)) == pytest.approx(1.5)


def test_hinge_loss_at_zero_margin():
    m = LinearSvmModel(np.zeros(3), 0.0)
    assert hinge_loss(m, sample([1.0, 2.0, 3.0], 1)) == 1.0


def test_hinge_loss_includes_l2_term():
    m = LinearSvmModel(np.array([3.0, 4.0]), 0.0, lam=0.1)
    s = sample([10.0, 0.0], 1)  # margin 30, hinge part 0
    assert hinge_loss(m, s) == pytest.approx(0.5 * 0.1 * 25.0)


def test_hinge_loss_checks_dim():
    m = LinearSvmModel(np.array([1.0, 2.0]), 0.0)
    with pytest.raises(DimMismatch):
        hinge_loss(m, sample([1.0], 1))


# --- SVM training / prediction -------------------------------------------------

def test_svm_learns_separable_blobs(rng):
    samples = blob_samples(rng)
    model = svm_train(samples, TrainConfig(epochs=50, learning_rate=0.05, seed=3))
    hits = sum(svm_predict(model, s.features)[0] == s.label for s in samples)
    assert hits == len(samples)


def test_svm_train_deterministic(rng):
    samples = blob_samples(rng)
    cfg = TrainConfig(epochs=20, learning_rate=0.05, seed=11)
    a = svm_train(samples, cfg)
    b = svm_train(samples, cfg)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


def test_svm_train_rejects_empty():
    with pytest.raises(EmptyTrainingSet):
        svm_train([], TrainConfig())


def test_svm_single_positive_sample_moves_toward_it():
    model = svm_train([sample([1.0, 0.0], 1)],
                      TrainConfig(epochs=1, learning_rate=0.1, shuffle=False))
    # zero init -> margin 0 < 1 -> w += lr*y*x, b += lr*y
    assert model.weights[0] == pytest.approx(0.1)
    assert model.weights[1] == 0.0
    assert model.bias == pytest.approx(0.1)


def test_svm_predict_goldens():
    m = LinearSvmModel(np.array([1.0]), 0.0)
    assert svm_predict(m, FeatureVector(np.array([0.0]))) == (1, 0.0)
    assert svm_predict(m, FeatureVector(np.array([1.0]))) == (1, 1.0)
    assert svm_predict(m, FeatureVector(np.array([-1.0]))) == (0, -1.0)


# --- MLP -----------------------------------------------------------------------

def test_mlp_forward_zero_weights_gives_half():
    m = MlpModel(np.zeros((4, 2)), np.zeros(4), np.zeros(4), 0.0)
    assert mlp_forward(m, FeatureVector(np.array([5.0, -3.0]))) == pytest.approx(0.5)


def test_mlp_forward_hand_computed():
    # single hidden unit: relu(1*x + 0) = x for x>0, output sigmoid(2x)
    m = MlpModel(np.array([[1.0]]), np.zeros(1), np.array([2.0]), 0.0)
    x = 0.7
    expect = 1.0 / (1.0 + np.exp(-2.0 * x))
    assert mlp_forward(m, FeatureVector(np.array([x]))) == pytest.approx(expect)


def test_mlp_loss_is_binary_cross_entropy():
    m = MlpModel(np.zeros((2, 1)), np.zeros(2), np.zeros(2), 0.0)
    # p = 0.5 either label -> loss = ln 2
    assert mlp_loss(m, sample([1.0], 1)) == pytest.approx(np.log(2.0))
    assert mlp_loss(m, sample([1.0], 0)) == pytest.approx(np.log(2.0))


def test_mlp_learns_xor():
    data = [sample([0.0, 0.0], 0), sample([0.0, 1.0], 1),
            sample([1.0, 0.0], 1), sample([1.0, 1.0], 0)]
    model = mlp_train(data, TrainConfig(epochs=2000, learning_rate=0.5, seed=1),
                      hidden_dim=8)
    preds = [1 if mlp_forward(model, s.features) >= 0.5 else 0 for s in data]
    assert preds == [s.label for s in data]


def test_mlp_training_reduces_loss(rng):
    samples = blob_samples(rng, n=20)
    before = MlpModel(
        np.zeros((8, 4)), np.zeros(8), np.zeros(8), 0.0)
    base = np.mean([mlp_loss(before, s) for s in samples])
    model = mlp_train(samples, TrainConfig(epochs=30, learning_rate=0.1, seed=5),
                      hidden_dim=8)
    after = np.mean([mlp_loss(model, s) for s in samples])
    assert after < base


def test_mlp_train_deterministic(rng):
    samples = blob_samples(rng, n=16)
    cfg = TrainConfig(epochs=10, learning_rate=0.1, seed=21)
    a = mlp_train(samples, cfg, hidden_dim=6)
    b = mlp_train(samples, cfg, hidden_dim=6)
    assert np.array_equal(a.hidden_weights, b.hidden_weights)
    assert np.array_equal(a.output_weights, b.output_weights)


# --- gradient checking -----------------------------------------------------------

def test_gradient_check_svm_far_from_kink():
    m = LinearSvmModel(np.array([1.0, -0.5]), 0.25, lam=0.01)
    s = sample([2.0, 1.0], 1)  # margin 1.75
    assert gradient_check(m, s) < 1e-8


def test_gradient_check_svm_active_side():
    m = LinearSvmModel(np.array([0.3, 0.1]), -0.2, lam=0.05)
    s = sample([0.5, -0.5], 1)  # margin well below 1
    assert gradient_check(m, s) < 1e-8


def test_gradient_check_svm_kink_raises():
    m = LinearSvmModel(np.array([1.0]), 0.0)
    with pytest.raises(KinkProximity):
        gradient_check(m, sample([1.0], 1))  # margin exactly 1


def test_gradient_check_mlp_random_models(rng):
    for _ in range(10):
        m = MlpModel(rng.normal(0, 0.5, (5, 3)), rng.normal(0, 0.5, 5),
                     rng.normal(0, 0.5, 5), float(rng.normal()))
        s = sample(rng.normal(0, 1, 3), int(rng.integers(0, 2)))
        assert gradient_check(m, s) < 1e-4


def test_gradient_check_eps_validated():
    m = LinearSvmModel(np.array([1.0]), 0.0)
    with pytest.raises(ValueError):
        gradient_check(m, sample([5.0], 1), eps=0.0)


# --- model persistence -----------------------------------------------------------

def scaling(dim):
    return ScalingParams(np.zeros(dim), np.ones(dim))


def test_svm_model_roundtrip_bit_exact(tmp_path, rng):
    m = LinearSvmModel(rng.normal(0, 1, 6), float(rng.normal()), lam=1e-3)
    mf = ModelFile("svm", m, "dctlbp", scaling(6))
    path = tmp_path / "model.tlm"
    save_model(mf, path)
    back = load_model(path)
    assert back.kind == "svm" and back.pipeline_id == "dctlbp"
    assert np.array_equal(back.model.weights, m.weights)
    assert back.model.bias == m.bias and back.model.lam == m.lam
    assert np.array_equal(back.scaling.lo, mf.scaling.lo)
    assert np.array_equal(back.scaling.hi, mf.scaling.hi)


def test_mlp_model_roundtrip_bit_exact(tmp_path, rng):
    m = MlpModel(rng.normal(0, 1, (4, 3)), rng.normal(0, 1, 4),
                 rng.normal(0, 1, 4), float(rng.normal()))
    mf = ModelFile("mlp", m, "ela", scaling(3))
    path = tmp_path / "model.tlm"
    save_model(mf, path)
    back = load_model(path)
    assert np.array_equal(back.model.hidden_weights, m.hidden_weights)
    assert np.array_equal(back.model.hidden_bias, m.hidden_bias)
    assert np.array_equal(back.model.output_weights, m.output_weights)
    assert back.model.output_bias == m.output_bias


def test_save_is_byte_stable(tmp_path, rng):
    m = LinearSvmModel(rng.normal(0, 1, 5), 0.123)
    mf = ModelFile("svm", m, "dctlbp", scaling(5))
    p1, p2 = tmp_path / "a.tlm", tmp_path / "b.tlm"
    save_model(mf, p1)
    save_model(mf, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_load_rejects_wrong_magic(tmp_path):
    path = tmp_path / "bad.tlm"
    path.write_text("some-other-format 9\nkind svm\n")
    with pytest.raises(FormatVersionMismatch):
        load_model(path)


def test_load_rejects_corrupted_body(tmp_path, rng):
    m = LinearSvmModel(rng.normal(0, 1, 4), 0.0)
    path = tmp_path / "model.tlm"
    save_model(ModelFile("svm", m, "dctlbp", scaling(4)), path)
    lines = path.read_text().splitlines()
    weights_at = next(i for i, ln in enumerate(lines) if ln.startswith("weights"))
    parts = lines[weights_at].split()
    parts[1] = "0.5" if parts[1] != "0.5" else "0.25"
    lines[weights_at] = " ".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ChecksumMismatch):
        load_model(path)


def test_model_predict_applies_scaling():
    # weights on raw scale would misclassify; scaling maps 5 -> 0.5
    m = LinearSvmModel(np.array([2.0]), -0.5)
    p = ScalingParams(np.array([0.0]), np.array([10.0]))
    mf = ModelFile("svm", m, "dctlbp", p)
    label, score = model_predict(mf, FeatureVector(np.array([5.0])))
    assert score == pytest.approx(0.5)
    assert label == 1


def test_model_predict_mlp_score_is_probability(rng):
    m = MlpModel(rng.normal(0, 1, (4, 2)), rng.normal(0, 1, 4),
                 rng.normal(0, 1, 4), 0.0)
    mf = ModelFile("mlp", m, "ela", scaling(2))
    label, score = model_predict(mf, FeatureVector(np.array([3.0, 7.0])))
    assert 0.0 <= score <= 1.0
    assert label == (1 if score >= 0.5 else 0)
