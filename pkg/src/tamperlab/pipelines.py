"""End-to-end detection pipelines: feature family x classifier kind.

Both the train and evaluate entry points run through the same extraction
and prediction code here, so their metrics agree for the same split and
seed by construction.
"""

from tamperlab import classify, dataset
from tamperlab import eval as evalmod
from tamperlab.ela import ela_feature_vector
from tamperlab.features import apply_scaling, dct_lbp_features, fit_scaling

PIPELINES = ("ela-svm", "ela-mlp", "dctlbp-svm", "dctlbp-mlp")
FEATURE_FAMILIES = ("ela", "dctlbp")
ABLATIONS = ("none", "blur", "shear-rotate", "grayscale")


def feature_family(pipeline_id: str) -> str:
    if pipeline_id not in PIPELINES:
        raise ValueError(f"unknown pipeline {pipeline_id!r}; expected one of {PIPELINES}")
    return pipeline_id.rsplit("-", 1)[0]


def classifier_kind(pipeline_id: str) -> str:
    if pipeline_id not in PIPELINES:
        raise ValueError(f"unknown pipeline {pipeline_id!r}; expected one of {PIPELINES}")
    return pipeline_id.rsplit("-", 1)[1]


def extract_features(img, family: str):
    """Unscaled feature vector of one image for a feature family."""
    if family == "ela":
        return ela_feature_vector(img)
    if family == "dctlbp":
        return dct_lbp_features(img)
    raise ValueError(f"unknown feature family {family!r}; expected one of {FEATURE_FAMILIES}")


def extract_corpus(corpus, family: str):
    """(ids, unscaled vectors, labels) for every record, in index order."""
    ids, vectors, labels = [], [], []
    for record in corpus.records:
        img = dataset.load_sample_image(corpus.root, record)
        ids.append(_record_id(record))
        vectors.append(extract_features(img, family))
        labels.append(record.label)
    return ids, vectors, labels


def _record_id(record) -> str:
    if record.provenance in (dataset.PROVENANCE_REAL, dataset.PROVENANCE_COPY_MOVE,
                             dataset.PROVENANCE_SPLICE):
        return record.image_path
    return f"{record.image_path}#{record.provenance}"


def apply_corpus_variant(corpus, ablation: str, seed: int = 0):
    """Map an ablation tag onto the dataset ops: 'blur' and 'grayscale'
    replace images in place, 'shear-rotate' adds augmented variants."""
    if ablation in (None, "none"):
        return corpus
    if ablation == "blur":
        return dataset.ablate(corpus, "blur(3)")
    if ablation == "grayscale":
        return dataset.ablate(corpus, "grayscale")
    if ablation == "shear-rotate":
        return dataset.augment(corpus, ("rotate", "shear"), seed)
    raise ValueError(f"unknown ablation {ablation!r}; expected one of {ABLATIONS}")


def train_run(corpus, pipeline_id: str, cfg, val_fraction: float = 0.2,
              ablation: str = "none", hidden_dim: int = 64):
    """Scan-to-model pipeline: corpus variant -> stratified split ->
    feature extraction -> scaling fitted on the train side only ->
    classifier training -> reports on both sides.

    Returns (model_file, train_report, val_report, val_index).
    """
    family = feature_family(pipeline_id)
    kind = classifier_kind(pipeline_id)
    working = apply_corpus_variant(corpus, ablation, cfg.seed)
    train_idx, val_idx = dataset.split(working, val_fraction, cfg.seed)

    _, train_vecs, train_labels = extract_corpus(train_idx, family)
    _, val_vecs, val_labels = extract_corpus(val_idx, family)

    scaling = fit_scaling(train_vecs)
    train_samples = [
        classify.LabeledSample(apply_scaling(v, scaling), y)
        for v, y in zip(train_vecs, train_labels)
    ]
    if kind == classify.KIND_SVM:
        model = classify.svm_train(train_samples, cfg)
    else:
        model = classify.mlp_train(train_samples, cfg, hidden_dim=hidden_dim)
    mf = classify.ModelFile(kind=kind, model=model, pipeline_id=pipeline_id, scaling=scaling)

    train_preds = [classify.model_predict(mf, v)[0] for v in train_vecs]
    val_preds = [classify.model_predict(mf, v)[0] for v in val_vecs]
    train_report = evalmod.scores(
        evalmod.confusion(train_preds, train_labels), pipeline_id, ablation
    )
    val_report = evalmod.scores(
        evalmod.confusion(val_preds, val_labels), pipeline_id, ablation
    )
    return mf, train_report, val_report, val_idx


def evaluate_model(mf, corpus, ablation: str = "none", seed: int = 0):
    """Predict every record of (a variant of) a corpus with a trained
    model; returns (EvalReport, ids, predictions)."""
    family = feature_family(mf.pipeline_id)
    working = apply_corpus_variant(corpus, ablation, seed)
    ids, vectors, labels = extract_corpus(working, family)
    preds = [classify.model_predict(mf, v)[0] for v in vectors]
    report = evalmod.scores(evalmod.confusion(preds, labels), mf.pipeline_id, ablation)
    return report, ids, preds
