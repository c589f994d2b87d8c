"""tamperlab: image-forgery detection and tamper-mask localization.

Detection pipelines pair a feature family (error-level analysis or
DCT-over-LBP texture statistics) with a from-scratch classifier (linear
SVM or one-hidden-layer MLP); localization thresholds the ELA heatmap
into a binary 128x128 tamper mask. Everything is deterministic under a
seed, including corpus synthesis.
"""

from tamperlab.backend import backend_name
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
from tamperlab.dataset import (
    CorpusIndex,
    ForgeryParams,
    SampleRecord,
    ablate,
    augment,
    empty_mask,
    generate_corpus,
    read_manifest,
    scan_corpus,
    split,
    synth_copy_move,
    synth_splice,
    synthetic_photo,
    write_manifest,
)
from tamperlab.ela import ElaConfig, compute_ela, ela_feature_vector
from tamperlab.eval import (
    ConfusionMatrix,
    EvalReport,
    confusion,
    format_report_table,
    report_csv,
    scores,
)
from tamperlab.features import (
    DctLbpConfig,
    FeatureVector,
    ScalingParams,
    apply_scaling,
    chroma_red,
    dct2,
    dct_lbp_features,
    fit_scaling,
    idct2,
    lbp_code,
    lbp_map,
)
from tamperlab.imaging import (
    RasterImage,
    abs_diff,
    affine_warp,
    box_blur,
    decode_image,
    encode_jpeg,
    flip,
    read_image,
    resize_bilinear,
    to_grayscale,
    validate_quality,
    write_png,
)
from tamperlab.localize import (
    LocalizeConfig,
    TamperMask,
    filter_small_components,
    load_mask,
    mask_iou,
    mask_pixel_f1,
    morph_close,
    morph_open,
    otsu_threshold,
    predict_mask,
    save_mask,
)

__version__ = "0.1.0"
