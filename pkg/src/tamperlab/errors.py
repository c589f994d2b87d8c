"""Exception types raised across the toolkit."""


class TamperlabError(Exception):
    """Base class for all tamperlab errors."""


# --- imaging / codec ---

class UnsupportedFormat(TamperlabError):
    """Input stream is not a supported image format."""


class CorruptStream(TamperlabError):
    """Image stream is truncated or otherwise undecodable."""


class EncodeFailure(TamperlabError):
    """Image could not be encoded (e.g. dimension overflow)."""


class InvalidQuality(TamperlabError):
    """JPEG quality outside [1, 100]."""


class InvalidKernel(TamperlabError):
    """Blur window size is even or below 3."""


class ShapeMismatch(TamperlabError):
    """Operands have different dimensions or channel counts."""


class TooSmall(TamperlabError):
    """Image is too small for the requested operation."""


# --- features / classifiers ---

class EmptySet(TamperlabError):
    """An operation received an empty collection."""


class LengthMismatch(TamperlabError):
    """Vectors have inconsistent lengths."""


class EmptyTrainingSet(TamperlabError):
    """Training requires at least one sample."""


class DimMismatch(TamperlabError):
    """Model and feature dimensions disagree."""


class KinkProximity(TamperlabError):
    """Gradient check requested at a hinge non-differentiability."""


# --- model files ---

class IoFailure(TamperlabError):
    """File could not be read or written."""


class FormatVersionMismatch(TamperlabError):
    """Model file magic or version not recognized."""


class ChecksumMismatch(TamperlabError):
    """Model file parameters fail checksum verification."""


# --- dataset ---

class MissingRoot(TamperlabError):
    """Corpus root directory does not exist."""


class EmptyCorpus(TamperlabError):
    """No samples found under the corpus root."""


class DegenerateSplit(TamperlabError):
    """A class would be absent from one side of the split."""


class ImageTooSmall(TamperlabError):
    """Image cannot accommodate the requested patch size."""
