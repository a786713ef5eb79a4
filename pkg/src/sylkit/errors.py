"""Exception hierarchy. Every contract violation maps to a named error."""


class SylkitError(Exception):
    """Base class for all sylkit errors."""


class InvariantViolationError(SylkitError, ValueError):
    """A domain value would violate one of its structural invariants."""


# --- binary / text readers ---

class MalformedHeaderError(SylkitError):
    """File header has a bad magic, unsupported version, or trailing junk."""


class TruncatedDataError(SylkitError):
    """Payload is shorter than the header promises."""


class NonFiniteValueError(SylkitError):
    """NaN or infinity where only finite floats are allowed."""


# --- segmentation ---

class ZeroNormFrameError(SylkitError):
    """A frame marked as speech has zero L2 norm; cosine is undefined."""


class NoRootInRangeError(SylkitError):
    """Gaussian equal-density equation has no solution between the means."""


class EmptyBatchError(SylkitError):
    """A statistics update was given an empty batch."""


# --- distillation ---

class ShapeMismatchError(SylkitError):
    """Student/teacher matrices or segmentation disagree on shape."""


class LengthMismatchError(SylkitError):
    """Parameter vectors have different lengths."""


# --- quantization ---

class TooFewPointsError(SylkitError):
    """Fewer training points than requested centroids."""


class MissingEmbeddingError(SylkitError):
    """A segment lacks the embedding required for token assignment."""


class DimMismatchError(SylkitError):
    """Embedding dimensionality differs from the codebook's."""


class TokenOutOfRangeError(SylkitError):
    """A token id is outside the codebook / bitstream vocabulary."""


class NotFittedError(SylkitError):
    """Estimator method called before fit()."""


class DegenerateDataWarning(UserWarning):
    """Training data is degenerate (e.g. all points identical)."""


# --- bitstream ---

class BadMagicError(SylkitError):
    """Bitstream does not start with the expected magic bytes."""


class FrameCountMismatchError(SylkitError):
    """Decoded frame total disagrees with the stream header."""


# --- metrics ---

class DegenerateCurveError(SylkitError):
    """A similarity curve is constant at its offset; probabilities undefined."""


class AllFramesGatedError(SylkitError):
    """No frame survives the norm gate; nothing to pool."""
