"""Segment-distillation math, verified at desk scale.

Speech frames regress onto their segment's teacher average; non-speech
frames regress to zero. The loss is the unnormalized sum of squared errors
over all frames, accumulated in float64 regardless of storage precision.

Feature arguments may be FrameSequence values or raw (n_frames, dim) float
matrices; raw matrices stay at full float64 precision, which the gradient
checks rely on.
"""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatchError, ShapeMismatchError
from .types import FrameSequence, Segmentation
from .validation import as_float_matrix, as_float_vector

NON_SPEECH = -1


def _features(x, name: str) -> np.ndarray:
    if isinstance(x, FrameSequence):
        return x.data.astype(np.float64)
    return as_float_matrix(x, name)


def build_assignment(seg: Segmentation) -> np.ndarray:
    """Per-frame segment index; -1 marks non-speech frames."""
    assignment = np.full(seg.n_frames, NON_SPEECH, dtype=np.int64)
    for j, s in enumerate(seg.segments):
        assignment[s.start_frame : s.end_frame] = j
    return assignment


def segment_averages(seq, seg: Segmentation) -> np.ndarray:
    """Arithmetic mean of the frames inside each segment, shape (n_segments, dim)."""
    data = _features(seq, "features")
    if seg.n_frames != data.shape[0]:
        raise ShapeMismatchError(
            f"segmentation covers {seg.n_frames} frames, sequence has {data.shape[0]}"
        )
    if not seg.segments:
        return np.zeros((0, data.shape[1]), dtype=np.float64)
    return np.stack([data[s.start_frame : s.end_frame].mean(axis=0) for s in seg.segments])


def _targets(teacher: np.ndarray, seg: Segmentation) -> np.ndarray:
    averages = segment_averages(teacher, seg)
    assignment = build_assignment(seg)
    targets = np.zeros(teacher.shape, dtype=np.float64)
    speech = assignment >= 0
    targets[speech] = averages[assignment[speech]]
    return targets


def seg_distill_loss(student, teacher, seg: Segmentation) -> tuple[float, np.ndarray]:
    """Sum-of-squares regression loss and its gradient w.r.t. the student.

    target_i is the teacher segment average for speech frames and the zero
    vector for non-speech frames; gradient_i = 2 (student_i - target_i).
    """
    student = _features(student, "student")
    teacher = _features(teacher, "teacher")
    if student.shape != teacher.shape:
        raise ShapeMismatchError(
            f"student shape {student.shape} != teacher shape {teacher.shape}"
        )
    if seg.n_frames != teacher.shape[0]:
        raise ShapeMismatchError(
            f"segmentation covers {seg.n_frames} frames, features have {teacher.shape[0]}"
        )
    diff = student - _targets(teacher, seg)
    loss = float(np.einsum("ij,ij->", diff, diff))
    return loss, 2.0 * diff


def mean_seg_distill_loss(student, teacher, seg: Segmentation) -> float:
    """Per-frame mean of :func:`seg_distill_loss`, for reporting."""
    loss, _ = seg_distill_loss(student, teacher, seg)
    n = _features(student, "student").shape[0]
    return loss / n if n else 0.0


def ema_update(teacher, student, decay: float) -> np.ndarray:
    """Exponential-moving-average step: decay * teacher + (1 - decay) * student."""
    if not 0.0 < decay < 1.0:
        raise ValueError(f"decay must lie in (0, 1), got {decay}")
    t = as_float_vector(teacher, "teacher")
    s = as_float_vector(student, "student")
    if t.shape != s.shape:
        raise LengthMismatchError(f"teacher length {t.size} != student length {s.size}")
    return decay * t + (1.0 - decay) * s
