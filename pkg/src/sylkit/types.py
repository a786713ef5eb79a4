"""Shared domain types.

All types are immutable after construction and validate their invariants
eagerly, so downstream code never sees an inconsistent value.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvariantViolationError, NonFiniteValueError
from .validation import check_finite


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Dense matrix of per-frame embeddings at a fixed frame rate.

    `data` is stored as a read-only row-major float32 matrix of shape
    (n_frames, dim); `frame_rate_hz` is rounded to float32 precision so
    that binary round trips are exact.
    """

    data: np.ndarray
    frame_rate_hz: float
    utterance_id: str = ""

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float32, order="C", copy=True)
        if arr.ndim != 2:
            raise InvariantViolationError(
                f"frame data must be 2-D (n_frames, dim), got shape {arr.shape}"
            )
        if arr.shape[1] < 1:
            raise InvariantViolationError("embedding dimensionality must be >= 1")
        if not np.isfinite(arr).all():
            raise NonFiniteValueError("frame data contains NaN or infinite values")
        rate = float(np.float32(self.frame_rate_hz))
        if not (rate > 0.0 and np.isfinite(rate)):
            raise InvariantViolationError(f"frame_rate_hz must be positive, got {self.frame_rate_hz}")
        object.__setattr__(self, "data", _readonly(arr))
        object.__setattr__(self, "frame_rate_hz", rate)

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def duration_sec(self) -> float:
        return self.n_frames / self.frame_rate_hz

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameSequence):
            return NotImplemented
        return (
            self.frame_rate_hz == other.frame_rate_hz
            and self.utterance_id == other.utterance_id
            and self.data.shape == other.data.shape
            and np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True, eq=False)
class Segment:
    """Half-open frame span [start_frame, end_frame), optionally embedded/tokenized."""

    start_frame: int
    end_frame: int
    embedding: np.ndarray | None = None
    token_id: int | None = None

    def __post_init__(self):
        if not (0 <= self.start_frame < self.end_frame):
            raise InvariantViolationError(
                f"segment span [{self.start_frame}, {self.end_frame}) is empty or negative"
            )
        if self.embedding is not None:
            emb = np.array(self.embedding, dtype=np.float64, copy=True)
            if emb.ndim != 1:
                raise InvariantViolationError("segment embedding must be a 1-D vector")
            check_finite(emb, "segment embedding")
            object.__setattr__(self, "embedding", _readonly(emb))
        if self.token_id is not None and self.token_id < 0:
            raise InvariantViolationError(f"token_id must be non-negative, got {self.token_id}")

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.start_frame

    def __eq__(self, other) -> bool:
        if not isinstance(other, Segment):
            return NotImplemented
        if (self.start_frame, self.end_frame, self.token_id) != (
            other.start_frame,
            other.end_frame,
            other.token_id,
        ):
            return False
        if (self.embedding is None) != (other.embedding is None):
            return False
        return self.embedding is None or np.array_equal(self.embedding, other.embedding)


@dataclass(frozen=True, eq=False)
class Segmentation:
    """Ordered, non-overlapping segments over an utterance.

    Frame indices are authoritative; seconds are derived via frame_rate_hz.
    Gaps between segments are non-speech.
    """

    segments: tuple[Segment, ...]
    n_frames: int
    frame_rate_hz: float
    utterance_id: str = ""

    def __post_init__(self):
        segs = tuple(self.segments)
        if self.n_frames < 0:
            raise InvariantViolationError("n_frames must be non-negative")
        if not (self.frame_rate_hz > 0 and np.isfinite(self.frame_rate_hz)):
            raise InvariantViolationError("frame_rate_hz must be positive")
        prev_end = 0
        for seg in segs:
            if seg.start_frame < prev_end:
                raise InvariantViolationError(
                    f"segments overlap or are unsorted near frame {seg.start_frame}"
                )
            if seg.end_frame > self.n_frames:
                raise InvariantViolationError(
                    f"segment end {seg.end_frame} exceeds n_frames={self.n_frames}"
                )
            prev_end = seg.end_frame
        object.__setattr__(self, "segments", segs)

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def duration_sec(self) -> float:
        return self.n_frames / self.frame_rate_hz

    def boundary_frames(self, exclude_edges: bool = True) -> np.ndarray:
        """Sorted unique segment boundary frame indices.

        With exclude_edges, drops boundaries at frame 0 and at n_frames
        (trivially correct for every system).
        """
        points = set()
        for seg in self.segments:
            points.add(seg.start_frame)
            points.add(seg.end_frame)
        if exclude_edges:
            points.discard(0)
            points.discard(self.n_frames)
        return np.array(sorted(points), dtype=np.int64)

    def boundary_seconds(self, exclude_edges: bool = True) -> np.ndarray:
        return self.boundary_frames(exclude_edges) / self.frame_rate_hz

    def with_embeddings(self, vectors: Sequence[np.ndarray]) -> "Segmentation":
        """Copy with per-segment embeddings attached (one vector per segment)."""
        if len(vectors) != len(self.segments):
            raise InvariantViolationError(
                f"got {len(vectors)} embeddings for {len(self.segments)} segments"
            )
        segs = tuple(replace(s, embedding=v) for s, v in zip(self.segments, vectors))
        return replace(self, segments=segs)

    def with_tokens(self, token_ids: Sequence[int]) -> "Segmentation":
        """Copy with per-segment token ids attached."""
        if len(token_ids) != len(self.segments):
            raise InvariantViolationError(
                f"got {len(token_ids)} token ids for {len(self.segments)} segments"
            )
        segs = tuple(replace(s, token_id=int(t)) for s, t in zip(self.segments, token_ids))
        return replace(self, segments=segs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Segmentation):
            return NotImplemented
        return (
            self.n_frames == other.n_frames
            and self.frame_rate_hz == other.frame_rate_hz
            and self.utterance_id == other.utterance_id
            and self.segments == other.segments
        )


class AlignmentEntry(NamedTuple):
    start_sec: float
    end_sec: float
    label: str


@dataclass(frozen=True)
class Alignment:
    """Ground-truth time-labelled spans (e.g. syllables), sorted and non-overlapping."""

    entries: tuple[AlignmentEntry, ...]
    utterance_id: str = ""

    def __post_init__(self):
        entries = tuple(AlignmentEntry(float(s), float(e), str(l)) for s, e, l in self.entries)
        prev_end = -np.inf
        for ent in entries:
            if not (np.isfinite(ent.start_sec) and np.isfinite(ent.end_sec)):
                raise NonFiniteValueError("alignment times must be finite")
            if not ent.start_sec < ent.end_sec:
                raise InvariantViolationError(
                    f"alignment entry [{ent.start_sec}, {ent.end_sec}] is empty or negative"
                )
            if ent.start_sec < prev_end:
                raise InvariantViolationError(
                    f"alignment entries overlap or are unsorted at {ent.start_sec}"
                )
            if not ent.label:
                raise InvariantViolationError("alignment labels must be non-empty")
            prev_end = ent.end_sec
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def boundary_seconds(self, duration_sec: float | None = None,
                         exclude_edges: bool = True) -> np.ndarray:
        """Sorted unique span boundaries in seconds.

        With exclude_edges, drops t=0 and, when `duration_sec` is known,
        t=duration (matching Segmentation.boundary_seconds semantics).
        """
        points = sorted({t for ent in self.entries for t in (ent.start_sec, ent.end_sec)})
        if exclude_edges:
            eps = 1e-9
            points = [t for t in points if t > eps]
            if duration_sec is not None:
                points = [t for t in points if abs(t - duration_sec) > eps]
        return np.array(points, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Codebook:
    """k-means centroids mapping embeddings to token ids and back."""

    centroids: np.ndarray

    def __post_init__(self):
        arr = np.array(self.centroids, dtype=np.float32, order="C", copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvariantViolationError(
                f"centroids must be a (k >= 1, dim >= 1) matrix, got shape {arr.shape}"
            )
        if not np.isfinite(arr).all():
            raise NonFiniteValueError("centroids contain NaN or infinite values")
        object.__setattr__(self, "centroids", _readonly(arr))

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Codebook):
            return NotImplemented
        return self.centroids.shape == other.centroids.shape and np.array_equal(
            self.centroids, other.centroids
        )


@dataclass(frozen=True)
class GaussianStats:
    """Running mean/std summary of a scalar distribution."""

    mean: float
    std: float
    count: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.mean) and np.isfinite(self.std)):
            raise NonFiniteValueError("Gaussian statistics must be finite")
        if self.std < 0:
            raise InvariantViolationError("std must be non-negative")
        if self.count < 0:
            raise InvariantViolationError("count must be non-negative")
        if self.count >= 2 and not self.std > 0:
            raise InvariantViolationError("std must be positive once count >= 2")
