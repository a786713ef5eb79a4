"""Readers/writers for the interchange formats.

Binary formats are little-endian with float32 payloads:

  SYLF frames:   "SYLF" | version u32=1 | dim u32 | n_frames u32 |
                 frame_rate f32 | payload n_frames*dim f32, row-major
  SYLC codebook: "SYLC" | version u32=1 | k u32 | dim u32 | payload k*dim f32

Text formats are UTF-8:

  alignment:     start_sec<TAB>end_sec<TAB>label, one span per line,
                 '#' starts a comment line
  segmentation:  utterance_id<TAB>n_frames<TAB>frame_rate<TAB>spans where
                 spans is ';'-joined "start:end" or "start:end:token",
                 one utterance per line
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import (
    InvariantViolationError,
    MalformedHeaderError,
    NonFiniteValueError,
    TruncatedDataError,
)
from .types import Alignment, AlignmentEntry, Codebook, FrameSequence, Segment, Segmentation

FRAMES_MAGIC = b"SYLF"
CODEBOOK_MAGIC = b"SYLC"
FORMAT_VERSION = 1

_FRAMES_HEADER = struct.Struct("<4sIIIf")
_CODEBOOK_HEADER = struct.Struct("<4sIII")


def _read_exact(path: Path) -> bytes:
    return Path(path).read_bytes()


def _payload_matrix(blob: bytes, offset: int, rows: int, cols: int, what: str) -> np.ndarray:
    need = rows * cols * 4
    if len(blob) - offset < need:
        raise TruncatedDataError(
            f"{what}: payload holds {len(blob) - offset} bytes, need {need}"
        )
    if len(blob) - offset > need:
        raise MalformedHeaderError(f"{what}: {len(blob) - offset - need} trailing bytes")
    flat = np.frombuffer(blob, dtype="<f4", count=rows * cols, offset=offset)
    return flat.reshape(rows, cols)


def read_frames(path, utterance_id: str | None = None) -> FrameSequence:
    """Read a SYLF file. utterance_id defaults to the file stem."""
    path = Path(path)
    blob = _read_exact(path)
    if len(blob) < _FRAMES_HEADER.size:
        raise TruncatedDataError(f"{path}: file shorter than SYLF header")
    magic, version, dim, n_frames, rate = _FRAMES_HEADER.unpack_from(blob)
    if magic != FRAMES_MAGIC:
        raise MalformedHeaderError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise MalformedHeaderError(f"{path}: unsupported version {version}")
    data = _payload_matrix(blob, _FRAMES_HEADER.size, n_frames, dim, str(path))
    if not np.isfinite(data).all():
        raise NonFiniteValueError(f"{path}: payload contains NaN or infinite values")
    if utterance_id is None:
        utterance_id = path.stem
    return FrameSequence(data, rate, utterance_id)


def write_frames(seq: FrameSequence, path) -> None:
    """Write a SYLF file; read_frames(write_frames(x)) is byte-exact."""
    header = _FRAMES_HEADER.pack(
        FRAMES_MAGIC, FORMAT_VERSION, seq.dim, seq.n_frames, seq.frame_rate_hz
    )
    payload = np.ascontiguousarray(seq.data, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def read_codebook(path) -> Codebook:
    """Read a SYLC file."""
    path = Path(path)
    blob = _read_exact(path)
    if len(blob) < _CODEBOOK_HEADER.size:
        raise TruncatedDataError(f"{path}: file shorter than SYLC header")
    magic, version, k, dim = _CODEBOOK_HEADER.unpack_from(blob)
    if magic != CODEBOOK_MAGIC:
        raise MalformedHeaderError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise MalformedHeaderError(f"{path}: unsupported version {version}")
    if k < 1:
        raise MalformedHeaderError(f"{path}: codebook must have k >= 1")
    centroids = _payload_matrix(blob, _CODEBOOK_HEADER.size, k, dim, str(path))
    if not np.isfinite(centroids).all():
        raise NonFiniteValueError(f"{path}: centroids contain NaN or infinite values")
    return Codebook(centroids)


def write_codebook(book: Codebook, path) -> None:
    header = _CODEBOOK_HEADER.pack(CODEBOOK_MAGIC, FORMAT_VERSION, book.k, book.dim)
    payload = np.ascontiguousarray(book.centroids, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def read_alignment(path, utterance_id: str | None = None) -> Alignment:
    """Read an alignment TSV. utterance_id defaults to the file stem."""
    path = Path(path)
    entries = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise MalformedHeaderError(
                f"{path}:{lineno}: expected start<TAB>end<TAB>label, got {len(fields)} fields"
            )
        try:
            start, end = float(fields[0]), float(fields[1])
        except ValueError as exc:
            raise MalformedHeaderError(f"{path}:{lineno}: non-numeric time field") from exc
        entries.append(AlignmentEntry(start, end, fields[2]))
    if utterance_id is None:
        utterance_id = path.stem
    return Alignment(tuple(entries), utterance_id)


def write_alignment(ali: Alignment, path) -> None:
    lines = [f"{e.start_sec!r}\t{e.end_sec!r}\t{e.label}" for e in ali.entries]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def _format_segmentation_line(seg: Segmentation) -> str:
    if "\t" in seg.utterance_id or "\n" in seg.utterance_id:
        raise InvariantViolationError("utterance_id must not contain tabs or newlines")
    spans = []
    for s in seg.segments:
        if s.token_id is None:
            spans.append(f"{s.start_frame}:{s.end_frame}")
        else:
            spans.append(f"{s.start_frame}:{s.end_frame}:{s.token_id}")
    return f"{seg.utterance_id}\t{seg.n_frames}\t{seg.frame_rate_hz!r}\t{';'.join(spans)}"


def _parse_segmentation_line(line: str, where: str) -> Segmentation:
    fields = line.split("\t")
    if len(fields) != 4:
        raise MalformedHeaderError(f"{where}: expected 4 tab-separated fields, got {len(fields)}")
    utt, n_frames_s, rate_s, spans_s = fields
    try:
        n_frames = int(n_frames_s)
        rate = float(rate_s)
    except ValueError as exc:
        raise MalformedHeaderError(f"{where}: bad n_frames or frame_rate") from exc
    segments = []
    if spans_s:
        for span in spans_s.split(";"):
            parts = span.split(":")
            if len(parts) not in (2, 3):
                raise MalformedHeaderError(f"{where}: bad span {span!r}")
            try:
                start, end = int(parts[0]), int(parts[1])
                token = int(parts[2]) if len(parts) == 3 else None
            except ValueError as exc:
                raise MalformedHeaderError(f"{where}: non-integer span field in {span!r}") from exc
            segments.append(Segment(start, end, token_id=token))
    return Segmentation(tuple(segments), n_frames, rate, utt)


def write_segmentation(seg: Segmentation, path) -> None:
    """Write a single-utterance segmentation file."""
    Path(path).write_text(_format_segmentation_line(seg) + "\n", encoding="utf-8")


def read_segmentation(path) -> Segmentation:
    """Read a segmentation file that must contain exactly one utterance."""
    segs = read_segmentation_corpus(path)
    if len(segs) != 1:
        raise MalformedHeaderError(f"{path}: expected exactly one utterance, found {len(segs)}")
    return segs[0]


def write_segmentation_corpus(segs, path) -> None:
    """Write one segmentation per line, preserving order."""
    lines = [_format_segmentation_line(s) for s in segs]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_segmentation_corpus(path) -> list[Segmentation]:
    path = Path(path)
    out = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip() or raw.startswith("#"):
            continue
        out.append(_parse_segmentation_line(raw, f"{path}:{lineno}"))
    return out
