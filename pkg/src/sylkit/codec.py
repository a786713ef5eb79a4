"""Bit-exact duration-informed token coding and coding-efficiency arithmetic.

A frame-resolution token sequence is run-length encoded into records of

    token field  ceil(log2(V+1)) bits   ids 0..V-1; id V is the silence token
    duration     4 bits                 stored d-1 for d in 1..16 frames
    gap          3 bits                 0..7 following silence frames

Speech runs longer than 16 frames split into consecutive records of the
same token. A silence run after speech is stored in the gap field when it
fits (<= 7 frames); longer runs, and any leading silence, are emitted as
silence-token records. Bits are packed MSB-first and zero-padded to a byte.

SYLB stream layout (little-endian):
    "SYLB" | version u32=1 | vocab u32 | frame_rate f32 | n_records u32 |
    n_frames u32 | packed payload
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    FrameCountMismatchError,
    InvariantViolationError,
    MalformedHeaderError,
    TokenOutOfRangeError,
    TruncatedDataError,
)
from .types import Segment, Segmentation

BITSTREAM_MAGIC = b"SYLB"
FORMAT_VERSION = 1
SILENCE = -1
MAX_RUN = 16  # 4-bit duration field
MAX_GAP = 7  # 3-bit gap field

_STREAM_HEADER = struct.Struct("<4sIIfII")


def token_field_bits(vocab_size: int) -> int:
    """Physical width of the token field: ceil(log2(V+1)) for ids 0..V."""
    if vocab_size < 1:
        raise ValueError(f"vocab_size must be >= 1, got {vocab_size}")
    return int(vocab_size).bit_length()


@dataclass(frozen=True, eq=False)
class FrameTokenSequence:
    """Per-frame symbols: -1 for silence, otherwise a token id < vocab_size."""

    symbols: np.ndarray
    frame_rate_hz: float
    vocab_size: int

    def __post_init__(self):
        arr = np.array(self.symbols, dtype=np.int64, copy=True)
        if arr.ndim != 1:
            raise InvariantViolationError("symbols must be 1-D")
        if self.vocab_size < 1:
            raise InvariantViolationError("vocab_size must be >= 1")
        if arr.size and (arr.min() < SILENCE or arr.max() >= self.vocab_size):
            raise InvariantViolationError(
                f"symbols must lie in {{-1}} U [0, {self.vocab_size})"
            )
        if not self.frame_rate_hz > 0:
            raise InvariantViolationError("frame_rate_hz must be positive")
        arr.flags.writeable = False
        object.__setattr__(self, "symbols", arr)

    @property
    def n_frames(self) -> int:
        return self.symbols.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameTokenSequence):
            return NotImplemented
        return (
            self.vocab_size == other.vocab_size
            and self.frame_rate_hz == other.frame_rate_hz
            and np.array_equal(self.symbols, other.symbols)
        )


@dataclass(frozen=True)
class TokenBitstream:
    """Immutable encoded stream; `payload` is the packed record bits."""

    vocab_size: int
    frame_rate_hz: float
    n_records: int
    n_frames: int
    payload: bytes

    @property
    def record_bits(self) -> int:
        return token_field_bits(self.vocab_size) + 7

    @property
    def payload_bits(self) -> int:
        """Meaningful bits before byte padding."""
        return self.n_records * self.record_bits

    def to_bytes(self) -> bytes:
        header = _STREAM_HEADER.pack(
            BITSTREAM_MAGIC,
            FORMAT_VERSION,
            self.vocab_size,
            self.frame_rate_hz,
            self.n_records,
            self.n_frames,
        )
        return header + self.payload

    @classmethod
    def from_bytes(cls, blob: bytes) -> "TokenBitstream":
        if len(blob) < 4 or blob[:4] != BITSTREAM_MAGIC:
            raise BadMagicError(f"expected {BITSTREAM_MAGIC!r} magic")
        if len(blob) < _STREAM_HEADER.size:
            raise TruncatedDataError("stream shorter than SYLB header")
        _, version, vocab, rate, n_records, n_frames = _STREAM_HEADER.unpack_from(blob)
        if version != FORMAT_VERSION:
            raise MalformedHeaderError(f"unsupported version {version}")
        if vocab < 1:
            raise MalformedHeaderError("vocab_size must be >= 1")
        payload = blob[_STREAM_HEADER.size :]
        need = (n_records * (token_field_bits(vocab) + 7) + 7) // 8
        if len(payload) < need:
            raise TruncatedDataError(f"payload holds {len(payload)} bytes, need {need}")
        if len(payload) > need:
            raise MalformedHeaderError(f"{len(payload) - need} trailing payload bytes")
        return cls(vocab, rate, n_records, n_frames, payload)


class _BitWriter:
    """MSB-first bit packer."""

    def __init__(self):
        self._out = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, nbits: int) -> None:
        self._acc = (self._acc << nbits) | (value & ((1 << nbits) - 1))
        self._nbits += nbits
        while self._nbits >= 8:
            self._nbits -= 8
            self._out.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    def to_bytes(self) -> bytes:
        out = bytes(self._out)
        if self._nbits:
            out += bytes([(self._acc << (8 - self._nbits)) & 0xFF])
        return out


class _BitReader:
    """MSB-first bit unpacker."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def read(self, nbits: int) -> int:
        end = self._pos + nbits
        if end > len(self._data) * 8:
            raise TruncatedDataError("bit payload exhausted")
        value = 0
        pos = self._pos
        while pos < end:
            byte = self._data[pos >> 3]
            take = min(8 - (pos & 7), end - pos)
            shift = 8 - (pos & 7) - take
            value = (value << take) | ((byte >> shift) & ((1 << take) - 1))
            pos += take
        self._pos = end
        return value


def _runs(symbols: np.ndarray) -> list[tuple[int, int]]:
    """Maximal (value, length) runs of a symbol vector."""
    if symbols.size == 0:
        return []
    change = np.flatnonzero(np.diff(symbols)) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [symbols.size]))
    return [(int(symbols[s]), int(e - s)) for s, e in zip(starts, ends)]


def _chunks(length: int) -> list[int]:
    out = [MAX_RUN] * (length // MAX_RUN)
    if length % MAX_RUN:
        out.append(length % MAX_RUN)
    return out


def build_records(seq: FrameTokenSequence) -> list[tuple[int, int, int]]:
    """Run-length records (token, duration, gap); token == vocab_size is silence."""
    records: list[list[int]] = []
    for idx, (sym, length) in enumerate(_runs(seq.symbols)):
        if sym != SILENCE:
            for dur in _chunks(length):
                records.append([sym, dur, 0])
        elif idx == 0 or length > MAX_GAP:
            for dur in _chunks(length):
                records.append([seq.vocab_size, dur, 0])
        else:
            records[-1][2] = length  # tag silence onto the preceding speech record
    return [tuple(r) for r in records]


def encode(seq: FrameTokenSequence) -> TokenBitstream:
    """Canonical encoding: equal sequences produce byte-identical streams."""
    records = build_records(seq)
    bits = token_field_bits(seq.vocab_size)
    writer = _BitWriter()
    for token, duration, gap in records:
        writer.write(token, bits)
        writer.write(duration - 1, 4)
        writer.write(gap, 3)
    return TokenBitstream(
        seq.vocab_size, seq.frame_rate_hz, len(records), seq.n_frames, writer.to_bytes()
    )


def parse_records(bs: TokenBitstream) -> list[tuple[int, int, int]]:
    """Unpack (token, duration, gap) records, validating fields and padding."""
    bits = token_field_bits(bs.vocab_size)
    reader = _BitReader(bs.payload)
    records = []
    for i in range(bs.n_records):
        token = reader.read(bits)
        if token > bs.vocab_size:
            raise TokenOutOfRangeError(
                f"record {i}: token {token} exceeds silence id {bs.vocab_size}"
            )
        duration = reader.read(4) + 1
        gap = reader.read(3)
        records.append((token, duration, gap))
    pad_bits = len(bs.payload) * 8 - bs.payload_bits
    if pad_bits and reader.read(pad_bits) != 0:
        raise MalformedHeaderError("non-zero padding bits")
    return records


def decode(bs: TokenBitstream) -> FrameTokenSequence:
    """Inverse of :func:`encode`; exact at frame resolution."""
    pieces = []
    for token, duration, gap in parse_records(bs):
        value = SILENCE if token == bs.vocab_size else token
        pieces.append(np.full(duration, value, dtype=np.int64))
        if gap:
            pieces.append(np.full(gap, SILENCE, dtype=np.int64))
    symbols = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)
    if symbols.size != bs.n_frames:
        raise FrameCountMismatchError(
            f"decoded {symbols.size} frames, header says {bs.n_frames}"
        )
    return FrameTokenSequence(symbols, bs.frame_rate_hz, bs.vocab_size)


def read_bitstream(path) -> TokenBitstream:
    return TokenBitstream.from_bytes(Path(path).read_bytes())


def write_bitstream(bs: TokenBitstream, path) -> None:
    Path(path).write_bytes(bs.to_bytes())


def frame_tokens_from_segmentation(seg: Segmentation, vocab_size: int) -> FrameTokenSequence:
    """Expand a tokenized segmentation to per-frame symbols (-1 in the gaps)."""
    symbols = np.full(seg.n_frames, SILENCE, dtype=np.int64)
    for i, s in enumerate(seg.segments):
        if s.token_id is None:
            raise ValueError(f"segment {i} has no token_id")
        if s.token_id >= vocab_size:
            raise TokenOutOfRangeError(
                f"segment {i}: token {s.token_id} >= vocab_size {vocab_size}"
            )
        symbols[s.start_frame : s.end_frame] = s.token_id
    return FrameTokenSequence(symbols, seg.frame_rate_hz, vocab_size)


def segmentation_from_frame_tokens(seq: FrameTokenSequence,
                                   utterance_id: str = "") -> Segmentation:
    """Collapse per-frame symbols into maximal same-token segments."""
    segments = []
    pos = 0
    for sym, length in _runs(seq.symbols):
        if sym != SILENCE:
            segments.append(Segment(pos, pos + length, token_id=sym))
        pos += length
    return Segmentation(tuple(segments), seq.n_frames, seq.frame_rate_hz, utterance_id)


def tokens_per_second(x, include_silence_tokens: bool = False) -> float:
    """Emitted tokens divided by total audio duration (n_frames / frame_rate).

    For a Segmentation each segment is one token. For a FrameTokenSequence
    or TokenBitstream, tokens are the encoded records; silence-token records
    count only when the flag is set.
    """
    if isinstance(x, Segmentation):
        count = len(x.segments)
        n_frames, rate = x.n_frames, x.frame_rate_hz
    elif isinstance(x, FrameTokenSequence):
        count = count_tokens(build_records(x), x.vocab_size, include_silence_tokens)
        n_frames, rate = x.n_frames, x.frame_rate_hz
    elif isinstance(x, TokenBitstream):
        count = count_tokens(parse_records(x), x.vocab_size, include_silence_tokens)
        n_frames, rate = x.n_frames, x.frame_rate_hz
    else:
        raise TypeError(f"unsupported input type {type(x).__name__}")
    if n_frames == 0:
        raise ValueError("cannot compute tokens per second of a zero-duration input")
    return count / (n_frames / rate)


def count_tokens(records, vocab_size: int, include_silence: bool = False) -> int:
    """Number of emitted tokens in a record list; silence records are optional."""
    if include_silence:
        return len(records)
    return sum(1 for token, _, _ in records if token != vocab_size)


def bitrate(vocab_size: int, tokens_per_sec: float) -> float:
    """Information-theoretic rate log2(V) * Tok/s (not the physical field width)."""
    if vocab_size < 1:
        raise ValueError(f"vocab_size must be >= 1, got {vocab_size}")
    return math.log2(vocab_size) * tokens_per_sec


def duration_informed_bitrate(vocab_size: int, tokens_per_sec: float) -> float:
    """Bitrate with the 4-bit duration and 3-bit gap fields: (log2(V) + 7) * Tok/s."""
    if vocab_size < 1:
        raise ValueError(f"vocab_size must be >= 1, got {vocab_size}")
    return (math.log2(vocab_size) + 7.0) * tokens_per_sec


def coding_rate(wer_percent: float, total_words: int, total_bits: float) -> float:
    """Correctly transmitted words per bit: (1 - WER/100) * words / bits."""
    if not 0.0 <= wer_percent <= 100.0:
        raise ValueError(f"wer_percent must lie in [0, 100], got {wer_percent}")
    if total_words < 0:
        raise ValueError("total_words must be non-negative")
    if not total_bits > 0:
        raise ValueError("total_bits must be positive")
    return (1.0 - wer_percent / 100.0) * total_words / total_bits
