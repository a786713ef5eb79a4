import struct

import numpy as np
import pytest

from sylkit import (
    Alignment,
    AlignmentEntry,
    Codebook,
    FrameSequence,
    Segment,
    Segmentation,
    read_alignment,
    read_codebook,
    read_frames,
    read_segmentation,
    read_segmentation_corpus,
    write_alignment,
    write_codebook,
    write_frames,
    write_segmentation,
    write_segmentation_corpus,
)
from sylkit.errors import MalformedHeaderError, NonFiniteValueError, TruncatedDataError


def sylf_bytes(dim, n_frames, rate, values):
    header = struct.pack("<4sIIIf", b"SYLF", 1, dim, n_frames, rate)
    return header + struct.pack(f"<{len(values)}f", *values)


def test_read_frames_hand_built_file(tmp_path):
    path = tmp_path / "u1.sylf"
    path.write_bytes(sylf_bytes(2, 3, 50.0, [1, 0, 0, 1, 1, 1]))
    seq = read_frames(path)
    assert (seq.n_frames, seq.dim) == (3, 2)
    assert seq.frame_rate_hz == 50.0
    assert seq.utterance_id == "u1"
    np.testing.assert_array_equal(seq.data[2], [1.0, 1.0])


def test_read_frames_empty(tmp_path):
    path = tmp_path / "empty.sylf"
    path.write_bytes(sylf_bytes(4, 0, 50.0, []))
    seq = read_frames(path)
    assert seq.n_frames == 0
    assert seq.dim == 4


def test_read_frames_truncated(tmp_path):
    path = tmp_path / "cut.sylf"
    blob = sylf_bytes(2, 3, 50.0, [1, 0, 0, 1, 1, 1])
    path.write_bytes(blob[:-4])
    with pytest.raises(TruncatedDataError):
        read_frames(path)


def test_read_frames_bad_magic_and_version(tmp_path):
    path = tmp_path / "bad.sylf"
    path.write_bytes(b"NOPE" + sylf_bytes(1, 0, 50.0, [])[4:])
    with pytest.raises(MalformedHeaderError):
        read_frames(path)
    path.write_bytes(struct.pack("<4sIIIf", b"SYLF", 2, 1, 0, 50.0))
    with pytest.raises(MalformedHeaderError):
        read_frames(path)


def test_read_frames_trailing_bytes(tmp_path):
    path = tmp_path / "trail.sylf"
    path.write_bytes(sylf_bytes(1, 1, 50.0, [1.0]) + b"\x00")
    with pytest.raises(MalformedHeaderError):
        read_frames(path)


def test_read_frames_non_finite(tmp_path):
    path = tmp_path / "nan.sylf"
    path.write_bytes(sylf_bytes(1, 1, 50.0, [float("nan")]))
    with pytest.raises(NonFiniteValueError):
        read_frames(path)


def test_frames_round_trip_bytes_identical(tmp_path, rng):
    seq = FrameSequence(rng.normal(size=(7, 5)), 50.0, "rt")
    path = tmp_path / "rt.sylf"
    write_frames(seq, path)
    first = path.read_bytes()
    loaded = read_frames(path)
    assert loaded == seq
    write_frames(loaded, path)
    assert path.read_bytes() == first


def test_frames_empty_round_trip(tmp_path):
    seq = FrameSequence(np.zeros((0, 3)), 50.0, "empty")
    path = tmp_path / "empty.sylf"
    write_frames(seq, path)
    assert read_frames(path) == seq


def test_nan_input_rejected_before_write():
    with pytest.raises(NonFiniteValueError):
        FrameSequence(np.array([[np.inf, 1.0]]), 50.0)


def test_codebook_round_trip(tmp_path, rng):
    book = Codebook(rng.normal(size=(4, 3)))
    path = tmp_path / "book.sylc"
    write_codebook(book, path)
    assert read_codebook(path) == book


def test_codebook_reader_errors(tmp_path):
    path = tmp_path / "bad.sylc"
    path.write_bytes(b"SYLX" + struct.pack("<III", 1, 1, 1))
    with pytest.raises(MalformedHeaderError):
        read_codebook(path)
    path.write_bytes(struct.pack("<4sIII", b"SYLC", 1, 2, 2) + b"\x00" * 8)
    with pytest.raises(TruncatedDataError):
        read_codebook(path)


def test_alignment_read(tmp_path):
    path = tmp_path / "cat.ali"
    path.write_text("# syllables\n0.00\t0.31\tDH-AH\n0.31\t0.55\tK-AE-T\n")
    ali = read_alignment(path)
    assert len(ali) == 2
    assert ali.entries[0].label == "DH-AH"
    assert ali.utterance_id == "cat"


def test_alignment_rejects_out_of_order(tmp_path):
    path = tmp_path / "bad.ali"
    path.write_text("0.31\t0.55\tB\n0.00\t0.31\tA\n")
    with pytest.raises(Exception):
        read_alignment(path)


def test_alignment_round_trip(tmp_path):
    ali = Alignment(
        (AlignmentEntry(0.0, 0.125, "a"), AlignmentEntry(0.125, 0.5017, "b")), "x"
    )
    path = tmp_path / "x.ali"
    write_alignment(ali, path)
    assert read_alignment(path) == ali


def test_segmentation_round_trip(tmp_path):
    seg = Segmentation(
        (Segment(0, 3, token_id=12), Segment(5, 9), Segment(9, 11, token_id=0)),
        12,
        50.0,
        "utt-1",
    )
    path = tmp_path / "one.seg"
    write_segmentation(seg, path)
    assert read_segmentation(path) == seg


def test_segmentation_empty_round_trip(tmp_path):
    seg = Segmentation((), 40, 50.0, "silence")
    path = tmp_path / "empty.seg"
    write_segmentation(seg, path)
    assert read_segmentation(path) == seg


def test_segmentation_corpus_round_trip(tmp_path, rng):
    corpus = []
    for i in range(5):
        spans = sorted(rng.choice(50, size=6, replace=False).tolist())
        segments = tuple(
            Segment(spans[2 * j], spans[2 * j + 1], token_id=int(rng.integers(100)))
            for j in range(3)
        )
        corpus.append(Segmentation(segments, 50, 50.0, f"utt{i}"))
    path = tmp_path / "corpus.seg"
    write_segmentation_corpus(corpus, path)
    assert read_segmentation_corpus(path) == corpus


def test_read_segmentation_requires_single_line(tmp_path):
    path = tmp_path / "two.seg"
    write_segmentation_corpus(
        [Segmentation((), 1, 50.0, "a"), Segmentation((), 1, 50.0, "b")], path
    )
    with pytest.raises(MalformedHeaderError):
        read_segmentation(path)


def test_segmentation_reader_rejects_overlap(tmp_path):
    path = tmp_path / "bad.seg"
    path.write_text("u\t10\t50.0\t0:5;3:8\n")
    with pytest.raises(Exception):
        read_segmentation(path)
