import json

import numpy as np
import pytest

from helpers_synth import piecewise_sequence
from sylkit import (
    FrameSequence,
    frame_tokens_from_segmentation,
    read_codebook,
    read_frames,
    read_segmentation_corpus,
    write_alignment,
    write_frames,
)
from sylkit.cli import main
from sylkit.types import Alignment, AlignmentEntry


@pytest.fixture
def corpus(tmp_path, rng):
    """Three synthetic utterances written as SYLF files."""
    frames_dir = tmp_path / "frames"
    frames_dir.mkdir()
    sequences = {}
    for i in range(3):
        seq, spans = piecewise_sequence(
            rng, int(rng.integers(4, 8)), dim=16, utterance_id=f"utt{i}"
        )
        seq = FrameSequence(seq.data, seq.frame_rate_hz, f"utt{i}")
        write_frames(seq, frames_dir / f"utt{i}.sylf")
        sequences[f"utt{i}"] = (seq, spans)
    return frames_dir, sequences


def run(args):
    return main([str(a) for a in args])


def test_segment_command(tmp_path, corpus, capsys):
    frames_dir, sequences = corpus
    out = tmp_path / "corpus.seg"
    emb = tmp_path / "corpus.emb.sylf"
    rc = run(["segment", frames_dir, "--out", out, "--emb-out", emb])
    assert rc == 0
    segs = read_segmentation_corpus(out)
    assert [s.utterance_id for s in segs] == ["utt0", "utt1", "utt2"]
    for seg in segs:
        assert [(x.start_frame, x.end_frame) for x in seg.segments] == sequences[
            seg.utterance_id
        ][1]
    emb_seq = read_frames(emb)
    assert emb_seq.n_frames == sum(len(s) for s in segs)
    assert emb_seq.dim == 16


def test_segment_single_file_one_line(tmp_path, corpus):
    frames_dir, _ = corpus
    out = tmp_path / "one.seg"
    assert run(["segment", frames_dir / "utt1.sylf", "--out", out]) == 0
    assert len(out.read_text().splitlines()) == 1


def test_segment_empty_inputs_exit_zero(tmp_path):
    empty_dir = tmp_path / "empty"
    empty_dir.mkdir()
    out = tmp_path / "none.seg"
    assert run(["segment", empty_dir, "--out", out]) == 0
    assert out.read_text() == ""


def test_segment_partial_failure_exit_two(tmp_path, corpus, capsys):
    frames_dir, _ = corpus
    (frames_dir / "broken.sylf").write_bytes(b"JUNKJUNK")
    out = tmp_path / "partial.seg"
    rc = run(["segment", frames_dir, "--out", out])
    assert rc == 2
    assert len(read_segmentation_corpus(out)) == 3
    assert "broken.sylf" in capsys.readouterr().err


def test_segment_idempotent_outputs(tmp_path, corpus):
    frames_dir, _ = corpus
    out = tmp_path / "a.seg"
    run(["segment", frames_dir, "--out", out])
    first = out.read_bytes()
    run(["segment", frames_dir, "--out", out])
    assert out.read_bytes() == first


def full_pipeline(tmp_path, frames_dir, k=6, seed=3):
    seg_path = tmp_path / "corpus.seg"
    emb_path = tmp_path / "emb.sylf"
    book_path = tmp_path / "book.sylc"
    tok_path = tmp_path / "tokens.seg"
    enc_dir = tmp_path / "enc"
    assert run(["segment", frames_dir, "--out", seg_path, "--emb-out", emb_path]) == 0
    assert run(["train-kmeans", emb_path, "-k", k, "--seed", seed, "--out", book_path]) == 0
    assert run([
        "tokenize", frames_dir, "--segmentation", seg_path,
        "--codebook", book_path, "--out", tok_path,
    ]) == 0
    assert run(["encode", "--segmentation", tok_path, "--codebook", book_path,
                "--out-dir", enc_dir]) == 0
    return seg_path, book_path, tok_path, enc_dir


def test_full_pipeline_round_trip(tmp_path, corpus):
    frames_dir, _ = corpus
    seg_path, book_path, tok_path, enc_dir = full_pipeline(tmp_path, frames_dir)
    book = read_codebook(book_path)
    dec_path = tmp_path / "decoded.seg"
    assert run(["decode", enc_dir, "--codebook", book_path, "--out", dec_path]) == 0
    original = {s.utterance_id: s for s in read_segmentation_corpus(tok_path)}
    decoded = {s.utterance_id: s for s in read_segmentation_corpus(dec_path)}
    assert set(original) == set(decoded)
    for utt, seg in original.items():
        a = frame_tokens_from_segmentation(seg, book.k)
        b = frame_tokens_from_segmentation(decoded[utt], book.k)
        assert np.array_equal(a.symbols, b.symbols)


def test_train_kmeans_k1_is_mean(tmp_path, rng):
    frames_dir = tmp_path / "pts"
    frames_dir.mkdir()
    points = rng.normal(size=(40, 4))
    write_frames(FrameSequence(points, 50.0, "pts"), frames_dir / "pts.sylf")
    out = tmp_path / "book.sylc"
    assert run(["train-kmeans", frames_dir, "-k", 1, "--out", out]) == 0
    book = read_codebook(out)
    np.testing.assert_allclose(
        book.centroids[0],
        points.astype(np.float32).astype(np.float64).mean(axis=0),
        atol=1e-6,
    )


def test_train_kmeans_deterministic(tmp_path, corpus):
    frames_dir, _ = corpus
    emb = tmp_path / "emb.sylf"
    seg = tmp_path / "c.seg"
    run(["segment", frames_dir, "--out", seg, "--emb-out", emb])
    out1 = tmp_path / "b1.sylc"
    out2 = tmp_path / "b2.sylc"
    assert run(["train-kmeans", emb, "-k", 4, "--seed", 9, "--out", out1]) == 0
    assert run(["train-kmeans", emb, "-k", 4, "--seed", 9, "--out", out2]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_train_kmeans_too_few_points_exit_one(tmp_path, rng):
    frames_dir = tmp_path / "pts"
    frames_dir.mkdir()
    write_frames(FrameSequence(rng.normal(size=(3, 4)), 50.0), frames_dir / "p.sylf")
    rc = run(["train-kmeans", frames_dir, "-k", 10, "--out", tmp_path / "b.sylc"])
    assert rc == 1


def test_tokenize_missing_codebook_exit_one(tmp_path, corpus):
    frames_dir, _ = corpus
    seg = tmp_path / "c.seg"
    run(["segment", frames_dir, "--out", seg])
    rc = run([
        "tokenize", frames_dir, "--segmentation", seg,
        "--codebook", tmp_path / "missing.sylc", "--out", tmp_path / "t.seg",
    ])
    assert rc == 1


def test_decode_vocab_mismatch(tmp_path, corpus, capsys):
    frames_dir, _ = corpus
    _, book_path, tok_path, enc_dir = full_pipeline(tmp_path, frames_dir)
    rc = run(["decode", enc_dir, "--expect-vocab", 9999, "--out", tmp_path / "d.seg"])
    assert rc == 2
    assert "vocab" in capsys.readouterr().err


def test_eval_boundaries_perfect_self(tmp_path, corpus, capsys):
    frames_dir, _ = corpus
    seg_path = tmp_path / "c.seg"
    run(["segment", frames_dir, "--out", seg_path])
    ali_dir = tmp_path / "ali"
    ali_dir.mkdir()
    for seg in read_segmentation_corpus(seg_path):
        entries = tuple(
            AlignmentEntry(
                s.start_frame / seg.frame_rate_hz,
                s.end_frame / seg.frame_rate_hz,
                f"syl{i}",
            )
            for i, s in enumerate(seg.segments)
        )
        write_alignment(Alignment(entries, seg.utterance_id), ali_dir / f"{seg.utterance_id}.ali")
    json_out = tmp_path / "rep.jsonl"
    rc = run(["eval", "boundaries", "--hyp", seg_path, "--ref", ali_dir,
              "--json-out", json_out])
    assert rc == 0
    report = dict(
        line.split("=", 1) for line in capsys.readouterr().out.strip().splitlines()
    )
    assert float(report["precision"]) == 1.0
    assert float(report["recall"]) == 1.0
    assert float(report["r_value"]) == 1.0
    lines = [json.loads(l) for l in json_out.read_text().splitlines()]
    assert lines[-1]["record"] == "totals"


def test_eval_discovery_perfect_self(tmp_path, corpus, capsys):
    frames_dir, _ = corpus
    _, _, tok_path, _ = full_pipeline(tmp_path, frames_dir)
    ali_dir = tmp_path / "ali"
    ali_dir.mkdir()
    for seg in read_segmentation_corpus(tok_path):
        entries = tuple(
            AlignmentEntry(
                s.start_frame / seg.frame_rate_hz,
                s.end_frame / seg.frame_rate_hz,
                f"tok{s.token_id}",
            )
            for s in seg.segments
        )
        write_alignment(Alignment(entries, seg.utterance_id), ali_dir / f"{seg.utterance_id}.ali")
    rc = run(["eval", "discovery", "--hyp", tok_path, "--ref", ali_dir])
    assert rc == 0
    report = dict(
        line.split("=", 1) for line in capsys.readouterr().out.strip().splitlines()
    )
    assert float(report["syllable_purity"]) == 1.0
    assert float(report["cluster_purity"]) == 1.0


def test_eval_coding_table_cross_checks(capsys):
    rc = run(["eval", "coding", "--vocab", 5000, "--toks", 4.27])
    assert rc == 0
    report = dict(
        line.split("=", 1) for line in capsys.readouterr().out.strip().splitlines()
    )
    assert abs(float(report["bitrate"]) - 52.43) < 0.1


def test_eval_coding_with_rate(capsys):
    rc = run([
        "eval", "coding", "--vocab", 5000, "--toks", 4.76, "--wer", 8.70,
        "--total-words", 913, "--total-bits", 26480,
    ])
    assert rc == 0
    report = dict(
        line.split("=", 1) for line in capsys.readouterr().out.strip().splitlines()
    )
    assert float(report["coding_rate"]) == pytest.approx(0.0315, abs=5e-5)
    assert abs(float(report["duration_informed_bitrate"]) - 91.80) < 0.05


def test_eval_di_on_shipped_fixtures(capsys):
    from importlib import resources

    fixtures = resources.files("sylkit") / "data" / "fixtures"
    rc = run([
        "eval", "di",
        "--curves", fixtures / "step_curve.tsv", fixtures / "x_curve.tsv",
        fixtures / "chance_curve.tsv",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    values = {}
    for line in out.strip().splitlines():
        if line.startswith("pair="):
            fields = dict(kv.split("=") for kv in line.split())
            values[fields["pair"]] = float(fields["di"])
    assert values["step_curve"] < 0.01
    assert values["x_curve"] == pytest.approx(0.25, abs=0.01)
    assert values["chance_curve"] == pytest.approx(0.5, abs=0.01)


def test_eval_di_requires_input(capsys):
    assert run(["eval", "di"]) == 1


def test_usage_error_exit_one():
    assert run(["segment"]) == 1  # missing --out
    assert run(["definitely-not-a-command"]) == 1
