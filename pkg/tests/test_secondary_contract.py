"""Contract with the embedding/alignment exporter.

The checked-in fixtures under tests/fixtures/secondary/ were produced by
the exporter (see extractor/tools/make-fixtures.ts); this suite verifies
that our readers accept them unchanged, so the primary tests run without
building the exporter.
"""

from pathlib import Path

import numpy as np
import pytest

from sylkit import read_alignment, read_frames, segment

FIXTURES = Path(__file__).parent / "fixtures" / "secondary"


@pytest.fixture(autouse=True)
def require_fixtures():
    if not FIXTURES.is_dir():
        pytest.skip("secondary fixtures not checked in")


def test_exported_sylf_accepted_unchanged():
    seq = read_frames(FIXTURES / "fixture_utt.sylf")
    assert seq.frame_rate_hz == 50.0
    assert seq.dim >= 1
    assert np.isfinite(seq.data).all()
    assert seq.utterance_id == "fixture_utt"


def test_exported_frame_count_matches_duration():
    seq = read_frames(FIXTURES / "fixture_utt.sylf")
    duration_sec = 1.0  # the fixture holds one second of audio
    expected = duration_sec * seq.frame_rate_hz
    assert abs(seq.n_frames - expected) <= 1


def test_exported_alignment_accepted_unchanged():
    ali = read_alignment(FIXTURES / "fixture_utt.ali")
    assert len(ali) == 3
    assert all(e.start_sec < e.end_sec for e in ali.entries)
    assert ali.entries[0].start_sec == 0.0
    assert ali.entries[-1].end_sec == 1.0


def test_exported_frames_flow_through_the_pipeline():
    seq = read_frames(FIXTURES / "fixture_utt.sylf")
    # thresholds are data-dependent; this only checks the types compose
    seg = segment(seq)
    assert seg.n_frames == seq.n_frames
