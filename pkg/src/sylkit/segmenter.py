"""Linear-time greedy syllabic segmentation.

Three passes over the frame embeddings, each O(n):

1. norm gate: frames whose L2 norm clears a threshold are speech;
2. monotonic agglomeration: sweeping left to right, a speech frame joins
   the open segment while its cosine similarity to the previous frame
   stays at or above the merge threshold, otherwise it opens a new one;
3. boundary refinement: each boundary between touching segments is
   re-placed inside the window spanning the two segment midpoints so that
   frames agree best with their side's (pre-refinement) average.

Also hosts the Gaussian threshold calibration used to pick the norm gate
and the EMA update for the running noise statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBatchError, NoRootInRangeError, ZeroNormFrameError
from .types import FrameSequence, GaussianStats, Segment, Segmentation
from .validation import ParamsMixin, as_float_vector, as_frame_sequence

DEFAULT_NORM_THRESHOLD = 3.09
DEFAULT_MERGE_THRESHOLD = 0.8


@dataclass(frozen=True)
class SegmenterConfig:
    norm_threshold: float = DEFAULT_NORM_THRESHOLD
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD

    def __post_init__(self):
        if not self.norm_threshold > 0:
            raise ValueError(f"norm_threshold must be positive, got {self.norm_threshold}")
        if not (-1.0 < self.merge_threshold <= 1.0):
            raise ValueError(f"merge_threshold must lie in (-1, 1], got {self.merge_threshold}")


def _norms(data: np.ndarray) -> np.ndarray:
    # float64 accumulation without materializing a float64 copy of the
    # matrix (large temporaries hit the allocator's mmap path and ruin the
    # linear-time profile).
    return np.sqrt(np.einsum("ij,ij->i", data, data, dtype=np.float64))


def speech_mask(seq: FrameSequence, norm_threshold: float) -> np.ndarray:
    """Boolean speech gate: ||frame||_2 >= norm_threshold.

    Frames with exactly zero norm are never speech, whatever the threshold.
    """
    norms = _norms(seq.data)
    return (norms >= norm_threshold) & (norms > 0.0)


def greedy_agglomerate(seq: FrameSequence, mask: np.ndarray,
                       merge_threshold: float) -> Segmentation:
    """Single left-to-right agglomeration pass.

    A speech frame opens a new segment when there is no open segment or its
    cosine similarity to the previous frame falls below merge_threshold;
    otherwise it joins the open segment. A non-speech frame closes any open
    segment. The segments tile the speech region of the mask exactly.
    """
    mask = np.asarray(mask, dtype=bool)
    n = seq.n_frames
    if mask.shape != (n,):
        raise ValueError(f"mask length {mask.shape} does not match n_frames={n}")
    if n == 0 or not mask.any():
        return Segmentation((), n, seq.frame_rate_hz, seq.utterance_id)

    norms = _norms(seq.data)
    if np.any(mask & (norms == 0.0)):
        bad = int(np.flatnonzero(mask & (norms == 0.0))[0])
        raise ZeroNormFrameError(f"speech frame {bad} has zero norm; cosine undefined")

    dots = np.einsum("ij,ij->i", seq.data[1:], seq.data[:-1], dtype=np.float64)
    denom = norms[1:] * norms[:-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        prev_cos = dots / denom  # NaN only where a side is non-speech

    opens = mask.copy()
    # Frame i >= 1 continues the open segment iff both i-1 and i are speech
    # and their cosine clears the threshold (NaN compares false, and those
    # positions are masked out anyway).
    with np.errstate(invalid="ignore"):
        continues = mask[1:] & mask[:-1] & (prev_cos >= merge_threshold)
    opens[1:] = mask[1:] & ~continues

    starts = np.flatnonzero(opens)
    run_last = np.flatnonzero(mask & ~np.append(mask[1:], False))
    run_end = run_last[np.searchsorted(run_last, starts)] + 1
    next_start = np.append(starts[1:], n)
    ends = np.minimum(run_end, next_start)

    segments = tuple(Segment(int(s), int(e)) for s, e in zip(starts, ends))
    return Segmentation(segments, n, seq.frame_rate_hz, seq.utterance_id)


def refine_boundaries(seq: FrameSequence, seg: Segmentation) -> Segmentation:
    """Re-place boundaries between touching segments.

    For adjacent segments L, R sharing a boundary, candidate positions run
    from midpoint(L) to midpoint(R) inclusive; the boundary moves to the
    position maximizing the summed cosine of window frames to their side's
    segment average. Averages and midpoints are frozen pre-refinement; ties
    break toward the earliest position. Boundaries next to non-speech gaps
    are anchored by the mask and left untouched.
    """
    k = len(seg.segments)
    if k <= 1:
        return seg

    norms = _norms(seq.data)
    safe_norms = np.where(norms > 0, norms, 1.0)  # zero-norm frames score 0
    spans = [(s.start_frame, s.end_frame) for s in seg.segments]

    averages = np.stack([seq.data[s:e].mean(axis=0, dtype=np.float64) for s, e in spans])
    avg_norms = np.sqrt(np.einsum("ij,ij->i", averages, averages))
    unit_avg = np.zeros_like(averages)
    nz = avg_norms > 0
    unit_avg[nz] = averages[nz] / avg_norms[nz, None]

    new_spans = [list(span) for span in spans]
    for i in range(k - 1):
        s0, e0 = spans[i]
        s1, e1 = spans[i + 1]
        if e0 != s1:
            continue
        lo = (s0 + e0) // 2
        hi = (s1 + e1) // 2
        c_lo = max(lo, new_spans[i][0] + 1)  # keep both segments non-empty
        c_hi = min(hi, e1 - 1)
        if c_lo > c_hi:
            continue
        window = seq.data[lo : hi + 1]
        wnorm = safe_norms[lo : hi + 1]
        cos_left = np.einsum("ij,j->i", window, unit_avg[i], dtype=np.float64) / wnorm
        cos_right = np.einsum("ij,j->i", window, unit_avg[i + 1], dtype=np.float64) / wnorm
        # score(c) = sum(cos_left[lo:c]) + sum(cos_right[c:hi+1])
        pref = np.concatenate(([0.0], np.cumsum(cos_left)))
        suff = np.concatenate((np.cumsum(cos_right[::-1])[::-1], [0.0]))
        offsets = np.arange(c_lo - lo, c_hi - lo + 1)
        boundary = c_lo + int(np.argmax(pref[offsets] + suff[offsets]))
        new_spans[i][1] = boundary
        new_spans[i + 1][0] = boundary

    segments = tuple(Segment(int(s), int(e)) for s, e in new_spans)
    return Segmentation(segments, seg.n_frames, seg.frame_rate_hz, seg.utterance_id)


def segment(seq: FrameSequence, config: SegmenterConfig | None = None) -> Segmentation:
    """Full pipeline: norm gate, agglomerate, refine. Linear in n_frames."""
    cfg = config or SegmenterConfig()
    mask = speech_mask(seq, cfg.norm_threshold)
    rough = greedy_agglomerate(seq, mask, cfg.merge_threshold)
    return refine_boundaries(seq, rough)


class GreedySegmenter(ParamsMixin):
    """Estimator-style wrapper around :func:`segment`.

    Stateless: fit() is a no-op kept for pipeline compatibility. predict()
    accepts a FrameSequence or a raw (n_frames, dim) array (interpreted at
    `frame_rate_hz`).
    """

    def __init__(self, norm_threshold: float = DEFAULT_NORM_THRESHOLD,
                 merge_threshold: float = DEFAULT_MERGE_THRESHOLD,
                 frame_rate_hz: float = 50.0):
        self.norm_threshold = norm_threshold
        self.merge_threshold = merge_threshold
        self.frame_rate_hz = frame_rate_hz

    def fit(self, X=None, y=None) -> "GreedySegmenter":
        return self

    def predict(self, X) -> Segmentation:
        seq = as_frame_sequence(X, self.frame_rate_hz)
        return segment(seq, SegmenterConfig(self.norm_threshold, self.merge_threshold))

    def fit_predict(self, X, y=None) -> Segmentation:
        return self.fit(X, y).predict(X)


def calibrate_norm_threshold(signal: GaussianStats, noise: GaussianStats) -> float:
    """Equal-likelihood point between the noise and signal Gaussians.

    Solves (x-mu_n)^2/(2 s_n^2) + ln s_n = (x-mu_s)^2/(2 s_s^2) + ln s_s for
    the root between the means (noise.mean, signal.mean]. With equal sigmas
    the closed-form midpoint is returned.
    """
    mu_n, sd_n = noise.mean, noise.std
    mu_s, sd_s = signal.mean, signal.std
    if sd_n <= 0 or sd_s <= 0:
        raise ValueError("both std values must be positive")
    if not mu_s > mu_n:
        raise ValueError(f"signal mean {mu_s} must exceed noise mean {mu_n}")
    if sd_n == sd_s:
        return (mu_n + mu_s) / 2.0

    # h(x) = log density_n(x) - log density_s(x), a quadratic in x.
    a = 0.5 / sd_n**2 - 0.5 / sd_s**2
    b = mu_s / sd_s**2 - mu_n / sd_n**2
    c = 0.5 * mu_n**2 / sd_n**2 - 0.5 * mu_s**2 / sd_s**2 + math.log(sd_n / sd_s)
    disc = b * b - 4.0 * a * c
    if disc < 0:
        raise NoRootInRangeError("no equal-density point exists between the means")
    sq = math.sqrt(disc)
    roots = [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]
    in_range = [x for x in roots if mu_n < x <= mu_s]
    if not in_range:
        raise NoRootInRangeError(
            f"equal-density roots {roots} lie outside ({mu_n}, {mu_s}]"
        )
    x = min(in_range)
    for _ in range(3):  # Newton polish of the quadratic's float error
        h = a * x * x + b * x + c
        dh = 2.0 * a * x + b
        if dh == 0.0:
            break
        x -= h / dh
    return float(x)


def update_noise_stats(current: GaussianStats, batch_norms,
                       decay: float) -> GaussianStats:
    """EMA update of the noise-norm distribution on mean and second moment.

    count grows by the batch size.
    """
    if not 0.0 < decay < 1.0:
        raise ValueError(f"decay must lie in (0, 1), got {decay}")
    batch = as_float_vector(batch_norms, "batch_norms")
    if batch.size == 0:
        raise EmptyBatchError("batch_norms is empty")
    batch_mean = float(batch.mean())
    batch_m2 = float(np.mean(batch * batch))
    cur_m2 = current.mean**2 + current.std**2
    mean = decay * current.mean + (1.0 - decay) * batch_mean
    m2 = decay * cur_m2 + (1.0 - decay) * batch_m2
    var = max(m2 - mean * mean, 0.0)
    return GaussianStats(mean, math.sqrt(var), current.count + batch.size)
