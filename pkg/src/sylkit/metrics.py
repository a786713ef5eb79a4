"""Evaluation suite: boundary detection, syllable discovery, and the
Discriminability Index over word-interpolation continua.

Conventions (documented because the underlying definitions leave them open):

* boundary matching is greedy one-to-one in increasing time-distance order;
* utterance-edge boundaries (t=0 and t=end) are excluded from scoring;
* when a hypothesis or reference has no boundaries the result is flagged
  degenerate with precision/recall/R-value reported as 0 (1 when both are
  empty); with zero matches on non-empty sets, the over-segmentation term
  treats precision as 1;
* mutual information is reported in bits;
* DTW similarity is the mean per-step cosine along the max-sum path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllFramesGatedError,
    DegenerateCurveError,
    InvariantViolationError,
    ZeroNormFrameError,
)
from .segmenter import DEFAULT_NORM_THRESHOLD, speech_mask
from .types import Alignment, FrameSequence, Segmentation
from .validation import check_finite

_EPS = 1e-12


# ---------------------------------------------------------------------------
# boundary detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryMatchResult:
    n_ref: int
    n_hyp: int
    n_matched: int
    precision: float
    recall: float
    f1: float
    r_value: float
    degenerate: bool = False


def match_boundaries(ref: np.ndarray, hyp: np.ndarray, tolerance: float) -> int:
    """Greedy one-to-one matching of boundary times within `tolerance`."""
    pairs = []
    j_lo = 0
    for i, r in enumerate(ref):
        j = j_lo
        while j < len(hyp) and hyp[j] < r - tolerance:
            j += 1
        j_lo = j
        while j < len(hyp) and hyp[j] <= r + tolerance:
            pairs.append((abs(r - hyp[j]), i, j))
            j += 1
    pairs.sort()
    used_ref = set()
    used_hyp = set()
    matched = 0
    for _, i, j in pairs:
        if i in used_ref or j in used_hyp:
            continue
        used_ref.add(i)
        used_hyp.add(j)
        matched += 1
    return matched


def r_value(precision: float, recall: float) -> float:
    """Segmentation R-value; 1.0 iff precision = recall = 1.

    Precision 0 is treated as 1 in the over-segmentation ratio so the
    formula stays defined (documented convention).
    """
    os = recall / precision - 1.0 if precision > 0 else recall - 1.0
    r1 = np.sqrt((1.0 - recall) ** 2 + os**2)
    r2 = (-os + recall - 1.0) / np.sqrt(2.0)
    return float(1.0 - (abs(r1) + abs(r2)) / 2.0)


def boundary_metrics(ref_boundaries, hyp_boundaries,
                     tolerance_sec: float = 0.05) -> BoundaryMatchResult:
    """Precision/recall/F1/R-value of hypothesis vs reference boundary times."""
    ref = np.asarray(ref_boundaries, dtype=np.float64)
    hyp = np.asarray(hyp_boundaries, dtype=np.float64)
    for name, arr in (("ref", ref), ("hyp", hyp)):
        if arr.ndim != 1:
            raise ValueError(f"{name} boundaries must be 1-D")
        if arr.size > 1 and np.any(np.diff(arr) < 0):
            raise ValueError(f"{name} boundaries must be sorted")
    n_ref, n_hyp = ref.size, hyp.size
    if n_ref == 0 and n_hyp == 0:
        return BoundaryMatchResult(0, 0, 0, 1.0, 1.0, 1.0, 1.0, degenerate=True)
    if n_ref == 0 or n_hyp == 0:
        return BoundaryMatchResult(n_ref, n_hyp, 0, 0.0, 0.0, 0.0, 0.0, degenerate=True)
    matched = match_boundaries(ref, hyp, tolerance_sec)
    precision = matched / n_hyp
    recall = matched / n_ref
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return BoundaryMatchResult(
        n_ref, n_hyp, matched, precision, recall, f1, r_value(precision, recall)
    )


# ---------------------------------------------------------------------------
# syllable discovery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscoveryResult:
    syllable_purity: float
    cluster_purity: float
    mutual_info_bits: float
    n_segments: int
    n_dropped: int  # discovered segments with no temporal overlap in the reference


def _best_overlap_label(start_sec: float, end_sec: float, ali: Alignment) -> str | None:
    best_label = None
    best_overlap = 0.0
    for ent in ali.entries:
        overlap = min(end_sec, ent.end_sec) - max(start_sec, ent.start_sec)
        if overlap > best_overlap:  # strict: ties keep the earlier syllable
            best_overlap = overlap
            best_label = ent.label
    return best_label


def contingency_scores(table: np.ndarray) -> tuple[float, float, float]:
    """(syllable_purity, cluster_purity, MI bits) from a cluster x syllable count table."""
    counts = np.asarray(table, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        return 0.0, 0.0, 0.0
    cluster_purity = counts.max(axis=1).sum() / total
    syllable_purity = counts.max(axis=0).sum() / total
    joint = counts / total
    pc = joint.sum(axis=1)
    ps = joint.sum(axis=0)
    nz = joint > 0
    mi = float(np.sum(joint[nz] * np.log2(joint[nz] / np.outer(pc, ps)[nz])))
    return float(syllable_purity), float(cluster_purity), mi


def discovery_metrics(hyp: list[Segmentation], ref: list[Alignment]) -> DiscoveryResult:
    """Pair each discovered segment with its max-overlap reference syllable,
    then score purities and mutual information from the contingency table.
    """
    if len(hyp) != len(ref):
        raise ValueError(f"{len(hyp)} hypothesis utterances vs {len(ref)} references")
    cells: dict[tuple[int, str], int] = {}
    clusters: dict[int, int] = {}
    labels: dict[str, int] = {}
    n_segments = 0
    n_dropped = 0
    for seg, ali in zip(hyp, ref):
        if seg.utterance_id and ali.utterance_id and seg.utterance_id != ali.utterance_id:
            raise ValueError(
                f"utterance ids differ: {seg.utterance_id!r} vs {ali.utterance_id!r}"
            )
        for i, s in enumerate(seg.segments):
            if s.token_id is None:
                raise ValueError(f"{seg.utterance_id!r}: segment {i} has no token_id")
            n_segments += 1
            label = _best_overlap_label(
                s.start_frame / seg.frame_rate_hz, s.end_frame / seg.frame_rate_hz, ali
            )
            if label is None:
                n_dropped += 1
                continue
            c = clusters.setdefault(s.token_id, len(clusters))
            l = labels.setdefault(label, len(labels))
            cells[(c, l)] = cells.get((c, l), 0) + 1
    table = np.zeros((len(clusters), len(labels)), dtype=np.float64)
    for (c, l), count in cells.items():
        table[c, l] = count
    sp, cp, mi = contingency_scores(table)
    return DiscoveryResult(sp, cp, mi, n_segments, n_dropped)


# ---------------------------------------------------------------------------
# DTW similarity
# ---------------------------------------------------------------------------

def _unit_or_raise(seq: FrameSequence, name: str) -> np.ndarray:
    data = seq.data.astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", data, data))
    if np.any(norms == 0.0):
        raise ZeroNormFrameError(f"{name} has a zero-norm frame; cosine undefined")
    return data / norms[:, None]


def dtw_similarity(a: FrameSequence, b: FrameSequence) -> float:
    """Mean per-step cosine along the maximum-similarity alignment path.

    Classic DTW with steps (1,0), (0,1), (1,1): the path minimizes the
    accumulated dissimilarity (1 - cosine), which maximizes alignment
    similarity without rewarding length; the returned value is the mean
    cosine over that path. Ties prefer the diagonal predecessor, then the
    a-axis one.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.n_frames == 0 or b.n_frames == 0:
        raise ValueError("both sequences must be non-empty")
    ua = _unit_or_raise(a, "first sequence")
    ub = _unit_or_raise(b, "second sequence")
    sim = ua @ ub.T
    cost = 1.0 - sim
    n, m = sim.shape
    total = np.full((n, m), np.inf)
    length = np.zeros((n, m), dtype=np.int64)
    cos_sum = np.zeros((n, m))
    total[0, 0] = cost[0, 0]
    length[0, 0] = 1
    cos_sum[0, 0] = sim[0, 0]
    for i in range(n):
        for j in range(m):
            if i == 0 and j == 0:
                continue
            best = np.inf
            best_len = 0
            best_cos = 0.0
            if i > 0 and j > 0 and total[i - 1, j - 1] < best:
                best, best_len, best_cos = (
                    total[i - 1, j - 1], length[i - 1, j - 1], cos_sum[i - 1, j - 1]
                )
            if i > 0 and total[i - 1, j] < best:
                best, best_len, best_cos = total[i - 1, j], length[i - 1, j], cos_sum[i - 1, j]
            if j > 0 and total[i, j - 1] < best:
                best, best_len, best_cos = total[i, j - 1], length[i, j - 1], cos_sum[i, j - 1]
            total[i, j] = best + cost[i, j]
            length[i, j] = best_len + 1
            cos_sum[i, j] = best_cos + sim[i, j]
    return float(cos_sum[n - 1, m - 1] / length[n - 1, m - 1])


# ---------------------------------------------------------------------------
# Discriminability Index
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SimilarityCurvePair:
    """Similarities of each interpolation step to the two continuum endpoints."""

    alphas: np.ndarray
    sim_left: np.ndarray
    sim_right: np.ndarray

    def __post_init__(self):
        alphas = np.array(self.alphas, dtype=np.float64, copy=True)
        left = np.array(self.sim_left, dtype=np.float64, copy=True)
        right = np.array(self.sim_right, dtype=np.float64, copy=True)
        if not (alphas.ndim == left.ndim == right.ndim == 1):
            raise InvariantViolationError("curve arrays must be 1-D")
        if not (alphas.size == left.size == right.size >= 3):
            raise InvariantViolationError("curves need equal lengths >= 3")
        check_finite(alphas, "alphas")
        check_finite(left, "sim_left")
        check_finite(right, "sim_right")
        if alphas.min() < 0.0 or alphas.max() > 1.0:
            raise InvariantViolationError("alphas must lie in [0, 1]")
        if np.any(np.diff(alphas) <= 0):
            raise InvariantViolationError("alphas must be strictly increasing")
        for name, arr in (("alphas", alphas), ("sim_left", left), ("sim_right", right)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.alphas.size


def di_probability(sim_left: float, sim_right: float,
                   offset_left: float, offset_right: float) -> float:
    """Offset-corrected probability that a sample is the left endpoint word.

    Returns 0.5 when the corrected similarities carry no mass; clipped to [0, 1].
    """
    num = sim_left - offset_left
    den = num + (sim_right - offset_right)
    if den < _EPS:
        return 0.5
    return float(min(max(num / den, 0.0), 1.0))


def _left_probabilities(pair: SimilarityCurvePair) -> np.ndarray:
    off_l = float(pair.sim_left.min())
    off_r = float(pair.sim_right.min())
    if np.ptp(pair.sim_left) < _EPS or np.ptp(pair.sim_right) < _EPS:
        raise DegenerateCurveError("a similarity curve is constant at its offset")
    num = pair.sim_left - off_l
    den = num + (pair.sim_right - off_r)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(den < _EPS, 0.5, num / np.maximum(den, _EPS))
    return np.clip(p, 0.0, 1.0)


def discriminability(pair: SimilarityCurvePair) -> tuple[float, float]:
    """Minimal empirical misclassification risk and its decision boundary.

    The risk of boundary q averages p(right | alpha) over grid points with
    alpha < q and p(left | alpha) over the rest; q is searched over the grid
    values plus both interval ends, ties toward the smallest q.
    """
    p_left = _left_probabilities(pair)
    p_right = 1.0 - p_left
    candidates = np.unique(np.concatenate(([0.0], pair.alphas, [1.0])))
    best_q = 0.0
    best_risk = np.inf
    for q in candidates:
        left_of_q = pair.alphas < q
        risk = float(np.mean(np.where(left_of_q, p_right, p_left)))
        if risk < best_risk:
            best_risk = risk
            best_q = float(q)
    return best_risk, best_q


def di_aggregate(pairs) -> float:
    """Unweighted mean of per-pair DI values."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one curve pair")
    return float(np.mean([discriminability(p)[0] for p in pairs]))


def _pooled_speech_vector(seq: FrameSequence, norm_threshold: float) -> np.ndarray:
    mask = speech_mask(seq, norm_threshold)
    if not mask.any():
        raise AllFramesGatedError(
            f"{seq.utterance_id or 'sample'}: no frame survives the norm gate"
        )
    return seq.data[mask].astype(np.float64).mean(axis=0)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.sqrt(a @ a))
    nb = float(np.sqrt(b @ b))
    if na == 0.0 or nb == 0.0:
        raise ZeroNormFrameError("pooled vector has zero norm; cosine undefined")
    return float(a @ b / (na * nb))


def build_curve_pair(left: FrameSequence, right: FrameSequence,
                     continuum: list[FrameSequence],
                     alphas=None, mode: str = "syllable",
                     norm_threshold: float = DEFAULT_NORM_THRESHOLD) -> SimilarityCurvePair:
    """Similarity curves of a word-interpolation continuum to its endpoints.

    "syllable" mode mean-pools norm-gated frames into one vector per sample
    and compares with cosine; "frame" mode uses DTW similarity against each
    endpoint. alphas default to an equidistant [0, 1] grid.
    """
    if alphas is None:
        alphas = np.linspace(0.0, 1.0, len(continuum))
    if mode == "syllable":
        pool_l = _pooled_speech_vector(left, norm_threshold)
        pool_r = _pooled_speech_vector(right, norm_threshold)
        pooled = [_pooled_speech_vector(s, norm_threshold) for s in continuum]
        sim_left = [_cosine(pool_l, p) for p in pooled]
        sim_right = [_cosine(pool_r, p) for p in pooled]
    elif mode == "frame":
        sim_left = [dtw_similarity(s, left) for s in continuum]
        sim_right = [dtw_similarity(s, right) for s in continuum]
    else:
        raise ValueError(f"mode must be 'syllable' or 'frame', got {mode!r}")
    return SimilarityCurvePair(np.asarray(alphas), np.asarray(sim_left), np.asarray(sim_right))
