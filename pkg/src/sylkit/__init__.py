"""sylkit: syllabic segmentation, tokenization, and duration-informed coding
for frame-level speech embeddings."""

__version__ = "0.1.0"

from .codec import (
    FrameTokenSequence,
    TokenBitstream,
    bitrate,
    coding_rate,
    decode,
    duration_informed_bitrate,
    encode,
    frame_tokens_from_segmentation,
    read_bitstream,
    segmentation_from_frame_tokens,
    tokens_per_second,
    write_bitstream,
)
from .distill import (
    build_assignment,
    ema_update,
    mean_seg_distill_loss,
    seg_distill_loss,
    segment_averages,
)
from .io import (
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
from .metrics import (
    BoundaryMatchResult,
    DiscoveryResult,
    SimilarityCurvePair,
    boundary_metrics,
    build_curve_pair,
    di_aggregate,
    di_probability,
    discriminability,
    discovery_metrics,
    dtw_similarity,
)
from .quantizer import SegmentKMeans, assign_tokens, kmeans_train, restore_embeddings
from .segmenter import (
    GreedySegmenter,
    SegmenterConfig,
    calibrate_norm_threshold,
    greedy_agglomerate,
    refine_boundaries,
    segment,
    speech_mask,
    update_noise_stats,
)
from .types import (
    Alignment,
    AlignmentEntry,
    Codebook,
    FrameSequence,
    GaussianStats,
    Segment,
    Segmentation,
)

__all__ = [
    "Alignment",
    "AlignmentEntry",
    "BoundaryMatchResult",
    "Codebook",
    "DiscoveryResult",
    "FrameSequence",
    "FrameTokenSequence",
    "GaussianStats",
    "GreedySegmenter",
    "Segment",
    "Segmentation",
    "SegmenterConfig",
    "SegmentKMeans",
    "SimilarityCurvePair",
    "TokenBitstream",
    "assign_tokens",
    "bitrate",
    "boundary_metrics",
    "build_assignment",
    "build_curve_pair",
    "calibrate_norm_threshold",
    "coding_rate",
    "decode",
    "di_aggregate",
    "di_probability",
    "discriminability",
    "discovery_metrics",
    "dtw_similarity",
    "duration_informed_bitrate",
    "ema_update",
    "encode",
    "frame_tokens_from_segmentation",
    "greedy_agglomerate",
    "kmeans_train",
    "mean_seg_distill_loss",
    "read_alignment",
    "read_bitstream",
    "read_codebook",
    "read_frames",
    "read_segmentation",
    "read_segmentation_corpus",
    "refine_boundaries",
    "restore_embeddings",
    "seg_distill_loss",
    "segment",
    "segment_averages",
    "segmentation_from_frame_tokens",
    "speech_mask",
    "tokens_per_second",
    "update_noise_stats",
    "write_alignment",
    "write_bitstream",
    "write_codebook",
    "write_frames",
    "write_segmentation",
    "write_segmentation_corpus",
]
