"""Batch command-line interface.

Exit codes: 0 success, 1 usage/config error, 2 partial data failure
(processing continues past malformed inputs; failures go to stderr).
Inputs are explicit paths, directories (expanded by suffix, sorted), or a
plain-text manifest with one path per line. Outputs are deterministic:
fixed seeds, manifest order, no timestamps.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import codec, distill, metrics, quantizer, segmenter
from . import io as sylio
from .errors import SylkitError
from .types import FrameSequence, Segmentation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _expand_inputs(args, suffix: str) -> list[Path]:
    paths: list[Path] = []
    if getattr(args, "manifest", None):
        for line in Path(args.manifest).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                paths.append(Path(line))
    for p in getattr(args, "inputs", []) or []:
        paths.append(Path(p))
    expanded: list[Path] = []
    for p in paths:
        if p.is_dir():
            expanded.extend(sorted(p.glob(f"*{suffix}")))
        else:
            expanded.append(p)
    return expanded


def _map_ordered(worker, paths: list[Path], jobs: int):
    """Apply worker per path; results keep manifest order, errors are collected."""

    def guarded(path):
        try:
            return worker(path), None
        except (SylkitError, OSError, ValueError) as exc:
            return None, exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(guarded, paths))
    else:
        outcomes = [guarded(p) for p in paths]
    results = []
    failures = []
    for path, (value, exc) in zip(paths, outcomes):
        if exc is None:
            results.append((path, value))
        else:
            failures.append((path, exc))
            print(f"sylkit: error: {path}: {exc}", file=sys.stderr)
    return results, failures


def _print_report(items) -> None:
    for key, value in items:
        if isinstance(value, float):
            print(f"{key}={value:.6f}")
        else:
            print(f"{key}={value}")


def _write_json_lines(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# pipeline commands
# ---------------------------------------------------------------------------

def cmd_segment(args) -> int:
    cfg = segmenter.SegmenterConfig(args.norm_threshold, args.merge_threshold)
    paths = _expand_inputs(args, ".sylf")

    def worker(path):
        seq = sylio.read_frames(path)
        seg = segmenter.segment(seq, cfg)
        averages = distill.segment_averages(seq, seg) if args.emb_out else None
        return seq, seg, averages

    results, failures = _map_ordered(worker, paths, args.jobs)
    sylio.write_segmentation_corpus([seg for _, (_, seg, _) in results], args.out)
    if args.emb_out and results:
        first_seq = results[0][1][0]
        rows = [a for _, (_, _, a) in results if a is not None and len(a)]
        stacked = np.vstack(rows) if rows else np.zeros((0, first_seq.dim))
        emb = FrameSequence(stacked, first_seq.frame_rate_hz, "segment-averages")
        sylio.write_frames(emb, args.emb_out)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_train_kmeans(args) -> int:
    paths = _expand_inputs(args, ".sylf")
    results, failures = _map_ordered(sylio.read_frames, paths, args.jobs)
    blocks = [seq.data for _, seq in results if seq.n_frames]
    dims = {b.shape[1] for b in blocks}
    if len(dims) > 1:
        print(f"sylkit: error: inputs mix embedding dims {sorted(dims)}", file=sys.stderr)
        return EXIT_USAGE
    if not blocks:
        print("sylkit: error: no training points found", file=sys.stderr)
        return EXIT_USAGE
    points = np.vstack(blocks)
    book = quantizer.kmeans_train(
        points, args.k, seed=args.seed, max_iters=args.max_iters,
        rel_tol=args.rel_tol, n_init=args.restarts,
    )
    sylio.write_codebook(book, args.out)
    _print_report([("k", book.k), ("dim", book.dim), ("n_points", points.shape[0])])
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_tokenize(args) -> int:
    book = sylio.read_codebook(args.codebook)
    segs = sylio.read_segmentation_corpus(args.segmentation)
    by_id = {p.stem: p for p in _expand_inputs(args, ".sylf")}
    tokenized: list[Segmentation] = []
    failures = 0
    for seg in segs:
        try:
            path = by_id.get(seg.utterance_id)
            if path is None:
                raise FileNotFoundError(f"no frames file for utterance {seg.utterance_id!r}")
            seq = sylio.read_frames(path)
            averages = distill.segment_averages(seq, seg)
            tokenized.append(quantizer.assign_tokens(seg.with_embeddings(list(averages)), book))
        except (SylkitError, OSError, ValueError) as exc:
            failures += 1
            print(f"sylkit: error: {seg.utterance_id}: {exc}", file=sys.stderr)
    sylio.write_segmentation_corpus(tokenized, args.out)
    return EXIT_PARTIAL if failures else EXIT_OK


def _resolve_vocab(args) -> int:
    if args.vocab is not None:
        return args.vocab
    if args.codebook:
        return sylio.read_codebook(args.codebook).k
    raise SystemExit(EXIT_USAGE)


def cmd_encode(args) -> int:
    vocab = _resolve_vocab(args)
    segs = sylio.read_segmentation_corpus(args.segmentation)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for i, seg in enumerate(segs):
        name = seg.utterance_id or f"utt{i:05d}"
        try:
            stream = codec.encode(codec.frame_tokens_from_segmentation(seg, vocab))
            codec.write_bitstream(stream, out_dir / f"{name}.sylb")
        except (SylkitError, ValueError) as exc:
            failures += 1
            print(f"sylkit: error: {name}: {exc}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_decode(args) -> int:
    expect_vocab = None
    if args.codebook:
        expect_vocab = sylio.read_codebook(args.codebook).k
    if args.expect_vocab is not None:
        expect_vocab = args.expect_vocab

    def worker(path):
        stream = codec.read_bitstream(path)
        if expect_vocab is not None and stream.vocab_size != expect_vocab:
            raise SylkitError(
                f"stream vocab {stream.vocab_size} != expected {expect_vocab}"
            )
        return codec.segmentation_from_frame_tokens(codec.decode(stream), path.stem)

    paths = _expand_inputs(args, ".sylb")
    results, failures = _map_ordered(worker, paths, args.jobs)
    sylio.write_segmentation_corpus([seg for _, seg in results], args.out)
    return EXIT_PARTIAL if failures else EXIT_OK


# ---------------------------------------------------------------------------
# evaluation commands
# ---------------------------------------------------------------------------

def _reference_alignments(args) -> dict[str, Path]:
    paths: list[Path] = []
    if args.ref_manifest:
        for line in Path(args.ref_manifest).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                paths.append(Path(line))
    for p in args.ref or []:
        p = Path(p)
        paths.extend(sorted(p.glob("*.ali")) if p.is_dir() else [p])
    return {p.stem: p for p in paths}


def cmd_eval_boundaries(args) -> int:
    hyps = sylio.read_segmentation_corpus(args.hyp)
    refs = _reference_alignments(args)
    totals = {"n_ref": 0, "n_hyp": 0, "n_matched": 0}
    records = []
    failures = 0
    for seg in hyps:
        try:
            path = refs.get(seg.utterance_id)
            if path is None:
                raise FileNotFoundError(f"no alignment for utterance {seg.utterance_id!r}")
            ali = sylio.read_alignment(path)
            hyp_b = seg.boundary_seconds(exclude_edges=True)
            ref_b = ali.boundary_seconds(duration_sec=seg.duration_sec, exclude_edges=True)
            result = metrics.boundary_metrics(ref_b, hyp_b, args.tolerance)
            totals["n_ref"] += result.n_ref
            totals["n_hyp"] += result.n_hyp
            totals["n_matched"] += result.n_matched
            records.append({
                "utterance_id": seg.utterance_id,
                "n_ref": result.n_ref, "n_hyp": result.n_hyp,
                "n_matched": result.n_matched,
                "precision": result.precision, "recall": result.recall,
                "f1": result.f1, "r_value": result.r_value,
            })
        except (SylkitError, OSError, ValueError) as exc:
            failures += 1
            print(f"sylkit: error: {seg.utterance_id}: {exc}", file=sys.stderr)

    n_ref, n_hyp, matched = totals["n_ref"], totals["n_hyp"], totals["n_matched"]
    degenerate = n_ref == 0 or n_hyp == 0
    if n_ref == 0 and n_hyp == 0:
        precision = recall = f1 = rval = 1.0
    elif degenerate:
        precision = recall = f1 = rval = 0.0
    else:
        precision = matched / n_hyp
        recall = matched / n_ref
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        rval = metrics.r_value(precision, recall)
    _print_report([
        ("n_utterances", len(records)), ("tolerance_sec", args.tolerance),
        ("n_ref", n_ref), ("n_hyp", n_hyp), ("n_matched", matched),
        ("precision", precision), ("recall", recall), ("f1", f1),
        ("r_value", rval), ("degenerate", int(degenerate)),
    ])
    if args.json_out:
        summary = dict(totals, precision=precision, recall=recall, f1=f1,
                       r_value=rval, record="totals")
        _write_json_lines(args.json_out, records + [summary])
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_eval_discovery(args) -> int:
    hyps = sylio.read_segmentation_corpus(args.hyp)
    refs = _reference_alignments(args)
    pairs = []
    failures = 0
    for seg in hyps:
        path = refs.get(seg.utterance_id)
        if path is None:
            failures += 1
            print(f"sylkit: error: no alignment for {seg.utterance_id!r}", file=sys.stderr)
            continue
        pairs.append((seg, sylio.read_alignment(path)))
    result = metrics.discovery_metrics([s for s, _ in pairs], [a for _, a in pairs])
    _print_report([
        ("n_utterances", len(pairs)),
        ("n_segments", result.n_segments), ("n_dropped", result.n_dropped),
        ("syllable_purity", result.syllable_purity),
        ("cluster_purity", result.cluster_purity),
        ("mutual_info_bits", result.mutual_info_bits),
    ])
    if args.json_out:
        _write_json_lines(args.json_out, [{
            "n_segments": result.n_segments, "n_dropped": result.n_dropped,
            "syllable_purity": result.syllable_purity,
            "cluster_purity": result.cluster_purity,
            "mutual_info_bits": result.mutual_info_bits,
        }])
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_eval_coding(args) -> int:
    vocab = args.vocab
    tok_s = args.toks
    total_bits = args.total_bits
    if args.streams:
        streams = [codec.read_bitstream(p) for p in _expand_inputs_list(args.streams, ".sylb")]
        if not streams:
            print("sylkit: error: no streams found", file=sys.stderr)
            return EXIT_USAGE
        duration = sum(s.n_frames / s.frame_rate_hz for s in streams)
        count = sum(
            codec.count_tokens(codec.parse_records(s), s.vocab_size,
                               args.include_silence_tokens)
            for s in streams
        )
        tok_s = count / duration
        if total_bits is None:
            total_bits = float(sum(s.payload_bits for s in streams))
    if tok_s is None:
        print("sylkit: error: provide --toks or --streams", file=sys.stderr)
        return EXIT_USAGE
    items = [
        ("vocab", vocab),
        ("tok_s", tok_s),
        ("bitrate", codec.bitrate(vocab, tok_s)),
        ("duration_informed_bitrate", codec.duration_informed_bitrate(vocab, tok_s)),
    ]
    if total_bits is not None:
        items.append(("total_bits", float(total_bits)))
    if args.wer is not None and args.total_words is not None and total_bits is not None:
        items.append(("coding_rate", codec.coding_rate(args.wer, args.total_words, total_bits)))
    _print_report(items)
    return EXIT_OK


def _expand_inputs_list(raw_paths, suffix: str) -> list[Path]:
    out: list[Path] = []
    for p in raw_paths:
        p = Path(p)
        out.extend(sorted(p.glob(f"*{suffix}")) if p.is_dir() else [p])
    return out


def _read_curve_tsv(path: Path) -> metrics.SimilarityCurvePair:
    rows = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise SylkitError(f"{path}:{lineno}: expected alpha<TAB>sim_left<TAB>sim_right")
        rows.append(tuple(float(f) for f in fields))
    arr = np.asarray(rows, dtype=np.float64).reshape(-1, 3)
    return metrics.SimilarityCurvePair(arr[:, 0], arr[:, 1], arr[:, 2])


def cmd_eval_di(args) -> int:
    pairs: list[tuple[str, metrics.SimilarityCurvePair]] = []
    failures = 0
    for p in args.curves or []:
        path = Path(p)
        try:
            pairs.append((path.stem, _read_curve_tsv(path)))
        except (SylkitError, OSError, ValueError) as exc:
            failures += 1
            print(f"sylkit: error: {path}: {exc}", file=sys.stderr)
    if args.pairs_manifest:
        for lineno, raw in enumerate(
            Path(args.pairs_manifest).read_text(encoding="utf-8").splitlines(), start=1
        ):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                fields = line.split("\t")
                if len(fields) != 4:
                    raise SylkitError("expected pair_id<TAB>left<TAB>right<TAB>continuum_dir")
                pair_id, left_p, right_p, cont_dir = fields
                continuum = [
                    sylio.read_frames(p) for p in sorted(Path(cont_dir).glob("*.sylf"))
                ]
                pairs.append((pair_id, metrics.build_curve_pair(
                    sylio.read_frames(left_p), sylio.read_frames(right_p), continuum,
                    mode=args.mode, norm_threshold=args.norm_threshold,
                )))
            except (SylkitError, OSError, ValueError) as exc:
                failures += 1
                print(f"sylkit: error: pairs manifest line {lineno}: {exc}", file=sys.stderr)
    if not pairs:
        print("sylkit: error: no curve pairs to evaluate", file=sys.stderr)
        return EXIT_USAGE
    records = []
    for pair_id, curve in pairs:
        di, alpha_star = metrics.discriminability(curve)
        records.append({"pair": pair_id, "di": di, "alpha_star": alpha_star})
        print(f"pair={pair_id} di={di:.6f} alpha_star={alpha_star:.6f}")
    mean_di = float(np.mean([r["di"] for r in records]))
    _print_report([("n_pairs", len(records)), ("di_mean", mean_di)])
    if args.json_out:
        _write_json_lines(args.json_out, records + [{"record": "mean", "di": mean_di}])
    return EXIT_PARTIAL if failures else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_io_args(p, suffix_help: str):
    p.add_argument("inputs", nargs="*", help=f"input {suffix_help} files or directories")
    p.add_argument("--manifest", help="text file listing input paths, one per line")
    p.add_argument("--jobs", type=int, default=1, help="file-level worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sylkit", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"sylkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment SYLF frame files into syllable spans")
    _add_io_args(p, "SYLF")
    p.add_argument("--out", required=True, help="output segmentation file")
    p.add_argument("--emb-out", help="companion SYLF of per-segment average embeddings")
    p.add_argument("--norm-threshold", type=float, default=segmenter.DEFAULT_NORM_THRESHOLD)
    p.add_argument("--merge-threshold", type=float, default=segmenter.DEFAULT_MERGE_THRESHOLD)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("train-kmeans", help="train a codebook over segment embeddings")
    _add_io_args(p, "SYLF")
    p.add_argument("-k", type=int, required=True, help="vocabulary size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--restarts", type=int, default=1, help="independent k-means++ restarts")
    p.add_argument("--out", required=True, help="output SYLC codebook")
    p.set_defaults(func=cmd_train_kmeans)

    p = sub.add_parser("tokenize", help="assign codebook tokens to segments")
    _add_io_args(p, "SYLF")
    p.add_argument("--segmentation", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--out", required=True, help="output tokenized segmentation file")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("encode", help="encode tokenized segmentations into SYLB bitstreams")
    p.add_argument("--segmentation", required=True)
    p.add_argument("--vocab", type=int, help="vocabulary size (or use --codebook)")
    p.add_argument("--codebook", help="SYLC file whose k sets the vocabulary size")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode SYLB bitstreams back to token segments")
    _add_io_args(p, "SYLB")
    p.add_argument("--expect-vocab", type=int, help="fail streams whose vocab differs")
    p.add_argument("--codebook", help="SYLC file whose k sets the expected vocabulary")
    p.add_argument("--out", required=True, help="output segmentation file")
    p.set_defaults(func=cmd_decode)

    ev = sub.add_parser("eval", help="evaluation reports")
    evsub = ev.add_subparsers(dest="eval_command", required=True)

    p = evsub.add_parser("boundaries", help="boundary precision/recall/F1/R-value")
    p.add_argument("--hyp", required=True, help="hypothesis segmentation file")
    p.add_argument("--ref", nargs="*", help="reference alignment files or directories")
    p.add_argument("--ref-manifest", help="manifest of reference alignment files")
    p.add_argument("--tolerance", type=float, default=0.05, help="match tolerance in seconds")
    p.add_argument("--json-out", help="write line-delimited JSON records")
    p.set_defaults(func=cmd_eval_boundaries)

    p = evsub.add_parser("discovery", help="syllable/cluster purity and mutual information")
    p.add_argument("--hyp", required=True, help="tokenized segmentation file")
    p.add_argument("--ref", nargs="*", help="reference alignment files or directories")
    p.add_argument("--ref-manifest", help="manifest of reference alignment files")
    p.add_argument("--json-out", help="write line-delimited JSON records")
    p.set_defaults(func=cmd_eval_discovery)

    p = evsub.add_parser("coding", help="Tok/s, bitrate, and coding-rate arithmetic")
    p.add_argument("--vocab", type=int, required=True)
    p.add_argument("--toks", type=float, help="tokens per second")
    p.add_argument("--streams", nargs="*", help="SYLB files/dirs to measure instead of --toks")
    p.add_argument("--include-silence-tokens", action="store_true",
                   help="count silence-token records in Tok/s")
    p.add_argument("--wer", type=float, help="word error rate in percent")
    p.add_argument("--total-words", type=int)
    p.add_argument("--total-bits", type=float)
    p.set_defaults(func=cmd_eval_coding)

    p = evsub.add_parser("di", help="Discriminability Index over interpolation continua")
    p.add_argument("--curves", nargs="*",
                   help="precomputed curve TSVs (alpha, sim_left, sim_right)")
    p.add_argument("--pairs-manifest",
                   help="manifest: pair_id<TAB>left.sylf<TAB>right.sylf<TAB>continuum_dir")
    p.add_argument("--mode", choices=("syllable", "frame"), default="syllable")
    p.add_argument("--norm-threshold", type=float, default=segmenter.DEFAULT_NORM_THRESHOLD)
    p.add_argument("--json-out", help="write line-delimited JSON records")
    p.set_defaults(func=cmd_eval_di)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (SylkitError, OSError, ValueError) as exc:
        print(f"sylkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
