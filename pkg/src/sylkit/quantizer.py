"""K-means codebook training, token assignment, and embedding restoration.

Lloyd iterations from seeded k-means++ starts. Distances are computed in
float64; centroids are stored in float32 so codebooks are reproducible
across platforms. Empty clusters are reseeded to the point farthest from
their current centroid, keeping the vocabulary size fixed.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import (
    DegenerateDataWarning,
    DimMismatchError,
    MissingEmbeddingError,
    NotFittedError,
    TokenOutOfRangeError,
    TooFewPointsError,
)
from .types import Codebook, Segmentation
from .validation import ParamsMixin, as_float_matrix

# Memory budget for the chunked exact-distance computation (float64 elems).
_CHUNK_BUDGET = 1 << 23


def _assign(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact nearest-centroid labels and squared distances, ties to lowest index."""
    n, dim = points.shape
    k = centroids.shape[0]
    labels = np.empty(n, dtype=np.int64)
    min_d2 = np.empty(n, dtype=np.float64)
    chunk = max(1, _CHUNK_BUDGET // max(1, k * dim))
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        d2 = ((points[lo:hi, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels[lo:hi] = np.argmin(d2, axis=1)
        min_d2[lo:hi] = np.take_along_axis(d2, labels[lo:hi, None], axis=1)[:, 0]
    return labels, min_d2


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = points[first]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))  # all remaining mass on chosen points
        centroids[j] = points[idx]
        d2 = np.minimum(d2, ((points - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _lloyd(points: np.ndarray, centroids: np.ndarray, max_iters: int,
           rel_tol: float) -> tuple[np.ndarray, list[float]]:
    k = centroids.shape[0]
    history: list[float] = []
    for _ in range(max_iters):
        labels, d2 = _assign(points, centroids)
        inertia = float(d2.sum())
        history.append(inertia)
        if len(history) >= 2:
            prev = history[-2]
            if prev <= 0 or (prev - inertia) / prev < rel_tol:
                break
        if inertia == 0.0:
            break
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(centroids)
        np.add.at(sums, labels, points)
        updated = centroids.copy()
        nonempty = counts > 0
        updated[nonempty] = sums[nonempty] / counts[nonempty, None]
        for j in np.flatnonzero(~nonempty):
            far = int(np.argmax(((points - centroids[j]) ** 2).sum(axis=1)))
            updated[j] = points[far]
        centroids = updated
    return centroids, history


def _train(points: np.ndarray, k: int, seed: int, max_iters: int, rel_tol: float,
           n_init: int) -> tuple[Codebook, list[float]]:
    pts = as_float_matrix(points, "points")
    n = pts.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    if not rel_tol > 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    if n_init < 1:
        raise ValueError(f"n_init must be >= 1, got {n_init}")
    if n < k:
        raise TooFewPointsError(f"{n} points cannot seed {k} centroids")
    if k > 1 and np.all(pts == pts[0]):
        warnings.warn(
            "all points identical; duplicate centroids will be produced",
            DegenerateDataWarning,
            stacklevel=3,
        )
    rng = np.random.default_rng(seed)
    best: tuple[np.ndarray, list[float]] | None = None
    for _ in range(n_init):
        init = _kmeans_pp_init(pts, k, rng)
        centroids, history = _lloyd(pts, init, max_iters, rel_tol)
        if best is None or history[-1] < best[1][-1]:
            best = (centroids, history)
    return Codebook(best[0].astype(np.float32)), best[1]


def kmeans_train(points, k: int, seed: int = 0, max_iters: int = 100,
                 rel_tol: float = 1e-6, n_init: int = 1) -> Codebook:
    """Train a k-centroid codebook; deterministic for fixed inputs and seed."""
    return _train(points, k, seed, max_iters, rel_tol, n_init)[0]


class SegmentKMeans(ParamsMixin):
    """Estimator wrapper: fit a codebook, predict token ids, restore embeddings."""

    def __init__(self, n_clusters: int, seed: int = 0, max_iters: int = 100,
                 rel_tol: float = 1e-6, n_init: int = 1):
        self.n_clusters = n_clusters
        self.seed = seed
        self.max_iters = max_iters
        self.rel_tol = rel_tol
        self.n_init = n_init

    def fit(self, X, y=None) -> "SegmentKMeans":
        self.codebook_, self.inertia_history_ = _train(
            X, self.n_clusters, self.seed, self.max_iters, self.rel_tol, self.n_init
        )
        self.inertia_ = self.inertia_history_[-1]
        self.labels_ = self.predict(X)
        return self

    def _check_fitted(self) -> Codebook:
        if not hasattr(self, "codebook_"):
            raise NotFittedError("call fit() before predict/inverse_transform")
        return self.codebook_

    def predict(self, X) -> np.ndarray:
        book = self._check_fitted()
        pts = as_float_matrix(X, "X")
        if pts.shape[1] != book.dim:
            raise DimMismatchError(f"X has dim {pts.shape[1]}, codebook has {book.dim}")
        labels, _ = _assign(pts, book.centroids.astype(np.float64))
        return labels

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X, y).labels_

    def inverse_transform(self, token_ids) -> np.ndarray:
        return restore_embeddings(token_ids, self._check_fitted())


def assign_tokens(seg: Segmentation, book: Codebook) -> Segmentation:
    """Fill token_id on every segment by nearest centroid (squared Euclidean)."""
    if not seg.segments:
        return seg
    for i, s in enumerate(seg.segments):
        if s.embedding is None:
            raise MissingEmbeddingError(f"segment {i} has no embedding")
    emb = np.stack([s.embedding for s in seg.segments]).astype(np.float64)
    if emb.shape[1] != book.dim:
        raise DimMismatchError(f"embeddings have dim {emb.shape[1]}, codebook has {book.dim}")
    labels, _ = _assign(emb, book.centroids.astype(np.float64))
    return seg.with_tokens(labels.tolist())


def restore_embeddings(token_ids, book: Codebook) -> np.ndarray:
    """Look up centroid rows for a token sequence, shape (len(token_ids), dim)."""
    ids = np.asarray(token_ids, dtype=np.int64)
    if ids.ndim != 1:
        raise ValueError("token_ids must be a 1-D sequence")
    if ids.size and (ids.min() < 0 or ids.max() >= book.k):
        raise TokenOutOfRangeError(
            f"token ids must lie in [0, {book.k}), got range [{ids.min()}, {ids.max()}]"
        )
    if ids.size == 0:
        return np.zeros((0, book.dim), dtype=np.float32)
    return book.centroids[ids].copy()
