"""Per-level K-means quantization of a decimal Baire array into a base-K array.

Every digit level is clustered on its own. The centroids of a level form
its codebook, and an object's new digit is the rank of its centroid in
ascending order, so the quantized array is still an ordered hierarchy.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .baire import DigitArray
from .errors import InvalidArgumentError

DEFAULT_RESTARTS = 50
DEFAULT_MAX_ITER = 500


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray  # ascending
    assignment: np.ndarray  # cluster index per input value
    mse: float
    k_requested: int
    converged: bool = True

    @property
    def k(self) -> int:
        return self.centroids.size

    @property
    def reduced(self) -> bool:
        """True when fewer distinct values than K forced a smaller K."""
        return self.k < self.k_requested


def _distinct(values):
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise InvalidArgumentError("cannot quantize an empty set of values")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("values must be finite")
    uniq, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    return uniq, inverse.ravel(), counts.astype(np.float64)


def _nearest(points, centroids):
    # argmin keeps the lower index on ties, so labels stay monotone in the point value
    return np.argmin(np.abs(points[:, None] - centroids[None, :]), axis=1)


def _partition_means(points, weights, labels, k):
    wsum = np.bincount(labels, weights=weights, minlength=k)
    xsum = np.bincount(labels, weights=weights * points, minlength=k)
    return wsum, xsum


def _finalize(points, weights, centroids):
    """Nearest-centroid partition, empty clusters dropped, centroids set to class means."""
    order = np.argsort(centroids, kind="stable")
    labels = _nearest(points, centroids[order])
    used = np.unique(labels)
    remap = np.full(centroids.size, -1, dtype=np.int64)
    remap[used] = np.arange(used.size)
    labels = remap[labels]
    wsum, xsum = _partition_means(points, weights, labels, used.size)
    means = xsum / wsum
    sse = float(np.sum(weights * (points - means[labels]) ** 2))
    return means, labels, sse


def _starting_sets(n, k, restarts, seed):
    """Up to ``restarts`` distinct k-subsets of range(n) as starting centres.

    When there are no more subsets than restarts, all of them are used in
    lexicographic order; otherwise each restart draws from its own spawned
    generator and repeated subsets are redrawn.
    """
    if math.comb(n, k) <= restarts:
        yield from (np.array(c) for c in itertools.combinations(range(n), k))
        return
    seen = set()
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.Generator(np.random.PCG64(child))
        for _ in range(100):
            pick = np.sort(rng.choice(n, size=k, replace=False))
            key = pick.tobytes()
            if key not in seen:
                break
        seen.add(key)
        yield pick


def _lloyd(points, weights, start, max_iter):
    centroids = points[start].copy()
    k = start.size
    labels = None
    converged = False
    for _ in range(max_iter):
        new_labels = _nearest(points, centroids)
        if labels is not None and np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
        wsum, xsum = _partition_means(points, weights, labels, k)
        empty = np.flatnonzero(wsum == 0)
        centroids = np.where(wsum > 0, xsum / np.where(wsum > 0, wsum, 1.0), centroids)
        if empty.size:
            # re-seed each empty cluster at the point farthest from its own centroid
            dist = np.abs(points - centroids[labels])
            taken = np.isin(points, centroids)
            for c in empty:
                dist_c = np.where(taken, -1.0, dist)
                far = int(np.argmax(dist_c))
                if dist_c[far] < 0:
                    break
                centroids[c] = points[far]
                taken[far] = True
            labels = None
        centroids = np.sort(centroids)
    return centroids, converged


def kmeans_1d(values, k: int, restarts: int = DEFAULT_RESTARTS,
              max_iter: int = DEFAULT_MAX_ITER, seed: int = 0) -> KMeansResult:
    """Multi-start Lloyd iteration on the distinct values, weighted by multiplicity.

    Each restart starts from a different set of k distinct values (see
    ``_starting_sets``) and the lowest-MSE run wins, earliest on ties.
    The returned MSE is the mean squared distance over all input values.
    """
    if k < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {k}")
    if restarts < 1 or max_iter < 1:
        raise InvalidArgumentError("restarts and max_iter must be >= 1")
    points, inverse, weights = _distinct(values)
    k_eff = min(k, points.size)
    total = weights.sum()
    best = None
    for start in _starting_sets(points.size, k_eff, restarts, seed):
        centroids, converged = _lloyd(points, weights, start, max_iter)
        means, labels, sse = _finalize(points, weights, centroids)
        if best is None or sse < best[2]:
            best = (means, labels, sse, converged)
    means, labels, sse, converged = best
    return KMeansResult(means, labels[inverse], float(sse / total), k, converged)


def exact_quantize_1d(values, k: int) -> KMeansResult:
    """Globally optimal 1-d K-means by dynamic programming over contiguous splits.

    O(K n^2) in the number n of distinct values; meant as a reference for
    small inputs.
    """
    if k < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {k}")
    points, inverse, weights = _distinct(values)
    n = points.size
    k_eff = min(k, n)
    cw = np.r_[0.0, np.cumsum(weights)]
    cx = np.r_[0.0, np.cumsum(weights * points)]
    cxx = np.r_[0.0, np.cumsum(weights * points * points)]

    def seg_cost(a, b):
        # SSE of points[a:b]; a may be an array
        w = cw[b] - cw[a]
        s = cx[b] - cx[a]
        return np.maximum(cxx[b] - cxx[a] - s * s / w, 0.0)

    inf = np.inf
    cost = np.full((k_eff + 1, n + 1), inf)
    split = np.zeros((k_eff + 1, n + 1), dtype=np.int64)
    cost[0, 0] = 0.0
    for m in range(1, k_eff + 1):
        for b in range(m, n + 1):
            a = np.arange(m - 1, b)
            cand = cost[m - 1, a] + seg_cost(a, b)
            best = int(np.argmin(cand))
            cost[m, b] = cand[best]
            split[m, b] = a[best]
    bounds = [n]
    for m in range(k_eff, 0, -1):
        bounds.append(split[m, bounds[-1]])
    bounds = bounds[::-1]
    labels = np.zeros(n, dtype=np.int64)
    for c in range(k_eff):
        labels[bounds[c]:bounds[c + 1]] = c
    wsum, xsum = _partition_means(points, weights, labels, k_eff)
    means = xsum / wsum
    sse = float(np.sum(weights * (points - means[labels]) ** 2))
    return KMeansResult(means, labels[inverse], float(sse / weights.sum()), k)


@dataclass(frozen=True)
class Codebook:
    """Per-level ascending centroids on the raw digit scale.

    A level with fewer distinct digits than K keeps fewer centroids.
    """

    base: int
    levels: tuple

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def codeword(self, level: int, digit: int) -> float:
        return float(self.levels[level][digit])


@dataclass(frozen=True)
class QuantizationResult:
    encoded: DigitArray
    codebook: Codebook
    mse_per_level: np.ndarray
    reduced_levels: tuple = ()


def encode_array(A: DigitArray, k: int, restarts: int = DEFAULT_RESTARTS,
                 max_iter: int = DEFAULT_MAX_ITER, seed: int = 0) -> QuantizationResult:
    """Quantize each decimal level of ``A`` to ``k`` codewords.

    K = 10 is accepted as the identity-like case (one codeword per digit).
    Every level uses the same seed, so a level's result depends only on
    its own digits.
    """
    if A.base != 10:
        raise InvalidArgumentError(f"encode_array expects a base-10 array, got base {A.base}")
    if not 2 <= k <= 10:
        raise InvalidArgumentError(f"K must be in 2..10, got {k}")
    encoded = np.zeros_like(A.digits)
    levels, mse, reduced = [], [], []
    for j in range(A.n_levels):
        try:
            res = kmeans_1d(A.digits[:, j], k, restarts=restarts, max_iter=max_iter, seed=seed)
        except InvalidArgumentError as exc:
            raise InvalidArgumentError(f"level {j + 1}: {exc}") from exc
        encoded[:, j] = res.assignment
        levels.append(res.centroids)
        mse.append(res.mse)
        if res.reduced:
            reduced.append(j + 1)
    return QuantizationResult(
        encoded=A.with_digits(encoded, base=k),
        codebook=Codebook(k, tuple(levels)),
        mse_per_level=np.array(mse),
        reduced_levels=tuple(reduced),
    )


def decode_reals(Q: QuantizationResult) -> np.ndarray:
    """sum_j codeword(j, digit) * 10**-j, returned indexed by object id."""
    enc = Q.encoded
    row_values = np.zeros(enc.n_objects)
    for j, centroids in enumerate(Q.codebook.levels):
        row_values += centroids[enc.digits[:, j]] * 10.0 ** -(j + 1)
    out = np.empty_like(row_values)
    out[enc.order] = row_values
    return out
