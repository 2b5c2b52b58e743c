"""Evaluation tools: Ward clustering, cophenetic distances, correlations, digit histograms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baire import DigitArray
from .errors import InvalidArgumentError, UndefinedCorrelationError

WARD_MAX_OBJECTS = 20_000


@dataclass(frozen=True)
class Dendrogram:
    """Merge table in the usual linkage layout.

    Row t of ``merges`` is (cluster a, cluster b, level, size); leaves are
    0..I-1 and the cluster created at step t gets id I+t. ``level`` is the
    Ward merge cost, i.e. the increase in within-cluster sum of squares.
    """

    merges: np.ndarray
    n_leaves: int

    @property
    def levels(self) -> np.ndarray:
        return self.merges[:, 2]


def ward_cluster(values) -> Dendrogram:
    """Agglomerative Ward clustering of 1-d values via the Lance-Williams update.

    Dissimilarities are merge costs: two singletons x, y start at (x-y)**2 / 2
    and the update

        d(k, i+j) = ((nk+ni) d(k,i) + (nk+nj) d(k,j) - nk d(i,j)) / (nk+ni+nj)

    keeps every entry equal to the SSE increase of merging the two clusters.
    Ties go to the pair with the smallest slot indices (a merged cluster
    keeps the lower slot of its two parts).
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    n = x.size
    if n < 2:
        raise InvalidArgumentError("ward clustering needs at least two values")
    if n > WARD_MAX_OBJECTS:
        raise InvalidArgumentError(f"ward clustering is capped at {WARD_MAX_OBJECTS} objects")
    inf = np.inf
    dist = 0.5 * (x[:, None] - x[None, :]) ** 2
    np.fill_diagonal(dist, inf)
    size = np.ones(n)
    ids = np.arange(n)
    active = np.ones(n, dtype=bool)
    row_min = dist.min(axis=1)
    row_arg = dist.argmin(axis=1)
    merges = np.zeros((n - 1, 4))
    top = 0.0
    for t in range(n - 1):
        i = int(np.argmin(row_min))
        j = int(row_arg[i])
        level = dist[i, j]
        ni, nj = size[i], size[j]
        # floating round-off must not produce an inversion
        top = max(top, level)
        merges[t] = (min(ids[i], ids[j]), max(ids[i], ids[j]), top, ni + nj)

        new = ((size + ni) * dist[i] + (size + nj) * dist[j] - size * level) / (size + ni + nj)
        active[j] = False
        new[~active] = inf
        new[i] = inf
        dist[i, :] = new
        dist[:, i] = new
        dist[j, :] = inf
        dist[:, j] = inf
        size[i] = ni + nj
        ids[i] = n + t
        row_min[j] = inf
        row_min[i] = dist[i].min()
        row_arg[i] = dist[i].argmin()

        stale = active & ((row_arg == i) | (row_arg == j))
        stale[i] = False
        for k in np.flatnonzero(stale):
            row_arg[k] = dist[k].argmin()
            row_min[k] = dist[k, row_arg[k]]
        fresh = active & ~stale
        fresh[i] = False
        better = fresh & ((new < row_min) | ((new == row_min) & (i < row_arg)))
        row_min[better] = new[better]
        row_arg[better] = i
    return Dendrogram(merges, n)


def cophenetic_distances(d: Dendrogram) -> np.ndarray:
    """Square matrix of lowest-common-ancestor levels (zero diagonal)."""
    n = d.n_leaves
    out = np.zeros((n, n))
    members = {i: np.array([i]) for i in range(n)}
    for t, (a, b, level, _) in enumerate(d.merges):
        ma = members.pop(int(a))
        mb = members.pop(int(b))
        out[np.ix_(ma, mb)] = level
        out[np.ix_(mb, ma)] = level
        members[n + t] = np.concatenate([ma, mb])
    return out


def condensed(square) -> np.ndarray:
    """Upper-triangle entries (i < j), row-major."""
    square = np.asarray(square)
    iu = np.triu_indices(square.shape[0], k=1)
    return square[iu]


def absolute_differences(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64).ravel()
    return np.abs(v[:, None] - v[None, :])


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise InvalidArgumentError("pearson needs equal-length inputs")
    if a.size < 2:
        raise InvalidArgumentError("pearson needs at least two values")
    da = a - a.mean()
    db = b - b.mean()
    sa = np.sqrt(np.dot(da, da))
    sb = np.sqrt(np.dot(db, db))
    if sa == 0.0 or sb == 0.0:
        raise UndefinedCorrelationError("correlation undefined for zero variance")
    r = float(np.dot(da, db) / (sa * sb))
    return min(1.0, max(-1.0, r))


def digit_histogram(A: DigitArray) -> np.ndarray:
    """J x base table of digit counts per level."""
    return np.stack(
        [np.bincount(A.digits[:, j], minlength=A.base) for j in range(A.n_levels)]
    ).astype(np.int64)


def ultrametric_violations(D, tol: float = 0.0) -> int:
    """Ordered triples (x, y, z) with D[x, z] > max(D[x, y], D[y, z]) + tol."""
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidArgumentError("distance table must be square")
    count = 0
    for y in range(D.shape[0]):
        bound = np.maximum(D[:, y][:, None], D[y, :][None, :])
        count += int(np.count_nonzero(D > bound + tol))
    return count
