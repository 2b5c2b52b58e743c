"""Baire array display, longest-common-prefix distance and prefix buckets."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import InvalidArgumentError

DIGIT_CHARS = "0123456789"


@dataclass(frozen=True, eq=False)
class DigitArray:
    """I x J table of base-m digits.

    Row ``r`` holds the digits of object ``order[r]``; rows are kept in
    ascending consensus order so that adjacent rows are Baire neighbours.
    """

    digits: np.ndarray
    base: int = 10
    order: np.ndarray | None = None

    def __post_init__(self):
        d = np.array(self.digits, dtype=np.uint8, ndmin=2, copy=True)
        if d.ndim != 2:
            raise InvalidArgumentError("digit array must be 2-d")
        if not 2 <= self.base <= 10:
            raise InvalidArgumentError(f"base must be in 2..10, got {self.base}")
        if d.size and int(d.max()) >= self.base:
            raise InvalidArgumentError(f"digit {int(d.max())} not valid in base {self.base}")
        if self.order is None:
            order = np.arange(d.shape[0], dtype=np.int64)
        else:
            order = np.array(self.order, dtype=np.int64, copy=True)
            if order.shape != (d.shape[0],) or not np.array_equal(
                np.sort(order), np.arange(d.shape[0])
            ):
                raise InvalidArgumentError("order must be a permutation of the row ids")
        d.setflags(write=False)
        order.setflags(write=False)
        object.__setattr__(self, "digits", d)
        object.__setattr__(self, "order", order)

    @property
    def n_objects(self) -> int:
        return self.digits.shape[0]

    @property
    def n_levels(self) -> int:
        return self.digits.shape[1]

    def with_digits(self, digits, base: int) -> "DigitArray":
        return DigitArray(digits, base=base, order=self.order)

    def row_of(self) -> np.ndarray:
        """Inverse of ``order``: row index of each object id."""
        inv = np.empty_like(self.order)
        inv[self.order] = np.arange(self.order.size)
        return inv

    def prefix_codes(self, depth: int) -> np.ndarray:
        """Integer code of each row's first ``depth`` digits (base-m positional)."""
        codes = np.zeros(self.n_objects, dtype=np.int64)
        for j in range(depth):
            codes = codes * self.base + self.digits[:, j]
        return codes

    def __eq__(self, other):
        if not isinstance(other, DigitArray):
            return NotImplemented
        return (
            self.base == other.base
            and self.digits.shape == other.digits.shape
            and np.array_equal(self.digits, other.digits)
            and np.array_equal(self.order, other.order)
        )

    __hash__ = None


def baire_distance(a, b, base: int = 10) -> float:
    """base**-beta where beta is the length of the longest common prefix.

    Identical rows give base**-J rather than 0: the rows are finite
    precision, so equality of digit rows is the identity test.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidArgumentError("digit rows must be 1-d with the same length")
    if base < 2:
        raise InvalidArgumentError(f"invalid base {base}")
    if a.size and (a.max() >= base or b.max() >= base):
        raise InvalidArgumentError(f"digit not valid in base {base}")
    diff = np.flatnonzero(a != b)
    beta = int(diff[0]) if diff.size else a.size
    return float(base) ** -beta


def common_prefix_lengths(digits) -> np.ndarray:
    """Pairwise longest-common-prefix lengths of the rows of ``digits``."""
    d = np.asarray(digits)
    n, levels = d.shape
    beta = np.zeros((n, n), dtype=np.int64)
    alive = np.ones((n, n), dtype=bool)
    for j in range(levels):
        alive &= d[:, None, j] == d[None, :, j]
        beta += alive
    return beta


def baire_distance_matrix(A: DigitArray) -> np.ndarray:
    beta = common_prefix_lengths(A.digits)
    return float(A.base) ** -beta.astype(np.float64)


@dataclass(frozen=True)
class PrefixIndex:
    """Depth-c buckets: digit string -> frozenset of object ids."""

    depth: int
    base: int
    buckets: Mapping[str, frozenset] = field(repr=False)

    def __len__(self):
        return len(self.buckets)


def prefix_key(digits, base: int = 10) -> str:
    return "".join(DIGIT_CHARS[int(x)] for x in digits)


def build_prefix_index(A: DigitArray, depth: int) -> PrefixIndex:
    if not 1 <= depth <= A.n_levels:
        raise InvalidArgumentError(f"depth must be in 1..{A.n_levels}, got {depth}")
    codes = A.prefix_codes(depth)
    rows = np.argsort(codes, kind="stable")
    sorted_codes = codes[rows]
    starts = np.flatnonzero(np.r_[True, sorted_codes[1:] != sorted_codes[:-1]])
    ends = np.r_[starts[1:], sorted_codes.size]
    ids = A.order[rows]
    buckets = {}
    for s, e in zip(starts, ends):
        key = prefix_key(A.digits[rows[s], :depth])
        buckets[key] = frozenset(ids[s:e].tolist())
    return PrefixIndex(depth, A.base, MappingProxyType(buckets))


_EMPTY = frozenset()


def query_prefix(idx: PrefixIndex, prefix) -> frozenset:
    """Objects whose first ``idx.depth`` digits equal ``prefix``.

    One validation pass over the c prefix characters and one dict lookup;
    nothing here depends on the number of objects.
    """
    if not isinstance(prefix, str):
        prefix = prefix_key(prefix)
    if len(prefix) != idx.depth:
        raise InvalidArgumentError(f"prefix must have {idx.depth} digits, got {len(prefix)}")
    allowed = DIGIT_CHARS[: idx.base]
    for ch in prefix:
        if ch not in allowed:
            raise InvalidArgumentError(f"{prefix!r} is not a base-{idx.base} digit string")
    return idx.buckets.get(prefix, _EMPTY)


def layer_cluster_counts(A: DigitArray) -> np.ndarray:
    """Number of distinct length-l prefixes for l = 1..J."""
    counts = np.zeros(A.n_levels, dtype=np.int64)
    codes = np.zeros(A.n_objects, dtype=np.int64)
    for j in range(A.n_levels):
        # re-rank after each level so codes stay below I and never overflow
        codes = codes * A.base + A.digits[:, j]
        uniq, codes = np.unique(codes, return_inverse=True)
        codes = codes.astype(np.int64).ravel()
        counts[j] = uniq.size
    return counts
