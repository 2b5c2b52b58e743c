"""Stepwise base reduction of a Baire array by merging adjacent digit values.

One step looks at vertically adjacent rows (objects i and i+1 in consensus
order) that share the parent digit at the previous level, counts how often
each value pair (v, v+1) occurs between them, and merges the least frequent
pair: every digit >= w drops by one, across all levels at once. Repeating
the step takes base 10 down to any target base >= 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baire import DigitArray
from .errors import InvalidArgumentError, InvalidStateError


@dataclass(frozen=True)
class ReductionStep:
    base_before: int
    base_after: int
    merge_value: int
    candidate_counts: dict = field(default_factory=dict)
    fallback_used: bool = False


def candidate_pairs(A: DigitArray) -> dict:
    """Counts of neighbour pairs differing by exactly 1, keyed by (v, v+1).

    Level-1 neighbours always share the (virtual) root; deeper neighbours
    count only when their digits at the previous level agree.
    """
    if A.n_objects < 2:
        raise InvalidArgumentError("need at least two objects")
    d = A.digits.astype(np.int64)
    upper, lower = d[:-1], d[1:]
    same_parent = np.ones_like(upper, dtype=bool)
    same_parent[:, 1:] = upper[:, :-1] == lower[:, :-1]
    hit = same_parent & (np.abs(upper - lower) == 1)
    lows = np.minimum(upper, lower)[hit]
    tally = np.bincount(lows, minlength=A.base)
    return {(v, v + 1): int(tally[v]) for v in range(A.base) if tally[v]}


def merge_values(A: DigitArray, w: int) -> DigitArray:
    """Merge value w into w-1: every digit >= w is decremented, output base is one less."""
    if A.base <= 2:
        raise InvalidArgumentError("base is already 2")
    if not 1 <= w <= A.base - 1:
        raise InvalidArgumentError(f"merge value must be in 1..{A.base - 1}, got {w}")
    d = A.digits
    out = np.where(d >= w, d - 1, d).astype(np.uint8)
    return A.with_digits(out, base=A.base - 1)


def _fallback_merge_value(A: DigitArray) -> int:
    # no neighbour pair differs by one: merge the pair touching the fewest cells
    occupancy = np.bincount(A.digits.ravel(), minlength=A.base)
    pair_load = occupancy[:-1] + occupancy[1:]
    return int(np.argmin(pair_load)) + 1


def reduce_base_once(A: DigitArray):
    """Approximate a base-v array by a base-(v-1) array.

    w is the larger value of the least frequent candidate pair, with ties
    going to the smallest w. Returns ``(new_array, ReductionStep)``.
    """
    if A.base <= 2:
        raise InvalidArgumentError("base is already 2")
    counts = candidate_pairs(A)
    if counts:
        least = min(counts.values())
        w = min(hi for (lo, hi), n in counts.items() if n == least)
        fallback = False
    else:
        w = _fallback_merge_value(A)
        fallback = True
    out = merge_values(A, w)
    step = ReductionStep(A.base, out.base, w, counts, fallback)
    return out, step


def reduce_chain(A: DigitArray, target: int):
    """Apply ``reduce_base_once`` until the base equals ``target``.

    Returns a list of ``(array, step)``, one per produced base.
    """
    if not 2 <= target < A.base:
        raise InvalidArgumentError(f"target base must be in 2..{A.base - 1}, got {target}")
    chain = []
    current = A
    while current.base > target:
        current, step = reduce_base_once(current)
        chain.append((current, step))
    return chain


@dataclass(frozen=True)
class ErrorTrace:
    bases: np.ndarray
    err_vs_original: np.ndarray
    err_vs_previous: np.ndarray

    def __len__(self):
        return self.bases.size


def normalized(A: DigitArray, divisor: int | None = None) -> np.ndarray:
    """Cells scaled into [0, 1]; by default each array is divided by its own base - 1."""
    return A.digits.astype(np.float64) / (divisor if divisor is not None else A.base - 1)


NORMALIZATIONS = ("fixed", "per-array")


def approximation_errors(chain, original: DigitArray, normalization: str = "fixed") -> ErrorTrace:
    """Mean squared error over normalized cells, against the original and the previous array.

    ``fixed`` divides every array by the original base - 1, so a reduced
    array sits in [0, (m-1)/(base-1)] and the error against the original can
    only grow along a chain (each step lowers a cell by 0 or 1).
    ``per-array`` divides each array by its own base - 1 so that every
    representation spans the full [0, 1]; this rescaling can make the error
    against the original go down between steps.
    """
    if normalization not in NORMALIZATIONS:
        raise InvalidArgumentError(f"normalization must be one of {NORMALIZATIONS}")
    divisor = original.base - 1 if normalization == "fixed" else None
    ref = normalized(original, divisor)
    prev = ref
    bases, vs_orig, vs_prev = [], [], []
    for item in chain:
        arr = item[0] if isinstance(item, tuple) else item
        if arr.digits.shape != original.digits.shape:
            raise InvalidStateError("chain array shape differs from the original")
        cur = normalized(arr, divisor)
        bases.append(arr.base)
        vs_orig.append(float(np.mean((cur - ref) ** 2)))
        vs_prev.append(float(np.mean((cur - prev) ** 2)))
        prev = cur
    return ErrorTrace(np.array(bases, dtype=np.int64), np.array(vs_orig), np.array(vs_prev))
