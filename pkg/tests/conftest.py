import itertools

import numpy as np
import pytest

from baire_padic import DigitArray


def brute_force_quantize(values, k):
    """Best contiguous partition of the sorted distinct values, by enumeration.

    Optimal 1-d K-means clusters are intervals of the sorted values, so
    trying every choice of k-1 cut points finds the global optimum.
    Returns (centroids, mse).
    """
    x = np.sort(np.asarray(values, dtype=float))
    uniq = np.unique(x)
    k = min(k, uniq.size)
    best = None
    for cuts in itertools.combinations(range(1, uniq.size), k - 1):
        edges = [uniq[0] - 1.0] + [uniq[c - 1] for c in cuts] + [uniq[-1]]
        sse, cents = 0.0, []
        for lo, hi in zip(edges[:-1], edges[1:]):
            part = x[(x > lo) & (x <= hi)]
            cents.append(part.mean())
            sse += float(((part - part.mean()) ** 2).sum())
        if best is None or sse < best[1]:
            best = (np.array(cents), sse)
    return best[0], best[1] / x.size


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_digit_array(rng, n, levels, base):
    return DigitArray(rng.integers(0, base, size=(n, levels)), base=base)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
