import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.cluster.hierarchy import cophenet, linkage
from scipy.spatial.distance import squareform

from baire_padic import (
    DigitArray,
    InvalidArgumentError,
    UndefinedCorrelationError,
    baire_distance_matrix,
    cophenetic_distances,
    digit_histogram,
    pearson,
    ultrametric_violations,
    ward_cluster,
)
from baire_padic.evaluate import absolute_differences

from conftest import random_digit_array


def test_ward_first_merge_joins_zeros():
    d = ward_cluster([0.0, 0.0, 10.0])
    assert set(d.merges[0, :2].astype(int)) == {0, 1}
    assert d.merges[0, 2] == 0.0


def test_ward_two_points_cost():
    # SSE increase of merging singletons x, y is (x - y)**2 / 2
    d = ward_cluster([1.0, 4.0])
    assert d.merges.shape == (1, 4)
    assert d.merges[0, 2] == pytest.approx(4.5)
    assert d.merges[0, 3] == 2


def test_ward_merges_duplicates_first():
    d = ward_cluster([5.0, 1.0, 3.0, 5.0, 1.0])
    first_two = {frozenset(map(int, row[:2])) for row in d.merges[:2]}
    assert first_two == {frozenset({0, 3}), frozenset({1, 4})}


def test_ward_needs_two():
    with pytest.raises(InvalidArgumentError):
        ward_cluster([1.0])


@pytest.mark.parametrize("n", [2, 3, 10, 120])
def test_ward_matches_scipy(rng, n):
    # scipy reports sqrt(2 * SSE increase) as the height
    x = rng.normal(size=n)
    ours = cophenetic_distances(ward_cluster(x))
    ref = squareform(cophenet(linkage(x[:, None], "ward"))) ** 2 / 2
    np.testing.assert_allclose(ours, ref, atol=1e-12)


def test_ward_levels_non_decreasing(rng):
    d = ward_cluster(rng.random(300))
    assert np.all(np.diff(d.levels) >= 0)
    assert d.merges[-1, 3] == 300


def test_cophenetic_two_leaves():
    d = ward_cluster([0.0, 2.0])
    c = cophenetic_distances(d)
    np.testing.assert_array_equal(c, [[0.0, 2.0], [2.0, 0.0]])


def test_cophenetic_properties(rng):
    c = cophenetic_distances(ward_cluster(rng.random(150)))
    np.testing.assert_array_equal(c, c.T)
    assert np.all(np.diag(c) == 0)
    assert ultrametric_violations(c, 0.0) == 0
    assert np.unique(c[np.triu_indices(150, 1)]).size <= 149


def test_pearson_basics(rng):
    x = rng.normal(size=50)
    assert pearson(x, x) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    assert pearson(x, 3.0 * x + 7.0) == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=30),
    st.floats(0.1, 10),
    st.floats(-10, 10),
    st.integers(0, 1000),
)
def test_pearson_affine_invariance(xs, a, b, seed):
    x = np.array(xs)
    if np.ptp(x) < 1e-3:
        return
    y = np.random.default_rng(seed).normal(size=x.size)
    assert pearson(a * x + b, y) == pytest.approx(pearson(x, y), abs=1e-9)


def test_pearson_errors():
    with pytest.raises(UndefinedCorrelationError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(InvalidArgumentError):
        pearson([1, 2], [1, 2, 3])


def test_histogram_constant_and_sums(rng):
    A = DigitArray(np.full((40, 3), 6))
    h = digit_histogram(A)
    assert h.shape == (3, 10)
    assert np.all((h > 0).sum(axis=1) == 1)
    B = random_digit_array(rng, 5000, 4, 10)
    hb = digit_histogram(B)
    np.testing.assert_array_equal(hb.sum(axis=1), 5000)
    # uniform digits: each bin near I/base
    expected = 5000 / 10
    chi2 = ((hb - expected) ** 2 / expected).sum(axis=1)
    assert np.all(chi2 < 40)  # 9 dof; p ~ 1e-5


def test_violations_collinear():
    D = absolute_differences([0.0, 1.0, 3.0])
    # (0, 1, 3) and its mirror (3, 1, 0)
    assert ultrametric_violations(D, 0.0) == 2


def test_violations_baire(rng):
    D = baire_distance_matrix(random_digit_array(rng, 60, 5, 4))
    assert ultrametric_violations(D, 0.0) == 0
