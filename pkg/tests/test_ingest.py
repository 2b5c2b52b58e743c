from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from baire_padic import (
    ConsensusVector,
    DataMatrix,
    InvalidArgumentError,
    InvalidStateError,
    ParseError,
    consensus_projection,
    extract_digits,
    generate_axes,
    load_matrix,
)
from baire_padic.ingest import RESCALE_DELTA, read_consensus, rescale_unit, write_consensus


def test_load_dense_identity(tmp_path):
    f = tmp_path / "m.csv"
    f.write_text("1,0\n0,1\n")
    X = load_matrix(f, "dense-csv")
    assert (X.rows, X.dims) == (2, 2)
    np.testing.assert_array_equal(X.values, np.eye(2))


def test_load_empty_file(tmp_path):
    f = tmp_path / "empty.csv"
    f.write_text("")
    with pytest.raises(ParseError, match="no rows"):
        load_matrix(f)


def test_load_triplets_with_declared_dims(tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("0 1 3.5\n")
    X = load_matrix(f, "sparse-triplet", dims=2)
    assert X.is_sparse
    assert (X.rows, X.dims) == (1, 2)
    assert X.values[0, 1] == 3.5


@pytest.mark.parametrize(
    "text, fmt, line",
    [
        ("1,2\n3\n", "dense-csv", 2),
        ("1,2\n3,x\n", "dense-csv", 2),
        ("1,nan\n", "dense-csv", 1),
        ("0 0 1\n0 5 1\n", "sparse-triplet", 2),
        ("0 0\n", "sparse-triplet", 1),
        ("0 -1 2\n", "sparse-triplet", 1),
    ],
)
def test_parse_errors_carry_line_numbers(tmp_path, text, fmt, line):
    f = tmp_path / "bad.txt"
    f.write_text(text)
    with pytest.raises(ParseError) as info:
        load_matrix(f, fmt, dims=3)
    assert info.value.line == line
    assert f":{line}" in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_matrix(tmp_path / "nope.csv")


def test_axes_single_dimension():
    E = generate_axes(1, 1, seed=42)
    np.testing.assert_array_equal(E.axes, [[1.0]])


def test_axes_deterministic():
    a = generate_axes(5, 10, seed=3)
    b = generate_axes(5, 10, seed=3)
    np.testing.assert_array_equal(a.axes, b.axes)
    assert not np.array_equal(a.axes, generate_axes(5, 10, seed=4).axes)


def test_axes_unit_norm():
    E = generate_axes(3, 99, seed=7)
    assert E.axes.shape == (99, 3)
    norms = np.sqrt((E.axes ** 2).sum(axis=1))
    assert np.all(np.abs(norms - 1.0) <= 1e-12)
    assert np.all(E.axes >= 0)


@pytest.mark.parametrize("dims, count", [(0, 1), (1, 0)])
def test_axes_invalid(dims, count):
    with pytest.raises(InvalidArgumentError):
        generate_axes(dims, count)


def test_consensus_single_axis():
    X = DataMatrix.from_array([[1.0, 0.0], [0.0, 1.0]])
    E = generate_axes(2, 1)
    E = type(E)(np.array([[1.0, 0.0]]), 0)
    cv = consensus_projection(X, E)
    np.testing.assert_allclose(cv.values, [1.0 / (1.0 + RESCALE_DELTA), 0.0], rtol=0, atol=1e-15)
    np.testing.assert_array_equal(cv.sort_order, [1, 0])


def test_consensus_identical_rows_and_constant_matrix():
    X = DataMatrix.from_array([[1.0, 2.0], [3.0, 1.0], [1.0, 2.0]])
    cv = consensus_projection(X, generate_axes(2, 99, seed=1))
    assert cv.values[0] == cv.values[2]
    const = DataMatrix.from_array(np.ones((4, 3)))
    cv = consensus_projection(const, generate_axes(3, 5))
    np.testing.assert_array_equal(cv.values, 0.0)


def test_consensus_dimension_mismatch():
    X = DataMatrix.from_array(np.ones((2, 3)))
    with pytest.raises(InvalidArgumentError):
        consensus_projection(X, generate_axes(2, 4))


def test_sparse_and_dense_agree(tmp_path):
    dense = np.array([[0.0, 2.0, 0.0], [1.5, 0.0, 0.0], [0.0, 0.0, 4.0]])
    f = tmp_path / "t.txt"
    f.write_text("0 1 2.0\n1 0 1.5\n2 2 4.0\n")
    Xs = load_matrix(f, "sparse-triplet", dims=3)
    E = generate_axes(3, 20, seed=5)
    a = consensus_projection(Xs, E)
    b = consensus_projection(DataMatrix.from_array(dense), E)
    np.testing.assert_allclose(a.values, b.values, atol=1e-15)


def test_rescale_keeps_order(rng):
    raw = rng.normal(size=200)
    v = rescale_unit(raw)
    assert v.min() == 0.0 and v.max() < 1.0
    np.testing.assert_array_equal(np.argsort(raw, kind="stable"), np.argsort(v, kind="stable"))


@pytest.mark.parametrize(
    "value, levels, expected",
    [(0.375, 3, [3, 7, 5]), (0.0, 8, [0] * 8), (0.999999999, 2, [9, 9])],
)
def test_extract_digits_examples(value, levels, expected):
    A = extract_digits(ConsensusVector.from_values([value]), levels)
    assert A.base == 10
    np.testing.assert_array_equal(A.digits[0], expected)


def test_extract_digits_out_of_range():
    with pytest.raises(InvalidStateError):
        extract_digits(ConsensusVector.from_values([1.0]), 3)
    with pytest.raises(InvalidArgumentError):
        extract_digits(ConsensusVector.from_values([0.5]), 0)


def test_rows_follow_sort_order_and_ties_are_stable():
    cv = ConsensusVector.from_values([0.5, 0.25, 0.5, 0.75])
    A = extract_digits(cv, 2)
    np.testing.assert_array_equal(A.order, [1, 0, 2, 3])
    np.testing.assert_array_equal(A.digits[:, 0], [2, 5, 5, 7])


@settings(max_examples=300, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=1.0, exclude_max=True, allow_nan=False),
    st.integers(min_value=1, max_value=12),
)
def test_digit_round_trip(v, levels):
    A = extract_digits(ConsensusVector.from_values([v]), levels)
    total = sum(Fraction(int(d), 10 ** (j + 1)) for j, d in enumerate(A.digits[0]))
    exact = Fraction(v)
    assert total <= exact < total + Fraction(1, 10 ** levels)


def test_pipeline_front_end_is_deterministic(tmp_path, rng):
    f = tmp_path / "x.csv"
    np.savetxt(f, rng.random((50, 4)), delimiter=",")

    def run():
        X = load_matrix(f)
        return extract_digits(consensus_projection(X, generate_axes(4, 99, 11)), 8)

    assert run() == run()


def test_identical_rows_identical_digits(rng):
    X = rng.random((30, 3))
    X[7] = X[19]
    cv = consensus_projection(DataMatrix.from_array(X), generate_axes(3, 99, 2))
    A = extract_digits(cv, 8)
    rows = A.row_of()
    np.testing.assert_array_equal(A.digits[rows[7]], A.digits[rows[19]])


def test_consensus_file_round_trip(tmp_path, rng):
    cv = ConsensusVector.from_values(rescale_unit(rng.normal(size=25)), seed=9, axes=99)
    path = tmp_path / "c.txt"
    write_consensus(path, cv)
    first = path.read_text().splitlines()[0]
    assert first == "consensus v1 I=25 seed=9 R=99"
    back = read_consensus(path)
    np.testing.assert_array_equal(back.values, cv.values)
    assert (back.seed, back.axes) == (9, 99)
