import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from baire_padic import Codebook, CorruptFileError, DigitArray, ParseError, build_prefix_index, query_prefix
from baire_padic import formats
from baire_padic.formats import HEADER_SIZE, bits_per_digit, payload_size

from conftest import random_digit_array


@pytest.mark.parametrize("base, bits", [(2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (10, 4)])
def test_bits_per_digit(base, bits):
    assert bits_per_digit(base) == bits


def test_binary_payload_size(tmp_path, rng):
    A = random_digit_array(rng, 8, 8, 2)
    size = formats.write_digit_array(tmp_path / "a.bair", A)
    assert size - HEADER_SIZE == 8


def test_decimal_payload_size(tmp_path):
    A = DigitArray([[1, 2], [3, 9]])
    data = formats.encode_digit_array(A)
    assert len(data) - HEADER_SIZE == 2
    # low nibble first: digits 1,2,3,9 -> bytes 0x21, 0x93
    assert data[HEADER_SIZE:] == bytes([0x21, 0x93])


def test_header_fields():
    A = DigitArray(np.zeros((3, 2)), base=5)
    data = formats.encode_digit_array(A, seed=77)
    assert data[:4] == b"BAIR"
    back, seed, gen = formats.decode_digit_array(data)
    assert (back.base, back.n_objects, back.n_levels, seed, gen) == (5, 3, 2, 77, "PCG64")


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10), st.integers(1, 50), st.integers(1, 9), st.integers(0, 2 ** 32 - 1))
def test_round_trip(base, n, levels, seed):
    A = random_digit_array(np.random.default_rng(seed), n, levels, base)
    data = formats.encode_digit_array(A)
    assert len(data) == HEADER_SIZE + payload_size(n, levels, base)
    back, _, _ = formats.decode_digit_array(data)
    assert back == A


def test_corrupt_files(tmp_path):
    good = formats.encode_digit_array(DigitArray([[1, 2, 3]], base=4))
    with pytest.raises(CorruptFileError, match="magic"):
        formats.decode_digit_array(b"XXXX" + good[4:])
    with pytest.raises(CorruptFileError, match="version"):
        formats.decode_digit_array(good[:4] + bytes([9]) + good[5:])
    with pytest.raises(CorruptFileError, match="payload"):
        formats.decode_digit_array(good[:-1])
    with pytest.raises(CorruptFileError, match="header"):
        formats.decode_digit_array(good[:10])
    # base-3 header over a payload holding the digit 3
    bad = bytearray(good)
    bad[5] = 3
    with pytest.raises(CorruptFileError, match="not valid"):
        formats.decode_digit_array(bytes(bad))


def test_size_is_affine_in_objects(tmp_path, rng):
    sizes = []
    counts = [1000, 10_000, 100_000]
    for n in counts:
        A = random_digit_array(rng, n, 8, 2)
        sizes.append(formats.write_digit_array(tmp_path / f"{n}.bair", A))
    slope = (sizes[1] - sizes[0]) / (counts[1] - counts[0])
    assert slope == 1.0
    assert sizes[2] == sizes[0] + slope * (counts[2] - counts[0])


def test_codebook_round_trip(tmp_path):
    cb = Codebook(3, (np.array([0.1, 4.5, 1 / 3 + 7]), np.array([2.0])))
    path = tmp_path / "cb.txt"
    formats.write_codebook(path, cb)
    lines = path.read_text().splitlines()
    assert lines[0] == "codebook v1 K=3 J=2"
    assert lines[1].startswith("level 1: 0.10000000000000001 4.5 ")
    back = formats.read_codebook(path)
    assert back.base == 3
    for a, b in zip(back.levels, cb.levels):
        np.testing.assert_array_equal(a, b)


def test_codebook_bad_header(tmp_path):
    path = tmp_path / "cb.txt"
    path.write_text("codebook v2 K=3 J=1\nlevel 1: 1 2 3\n")
    with pytest.raises(ParseError):
        formats.read_codebook(path)


def test_layer_stats_csv(tmp_path):
    formats.write_layer_stats(tmp_path / "s.csv", [2, 3])
    assert (tmp_path / "s.csv").read_text() == "level,count\n1,2\n2,3\n"


def test_index_round_trip(tmp_path, rng):
    A = random_digit_array(rng, 300, 3, 6)
    idx = build_prefix_index(A, 2)
    formats.write_index(tmp_path / "i.txt", idx)
    back = formats.read_index(tmp_path / "i.txt")
    assert dict(back.buckets) == dict(idx.buckets)
    assert query_prefix(back, "00") == query_prefix(idx, "00")
