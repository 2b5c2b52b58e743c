"""On-disk formats: packed digit arrays, codebooks and small CSV tables.

Packed digit file layout (little-endian):

    offset  size  field
    0       4     magic b"BAIR"
    4       1     format version (1)
    5       1     base m
    6       8     I, object count (uint64)
    14      4     J, level count (uint32)
    18      8     generator id, ASCII, NUL padded
    26      8     seed (uint64)
    34      ...   payload

The payload stores ceil(log2 m) bits per digit, object-major, level-minor.
Each digit is written least-significant bit first and bits fill each byte
from its least significant end; trailing pad bits are zero. The row order
is not stored; rows are in whatever order the array had when written.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .baire import DigitArray
from .errors import CorruptFileError, ParseError
from .ingest import GENERATOR_ID
from .quantize import Codebook

MAGIC = b"BAIR"
VERSION = 1
HEADER = struct.Struct("<4sBBQI8sQ")
HEADER_SIZE = HEADER.size


def bits_per_digit(base: int) -> int:
    return max(1, math.ceil(math.log2(base)))


def payload_size(n_objects: int, n_levels: int, base: int) -> int:
    return (n_objects * n_levels * bits_per_digit(base) + 7) // 8


def pack_digits(digits, base: int) -> bytes:
    b = bits_per_digit(base)
    flat = np.asarray(digits, dtype=np.uint8).ravel()
    bits = (flat[:, None] >> np.arange(b, dtype=np.uint8)[None, :]) & 1
    return np.packbits(bits.ravel(), bitorder="little").tobytes()


def unpack_digits(payload: bytes, n_cells: int, base: int) -> np.ndarray:
    b = bits_per_digit(base)
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    used = bits[: n_cells * b].reshape(n_cells, b)
    if np.any(bits[n_cells * b:]):
        raise CorruptFileError("non-zero pad bits")
    weights = (1 << np.arange(b)).astype(np.uint16)
    return (used.astype(np.uint16) @ weights).astype(np.uint8)


def encode_digit_array(A: DigitArray, seed: int = 0, generator: str = GENERATOR_ID) -> bytes:
    gen = generator.encode("ascii")
    if len(gen) > 8:
        raise ValueError("generator id longer than 8 bytes")
    header = HEADER.pack(MAGIC, VERSION, A.base, A.n_objects, A.n_levels, gen, seed)
    return header + pack_digits(A.digits, A.base)


def decode_digit_array(data: bytes, order=None):
    """Return ``(DigitArray, seed, generator_id)`` from packed bytes."""
    if len(data) < HEADER_SIZE:
        raise CorruptFileError("truncated header")
    magic, version, base, n_obj, n_lev, gen, seed = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CorruptFileError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CorruptFileError(f"unsupported format version {version}")
    if not 2 <= base <= 10:
        raise CorruptFileError(f"invalid base {base}")
    payload = data[HEADER_SIZE:]
    expected = payload_size(n_obj, n_lev, base)
    if len(payload) != expected:
        raise CorruptFileError(f"payload has {len(payload)} bytes, expected {expected}")
    digits = unpack_digits(payload, n_obj * n_lev, base).reshape(n_obj, n_lev)
    if digits.size and int(digits.max()) >= base:
        raise CorruptFileError(f"cell value {int(digits.max())} not valid in base {base}")
    return DigitArray(digits, base=base, order=order), seed, gen.rstrip(b"\0").decode("ascii")


def write_digit_array(path, A: DigitArray, seed: int = 0, generator: str = GENERATOR_ID) -> int:
    data = encode_digit_array(A, seed=seed, generator=generator)
    Path(path).write_bytes(data)
    return len(data)


def read_digit_array(path, order=None) -> DigitArray:
    return decode_digit_array(Path(path).read_bytes(), order=order)[0]


def write_codebook(path, cb: Codebook) -> None:
    lines = [f"codebook v1 K={cb.base} J={cb.n_levels}"]
    for j, cents in enumerate(cb.levels, start=1):
        lines.append(f"level {j}: " + " ".join(f"{c:.17g}" for c in cents))
    Path(path).write_text("\n".join(lines) + "\n")


def read_codebook(path) -> Codebook:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise ParseError("empty codebook file", path)
    head = lines[0].split()
    try:
        if head[:2] != ["codebook", "v1"]:
            raise ValueError
        fields = dict(h.split("=", 1) for h in head[2:])
        k, n_levels = int(fields["K"]), int(fields["J"])
    except (ValueError, KeyError):
        raise ParseError("bad codebook header", path, 1) from None
    levels = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        label, _, rest = line.partition(":")
        if label.strip() != f"level {len(levels) + 1}":
            raise ParseError(f"expected 'level {len(levels) + 1}:'", path, lineno)
        try:
            levels.append(np.array([float(t) for t in rest.split()]))
        except ValueError:
            raise ParseError("non-numeric codeword", path, lineno) from None
    if len(levels) != n_levels:
        raise ParseError(f"header says J={n_levels} but {len(levels)} levels follow", path)
    return Codebook(k, tuple(levels))


def write_layer_stats(path, counts) -> None:
    rows = ["level,count"] + [f"{j},{int(c)}" for j, c in enumerate(counts, start=1)]
    Path(path).write_text("\n".join(rows) + "\n")


def write_error_trace(path, trace) -> None:
    rows = ["base,err_vs_original,err_vs_previous"]
    for m, eo, ep in zip(trace.bases, trace.err_vs_original, trace.err_vs_previous):
        rows.append(f"{int(m)},{eo:.17g},{ep:.17g}")
    Path(path).write_text("\n".join(rows) + "\n")


def read_error_trace(path):
    from .reduce import ErrorTrace

    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return ErrorTrace(table[:, 0].astype(np.int64), table[:, 1], table[:, 2])


def write_histogram(path, hist) -> None:
    hist = np.asarray(hist)
    head = "level," + ",".join(f"d{v}" for v in range(hist.shape[1]))
    rows = [head] + [f"{j}," + ",".join(str(int(c)) for c in row)
                     for j, row in enumerate(hist, start=1)]
    Path(path).write_text("\n".join(rows) + "\n")


def write_index(path, idx) -> None:
    """One bucket per line: ``prefix<TAB>id id id``, prefixes sorted."""
    lines = [f"index v1 depth={idx.depth} base={idx.base}"]
    for key in sorted(idx.buckets):
        lines.append(key + "\t" + " ".join(str(i) for i in sorted(idx.buckets[key])))
    Path(path).write_text("\n".join(lines) + "\n")


def read_index(path):
    from types import MappingProxyType

    from .baire import PrefixIndex

    path = Path(path)
    lines = path.read_text().splitlines()
    head = lines[0].split() if lines else []
    try:
        if head[:2] != ["index", "v1"]:
            raise ValueError
        fields = dict(h.split("=", 1) for h in head[2:])
        depth, base = int(fields["depth"]), int(fields["base"])
    except (ValueError, KeyError):
        raise ParseError("bad index header", path, 1) from None
    buckets = {}
    for lineno, line in enumerate(lines[1:], start=2):
        key, _, ids = line.partition("\t")
        if len(key) != depth:
            raise ParseError(f"prefix {key!r} does not have {depth} digits", path, lineno)
        try:
            buckets[key] = frozenset(int(t) for t in ids.split())
        except ValueError:
            raise ParseError("non-integer object id", path, lineno) from None
    return PrefixIndex(depth, base, MappingProxyType(buckets))
