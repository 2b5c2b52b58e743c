"""Loading data, seeded random axes, consensus projection and decimal digits.

All randomness goes through numpy's PCG64 bit generator, seeded directly
with the user seed. The generator id is written into every file header that
depends on it, since a different generator would give different axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgumentError, InvalidStateError, ParseError

GENERATOR_ID = "PCG64"
DEFAULT_AXES = 99
DEFAULT_LEVELS = 8
RESCALE_DELTA = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class DataMatrix:
    """I objects by D dimensions, dense ndarray or scipy CSR matrix."""

    values: np.ndarray | sp.csr_matrix

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.values)

    @classmethod
    def from_array(cls, values) -> "DataMatrix":
        if sp.issparse(values):
            m = sp.csr_matrix(values, dtype=np.float64)
            data = m.data
        else:
            m = np.array(values, dtype=np.float64, ndmin=2)
            data = m
        if m.shape[0] < 1 or m.shape[1] < 1:
            raise InvalidArgumentError("data matrix needs at least one row and one column")
        if not np.all(np.isfinite(data)):
            raise InvalidArgumentError("data matrix contains non-finite values")
        return cls(m)


@dataclass(frozen=True)
class ProjectionEnsemble:
    axes: np.ndarray  # R x D, unit rows
    seed: int

    @property
    def count(self) -> int:
        return self.axes.shape[0]

    @property
    def dims(self) -> int:
        return self.axes.shape[1]


@dataclass(frozen=True)
class ConsensusVector:
    """Consensus projection values in [0, 1), indexed by object id."""

    values: np.ndarray
    sort_order: np.ndarray
    seed: int = 0
    axes: int = 0

    @classmethod
    def from_values(cls, values, seed: int = 0, axes: int = 0) -> "ConsensusVector":
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise InvalidArgumentError("consensus values must be a non-empty 1-d array")
        order = np.argsort(v, kind="stable")
        v = v.copy()
        v.setflags(write=False)
        order.setflags(write=False)
        return cls(v, order, seed, axes)


def _parse_float(text, path, lineno):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"non-numeric cell {text.strip()!r}", path, lineno) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite cell {text.strip()!r}", path, lineno)
    return value


def _load_dense(path):
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ParseError(f"row has {len(cells)} cells, expected {width}", path, lineno)
            rows.append([_parse_float(c, path, lineno) for c in cells])
    if not rows:
        raise ParseError("no rows", path)
    return DataMatrix(np.array(rows, dtype=np.float64))


def _parse_index(text, path, lineno, what):
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"non-integer {what} index {text!r}", path, lineno) from None
    if value < 0:
        raise ParseError(f"negative {what} index {value}", path, lineno)
    return value


def _load_triplets(path, dims=None, rows=None):
    r_idx, c_idx, vals = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise ParseError(f"expected 'row col value', got {len(parts)} fields", path, lineno)
            r = _parse_index(parts[0], path, lineno, "row")
            c = _parse_index(parts[1], path, lineno, "column")
            if dims is not None and c >= dims:
                raise ParseError(f"column index {c} out of range for D={dims}", path, lineno)
            if rows is not None and r >= rows:
                raise ParseError(f"row index {r} out of range for I={rows}", path, lineno)
            r_idx.append(r)
            c_idx.append(c)
            vals.append(_parse_float(parts[2], path, lineno))
    if not vals:
        raise ParseError("no rows", path)
    n_rows = rows if rows is not None else max(r_idx) + 1
    n_dims = dims if dims is not None else max(c_idx) + 1
    m = sp.coo_matrix((vals, (r_idx, c_idx)), shape=(n_rows, n_dims), dtype=np.float64)
    return DataMatrix(m.tocsr())


def load_matrix(path, format: str = "dense-csv", dims: int | None = None,
                rows: int | None = None) -> DataMatrix:
    """Read a dense CSV (one object per line) or a 0-based ``row col value`` triplet file.

    For triplets, ``dims``/``rows`` fix the shape; otherwise it is inferred
    from the largest indices seen.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError("file does not exist", path)
    if format in ("dense-csv", "dense", "csv"):
        return _load_dense(path)
    if format in ("sparse-triplet", "sparse", "triplet"):
        return _load_triplets(path, dims=dims, rows=rows)
    raise InvalidArgumentError(f"unknown matrix format {format!r}")


def generate_axes(dims: int, count: int = DEFAULT_AXES, seed: int = 0) -> ProjectionEnsemble:
    """Draw ``count`` axes with components uniform on [0, 1), each scaled to unit norm."""
    if dims < 1 or count < 1:
        raise InvalidArgumentError(f"need D >= 1 and R >= 1, got D={dims}, R={count}")
    raw = make_rng(seed).random((count, dims))
    norms = np.linalg.norm(raw, axis=1)
    # a zero draw is possible in principle (probability ~2^-53 per component)
    bad = norms == 0.0
    if np.any(bad):
        raw[bad] = 1.0
        norms[bad] = np.sqrt(dims)
    axes = raw / norms[:, None]
    axes.setflags(write=False)
    return ProjectionEnsemble(axes, seed)


def rescale_unit(raw) -> np.ndarray:
    """Affine map onto [0, 1); the maximum lands just below 1."""
    raw = np.asarray(raw, dtype=np.float64)
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        return np.zeros_like(raw)
    out = (raw - lo) / ((hi - lo) * (1.0 + RESCALE_DELTA))
    # guard against the last ulp rounding up to 1.0
    return np.minimum(out, np.nextafter(1.0, 0.0))


def consensus_projection(X: DataMatrix, E: ProjectionEnsemble) -> ConsensusVector:
    if X.dims != E.dims:
        raise InvalidArgumentError(f"data has D={X.dims} but axes have D={E.dims}")
    proj = X.values @ E.axes.T
    raw = np.asarray(proj).mean(axis=1)
    return ConsensusVector.from_values(rescale_unit(raw), seed=E.seed, axes=E.count)


def truncate_scaled(values, levels: int) -> np.ndarray:
    """Exact floor(v * 10**levels) as int64.

    The float product is only trusted away from integers; values whose
    product lands within a few ulps of an integer are redone in exact
    integer arithmetic.
    """
    v = np.asarray(values, dtype=np.float64)
    scaled = v * 10.0 ** levels
    n = np.floor(scaled).astype(np.int64)
    slack = 4.0 * np.finfo(np.float64).eps * np.maximum(scaled, 1.0)
    near = np.abs(scaled - np.rint(scaled)) <= slack
    if np.any(near):
        power = 10 ** levels
        flat = n.reshape(-1)
        for k in np.flatnonzero(near.reshape(-1)):
            num, den = float(v.reshape(-1)[k]).as_integer_ratio()
            flat[k] = num * power // den
    return n


def extract_digits(v: ConsensusVector, levels: int = DEFAULT_LEVELS):
    """Decimal digits 1..J of each value, rows in ascending consensus order."""
    from .baire import DigitArray

    if levels < 1:
        raise InvalidArgumentError(f"need J >= 1, got {levels}")
    if levels > 15:
        raise InvalidArgumentError("more than 15 decimal levels exceeds float64 precision")
    vals = np.asarray(v.values)
    if np.any(vals < 0.0) or np.any(vals >= 1.0) or not np.all(np.isfinite(vals)):
        raise InvalidStateError("consensus values must lie in [0, 1)")
    n = truncate_scaled(vals[v.sort_order], levels)
    powers = 10 ** np.arange(levels - 1, -1, -1, dtype=np.int64)
    digits = (n[:, None] // powers[None, :]) % 10
    return DigitArray(digits.astype(np.uint8), base=10, order=np.asarray(v.sort_order))


def write_consensus(path, v: ConsensusVector) -> None:
    lines = [f"consensus v1 I={v.values.size} seed={v.seed} R={v.axes}"]
    lines.extend(f"{x:.17g}" for x in v.values)
    Path(path).write_text("\n".join(lines) + "\n")


def read_consensus(path) -> ConsensusVector:
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[:2] != ["consensus", "v1"]:
            raise ParseError("bad consensus header", path, 1)
        try:
            fields = dict(h.split("=", 1) for h in header[2:])
            count, seed, axes = int(fields["I"]), int(fields["seed"]), int(fields["R"])
        except (KeyError, ValueError):
            raise ParseError("bad consensus header fields", path, 1) from None
        values = []
        for lineno, line in enumerate(fh, start=2):
            if line.strip():
                values.append(_parse_float(line, path, lineno))
    if len(values) != count:
        raise ParseError(f"header says I={count} but {len(values)} values follow", path)
    return ConsensusVector.from_values(values, seed=seed, axes=axes)
