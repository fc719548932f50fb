"""Extended-integer and bit-packed Boolean matrices.

Extended integers are stored as two parallel arrays: ``values`` (int64) and
``tags`` (int8, one of ``NEG_INF``, ``FINITE``, ``POS_INF``).  Infinities are
tags, never sentinel integers, so finite arithmetic can be overflow-checked.
Scalars at the API boundary are Python ints or ``math.inf`` / ``-math.inf``.

Boolean matrices are packed row-major into little-endian uint64 words.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

NEG_INF = -1
FINITE = 0
POS_INF = 1

INF = math.inf

_WORD = 64


def _readonly(a):
    a.setflags(write=False)
    return a


def _scalar_tag(x):
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return POS_INF, 0
        if s in ("-inf", "-infinity"):
            return NEG_INF, 0
        return FINITE, int(s)
    if isinstance(x, float):
        if x == math.inf:
            return POS_INF, 0
        if x == -math.inf:
            return NEG_INF, 0
        if not x.is_integer():
            raise ValueError(f"non-integer entry {x!r}")
        return FINITE, int(x)
    return FINITE, int(x)


class ExtMatrix:
    """Dense matrix over Z ∪ {-inf, +inf}."""

    __slots__ = ("values", "tags")

    def __init__(self, values, tags=None):
        values = np.asarray(values, dtype=np.int64)
        if values.ndim != 2:
            raise ValueError("shape: ExtMatrix must be 2-D")
        if tags is None:
            tags = np.zeros(values.shape, dtype=np.int8)
        else:
            tags = np.asarray(tags, dtype=np.int8)
            if tags.shape != values.shape:
                raise ValueError("shape: values/tags mismatch")
            if np.any((tags < NEG_INF) | (tags > POS_INF)):
                raise ValueError("invalid tag")
        # canonical form: infinite entries carry value 0
        values = np.where(tags == FINITE, values, 0).astype(np.int64)
        self.values = _readonly(values)
        self.tags = _readonly(tags.copy())

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ExtMatrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if n else 0
        if any(len(r) != m for r in rows):
            raise ValueError("shape: ragged rows")
        vals = np.zeros((n, m), dtype=np.int64)
        tags = np.zeros((n, m), dtype=np.int8)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                tags[i, j], vals[i, j] = _scalar_tag(x)
        return cls(vals, tags)

    @classmethod
    def full(cls, shape, fill) -> "ExtMatrix":
        tag, val = _scalar_tag(fill)
        return cls(np.full(shape, val, dtype=np.int64), np.full(shape, tag, dtype=np.int8))

    @classmethod
    def from_finite(cls, values, finite_mask, fill=INF) -> "ExtMatrix":
        """Build from an int array plus a mask; masked-out entries get ``fill``."""
        tag, _ = _scalar_tag(fill)
        finite_mask = np.asarray(finite_mask, dtype=bool)
        tags = np.where(finite_mask, FINITE, tag).astype(np.int8)
        return cls(values, tags)

    @property
    def shape(self):
        return self.values.shape

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]

    @property
    def finite(self):
        return self.tags == FINITE

    def count_finite(self) -> int:
        return int(np.count_nonzero(self.tags == FINITE))

    def __getitem__(self, ij):
        i, j = ij
        tag = self.tags[i, j]
        if tag == POS_INF:
            return INF
        if tag == NEG_INF:
            return -INF
        return int(self.values[i, j])

    def to_rows(self) -> list:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def transpose(self) -> "ExtMatrix":
        return ExtMatrix(self.values.T, self.tags.T)

    @property
    def T(self):
        return self.transpose()

    def __eq__(self, other):
        if not isinstance(other, ExtMatrix):
            return NotImplemented
        return (self.shape == other.shape
                and np.array_equal(self.tags, other.tags)
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.shape, self.tags.tobytes(), self.values.tobytes()))

    def __repr__(self):
        return f"ExtMatrix({self.to_rows()!r})"


def ext_compare(av, at, bv, bt, strict=False):
    """Elementwise ``a <= b`` (or ``a < b``) on broadcastable tagged arrays."""
    at = np.asarray(at)
    bt = np.asarray(bt)
    both_finite = (at == FINITE) & (bt == FINITE)
    if strict:
        return (at < bt) | (both_finite & (np.asarray(av) < np.asarray(bv)))
    return (at < bt) | ((at == bt) & ((at != FINITE) | (np.asarray(av) <= np.asarray(bv))))


def checked_add(a, b):
    """int64 addition that raises OverflowError instead of wrapping."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    with np.errstate(over="ignore"):
        s = a + b
    if np.any(((a ^ s) & (b ^ s)) < 0):
        raise OverflowError("overflow: finite sum exceeds int64")
    return s


def checked_sub(a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    with np.errstate(over="ignore"):
        s = a - b
    if np.any(((a ^ b) & (a ^ s)) < 0):
        raise OverflowError("overflow: finite difference exceeds int64")
    return s


def rank_encode(*mats: ExtMatrix):
    """Order-preserving joint compression of several ExtMatrix to int ranks.

    -inf maps to 0, the sorted distinct finite values to 1..K and +inf to
    K+1.  Returns ``(ranks, decode)`` where ``decode`` maps a rank array back
    to an ExtMatrix.
    """
    finite_vals = [m.values[m.tags == FINITE] for m in mats]
    uniq = np.unique(np.concatenate(finite_vals)) if finite_vals else np.zeros(0, np.int64)
    K = len(uniq)
    ranks = []
    for m in mats:
        r = np.searchsorted(uniq, m.values) + 1
        r = np.where(m.tags == POS_INF, K + 1, r)
        r = np.where(m.tags == NEG_INF, 0, r)
        ranks.append(r.astype(np.int64))

    def decode(r):
        r = np.asarray(r, dtype=np.int64)
        tags = np.where(r <= 0, NEG_INF, np.where(r > K, POS_INF, FINITE)).astype(np.int8)
        vals = np.zeros(r.shape, dtype=np.int64)
        inside = tags == FINITE
        vals[inside] = uniq[r[inside] - 1]
        return ExtMatrix(vals, tags)

    return ranks, decode


# ---------------------------------------------------------------------------
# Boolean matrices


def _pack(dense):
    dense = np.asarray(dense, dtype=bool)
    r, c = dense.shape
    w = max(1, -(-c // _WORD))
    padded = np.zeros((r, w * _WORD), dtype=bool)
    padded[:, :c] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").reshape(r, w)


def _unpack(words, cols):
    r = words.shape[0]
    if r == 0:
        return np.zeros((0, cols), dtype=bool)
    b = np.ascontiguousarray(words).view(np.uint8).reshape(r, -1)
    return np.unpackbits(b, axis=1, count=cols, bitorder="little").astype(bool)


class BoolMatrix:
    """Bit-packed 0/1 matrix; padding bits past ``cols`` are always zero."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows, cols, words):
        words = np.asarray(words, dtype=np.uint64)
        w = max(1, -(-cols // _WORD))
        if words.shape != (rows, w):
            raise ValueError("shape: word block does not match dimensions")
        tail = cols % _WORD
        if tail and rows:
            mask = np.uint64((1 << tail) - 1)
            if np.any(words[:, -1] & ~mask):
                raise ValueError("padding bits must be zero")
        if cols == 0 and rows and np.any(words):
            raise ValueError("padding bits must be zero")
        self.rows = int(rows)
        self.cols = int(cols)
        self.words = _readonly(words.copy())

    @classmethod
    def from_dense(cls, dense) -> "BoolMatrix":
        dense = np.asarray(dense, dtype=bool)
        if dense.ndim != 2:
            raise ValueError("shape: BoolMatrix must be 2-D")
        return cls(dense.shape[0], dense.shape[1], _pack(dense))

    @classmethod
    def zeros(cls, rows, cols) -> "BoolMatrix":
        return cls.from_dense(np.zeros((rows, cols), dtype=bool))

    @classmethod
    def identity(cls, n) -> "BoolMatrix":
        return cls.from_dense(np.eye(n, dtype=bool))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def to_dense(self):
        return _unpack(self.words, self.cols)

    def to_rows(self) -> list:
        return self.to_dense().astype(int).tolist()

    def __getitem__(self, ij):
        i, j = ij
        return bool((int(self.words[i, j // _WORD]) >> (j % _WORD)) & 1)

    def nnz(self) -> int:
        return int(np.unpackbits(self.words.view(np.uint8)).sum()) if self.rows else 0

    def row_counts(self):
        return self.to_dense().sum(axis=1)

    def col_counts(self):
        return self.to_dense().sum(axis=0)

    def transpose(self) -> "BoolMatrix":
        return BoolMatrix.from_dense(self.to_dense().T)

    @property
    def T(self):
        return self.transpose()

    def __eq__(self, other):
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((self.shape, self.words.tobytes()))

    def __repr__(self):
        return f"BoolMatrix({self.to_rows()!r})"


def bool_multiply(a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
    """Boolean product by word-parallel OR-accumulation of rows of ``b``."""
    if a.cols != b.rows:
        raise ValueError(f"shape: cannot multiply {a.shape} by {b.shape}")
    ad = a.to_dense()
    bw = b.words
    out = np.zeros((a.rows, bw.shape[1]), dtype=np.uint64)
    if a.rows <= a.cols:
        for i in range(a.rows):
            ks = np.flatnonzero(ad[i])
            if len(ks):
                out[i] = np.bitwise_or.reduce(bw[ks], axis=0)
    else:
        for k in range(a.cols):
            rows = np.flatnonzero(ad[:, k])
            if len(rows):
                out[rows] |= bw[k]
    return BoolMatrix(a.rows, b.cols, out)


def entrywise_or(a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
    if a.shape != b.shape:
        raise ValueError(f"shape: {a.shape} vs {b.shape}")
    return BoolMatrix(a.rows, a.cols, a.words | b.words)


def transpose(a):
    return a.transpose()


def stack_blocks(grid) -> BoolMatrix:
    """Assemble a grid (sequence of rows of BoolMatrix) into one matrix."""
    grid = [list(row) for row in grid]
    if not grid or not grid[0]:
        raise ValueError("nonuniform blocks: empty grid")
    ncols = len(grid[0])
    if any(len(row) != ncols for row in grid):
        raise ValueError("nonuniform blocks: ragged grid")
    for row in grid:
        if any(blk.rows != row[0].rows for blk in row):
            raise ValueError("nonuniform blocks: row heights differ")
    for q in range(ncols):
        if any(row[q].cols != grid[0][q].cols for row in grid):
            raise ValueError("nonuniform blocks: column widths differ")
    dense = np.block([[blk.to_dense() for blk in row] for row in grid])
    return BoolMatrix.from_dense(dense)
