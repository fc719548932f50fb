"""Leading bits of the distance (min, +) product.

With W a power of two and q = W / 2^ell, the ell-bit code of a finite
C[i,j] in [0, W) is floor(C[i,j] / q).  The code is recovered as the smallest
d with C[i,j] < d q, which one strict generalized dominance product over the
shifted families

    A'_x = A - (x-1) W / 2^ceil(ell/2),    B'_y = -B + (y-1) W / 2^ell

finds directly, because (x-1) W/2^ceil(ell/2) + (y-1) W/2^ell = d q with
d = (x-1) 2^floor(ell/2) + (y-1).  Under the decreasing order the maximal
pair is the one with the smallest d.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FINITE, NEG_INF, POS_INF, ExtMatrix, checked_add, checked_sub
from .dominance import dominance_product, generalized_dominance
from .exponents import DEFAULT, OmegaParams, select_parameters
from .qsim import CostLedger

BITS, NEGATIVE, INFINITE = 0, 1, 2


def _is_pow2(w):
    return isinstance(w, (int, np.integer)) and w >= 1 and (int(w) & (int(w) - 1)) == 0


@dataclass(frozen=True, eq=False)
class MsbResult:
    """Per cell: a bucket code (status BITS), NEGATIVE or INFINITE."""

    codes: np.ndarray
    status: np.ndarray
    W: int
    ell: int

    def bits(self, i, j) -> str:
        s = self.status[i, j]
        if s == NEGATIVE:
            return "neg"
        if s == INFINITE:
            return "inf"
        return format(int(self.codes[i, j]), f"0{self.ell}b")

    def to_rows(self):
        n, m = self.codes.shape
        return [[self.bits(i, j) for j in range(m)] for i in range(n)]

    def __eq__(self, other):
        if not isinstance(other, MsbResult):
            return NotImplemented
        return (self.ell == other.ell and np.array_equal(self.status, other.status)
                and np.array_equal(np.where(self.status == BITS, self.codes, -1),
                                   np.where(other.status == BITS, other.codes, -1)))

    def __repr__(self):
        return f"MsbResult(W={self.W}, ell={self.ell}, {self.to_rows()!r})"


def _check_inputs(A: ExtMatrix, B: ExtMatrix):
    if A.cols != B.rows:
        raise ValueError(f"shape: cannot combine {A.shape} with {B.shape}")
    if np.any(A.tags == NEG_INF) or np.any(B.tags == NEG_INF):
        raise ValueError("domain: distance inputs must lie in Z ∪ {+inf}")


def distance_brute(A: ExtMatrix, B: ExtMatrix) -> ExtMatrix:
    """min-plus product; finite sums are overflow-checked."""
    _check_inputs(A, B)
    n, m = A.rows, B.cols
    vals = np.zeros((n, m), dtype=np.int64)
    tags = np.full((n, m), POS_INF, dtype=np.int8)
    for i in range(n):
        ok = (A.tags[i][:, None] == FINITE) & (B.tags == FINITE)
        if not ok.any():
            continue
        s = checked_add(np.broadcast_to(A.values[i][:, None], ok.shape)[ok], B.values[ok])
        full = np.full(ok.shape, np.iinfo(np.int64).max, dtype=np.int64)
        full[ok] = s
        has = ok.any(axis=0)
        vals[i] = np.where(has, full.min(axis=0), 0)
        tags[i] = np.where(has, FINITE, POS_INF)
    return ExtMatrix(vals, tags)


def msb_bits_oracle(C: ExtMatrix, W: int, ell: int) -> MsbResult:
    if not _is_pow2(W) or ell < 1 or (1 << ell) > W:
        raise ValueError(f"ell out of range: need W a power of two >= 2^ell (W={W}, ell={ell})")
    fin = C.tags == FINITE
    if np.any(fin & (C.values >= W)):
        raise ValueError("finite entry >= W")
    neg = (fin & (C.values < 0)) | (C.tags == NEG_INF)
    status = np.where(neg, NEGATIVE, np.where(fin, BITS, INFINITE)).astype(np.int8)
    codes = np.where(status == BITS, C.values // (W >> ell), -1)
    return MsbResult(codes, status, int(W), int(ell))


def default_W(A: ExtMatrix, B: ExtMatrix, ell: int) -> int:
    """Smallest power of two above max(A) + max(B), raised to at least 2^ell."""
    fa, fb = A.values[A.tags == FINITE], B.values[B.tags == FINITE]
    W = 1 << ell
    if len(fa) and len(fb):
        top = int(fa.max()) + int(fb.max())
        while W <= top:
            W <<= 1
    return W


def shifted_family(A: ExtMatrix, B: ExtMatrix, ell: int, W: int):
    """The shifted A'_x (x = 1..2^ceil(ell/2)) and B'_y (y = 1..2^floor(ell/2))."""
    hi, lo = (ell + 1) // 2, ell // 2
    qa, qb = W >> hi, W >> ell
    As = [ExtMatrix(checked_sub(A.values, x * qa), A.tags) for x in range(1 << hi)]
    negB = -B.tags
    Bs = [ExtMatrix(checked_add(-B.values, y * qb), negB) for y in range(1 << lo)]
    return As, Bs


def distance_msb(A: ExtMatrix, B: ExtMatrix, ell: int, engine="quantum-sim",
                 ledger: CostLedger = None, W: int = None, t=None,
                 p: OmegaParams = DEFAULT) -> MsbResult:
    """The ell leading bits of every entry of the distance product."""
    _check_inputs(A, B)
    if A.shape != B.shape or A.rows != A.cols:
        raise ValueError(f"shape: need equal square matrices, got {A.shape} and {B.shape}")
    if ell < 1:
        raise ValueError(f"ell out of range: {ell}")
    if W is None:
        W = default_W(A, B, ell)
    elif not _is_pow2(W) or (1 << ell) > W:
        raise ValueError(f"ell out of range: need W a power of two >= 2^ell (W={W}, ell={ell})")
    if engine == "brute":
        return msb_bits_oracle(distance_brute(A, B), W, ell)
    if engine not in ("quantum-sim", "classical"):
        raise ValueError(f"unknown engine {engine!r}")
    ledger = ledger if ledger is not None else CostLedger()
    n = A.rows
    v = 1 << (ell // 2)
    As, Bs = shifted_family(A, B, ell, W)
    m1 = sum(a.count_finite() for a in As)
    if t is None and m1:
        t = select_parameters("distmsb-t", n, m1=m1, ell=ell, p=p, engine=engine)["t"]
    with ledger.scope("buckets"):
        pairs = generalized_dominance(As, Bs, t, "decreasing", True, engine, ledger, p)
    d = np.where(pairs.x > 0, (pairs.x - 1) * v + (pairs.y - 1), -1)

    # no bucket fired: decide between the top bucket and C >= W
    top = ExtMatrix(checked_add(-B.values, W), -B.tags)
    with ledger.scope("top"):
        below_W = dominance_product(A, top, True, engine, ledger, p=p).to_dense()
    codes = np.where(d >= 1, d - 1, np.where(d < 0, (1 << ell) - 1, -1))
    status = np.where(d == 0, NEGATIVE, np.where((d < 0) & ~below_W, INFINITE, BITS))
    return MsbResult(codes.astype(np.int64), status.astype(np.int8), int(W), int(ell))
