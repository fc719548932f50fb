"""Leftslice and (max, min) products, and all-pairs bottleneck paths.

Inputs are first rank-encoded jointly so every comparison happens on small
non-negative integers; results are decoded back at the end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FINITE, NEG_INF, POS_INF, ExtMatrix, rank_encode
from .dominance import generalized_dominance
from .exponents import DEFAULT, OmegaParams, select_parameters
from .qsim import CostLedger, extremum_batch

_NONE = -1  # key for a candidate failing A[i,k] <= B[k,j]


def _square_pair(A: ExtMatrix, B: ExtMatrix):
    if A.shape != B.shape or A.rows != A.cols:
        raise ValueError(f"shape: need equal square matrices, got {A.shape} and {B.shape}")
    return A.rows


def ext_max(a: ExtMatrix, b: ExtMatrix) -> ExtMatrix:
    """Entrywise maximum of two extended-integer matrices."""
    if a.shape != b.shape:
        raise ValueError(f"shape: {a.shape} vs {b.shape}")
    take_b = (b.tags > a.tags) | ((b.tags == a.tags) & (b.values > a.values))
    return ExtMatrix(np.where(take_b, b.values, a.values), np.where(take_b, b.tags, a.tags))


def _encode(A: ExtMatrix, B: ExtMatrix):
    """Joint ranks, with masks of A-entries that can ever qualify."""
    (ra, rb), decode = rank_encode(A, B)
    # -inf in A never beats the -inf default; +inf in A qualifies only against +inf
    a_live = (A.tags == FINITE) | ((A.tags == POS_INF) & bool(np.any(B.tags == POS_INF)))
    return ra, rb, a_live, B.tags != NEG_INF, decode


def leftslice_brute(A: ExtMatrix, B: ExtMatrix) -> ExtMatrix:
    """C[i,j] = max{A[i,k] : A[i,k] <= B[k,j]}, -inf if the set is empty."""
    n = _square_pair(A, B)
    ra, rb, a_live, b_live, decode = _encode(A, B)
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        ok = a_live[i][:, None] & b_live & (ra[i][:, None] <= rb)
        out[i] = np.where(ok, ra[i][:, None], 0).max(axis=0, initial=0)
    return decode(out)


def maxmin_brute(A: ExtMatrix, B: ExtMatrix) -> ExtMatrix:
    n = _square_pair(A, B)
    (ra, rb), decode = rank_encode(A, B)
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        out[i] = np.minimum(ra[i][:, None], rb).max(axis=0, initial=0)
    return decode(out)


@dataclass(frozen=True, eq=False)
class RowPartition:
    """Per row, the live entries sorted by (value, column) and cut into
    consecutive parts of ``g``.  ``order[i, :count[i]]`` lists their columns."""

    g: int
    s: int
    order: np.ndarray
    count: np.ndarray
    part: np.ndarray  # part[i, k] = part index of A[i,k], -1 if not live

    def part_size(self, i, r):
        return np.clip(self.count[i] - r * self.g, 0, self.g)


def row_partition(ranks, live, g) -> RowPartition:
    n = ranks.shape[0]
    s = -(-n // g)
    key = np.where(live, ranks, np.iinfo(np.int64).max)
    order = np.argsort(key, axis=1, kind="stable")  # ties by column
    count = live.sum(axis=1)
    pos = np.empty_like(order)
    np.put_along_axis(pos, order, np.arange(n)[None, :].repeat(n, 0), axis=1)
    part = np.where(live, pos // g, -1)
    return RowPartition(g, s, order, count, part)


def leftslice(A: ExtMatrix, B: ExtMatrix, g=None, engine="quantum-sim",
              ledger: CostLedger = None, t=None, p: OmegaParams = DEFAULT) -> ExtMatrix:
    """Leftslice product via one generalized dominance product plus
    per-cell maximum finding over at most ``g`` candidates."""
    n = _square_pair(A, B)
    if engine == "brute":
        return leftslice_brute(A, B)
    if engine not in ("quantum-sim", "classical"):
        raise ValueError(f"unknown engine {engine!r}")
    ledger = ledger if ledger is not None else CostLedger()
    if g is None:
        g = select_parameters("maxmin-g-gamma", n, p=p)["g"]
    if not 1 <= g <= n:
        raise ValueError(f"g out of range: need 1 <= g <= {n}, got {g}")
    ra, rb, a_live, b_live, decode = _encode(A, B)
    rp = row_partition(ra, a_live, g)

    As = [ExtMatrix.from_finite(ra, rp.part == r, fill=np.inf) for r in range(rp.s)]
    Bd = ExtMatrix.from_finite(rb, b_live, fill=-np.inf)
    m1 = int(a_live.sum())
    if t is None and m1:
        t = select_parameters("maxmin-g-gamma", n, m1=m1, p=p)["t"]
    with ledger.scope("step1"):
        top = generalized_dominance(As, [Bd], t, "normal", False, engine, ledger, p).x

    out = np.zeros((n, n), dtype=np.int64)
    ci, cj = np.nonzero(top)
    if len(ci):
        r = top[ci, cj] - 1
        sizes = rp.part_size(ci, r)
        width = int(sizes.max())
        step = max(1, (1 << 21) // width)
        args = []
        for s0 in range(0, len(ci), step):
            sl = slice(s0, s0 + step)
            i, j, rr, sz = ci[sl], cj[sl], r[sl], sizes[sl]
            cols = rr[:, None] * g + np.arange(width)[None, :]
            valid = np.arange(width)[None, :] < sz[:, None]
            ks = np.take_along_axis(rp.order[i], np.minimum(cols, n - 1), axis=1)
            av = ra[i[:, None], ks]
            ok = valid & b_live[ks, j[:, None]] & (av <= rb[ks, j[:, None]])
            keys = np.where(ok, av, _NONE)
            with ledger.scope("step2"):
                arg = extremum_batch(keys, sz, "max", ledger, "extremum", engine)
            args.append(keys[np.arange(len(i)), arg])
        best = np.concatenate(args)
        if np.any(best == _NONE):
            raise AssertionError("step 1 reported a part with no qualifying entry")
        out[ci, cj] = best
    return decode(out)


def maxmin_product(A: ExtMatrix, B: ExtMatrix, g=None, engine="quantum-sim",
                   ledger: CostLedger = None, t=None, p: OmegaParams = DEFAULT) -> ExtMatrix:
    """C[i,j] = max_k min(A[i,k], B[k,j]) as the max of two leftslice products."""
    _square_pair(A, B)
    if engine == "brute":
        return maxmin_brute(A, B)
    ledger = ledger if ledger is not None else CostLedger()
    with ledger.scope("left"):
        L = leftslice(A, B, g, engine, ledger, t, p)
    with ledger.scope("right"):
        R = leftslice(B.T, A.T, g, engine, ledger, t, p).T
    return ext_max(L, R)


def apbp(cap: ExtMatrix, g=None, engine="quantum-sim", ledger: CostLedger = None,
         t=None, p: OmegaParams = DEFAULT) -> ExtMatrix:
    """All-pairs bottleneck capacities by repeated (max, min) squaring.

    Absent edges are -inf; the diagonal is forced to +inf.
    """
    if cap.rows != cap.cols:
        raise ValueError(f"shape: capacity matrix must be square, got {cap.shape}")
    n = cap.rows
    ledger = ledger if ledger is not None else CostLedger()
    tags = cap.tags.copy()
    np.fill_diagonal(tags, POS_INF)
    C = ExtMatrix(cap.values, tags)
    for step in range(math.ceil(math.log2(n)) if n > 1 else 0):
        with ledger.scope(f"square{step + 1}"):
            C = maxmin_product(C, C, g, engine, ledger, t, p)
    return C


def apbp_brute(cap: ExtMatrix) -> ExtMatrix:
    """Bottleneck capacities by a Floyd-Warshall style max-min recurrence."""
    if cap.rows != cap.cols:
        raise ValueError(f"shape: capacity matrix must be square, got {cap.shape}")
    tags = cap.tags.copy()
    np.fill_diagonal(tags, POS_INF)
    (r,), decode = rank_encode(ExtMatrix(cap.values, tags))
    for k in range(cap.rows):
        r = np.maximum(r, np.minimum(r[:, k:k + 1], r[k:k + 1, :]))
    return decode(r)
