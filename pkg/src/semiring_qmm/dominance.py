"""Existence dominance products, plain and generalized.

Indices for matrices, parts and columns are 0-based in code.  Output pairs
(x, y) are 1-based with (0, 0) meaning "no pair fires".

The generalized algorithm follows the two-level decomposition:

1. sort all finite A-entries and cut the list into ``t`` parts; entries in
   different parts are handled by one stacked Boolean product (``C1``);
2. entries sharing a part are column-balanced and handled by a second
   stacked product (``C2``) plus a strike-out search for the leftover pairs
   (``D``), driven through the index bijection built from the U/V/W arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (BoolMatrix, ExtMatrix, FINITE, NEG_INF, POS_INF, bool_multiply,
                   ext_compare)
from .exponents import DEFAULT, OmegaParams, model_multiply_cost, select_parameters
from .qsim import CostLedger, SearchSpace, enumerate_solutions

ORDERS = ("normal", "decreasing")


@dataclass(frozen=True)
class LexOrder:
    """Strict total order on {1..u} x {1..v} plus (0, 0) as the minimum.

    Pairs are mapped to integer ranks (0 for (0, 0)); the order-maximum is
    the rank-maximum.
    """

    u: int
    v: int
    decreasing: bool = False

    @classmethod
    def named(cls, u, v, order="normal"):
        if order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
        return cls(u, v, order == "decreasing")

    def rank(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if self.decreasing:
            r = (self.u - x) * self.v + (self.v - y) + 1
        else:
            r = (x - 1) * self.v + y
        return np.where((x == 0) & (y == 0), 0, r)

    def unrank(self, r):
        r = np.asarray(r, dtype=np.int64)
        s = np.maximum(r - 1, 0)
        if self.decreasing:
            x, y = self.u - s // self.v, self.v - s % self.v
        else:
            x, y = s // self.v + 1, s % self.v + 1
        zero = r == 0
        return np.where(zero, 0, x), np.where(zero, 0, y)

    def table(self):
        """rank of (x+1, y+1) as a (u, v) array."""
        xs, ys = np.meshgrid(np.arange(1, self.u + 1), np.arange(1, self.v + 1), indexing="ij")
        return self.rank(xs, ys)

    def descending(self):
        """All pairs of S from the order-largest down."""
        ranks = np.arange(self.u * self.v, 0, -1)
        xs, ys = self.unrank(ranks)
        return list(zip(xs.tolist(), ys.tolist()))


class PairMatrix:
    """n x n matrix with entries in S ∪ {(0, 0)}."""

    __slots__ = ("x", "y", "order")

    def __init__(self, x, y, order: LexOrder):
        self.x = np.asarray(x, dtype=np.int64)
        self.y = np.asarray(y, dtype=np.int64)
        self.order = order

    @classmethod
    def from_ranks(cls, ranks, order: LexOrder):
        x, y = order.unrank(ranks)
        return cls(x, y, order)

    def ranks(self):
        return self.order.rank(self.x, self.y)

    @property
    def shape(self):
        return self.x.shape

    def to_list(self):
        return [[(int(a), int(b)) for a, b in zip(rx, ry)] for rx, ry in zip(self.x, self.y)]

    def to_bool(self) -> BoolMatrix:
        return BoolMatrix.from_dense(self.x != 0)

    def __eq__(self, other):
        if not isinstance(other, PairMatrix):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)

    def __repr__(self):
        return f"PairMatrix({self.to_list()!r})"


def _cmp(strict):
    return np.less if strict else np.less_equal


def _stack(mats: Sequence[ExtMatrix], side):
    if len(mats) == 0:
        raise ValueError(f"shape: need at least one {side} matrix")
    n = mats[0].rows
    for m in mats:
        if m.shape != (n, n):
            raise ValueError(f"shape: {side} matrices must all be {n}x{n}, got {m.shape}")
    tags = np.stack([m.tags for m in mats])
    if side == "A" and np.any(tags == NEG_INF):
        raise ValueError("domain: A entries must lie in Z ∪ {+inf}")
    if side == "B" and np.any(tags == POS_INF):
        raise ValueError("domain: B entries must lie in Z ∪ {-inf}")
    return np.stack([m.values for m in mats]), tags == FINITE


def _check_pair(As, Bs):
    Aval, Afin = _stack(As, "A")
    Bval, Bfin = _stack(Bs, "B")
    if Aval.shape[1] != Bval.shape[1]:
        raise ValueError("shape: A and B sizes differ")
    return Aval, Afin, Bval, Bfin


# ---------------------------------------------------------------------------
# brute-force references


def _dominance_dense(A: ExtMatrix, B: ExtMatrix, strict):
    if A.cols != B.rows:
        raise ValueError(f"shape: cannot combine {A.shape} with {B.shape}")
    out = np.zeros((A.rows, B.cols), dtype=bool)
    step = max(1, (1 << 22) // max(1, A.cols * B.cols))
    for s in range(0, A.rows, step):
        e = min(A.rows, s + step)
        hit = ext_compare(A.values[s:e, :, None], A.tags[s:e, :, None],
                          B.values[None], B.tags[None], strict)
        out[s:e] = hit.any(axis=1)
    return out


def dominance_brute(A: ExtMatrix, B: ExtMatrix, strict: bool = False) -> BoolMatrix:
    """C[i,j] = 1 iff some k has A[i,k] <= B[k,j] (< when strict)."""
    return BoolMatrix.from_dense(_dominance_dense(A, B, strict))


def generalized_dominance_brute(As, Bs, order="normal", strict=False) -> PairMatrix:
    """Order-maximum (x, y) whose dominance product fires, per cell."""
    _check_pair(As, Bs)
    lex = LexOrder.named(len(As), len(Bs), order)
    rt = lex.table()
    n = As[0].rows
    best = np.zeros((n, n), dtype=np.int64)
    for x, A in enumerate(As):
        for y, B in enumerate(Bs):
            fire = _dominance_dense(A, B, strict)
            best = np.maximum(best, np.where(fire, rt[x, y], 0))
    return PairMatrix.from_ranks(best, lex)


# ---------------------------------------------------------------------------
# level partition


@dataclass(frozen=True, eq=False)
class LevelPartition:
    """Sorted finite A-entries cut into ``t`` consecutive parts.

    ``a_part[x, i, k]`` is the part holding A^(x)[i,k] (-1 if infinite).
    ``b_part[y, k, j]`` is the unique part whose value window contains
    B^(y)[k,j] (-1 if none) and ``b_above[y, k, j]`` counts the parts r with
    B^(y)[k,j] at or above max L_r, so the barred matrix for part r is
    ``b_above > r``.
    """

    n: int
    u: int
    v: int
    t: int
    strict: bool
    m1: int
    m2: int
    lo: np.ndarray
    hi: np.ndarray
    a_part: np.ndarray
    b_part: np.ndarray
    b_above: np.ndarray
    Aval: np.ndarray
    Afin: np.ndarray
    Bval: np.ndarray
    Bfin: np.ndarray

    def A_r(self, x, r) -> ExtMatrix:
        return ExtMatrix.from_finite(self.Aval[x], self.a_part[x] == r, fill=np.inf)

    def Abar(self, x, r) -> BoolMatrix:
        return BoolMatrix.from_dense(self.a_part[x] == r)

    def B_r(self, y, r) -> ExtMatrix:
        return ExtMatrix.from_finite(self.Bval[y], self.b_part[y] == r, fill=-np.inf)

    def Bbar(self, y, r) -> BoolMatrix:
        return BoolMatrix.from_dense(self.b_above[y] > r)


def build_level_partition(As, Bs, t, strict=False, ledger: CostLedger = None,
                          phase="partition") -> LevelPartition:
    Aval, Afin, Bval, Bfin = _check_pair(As, Bs)
    u, n = Aval.shape[0], Aval.shape[1]
    v = Bval.shape[0]
    xs, is_, ks = np.nonzero(Afin)
    vals = Aval[xs, is_, ks]
    m1 = len(vals)
    m2 = int(Bfin.sum())
    if m1 == 0:
        t = 0
    elif not 1 <= t <= m1:
        raise ValueError(f"t out of range: need 1 <= t <= {m1}, got {t}")
    # ties broken by (value, x, i, k) so the split is deterministic
    order = np.lexsort((ks, is_, xs, vals))
    starts = (np.arange(t + 1) * m1) // max(t, 1)
    part = np.searchsorted(starts, np.arange(m1), side="right") - 1
    a_part = np.full((u, n, n), -1, dtype=np.int64)
    a_part[xs[order], is_[order], ks[order]] = part
    svals = vals[order]
    lo = svals[starts[:-1]] if t else np.zeros(0, np.int64)
    hi = svals[starts[1:] - 1] if t else np.zeros(0, np.int64)

    b_part = np.full((v, n, n), -1, dtype=np.int64)
    b_above = np.zeros((v, n, n), dtype=np.int64)
    if t:
        side = "left" if strict else "right"
        bv = Bval[Bfin]
        cand = np.searchsorted(lo, bv, side=side) - 1
        ok = cand >= 0
        inside = ok.copy()
        inside[ok] = ~_cmp(strict)(hi[cand[ok]], bv[ok])
        b_part[Bfin] = np.where(inside, cand, -1)
        b_above[Bfin] = np.searchsorted(hi, bv, side=side)
    if ledger is not None:
        ledger.charge_classical(phase, n * n * max(t, 1) * (u + v))
    return LevelPartition(n, u, v, t, strict, m1, m2, lo, hi, a_part, b_part, b_above,
                          Aval, Afin, Bval, Bfin)


def _pair_ranks_from_product(prod: BoolMatrix, u, v, n, lex: LexOrder):
    fire = prod.to_dense().reshape(u, n, v, n).transpose(1, 3, 0, 2)
    rt = lex.table()
    return np.where(fire, rt[None, None], 0).reshape(n, n, u * v).max(axis=2)


def compute_C1(lp: LevelPartition, order="normal", ledger: CostLedger = None,
               phase="C1-multiply", p: OmegaParams = DEFAULT) -> PairMatrix:
    """Pairs detected across different parts, via one stacked Boolean product."""
    u, v, n, t = lp.u, lp.v, lp.n, lp.t
    lex = LexOrder.named(u, v, order)
    if t == 0:
        return PairMatrix.from_ranks(np.zeros((n, n), np.int64), lex)
    abar = np.zeros((u, n, t, n), dtype=bool)
    xs, is_, ks = np.nonzero(lp.a_part >= 0)
    abar[xs, is_, lp.a_part[xs, is_, ks], ks] = True
    bbar = np.arange(t)[:, None, None, None] < lp.b_above.transpose(1, 0, 2)[None]
    prod = bool_multiply(BoolMatrix.from_dense(abar.reshape(u * n, t * n)),
                         BoolMatrix.from_dense(bbar.reshape(t * n, v * n)))
    if ledger is not None:
        ledger.charge_model_multiply(phase, model_multiply_cost(n * u, n * t, n * v, p))
        ledger.charge_classical(phase, n * n * u * v)
    return PairMatrix.from_ranks(_pair_ranks_from_product(prod, u, v, n, lex), lex)


# ---------------------------------------------------------------------------
# column balancing


@dataclass(frozen=True, eq=False)
class BalancedBundle:
    """Column-balanced copies of the per-part A matrices and lookup arrays.

    For each part r the finite entries of column k (over all x) are sorted
    and cut into chunks of ``cap`` entries; chunk (k, q) becomes column
    ``rho_r(k, q)`` of the n x 2n matrices ``tval/tfin[x, r]``.

    * ``tmax[r, c]`` -- largest value in the chunk placed at column c
    * ``k_of_col[r, c]`` / ``q_of_col[r, c]`` -- inverse of rho_r (-1 past p_r)
    * ``colcnt[x, r, c]`` -- finite entries in column c of the balanced matrix
    * ``U_rows[U_start[x, r, c] + b]`` -- row of the b-th finite entry there
    * ``V[y]`` -- finite entries of B_r^(y) as arrays (r, k, j) in (r, k, j) order
    """

    lp: LevelPartition
    cap: int
    a_rk: np.ndarray
    p: np.ndarray
    rho_start: np.ndarray
    reverse_rho: bool
    tval: np.ndarray
    tfin: np.ndarray
    tmax: np.ndarray
    k_of_col: np.ndarray
    q_of_col: np.ndarray
    colcnt: np.ndarray
    U_rows: np.ndarray
    U_start: np.ndarray
    V: tuple
    _uniq: np.ndarray
    _gkeys: np.ndarray
    _gstart: np.ndarray

    def rho(self, r, k, q):
        r, k, q = (np.asarray(a, dtype=np.int64) for a in (r, k, q))
        c = self.rho_start[r, k] + q
        if self.reverse_rho:
            c = self.p[r] - 1 - c
        return c

    def qlook(self, r, k, b):
        """Smallest chunk q of column (r, k) whose max is above b (strictly
        above, or at-or-above when strict); -1 when none.  Binary search."""
        r, k, b = (np.asarray(a, dtype=np.int64) for a in (r, k, b))
        n = self.lp.n
        K1 = len(self._uniq) + 1
        rank_b = np.searchsorted(self._uniq, b, side="left" if self.lp.strict else "right")
        gid = r * n + k
        pos = np.searchsorted(self._gkeys, gid * K1 + rank_b, side="right")
        q = pos - self._gstart[gid]
        return np.where(q < self.a_rk[r, k], q, -1)

    def W(self, y):
        """Balanced column searched for each V^(y) entry (-1 if undefined)."""
        r, k, j = self.V[y]
        q = self.qlook(r, k, self.lp.Bval[y, k, j])
        return np.where(q >= 0, self.rho(r, k, np.maximum(q, 0)), -1)

    def A_tilde(self, x, r) -> ExtMatrix:
        return ExtMatrix.from_finite(self.tval[x, r], self.tfin[x, r], fill=np.inf)

    def A_hat(self, x, r) -> BoolMatrix:
        return BoolMatrix.from_dense(self.tfin[x, r])

    def B_hat_stack(self):
        """Dense (t, 2n, v, n) array: block (r, y) is the hat-B matrix."""
        lp = self.lp
        n, t, v = lp.n, lp.t, lp.v
        out = np.zeros((t, 2 * n, v, n), dtype=bool)
        rs, cs = np.nonzero(self.k_of_col >= 0)
        if len(rs) == 0:
            return out
        kk = self.k_of_col[rs, cs]
        mt = self.tmax[rs, cs]
        inpart = lp.b_part[:, kk, :] == rs[None, :, None]
        above = _cmp(lp.strict)(mt[None, :, None], lp.Bval[:, kk, :])
        out[rs, cs] = (inpart & above).transpose(1, 0, 2)
        return out

    def B_hat(self, y, r) -> BoolMatrix:
        return BoolMatrix.from_dense(self.B_hat_stack()[r, :, y, :])


def column_balance(lp: LevelPartition, rho="forward", ledger: CostLedger = None,
                   phase="balance") -> BalancedBundle:
    if rho not in ("forward", "reversed"):
        raise ValueError("rho must be 'forward' or 'reversed'")
    n, u, v, t = lp.n, lp.u, lp.v, lp.t
    tt = max(t, 1)
    cap = max(1, -(-lp.m1 // (n * tt)))
    xs, is_, ks = np.nonzero(lp.a_part >= 0)
    rs = lp.a_part[xs, is_, ks]
    vals = lp.Aval[xs, is_, ks]
    order = np.lexsort((is_, xs, vals, ks, rs))
    xs, is_, ks, rs, vals = xs[order], is_[order], ks[order], rs[order], vals[order]
    gid = rs * n + ks
    cnt = np.bincount(gid, minlength=tt * n)
    gfirst = np.cumsum(cnt) - cnt
    pos = np.arange(len(gid)) - gfirst[gid]
    q = pos // cap
    a_rk = (-(-cnt // cap)).reshape(tt, n)
    p = a_rk.sum(axis=1)
    if np.any(p > 2 * n):
        raise AssertionError("column balancing produced more than 2n columns")
    rho_start = np.cumsum(a_rk, axis=1) - a_rk
    col = rho_start[rs, ks] + q
    if rho == "reversed":
        col = p[rs] - 1 - col

    tval = np.zeros((u, tt, n, 2 * n), dtype=np.int64)
    tfin = np.zeros((u, tt, n, 2 * n), dtype=bool)
    tval[xs, rs, is_, col] = vals
    tfin[xs, rs, is_, col] = True
    tmax = np.full((tt, 2 * n), np.iinfo(np.int64).min, dtype=np.int64)
    np.maximum.at(tmax, (rs, col), vals)
    k_of_col = np.full((tt, 2 * n), -1, dtype=np.int64)
    q_of_col = np.full((tt, 2 * n), -1, dtype=np.int64)
    k_of_col[rs, col] = ks
    q_of_col[rs, col] = q
    colcnt = tfin.sum(axis=2)
    if np.any(colcnt.sum(axis=0) > cap):
        raise AssertionError("column sparsity bound violated")

    uorder = np.lexsort((is_, col, rs, xs))
    U_rows = is_[uorder]
    flat = colcnt.reshape(-1)
    U_start = (np.cumsum(flat) - flat).reshape(colcnt.shape)

    # chunk maxima per (r, k) in q order, for binary search in qlook
    uniq = np.unique(vals) if len(vals) else np.zeros(0, np.int64)
    last = pos == (cnt[gid] - 1)
    chunk_end = ((pos + 1) % cap == 0) | last
    g_gid, g_max = gid[chunk_end], vals[chunk_end]
    K1 = len(uniq) + 1
    gkeys = g_gid * K1 + np.searchsorted(uniq, g_max) + 1
    gstart = np.cumsum(a_rk.reshape(-1)) - a_rk.reshape(-1)

    V = []
    for y in range(v):
        kk, jj = np.nonzero(lp.b_part[y] >= 0)
        rr = lp.b_part[y, kk, jj]
        o = np.lexsort((jj, kk, rr))
        V.append((rr[o], kk[o], jj[o]))

    if ledger is not None:
        ledger.charge_classical(phase, n * n * tt * (u + v))
    return BalancedBundle(lp, cap, a_rk, p, rho_start, rho == "reversed", tval, tfin, tmax,
                          k_of_col, q_of_col, colcnt, U_rows, U_start, tuple(V),
                          uniq, gkeys, gstart)


# ---------------------------------------------------------------------------
# the strike-out search and the second product


def gamma_space(bb: BalancedBundle, x, y) -> SearchSpace:
    """Search space Gamma^(x,y) with items g(z) = (r, i, j, k), 0-based."""
    r_a, k_a, j_a = bb.V[y]
    w_a = bb.W(y)
    keep = w_a >= 0
    r_a, k_a, j_a, w_a = r_a[keep], k_a[keep], j_a[keep], w_a[keep]
    cnt = bb.colcnt[x, r_a, w_a]
    prefix = np.cumsum(cnt)
    start_a = bb.U_start[x, r_a, w_a]
    N = int(prefix[-1]) if len(prefix) else 0

    def item(z):
        a = np.searchsorted(prefix, z, side="right")
        b = z - (prefix[a] - cnt[a])
        return r_a[a], bb.U_rows[start_a[a] + b], j_a[a], k_a[a]

    return SearchSpace(N, item)


def compute_D(bb: BalancedBundle, order="normal", ledger: CostLedger = None,
              engine="quantum-sim", phase="D-search", struck=None) -> PairMatrix:
    """Order-largest (x, y) with a same-chunk witness below the chunk max."""
    lp = bb.lp
    n, u, v = lp.n, lp.u, lp.v
    lex = LexOrder.named(u, v, order)
    ledger = ledger if ledger is not None else CostLedger()
    R = np.zeros((n, n), dtype=bool) if struck is None else np.array(struck, dtype=bool)
    D = np.zeros((n, n), dtype=np.int64)
    ledger.charge_classical(phase, n * n * max(lp.t, 1) * v)
    if lp.t == 0:
        return PairMatrix.from_ranks(D, lex)
    cmp = _cmp(lp.strict)
    for x1, y1 in lex.descending():
        x, y = x1 - 1, y1 - 1
        space = gamma_space(bb, x, y)
        Bv = lp.Bval[y]
        tv, tf = bb.tval[x], bb.tfin[x]

        def pred(items):
            r, i, j, k = items
            b = Bv[k, j]
            w = bb.rho(r, k, np.maximum(bb.qlook(r, k, b), 0))
            return ~R[i, j] & tf[r, i, w] & cmp(tv[r, i, w], b)

        found = enumerate_solutions(engine, space, pred, ledger, phase,
                                    key=lambda it: it[1] * n + it[2], key_size=n * n)
        fi, fj = found[1], found[2]
        D[fi, fj] = lex.rank(x1, y1)
        R[fi, fj] = True
    return PairMatrix.from_ranks(D, lex)


def compute_C2(bb: BalancedBundle, D: PairMatrix, order="normal", ledger: CostLedger = None,
               phase="C2-multiply", p: OmegaParams = DEFAULT) -> PairMatrix:
    lp = bb.lp
    n, u, v, t = lp.n, lp.u, lp.v, lp.t
    lex = LexOrder.named(u, v, order)
    if D.shape != (n, n):
        raise ValueError("shape: D does not match the bundle")
    if t == 0:
        return PairMatrix.from_ranks(D.ranks(), lex)
    ahat = bb.tfin.transpose(0, 2, 1, 3).reshape(u * n, t * 2 * n)
    bhat = bb.B_hat_stack().reshape(t * 2 * n, v * n)
    prod = bool_multiply(BoolMatrix.from_dense(ahat), BoolMatrix.from_dense(bhat))
    if ledger is not None:
        ledger.charge_model_multiply(phase, model_multiply_cost(n * u, n * t, n * v, p))
        ledger.charge_classical(phase, n * n * u * v)
    ranks = np.maximum(_pair_ranks_from_product(prod, u, v, n, lex), D.ranks())
    return PairMatrix.from_ranks(ranks, lex)


# ---------------------------------------------------------------------------
# drivers


def generalized_dominance(As, Bs, t=None, order="normal", strict=False, engine="quantum-sim",
                          ledger: CostLedger = None, p: OmegaParams = DEFAULT,
                          rho="forward") -> PairMatrix:
    """Generalized existence dominance product.

    ``engine`` is ``quantum-sim`` (simulated quantum enumeration in the D
    search), ``classical`` (exhaustive D search) or ``brute``.  ``t`` defaults
    to the dominance-t parameter rule.
    """
    if engine == "brute":
        return generalized_dominance_brute(As, Bs, order, strict)
    if engine not in ("quantum-sim", "classical"):
        raise ValueError(f"unknown engine {engine!r}")
    Aval, Afin, Bval, Bfin = _check_pair(As, Bs)
    u, v, n = len(As), len(Bs), Aval.shape[1]
    lex = LexOrder.named(u, v, order)
    ledger = ledger if ledger is not None else CostLedger()
    m1, m2 = int(Afin.sum()), int(Bfin.sum())
    if m1 == 0 or m2 == 0:
        if t is not None and not 1 <= t <= max(1, m1):
            raise ValueError(f"t out of range: need 1 <= t <= {max(1, m1)}, got {t}")
        return PairMatrix.from_ranks(np.zeros((n, n), np.int64), lex)
    if t is None:
        t = select_parameters("dominance-t", n, m1, m2, p=p)["t"]
    lp = build_level_partition(As, Bs, t, strict, ledger)
    C1 = compute_C1(lp, order, ledger, p=p)
    bb = column_balance(lp, rho, ledger)
    D = compute_D(bb, order, ledger, engine)
    C2 = compute_C2(bb, D, order, ledger, p=p)
    return PairMatrix.from_ranks(np.maximum(C1.ranks(), C2.ranks()), lex)


def dominance_product(A: ExtMatrix, B: ExtMatrix, strict=False, engine="quantum-sim",
                      ledger: CostLedger = None, t=None, p: OmegaParams = DEFAULT) -> BoolMatrix:
    if A.shape != B.shape or A.rows != A.cols:
        raise ValueError(f"shape: need equal square matrices, got {A.shape} and {B.shape}")
    if engine == "brute":
        return dominance_brute(A, B, strict)
    return generalized_dominance([A], [B], t, "normal", strict, engine, ledger, p).to_bool()
