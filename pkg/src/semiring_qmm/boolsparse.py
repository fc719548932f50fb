"""Output-sensitive sparse Boolean matrix products.

The product splits into four terms by heavy/light thresholds on row and
column degrees:

    A B = A[T, S] B[S, U]  |  A[:, S'] B[S', :]  |  A[T', :] B  |  A B[:, U']

where S / T / U collect rows of B / rows of A / columns of B with at least
m2/l2, m1/l1, m2/l3 nonzeros.  The first term is a small compressed product;
the other three are found by enumeration with strike-out sets.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoolMatrix, bool_multiply
from .exponents import DEFAULT, OmegaParams, model_multiply_cost, select_parameters
from .qsim import CostLedger, SearchSpace, enumerate_solutions


@dataclass(frozen=True, eq=False)
class DegreeProfile:
    aR: np.ndarray
    aC: np.ndarray
    bR: np.ndarray
    bC: np.ndarray
    m1: int
    m2: int

    @classmethod
    def of(cls, A: BoolMatrix, B: BoolMatrix) -> "DegreeProfile":
        a, b = A.to_dense(), B.to_dense()
        return cls(a.sum(1), a.sum(0), b.sum(1), b.sum(0), int(a.sum()), int(b.sum()))


@dataclass(frozen=True, eq=False)
class IndexSets:
    """Boolean masks over {0..n-1}; the primed sets are the complements."""

    S: np.ndarray
    T: np.ndarray
    U: np.ndarray

    @property
    def S_prime(self):
        return ~self.S

    @property
    def T_prime(self):
        return ~self.T

    @property
    def U_prime(self):
        return ~self.U


def _check_square(A, B):
    if A.shape != B.shape or A.rows != A.cols:
        raise ValueError(f"shape: need equal square matrices, got {A.shape} and {B.shape}")
    return A.rows


def _check_params(m1, m2, l1, l2, l3):
    if m1 and not (isinstance(l1, (int, np.integer)) and 1 <= l1 <= m1):
        raise ValueError(f"parameter range: l1 must lie in 1..{m1}, got {l1}")
    for name, l in (("l2", l2), ("l3", l3)):
        if m2 and not (isinstance(l, (int, np.integer)) and 1 <= l <= m2):
            raise ValueError(f"parameter range: {name} must lie in 1..{m2}, got {l}")


def classify_indices(A: BoolMatrix, B: BoolMatrix, l1, l2, l3, ledger: CostLedger = None,
                     profile: DegreeProfile = None) -> IndexSets:
    n = _check_square(A, B)
    d = profile if profile is not None else DegreeProfile.of(A, B)
    _check_params(d.m1, d.m2, l1, l2, l3)
    # exact thresholds: b >= m/l  <=>  b*l >= m
    S = (d.bR * l2 >= d.m2) if d.m2 else np.zeros(n, bool)
    T = (d.aR * l1 >= d.m1) if d.m1 else np.zeros(n, bool)
    U = (d.bC * l3 >= d.m2) if d.m2 else np.zeros(n, bool)
    if ledger is not None:
        ledger.charge_classical("classify", n * n)
    return IndexSets(S, T, U)


def _csr(dense):
    """Row pointer and column index arrays of a dense bool matrix."""
    counts = dense.sum(axis=1)
    ptr = np.concatenate(([0], np.cumsum(counts)))
    return ptr, np.nonzero(dense)[1]


def _enum_pairs(engine, space, ledger, phase, n, struck=None):
    """Enumerate all items (i, j) of ``space`` not yet in ``struck``."""
    if struck is None:
        pred = lambda it: np.ones(len(it[0]), dtype=bool)
    else:
        pred = lambda it: ~struck[it[0], it[1]]
    return enumerate_solutions(engine, space, pred, ledger, phase,
                               key=lambda it: it[0] * n + it[1], key_size=n * n)


def _term_compressed(a, b, sets, ledger, p):
    rows, mid, cols = (np.flatnonzero(m) for m in (sets.T, sets.S, sets.U))
    out = np.zeros(a.shape, dtype=bool)
    if len(rows) and len(mid) and len(cols):
        prod = bool_multiply(BoolMatrix.from_dense(a[np.ix_(rows, mid)]),
                             BoolMatrix.from_dense(b[np.ix_(mid, cols)]))
        out[np.ix_(rows, cols)] = prod.to_dense()
        ledger.charge_model_multiply("term1", model_multiply_cost(len(rows), len(mid), len(cols), p))
    return out, (len(rows), len(mid), len(cols))


def _term_light_middle(a, b, sets, engine, ledger, n):
    """A[:, S'] B[S', :] through the index map g over (nonzero of A, B-row entry)."""
    sp = sets.S_prime
    M1, M2 = np.nonzero(a & sp[None, :])
    ptr, Nk = _csr(b)
    bR = ptr[1:] - ptr[:-1]
    cnt = bR[M2]
    prefix = np.cumsum(cnt)
    N = int(prefix[-1]) if len(prefix) else 0

    def g(z):
        q = np.searchsorted(prefix, z, side="right")
        off = z - (prefix[q] - cnt[q])
        return M1[q], Nk[ptr[M2[q]] + off]

    i, j = _enum_pairs(engine, SearchSpace(N, g), ledger, "term2", n)
    out = np.zeros((n, n), dtype=bool)
    out[i, j] = True
    return out, N, len(M1)


def _term_per_k(E_mask, F_mask, engine, ledger, phase, n):
    """Union over k of E_k x F_k, with E_k = rows of column k of ``E_mask``
    and F_k = columns of row k of ``F_mask``; one enumeration per k."""
    struck = np.zeros((n, n), dtype=bool)
    witnesses = 0
    for k in range(n):
        E = np.flatnonzero(E_mask[:, k])
        F = np.flatnonzero(F_mask[k])
        if len(E) == 0 or len(F) == 0:
            continue
        witnesses += len(E) * len(F)
        w = len(F)
        space = SearchSpace(len(E) * w, lambda z, E=E, F=F, w=w: (E[z // w], F[z % w]))
        i, j = _enum_pairs(engine, space, ledger, phase, n, struck)
        struck[i, j] = True
    return struck, witnesses


def sparse_bool_product(A: BoolMatrix, B: BoolMatrix, l1, l2, l3, engine="quantum-sim",
                        ledger: CostLedger = None, p: OmegaParams = DEFAULT) -> BoolMatrix:
    """Boolean product via the four-term decomposition with thresholds l1, l2, l3."""
    n = _check_square(A, B)
    d = DegreeProfile.of(A, B)
    _check_params(d.m1, d.m2, l1, l2, l3)
    if engine == "brute":
        return bool_multiply(A, B)
    if engine not in ("quantum-sim", "classical"):
        raise ValueError(f"unknown engine {engine!r}")
    ledger = ledger if ledger is not None else CostLedger()
    if d.m1 == 0 or d.m2 == 0:
        return BoolMatrix.zeros(n, n)
    sets = classify_indices(A, B, l1, l2, l3, ledger, d)
    a, b = A.to_dense(), B.to_dense()
    ledger.charge_classical("setup", n * n)

    t1, dims = _term_compressed(a, b, sets, ledger, p)
    bounds = tuple(min(l, n) for l in (l1, l2, l3))
    assert all(x <= y for x, y in zip(dims, bounds)), (dims, bounds)

    t2, N, m1p = _term_light_middle(a, b, sets, engine, ledger, n)
    assert N * l2 <= m1p * d.m2, "term-2 space exceeds m1' m2 / l2"
    lam2 = int(t2.sum())
    assert lam2 * l2 <= d.m1 * d.m2

    t3, wit3 = _term_per_k(a & sets.T_prime[:, None], b, engine, ledger, "term3", n)
    t4, wit4 = _term_per_k(a, b & sets.U_prime[None, :], engine, ledger, "term4", n)

    out = t1 | t2 | t3 | t4
    lam = int(out.sum())
    # every output cell of term 3 has fewer than m1/l1 witnesses, and at most n
    assert wit3 * l1 <= lam * d.m1 and wit3 <= lam * n, "term-3 witness bound"
    assert wit4 * l3 <= lam * d.m2 and wit4 <= lam * n, "term-4 witness bound"
    return BoolMatrix.from_dense(out)


def _sparse_expand(A: BoolMatrix, B: BoolMatrix, engine, ledger) -> BoolMatrix:
    """Enumerate nonzeros of the sparser side and OR in rows of the other."""
    if B.nnz() < A.nnz():
        return _sparse_expand(B.T, A.T, engine, ledger).T
    n = A.rows
    flat = A.to_dense().reshape(-1)
    space = SearchSpace(n * n, lambda z: z)
    z = enumerate_solutions(engine, space, lambda z: flat[z], ledger, "enumerate-nonzeros")
    i, k = z // n, z % n
    words = np.zeros_like(B.words)
    np.bitwise_or.at(words, i, B.words[k])
    ledger.charge_classical("expand", int(B.row_counts()[k].sum()))
    return BoolMatrix(n, B.cols, words)


def sparse_plan(A: BoolMatrix, B: BoolMatrix, p: OmegaParams = DEFAULT) -> dict:
    n = _check_square(A, B)
    return select_parameters("boolsparse-l123", n, A.nnz(), B.nnz(), p=p)


def auto_sparse_bool_product(A: BoolMatrix, B: BoolMatrix, engine="quantum-sim",
                             ledger: CostLedger = None, p: OmegaParams = DEFAULT) -> BoolMatrix:
    """Boolean product with the strategy chosen by the density regime."""
    n = _check_square(A, B)
    if engine == "brute":
        return bool_multiply(A, B)
    ledger = ledger if ledger is not None else CostLedger()
    plan = sparse_plan(A, B, p)
    regime = plan["regime"]
    with ledger.scope(regime):
        if regime == "sparse-expand":
            if engine not in ("quantum-sim", "classical"):
                raise ValueError(f"unknown engine {engine!r}")
            return _sparse_expand(A, B, engine, ledger)
        if regime == "dense":
            ledger.charge_model_multiply("multiply", model_multiply_cost(n, n, n, p))
            return bool_multiply(A, B)
        return sparse_bool_product(A, B, plan["l1"], plan["l2"], plan["l3"], engine, ledger, p)
