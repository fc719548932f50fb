import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import rand_ext
from semiring_qmm.core import NEG_INF, POS_INF, ExtMatrix
from semiring_qmm.maxmin import (apbp, apbp_brute, ext_max, leftslice, leftslice_brute,
                                 maxmin_brute, maxmin_product, row_partition)
from semiring_qmm.qsim import CostLedger, ceil_sqrt

INF = math.inf
A0 = ExtMatrix.from_rows([[3, 1], [5, 2]])
B0 = ExtMatrix.from_rows([[2, 4], [1, 0]])


def capacity(rng, n, p_edge):
    vals = rng.integers(1, 10, (n, n))
    return ExtMatrix(vals, np.where(rng.random((n, n)) < p_edge, 0, NEG_INF))


class TestLeftslice:
    def test_examples(self):
        assert leftslice_brute(A0, B0).to_rows() == [[1, 3], [-INF, -INF]]
        for g in (1, 2):
            assert leftslice(A0, B0, g).to_rows() == [[1, 3], [-INF, -INF]]
        assert leftslice(ExtMatrix.full((3, 3), INF), ExtMatrix.full((3, 3), 0)).to_rows() == [[-INF] * 3] * 3
        z = ExtMatrix.full((3, 3), 0)
        assert leftslice(z, z, 2) == z

    def test_g_range(self):
        with pytest.raises(ValueError, match="g out of range"):
            leftslice(A0, B0, 0)
        with pytest.raises(ValueError, match="g out of range"):
            leftslice(A0, B0, 3)

    def test_brute_against_python(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 7))
            A, B = rand_ext(rng, n, [POS_INF, NEG_INF]), rand_ext(rng, n, [POS_INF, NEG_INF])
            assert leftslice_brute(A, B).to_rows() == oracles.leftslice(A.to_rows(), B.to_rows())
            assert maxmin_brute(A, B).to_rows() == oracles.maxmin(A.to_rows(), B.to_rows())

    @given(st.integers(0, 2**31), st.integers(1, 10), st.sampled_from(["quantum-sim", "classical"]))
    def test_all_g(self, seed, n, engine):
        rng = np.random.default_rng(seed)
        A, B = rand_ext(rng, n, [POS_INF, NEG_INF]), rand_ext(rng, n, [POS_INF, NEG_INF])
        ref = leftslice_brute(A, B)
        for g in range(1, n + 1):
            assert leftslice(A, B, g, engine, CostLedger(seed)) == ref

    def test_row_partition(self, rng):
        r = rng.integers(0, 3, (6, 6))
        live = rng.random((6, 6)) < 0.7
        rp = row_partition(r, live, 2)
        for i in range(6):
            sizes = np.bincount(rp.part[i][live[i]], minlength=rp.s)
            assert sizes.sum() == live[i].sum() and sizes.max(initial=0) <= 2
            for p in range(rp.s - 1):
                a = r[i][rp.part[i] == p]
                b = r[i][rp.part[i] == p + 1]
                if len(a) and len(b):
                    assert a.max() <= b.min()

    def test_step2_charge(self, rng):
        n, g = 12, 3
        A, B = rand_ext(rng, n, [POS_INF]), rand_ext(rng, n, [NEG_INF])
        led = CostLedger()
        leftslice(A, B, g, ledger=led)
        ph = led.phases.get("step2.extremum")
        total = ph.quantum_steps if ph else 0
        assert total <= n * n * ceil_sqrt(g)
        assert total == sum(c * ceil_sqrt(N) for (_, N, _), c in (ph.calls.items() if ph else []))


class TestMaxmin:
    def test_examples(self):
        assert maxmin_product(A0, B0).to_rows() == [[2, 3], [2, 4]]
        assert maxmin_product(ExtMatrix.from_rows([[7]]), ExtMatrix.from_rows([[4]])).to_rows() == [[4]]

    def test_diag_inf_dominates(self, rng):
        A = rand_ext(rng, 6, [NEG_INF])
        tags = A.tags.copy()
        np.fill_diagonal(tags, POS_INF)
        A = ExtMatrix(A.values, tags)
        C = maxmin_product(A, A)
        assert ext_max(C, A) == C

    def test_g_invariance(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 12))
            A, B = rand_ext(rng, n, [POS_INF, NEG_INF]), rand_ext(rng, n, [POS_INF, NEG_INF])
            outs = {maxmin_product(A, B, g) for g in range(1, n + 1)}
            assert outs == {maxmin_brute(A, B)}

    def test_shape(self):
        with pytest.raises(ValueError, match="shape"):
            maxmin_product(A0, ExtMatrix.full((3, 3), 0))


class TestApbp:
    def test_path(self):
        cap = ExtMatrix.from_rows([[-INF, 5, -INF], [-INF, -INF, 2], [-INF, -INF, -INF]])
        out = apbp(cap)
        assert out[0, 2] == 2 and out[2, 0] == -INF and out[1, 1] == INF

    def test_random_against_dp(self, rng):
        for _ in range(8):
            n = int(rng.integers(1, 10))
            cap = capacity(rng, n, 0.3)
            want = oracles.bottleneck(cap.to_rows())
            assert apbp_brute(cap).to_rows() == want
            got = apbp(cap, engine=["quantum-sim", "classical"][n % 2])
            assert got.to_rows() == want
            assert maxmin_product(got, got) == got

    def test_shape(self):
        with pytest.raises(ValueError, match="shape"):
            apbp(ExtMatrix.full((2, 3), 0))
