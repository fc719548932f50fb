import math

import pytest
from hypothesis import given, strategies as st

from semiring_qmm.exponents import (DEFAULT, OmegaParams, boolsparse_exponent, boolsparse_regime,
                                    maxmin_gamma_closed_form, model_multiply_cost, omega_bound,
                                    paper_exponent_table, select_parameters, solve_exponent)

W, A = 2.373, 0.302
B = (W - 2) / (1 - A)


def test_params_validation():
    with pytest.raises(ValueError):
        OmegaParams(omega=3.1)
    with pytest.raises(ValueError):
        OmegaParams(alpha=0)
    assert OmegaParams(alpha=1).beta == 0
    assert DEFAULT.beta == pytest.approx(B)


@pytest.mark.parametrize("args,want", [((1, 1, 1), 2.373), ((1, 0.3, 1), 2.0), ((1, 1.5, 1), 2.873)])
def test_omega_examples(args, want):
    assert omega_bound(*args) == pytest.approx(want, abs=1e-12)


def test_omega_rejects_nonpositive():
    with pytest.raises(ValueError):
        omega_bound(1, 0, 1)


pos = st.floats(0.05, 3.0)


@given(pos, pos, pos)
def test_omega_symmetric_and_floored(a, b, c):
    w = omega_bound(a, b, c)
    assert w == pytest.approx(omega_bound(c, a, b))
    assert w >= max(a + b, a + c, b + c) - 1e-9
    assert w <= a * b * c / min(a, b, c) * 0 + a + b + c + 1e-9  # never worse than cubic


@given(pos, pos, pos, st.floats(0.1, 4))
def test_omega_homogeneous(a, b, c, s):
    assert omega_bound(s * a, s * b, s * c) == pytest.approx(s * omega_bound(a, b, c), rel=1e-9)


def test_model_cost():
    assert model_multiply_cost(1, 5, 7) == 35
    assert model_multiply_cost(64, 64, 64) == pytest.approx(64 ** 2.373)
    assert model_multiply_cost(0, 3, 3) == 0


def test_maxmin_gamma_root_matches_closed_form():
    g = solve_exponent("maxmin-gamma")
    assert g == pytest.approx(maxmin_gamma_closed_form(), abs=1e-8)
    assert (5 - g) / 2 == pytest.approx(paper_exponent_table()["maxmin"], abs=1e-6)


def test_dom_mu_dense():
    # dense inputs: log_n(m1 m2) = 4 gives the (5+omega)/3 dominance exponent
    mu = solve_exponent("dom-mu", log_m=4)
    assert (4 + 1 - mu) / 2 == pytest.approx((5 + W) / 3, abs=1e-6)


def test_solver_errors():
    with pytest.raises(ValueError):
        solve_exponent("nope")
    with pytest.raises(ValueError):
        solve_exponent("dom-mu")
    with pytest.raises(ValueError):
        solve_exponent("dist-q-gamma")
    with pytest.raises(ValueError, match="sign change"):
        solve_exponent("maxmin-gamma", lo=1, hi=2)


def test_distance_equations_solve():
    ab = A * B
    for mu in (0.02, 0.05, 0.1):
        g = solve_exponent("dist-q-gamma", mu=mu, lo=-0.999)
        # where the root is nonnegative it never does worse than the closed-form cost
        assert g >= 0
        assert (5 + mu - g) / 2 <= (5 + W) / 3 + (4 - ab) / 6 * mu + 1e-9
    for mu in (0.02, 0.5, 1.5):
        gc = solve_exponent("dist-c-gamma", mu=mu, lo=-0.999)
        assert (3 + mu - gc) <= (3 + W) / 2 + (1 - ab / 4) * mu + 1e-9
    assert solve_exponent("dist-q-gamma", mu=0.02) > 0
    t = select_parameters("distmsb-t", 16, ell=6, m1=10)
    assert t["gamma"] < 0 and t["t"] == 1


def test_table_values():
    t = paper_exponent_table()
    want = {"maxmin": 2.473, "dominance_dense": 2.458, "maxmin_classical": 2.687,
            "distmsb_quantum_coeff": 0.640, "distmsb_classical_coeff": 0.960,
            "boolsparse_at_m_n1686": 2.277, "boolsparse_m_exponent": 0.517,
            "boolsparse_n_exponent": 1.406, "threshold_sparse": 1.151, "threshold_dense": 1.873}
    for k, v in want.items():
        assert abs(t[k] - v) <= 1e-3, k


def test_boolsparse_exponent_piecewise_continuous():
    t = paper_exponent_table()
    for h in (1.0, t["threshold_sparse"], t["threshold_dense"]):
        lo = boolsparse_exponent(h - 1e-7, h - 1e-7)
        hi = boolsparse_exponent(h + 1e-7, h + 1e-7)
        assert lo == pytest.approx(hi, abs=1e-5)
    assert boolsparse_exponent(1.686, 1.686) == pytest.approx(2.277, abs=0.01)


def test_regime_boundaries():
    assert boolsparse_regime(64, 64, 64) == "square-cover"
    assert boolsparse_regime(64, 63, 64) == "sparse-expand"
    assert boolsparse_regime(64, 64 * 64, 64 * 64) == "dense"
    assert boolsparse_regime(1000, 1000 ** 1.4, 1000 ** 1.4) == "rectangular"


class TestSelect:
    def test_unknown(self):
        with pytest.raises(ValueError):
            select_parameters("nope", 4)

    def test_dominance_t_clamped(self):
        assert select_parameters("dominance-t", 1024, 1024 ** 2, 1024 ** 2)["t"] == 2
        assert select_parameters("dominance-t", 4, 1, 1)["t"] == 1
        with pytest.raises(ValueError):
            select_parameters("dominance-t", 4, 0, 3)

    def test_maxmin(self):
        p = select_parameters("maxmin-g-gamma", 400, m1=5)
        assert p["gamma"] + p["delta"] == pytest.approx(1)
        assert 1 <= p["g"] <= 400 and 1 <= p["t"] <= 5

    def test_distmsb_regime_flag(self):
        assert select_parameters("distmsb-t", 4, ell=4)["in_regime"]
        assert not select_parameters("distmsb-t", 4, ell=5)["in_regime"]

    def test_boolsparse_params(self):
        n = 1000
        m = int(n ** 1.686)
        p = select_parameters("boolsparse-l123", n, m, m)
        assert p["regime"] == "rectangular"
        assert p["l1"] == m and p["l3"] == m and 1 <= p["l2"] <= m
        assert p["model_exponent"] == pytest.approx(2.277, abs=0.01)
        sq = select_parameters("boolsparse-l123", 100, 150, 150)
        assert sq["regime"] == "square-cover" and sq["l2"] == math.ceil(150 * 150 / 100 ** 2)
