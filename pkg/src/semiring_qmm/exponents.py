"""Rectangular matrix multiplication exponents and parameter selection.

``omega_bound`` upper-bounds omega(k1, k2, k3) using only the standard
facts: omega(1, k, 1) = 2 for k <= alpha and <= 2 + beta (k - alpha) for
alpha <= k <= 1; homogeneity; symmetry under permutation; and
omega(k1, k2, 1 + k3) <= omega(k1, k2, 1) + k3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

EQUATIONS = ("dom-mu", "maxmin-gamma", "dist-q-gamma", "dist-c-gamma")
TASKS = ("dominance-t", "maxmin-g-gamma", "distmsb-t", "boolsparse-l123")
REGIMES = ("sparse-expand", "square-cover", "rectangular", "dense")

TOL = 1e-9


@dataclass(frozen=True)
class OmegaParams:
    omega: float = 2.373
    alpha: float = 0.302

    def __post_init__(self):
        if not 2 <= self.omega < 3:
            raise ValueError("omega must lie in [2, 3)")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")

    @property
    def beta(self) -> float:
        if self.alpha == 1:
            return 0.0
        return (self.omega - 2) / (1 - self.alpha)


DEFAULT = OmegaParams()


def _square_inner(k, p):
    # omega(1, k, 1) for 0 < k <= 1
    if k <= p.alpha:
        return 2.0
    return 2.0 + p.beta * (k - p.alpha)


def omega_bound(k1, k2, k3, p: OmegaParams = DEFAULT) -> float:
    """Upper bound on omega(k1, k2, k3)."""
    if min(k1, k2, k3) <= 0:
        raise ValueError("omega_bound arguments must be positive")
    a, b, c = sorted((float(k1), float(k2), float(k3)))
    # permute to omega(b, a, c), scale by b, then extend the last side
    bound = b * _square_inner(a / b, p) + (c - b)
    floor = max(k1 + k2, k1 + k3, k2 + k3)
    assert bound >= floor - 1e-12, (bound, floor)
    return bound


def model_multiply_cost(n1, n2, n3, p: OmegaParams = DEFAULT) -> float:
    """Model cost of an n1 x n2 by n2 x n3 product, N^omega_bound(log_N dims).

    By homogeneity the base N is irrelevant.  Degenerate dimensions (1) fall
    back to the plain product n1 n2 n3.
    """
    n1, n2, n3 = int(n1), int(n2), int(n3)
    if min(n1, n2, n3) <= 0:
        return 0.0
    if min(n1, n2, n3) == 1:
        return float(n1 * n2 * n3)
    base = max(n1, n2, n3)
    lb = math.log(base)
    e = omega_bound(math.log(n1) / lb, math.log(n2) / lb, math.log(n3) / lb, p)
    return base ** e


def _residual(which, x, p, mu=None, log_m=None):
    if which == "dom-mu":
        return x + 2 * omega_bound(1, 1 + x, 1, p) - (1 + log_m)
    if which == "maxmin-gamma":
        return x + 2 * omega_bound(1 + x, 1 + x, 1, p) - 5
    if which == "dist-q-gamma":
        return 2 * omega_bound(1 + mu / 2, 1 + x, 1 + mu / 2, p) - (5 + mu - x)
    if which == "dist-c-gamma":
        return omega_bound(1 + mu / 2, 1 + x, 1 + mu / 2, p) - (3 + mu - x)
    raise ValueError(f"unknown equation {which!r}")


def solve_exponent(which: str, p: OmegaParams = DEFAULT, *, mu=None, log_m=None,
                   lo=0.0, hi=4.0) -> float:
    """Root of one of the balancing equations by bisection on [lo, hi].

    ``dom-mu`` needs ``log_m`` = log_n(m1 m2); the distance equations need
    ``mu`` = log_n(2^ell).
    """
    if which == "dom-mu" and log_m is None:
        raise ValueError("dom-mu needs log_m")
    if which in ("dist-q-gamma", "dist-c-gamma") and mu is None:
        raise ValueError(f"{which} needs mu")
    f = lambda x: _residual(which, x, p, mu=mu, log_m=log_m)
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo < 0) == (fhi < 0):
        raise ValueError(f"no sign change on [{lo}, {hi}] for {which}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < TOL:
            break
    return 0.5 * (lo + hi)


def maxmin_gamma_closed_form(p: OmegaParams = DEFAULT) -> float:
    ab, b = p.alpha * p.beta, p.beta
    return (1 + 2 * ab - 2 * b) / (5 - 2 * ab)


def boolsparse_exponent(log_m1, log_m2, p: OmegaParams = DEFAULT) -> float:
    """log_n of the sparse Boolean product cost for m_i = n^log_mi."""
    a, b, ab, w = p.alpha, p.beta, p.alpha * p.beta, p.omega
    half = (log_m1 + log_m2) / 2
    if half < 1:
        return 1 + min(log_m1, log_m2)
    if half < 1 + a / 2:
        return 2.0
    if half < w - 0.5:
        return (b * (log_m1 + log_m2) + 2 + 2 * b - ab) / (1 + 2 * b)
    return w


def paper_exponent_table(p: OmegaParams = DEFAULT) -> dict:
    w, a, b = p.omega, p.alpha, p.beta
    ab = a * b
    m_exp = 2 * b / (1 + 2 * b)
    n_exp = (2 + 2 * b - ab) / (1 + 2 * b)
    return {
        "maxmin": (12 - 6 * ab + b) / (5 - 2 * ab),
        "dominance_dense": (5 + w) / 3,
        "maxmin_classical": (3 + w) / 2,
        "distmsb_quantum_coeff": (4 - ab) / 6,
        "distmsb_classical_coeff": 1 - ab / 4,
        "boolsparse_m_exponent": m_exp,
        "boolsparse_n_exponent": n_exp,
        "boolsparse_at_m_n1686": m_exp * (1 + w) / 2 + n_exp,
        "threshold_sparse": 1 + a / 2,
        "threshold_dense": w - 0.5,
        "maxmin_gamma": maxmin_gamma_closed_form(p),
        "beta": b,
    }


def _clamp(x, lo, hi):
    return max(lo, min(hi, x))


def boolsparse_regime(n, m1, m2, p: OmegaParams = DEFAULT) -> str:
    """Regime by sqrt(m1 m2) against n, n^(1+alpha/2), n^(omega-1/2).

    A value sitting exactly on a boundary goes to the higher regime.
    """
    if m1 * m2 < n * n:
        return "sparse-expand"
    if n <= 1:
        return "square-cover"
    half = 0.5 * math.log(m1 * m2) / math.log(n)
    if half < 1 + p.alpha / 2:
        return "square-cover"
    if half < p.omega - 0.5:
        return "rectangular"
    return "dense"


def select_parameters(task: str, n: int, m1: int = None, m2: int = None, ell: int = None,
                      p: OmegaParams = DEFAULT, engine: str = "quantum-sim") -> dict:
    """Integer algorithm parameters for ``task`` clamped to their legal ranges."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if task == "dominance-t":
        if m1 is None or m2 is None or m1 < 1 or m2 < 1:
            raise ValueError("dominance-t needs m1, m2 >= 1")
        raw = (m1 * m2) ** (1 / 3) * n ** ((1 - 2 * p.omega) / 3)
        return {"t": _clamp(math.ceil(raw - 1e-12), 1, m1)}
    if task == "maxmin-g-gamma":
        gamma = solve_exponent("maxmin-gamma", p)
        delta = 1 - gamma
        g = _clamp(round(n ** delta), 1, n)
        t = max(1, math.ceil(n ** gamma - 1e-12))
        if m1 is not None:
            t = _clamp(t, 1, max(1, m1))
        return {"g": g, "t": t, "gamma": gamma, "delta": delta}
    if task == "distmsb-t":
        if ell is None or ell < 1:
            raise ValueError("distmsb-t needs ell >= 1")
        mu = ell * math.log(2) / math.log(n) if n > 1 else 0.0
        which = "dist-c-gamma" if engine == "classical" else "dist-q-gamma"
        # large mu pushes the root below zero (t then clamps to 1); past
        # 2^ell = n^2 there may be no root at all
        try:
            gamma = solve_exponent(which, p, mu=mu, lo=-0.999)
        except ValueError:
            gamma = -0.999
        t = max(1, math.ceil(n ** gamma - 1e-12))
        if m1 is not None:
            t = _clamp(t, 1, max(1, m1))
        return {"t": t, "gamma": gamma, "mu": mu, "in_regime": 2 ** ell <= n * n}
    # boolsparse-l123
    if m1 is None or m2 is None or m1 < 0 or m2 < 0:
        raise ValueError("boolsparse-l123 needs m1, m2 >= 0")
    regime = boolsparse_regime(n, m1, m2, p) if m1 and m2 else "sparse-expand"
    out = {"regime": regime, "l1": None, "l2": None, "l3": None}
    if regime == "square-cover":
        out.update(l1=m1, l2=_clamp(math.ceil(m1 * m2 / (n * n)), 1, m2), l3=m2)
    elif regime == "rectangular":
        b, ab = p.beta, p.alpha * p.beta
        l2 = (m1 * m2) ** (1 / (1 + 2 * b)) * n ** (2 * (ab - 1) / (1 + 2 * b))
        out.update(l1=m1, l2=_clamp(round(l2), 1, m2), l3=m2)
    lm1 = math.log(max(m1, 1)) / math.log(n) if n > 1 else 0.0
    lm2 = math.log(max(m2, 1)) / math.log(n) if n > 1 else 0.0
    out["model_exponent"] = boolsparse_exponent(lm1, lm2, p)
    return out
