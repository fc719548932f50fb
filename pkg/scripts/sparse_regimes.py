"""Sweep densities and report which regime the sparse Boolean product picks,
with the simulated cost of each run."""
import argparse

import numpy as np

from semiring_qmm.boolsparse import auto_sparse_bool_product, sparse_plan
from semiring_qmm.core import BoolMatrix, bool_multiply
from semiring_qmm.qsim import CostLedger


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    n = args.n
    print(f"{'density':>8} {'m1':>6} {'m2':>6} {'regime':>14} {'quantum':>10} {'model':>12}  ok")
    for e in range(7):
        dens = 2.0 ** -e
        A = BoolMatrix.from_dense(rng.random((n, n)) < dens)
        B = BoolMatrix.from_dense(rng.random((n, n)) < dens)
        led = CostLedger(args.seed)
        C = auto_sparse_bool_product(A, B, ledger=led)
        rep = led.report()
        print(f"{dens:8.4f} {A.nnz():6d} {B.nnz():6d} {sparse_plan(A, B)['regime']:>14} "
              f"{rep.quantum_steps:10d} {rep.total_model_cost():12.4g}  {C == bool_multiply(A, B)}")


if __name__ == "__main__":
    main()
