"""Fit the log-log slope of the simulated model cost of the dense dominance product."""
import argparse
import math

import numpy as np

from semiring_qmm import CostLedger, ExtMatrix, dominance_product


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    xs, ys = [], []
    for n in args.sizes:
        rng = np.random.default_rng(args.seed + n)
        A = ExtMatrix(rng.integers(-1000, 1000, (n, n)))
        B = ExtMatrix(rng.integers(-1000, 1000, (n, n)))
        led = CostLedger(args.seed)
        dominance_product(A, B, ledger=led)
        cost = led.report().total_model_cost()
        print(f"n={n:5d}  model cost {cost:.4g}")
        xs.append(math.log(n))
        ys.append(math.log(cost))
    if len(xs) > 1:
        print(f"slope {np.polyfit(xs, ys, 1)[0]:.3f}")


if __name__ == "__main__":
    main()
