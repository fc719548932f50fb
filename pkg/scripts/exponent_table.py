"""Print the exponent table, optionally for a different omega / alpha."""
import argparse

from semiring_qmm.exponents import OmegaParams, paper_exponent_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega", type=float, default=OmegaParams().omega)
    ap.add_argument("--alpha", type=float, default=OmegaParams().alpha)
    args = ap.parse_args()
    table = paper_exponent_table(OmegaParams(omega=args.omega, alpha=args.alpha))
    width = max(map(len, table))
    for k, v in table.items():
        print(f"{k:<{width}}  {v:.4f}")


if __name__ == "__main__":
    main()
