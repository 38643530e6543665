"""Kernel dimension of the linearized problem across test models and truncations."""
import argparse

from stationary_discs.polyalgebra import sum_of_powers, validate_hermitian
from stationary_discs.rhsolver import linearize

MODELS = {
    "|z|^4": (sum_of_powers(1, 4), [1.0]),
    "|z1|^4+|z2|^4": (sum_of_powers(2, 4), [0.6, 0.8]),
    "|z|^6": (sum_of_powers(1, 6), [1.0]),
    "tilted quartic": (validate_hermitian({((2,), (2,)): 1, ((3,), (1,)): 0.3, ((1,), (3,)): 0.3}, (1,)), [1.0]),
    "weights (2,4)": (validate_hermitian({((2, 0), (2, 0)): 1, ((0, 1), (0, 1)): 1}, (2, 4)), [0.6, 0.8]),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nf", type=int, nargs="+", default=[32, 64, 128])
    args = ap.parse_args()
    print(f"{'model':18s} {'nf':>4s} {'kernel':>6s} {'L3':>3s} {'2k0+1+L3':>8s} {'formula':>7s} {'gap':>9s}")
    for name, (P, v) in MODELS.items():
        for nf in args.nf:
            S = linearize(P, v, nf)
            formula = 2 * (P.n + 1) * (P.k0 + 1) - P.d * P.n if P.weight.homogeneous else "-"
            print(f"{name:18s} {nf:4d} {S.kernel_dim:6d} {S.l3_kernel_dim:3d} "
                  f"{2 * P.k0 + 1 + S.l3_kernel_dim:8d} {formula!s:>7s} {S.gap:9.1e}")


if __name__ == "__main__":
    main()
