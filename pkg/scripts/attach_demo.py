"""Attach discs to |z|^4 + eps (z^3 zbar^2 + z^2 zbar^3) for a range of eps."""
import argparse

from stationary_discs.modeldisc import ModelHypersurface
from stationary_discs.polyalgebra import sum_of_powers
from stationary_discs.rhsolver import ConvergenceError, PerturbedHypersurface, linearize, newton_attach


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nf", type=int, default=48)
    ap.add_argument("--eps", type=float, nargs="+", default=[1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0])
    args = ap.parse_args()
    P = sum_of_powers(1, 4)
    system = linearize(P, [1.0], args.nf)
    for eps in args.eps:
        surf = PerturbedHypersurface(ModelHypersurface(P), {((3,), (2,), 0): eps, ((2,), (3,), 0): eps})
        try:
            res = newton_attach(surf, system)
        except ConvergenceError as exc:
            print(f"eps={eps:<8g} failed: {exc}")
            continue
        print(f"eps={eps:<8g} iterations={res.iterations} residual={res.residual:.2e} "
              f"distance from model lift={res.disc.distance(system.base):.2e}")


if __name__ == "__main__":
    main()
