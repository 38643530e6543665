"""Winding of Q^v, Maslov index and partial indices of the reduced symbol for the test models."""
from stationary_discs.birkhoff import maslov_index, partial_indices, symbol
from stationary_discs.circlefns import winding_number
from stationary_discs.modeldisc import levi_coefficients
from stationary_discs.rhsolver import build_G, reduce_to_A

from kernel_survey import MODELS

NF = 32

if __name__ == "__main__":
    print(f"{'model':18s} {'k0':>3s} {'indQ':>4s} {'maslov':>6s}  partial indices")
    for name, (P, v) in MODELS.items():
        ind_q = winding_number(levi_coefficients(P, v, NF).detQ)
        L = symbol(reduce_to_A(build_G(P, v, NF), P.weight.m, P.d))
        print(f"{name:18s} {P.k0:3d} {ind_q:4d} {maslov_index(L):6d}  {partial_indices(L, 6)}")
