"""Rank of the jet map at 1 on the kernel, by jet order, against the refined bound."""
from stationary_discs.jets import jet_bound, rank_profile
from stationary_discs.rhsolver import linearize

from kernel_survey import MODELS

NF = 48

if __name__ == "__main__":
    for name, (P, v) in MODELS.items():
        S = linearize(P, v, NF, with_l3=False)
        prof = rank_profile(S.kernel_discs(), 8)
        bound = jet_bound(P, v, nf=NF)
        print(f"{name:18s} kernel={S.kernel_dim:2d} ranks={prof['ranks']} "
              f"saturation={prof['saturation']} refined={bound['refined']} generic={bound['generic']}")
