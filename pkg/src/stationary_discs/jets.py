"""Jets of lifts at the boundary point 1 and the finite jet determination bounds."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circlefns import CircleFunction, IndexUndefinedError, winding_number
from .modeldisc import DiscLift, find_admissible, levi_coefficients
from .polyalgebra import HermitianPolynomial, validate_hermitian
from .rhsolver import RankAmbiguityError, numerical_rank


class JetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class JetVector:
    order: int
    entries: np.ndarray  # (components, order + 1)

    def real_vector(self) -> np.ndarray:
        flat = self.entries.ravel()
        return np.concatenate([flat.real, flat.imag])

    def distance(self, other: "JetVector") -> float:
        return float(np.max(np.abs(self.entries - other.entries)))


def falling_factorial(k: np.ndarray, ell: int) -> np.ndarray:
    out = np.ones_like(k, dtype=float)
    for i in range(ell):
        out = out * (k - i)
    return out


def derivative_at_one(f: CircleFunction, ell: int) -> complex:
    """``f^(ell)(1) = sum_k k(k-1)...(k-ell+1) c_k``."""
    k = f.modes()
    return complex(np.sum(falling_factorial(k, ell) * f.coeffs))


def jet_at_one(disc: DiscLift | CircleFunction, order: int) -> JetVector:
    comps = [disc] if isinstance(disc, CircleFunction) else disc.components()
    if order < 0:
        raise JetError("jet order must be >= 0")
    if order > comps[0].nf // 2:
        raise JetError(f"truncation nf={comps[0].nf} too small for jets of order {order}")
    for c in comps:
        if not c.holomorphic:
            raise JetError("jets at 1 are taken of holomorphic components only")
    ent = np.array([[derivative_at_one(c, l) for l in range(order + 1)] for c in comps])
    return JetVector(order, ent)


def jet_matrix(kernel: list[DiscLift], order: int) -> np.ndarray:
    if not kernel:
        return np.zeros((0, 0))
    return np.stack([jet_at_one(f, order).real_vector() for f in kernel], axis=1)


def kernel_jet_injectivity(kernel: list[DiscLift], order: int) -> dict:
    """Rank of the jet map on the span of ``kernel`` (real/imaginary parts split)."""
    if not kernel:
        return {"rank": 0, "injective": True, "kernel_dim": 0, "order": order}
    mat = jet_matrix(kernel, order)
    mat = mat / np.max(np.abs(mat)) if np.any(mat) else mat
    sv = np.linalg.svd(mat, compute_uv=False)
    try:
        rank, gap = numerical_rank(sv)
    except RankAmbiguityError as exc:
        raise JetError("ambiguous rank gap: increase l0 or N_F") from exc
    return {"rank": rank, "injective": rank == len(kernel), "kernel_dim": len(kernel),
            "order": order, "gap": gap}


def rank_profile(kernel: list[DiscLift], max_order: int) -> dict:
    """Ranks of the jet map for ``l0 = 0..max_order`` and the first saturating order."""
    ranks = [kernel_jet_injectivity(kernel, l)["rank"] for l in range(max_order + 1)]
    saturation = next((l for l, r in enumerate(ranks) if r == len(kernel)), None)
    return {"ranks": ranks, "saturation": saturation, "kernel_dim": len(kernel)}


def decoupled_blocks(P: HermitianPolynomial) -> list[list[int]]:
    """Connected groups of variables; ``P`` splits as a sum over the groups."""
    n = P.n
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (J, K) in P.coeffs:
        used = [i for i in range(n) if J[i] or K[i]]
        for i in used[1:]:
            parent[find(i)] = find(used[0])
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def _block_polynomial(P: HermitianPolynomial, block: list[int]) -> HermitianPolynomial:
    terms = {}
    for (J, K), c in P.coeffs.items():
        if any(J[i] or K[i] for i in block):
            terms[(tuple(J[i] for i in block), tuple(K[i] for i in block))] = c
    return validate_hermitian(terms, tuple(P.weight.m[i] for i in block))


def jet_bound(P: HermitianPolynomial, v=None, trials: int = 64, seed: int = 0, nf: int = 64) -> dict:
    n, d, k0, M = P.n, P.d, P.k0, P.weight.m
    out = {"n": n, "d": d, "k0": k0, "generic": 6 * n * d,
           "N_upper": 2 * (n + 1) * (k0 + 1) + 2 * n * k0 - 2 * d * n}
    if v is None:
        found = find_admissible(P, trials, seed, nf=nf)
        if not found["success"]:
            out["admissible"] = False
            out["reason"] = found["certificate"].get("reason")
            return out
        v = found["v"]
    v = np.atleast_1d(np.asarray(v, complex))
    try:
        ind_q = winding_number(levi_coefficients(P, v, nf).detQ)
    except IndexUndefinedError as exc:
        out["admissible"] = False
        out["reason"] = str(exc)
        return out
    out["admissible"] = True
    out["v"] = [[z.real, z.imag] for z in v]
    out["indQ"] = ind_q
    out["maslov_A"] = 2 * ind_q - 2 * sum(M)
    out["refined"] = -2 * sum(M) + 2 * ind_q + 2 * k0
    out["l3_upper"] = 2 * n * (2 * k0 - d) + 2 * n
    if P.weight.homogeneous:
        out["indQ_formula"] = n * (k0 - d // 2 + 1)
        out["N_homogeneous_formula"] = 2 * (n + 1) * (k0 + 1) - d * n
        out["N_computed_count"] = 2 * k0 + 1 + 2 * ind_q
    blocks = decoupled_blocks(P)
    if len(blocks) > 1:
        parts = [_block_polynomial(P, b) for b in blocks]
        out["blocks"] = blocks
        out["N_decoupled"] = sum(2 * (Q.n + 1) * (Q.k0 + 1) - Q.d * Q.n for Q in parts)
        out["N_decoupled_literal"] = sum(2 * (Q.n + 1) * (Q.k0 + 1) - 2 * Q.d * Q.n for Q in parts)
    return out
