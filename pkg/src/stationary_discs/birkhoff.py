"""Maslov index, partial indices and Birkhoff factorization of matrix loops on the circle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circlefns import WINDING_SAMPLES, CircleFunction, circle_points, riesz_split, winding_number

INVERTIBILITY_TOL = 1e-8
RANK_TOL = 1e-8


class LoopError(ValueError):
    pass


class IndexRecoveryError(RuntimeError):
    pass


class FactorizationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class MatrixLoop:
    entries: list[list[CircleFunction]]

    def __post_init__(self):
        rows = [list(r) for r in self.entries]
        if not rows or any(len(r) != len(rows) for r in rows):
            raise LoopError("matrix loop must be square and nonempty")
        nfs = {c.nf for r in rows for c in r}
        if len(nfs) != 1:
            raise LoopError("entries have different truncations")
        object.__setattr__(self, "entries", rows)

    @property
    def N(self) -> int:
        return len(self.entries)

    @property
    def nf(self) -> int:
        return self.entries[0][0].nf

    @classmethod
    def from_samples(cls, values: np.ndarray, nf: int) -> "MatrixLoop":
        """``values`` has shape ``(count, N, N)`` at the standard circle points."""
        N = values.shape[1]
        return cls([[CircleFunction.from_samples(values[:, i, j], nf) for j in range(N)] for i in range(N)])

    @classmethod
    def from_modes(cls, table, nf: int) -> "MatrixLoop":
        """Entries given as ``{mode: coefficient}`` dicts."""
        return cls([[CircleFunction.from_dict(e, nf) for e in row] for row in table])

    @classmethod
    def constant(cls, mat, nf: int) -> "MatrixLoop":
        mat = np.atleast_2d(np.asarray(mat, complex))
        return cls([[CircleFunction.constant(x, nf) for x in row] for row in mat])

    @classmethod
    def diagonal(cls, exponents, nf: int) -> "MatrixLoop":
        N = len(exponents)
        return cls([[CircleFunction.monomial(k, 1.0, nf) if i == j else CircleFunction.zero(nf)
                     for j in range(N)] for i, k in enumerate(exponents)])

    def __call__(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, complex)
        out = np.empty(zeta.shape + (self.N, self.N), complex)
        for i, row in enumerate(self.entries):
            for j, c in enumerate(row):
                out[..., i, j] = c(zeta)
        return out

    def samples(self, count: int) -> np.ndarray:
        out = np.empty((count, self.N, self.N), complex)
        for i, row in enumerate(self.entries):
            for j, c in enumerate(row):
                out[:, i, j] = c.samples(count)
        return out

    def coefficient_array(self) -> np.ndarray:
        """Shape ``(2 nf + 1, N, N)``, mode ``k`` at index ``k + nf``."""
        return np.stack([np.stack([c.coeffs for c in row], axis=-1) for row in self.entries], axis=-2)

    def det(self, count: int = WINDING_SAMPLES) -> np.ndarray:
        return np.linalg.det(self.samples(count))

    def det_function(self) -> CircleFunction:
        count = max(4 * self.nf + 4, 64)
        return CircleFunction.from_samples(np.linalg.det(self.samples(count)), self.nf)

    def check_invertible(self, count: int = WINDING_SAMPLES) -> None:
        dets = np.abs(self.det(count))
        if np.max(dets) == 0 or np.min(dets) <= INVERTIBILITY_TOL * np.max(dets):
            raise LoopError("matrix loop is singular on the circle")

    def norm(self, count: int = 1024) -> float:
        return float(np.max(np.linalg.norm(self.samples(count), ord=2, axis=(1, 2))))


def symbol(G: MatrixLoop, nf: int | None = None) -> MatrixLoop:
    """``-conj(G)^{-1} G`` sampled and re-interpolated."""
    nf = nf or G.nf
    count = 4 * nf + 4
    vals = G(circle_points(count))
    dets = np.abs(np.linalg.det(vals))
    if np.min(dets) <= INVERTIBILITY_TOL * np.max(dets):
        raise LoopError("singular sample: G is not invertible on the circle")
    return MatrixLoop.from_samples(-np.linalg.solve(np.conj(vals), vals), nf)


def maslov_index(L: MatrixLoop) -> int:
    L.check_invertible()
    return winding_number(L.det_function())


def _shift_system(coef: np.ndarray, nf: int, s: int, degree: int) -> np.ndarray:
    """Map ``phi_-`` (modes ``0..-degree``) to the negative modes of ``zeta^-s L phi_-``."""
    N = coef.shape[1]
    lo = -nf - s - degree
    rows = -lo  # target modes lo..-1
    mat = np.zeros((N * rows, N * (degree + 1)), complex)
    for q in range(degree + 1):
        # mode t of zeta^{-s-q} L_ij is L_ij mode t + s + q
        t = np.arange(lo, 0)
        src = t + s + q
        ok = (src >= -nf) & (src <= nf)
        for j in range(N):
            col = j * (degree + 1) + q
            for i in range(N):
                block = np.zeros(rows, complex)
                block[ok] = coef[src[ok] + nf, i, j]
                mat[i * rows:(i + 1) * rows, col] = block
    return mat


def _kernel(mat: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    if mat.shape[0] == 0:
        return np.eye(mat.shape[1], dtype=complex)
    _, sv, vh = np.linalg.svd(mat)
    top = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > tol * top)) if top > 0 else 0
    return vh[rank:].conj().T


def kernel_counts(L: MatrixLoop, window: int, degree: int | None = None, convention: str = "right") -> dict[int, int]:
    """``k(s)`` for ``s`` in ``[-window, window + 2]``."""
    if convention not in ("right", "left"):
        raise ValueError("convention must be 'right' or 'left'")
    if convention == "left":
        # left indices of L are right indices of the transpose
        L = MatrixLoop([[L.entries[j][i] for j in range(L.N)] for i in range(L.N)])
    degree = degree if degree is not None else 2 * window + 16
    coef = L.coefficient_array()
    out = {}
    for s in range(-window, window + 3):
        out[s] = _kernel(_shift_system(coef, L.nf, s, degree)).shape[1]
    return out


def partial_indices(L: MatrixLoop, window: int = 8, degree: int | None = None, convention: str = "right") -> list[int]:
    """Partial indices from the jumps of ``k(s) = sum_j max(kappa_j - s + 1, 0)``.

    ``convention='right'`` factorizes ``L = B+ diag(zeta^kappa) B-``; ``'left'`` uses
    ``L = B- diag(zeta^kappa) B+``.
    """
    L.check_invertible()
    counts = kernel_counts(L, window, degree, convention)
    indices: list[int] = []
    for s in range(-window, window + 1):
        mult = counts[s] - 2 * counts[s + 1] + counts[s + 2]
        if mult < 0:
            raise IndexRecoveryError("index recovery failed; increase D or sampling")
        indices += [s] * mult
    mas = maslov_index(L)
    if len(indices) != L.N or sum(indices) != mas or counts[window + 1] != 0:
        raise IndexRecoveryError(
            f"index recovery failed; increase D or sampling (got {indices}, Maslov {mas}, k={counts})")
    return sorted(indices)


@dataclass(frozen=True, eq=False)
class Factorization:
    Bplus: MatrixLoop
    indices: list[int]
    Bminus: MatrixLoop
    residual: float

    def reconstruct(self, zeta) -> np.ndarray:
        lam = np.zeros(np.shape(zeta) + (len(self.indices),) * 2, complex)
        for j, k in enumerate(self.indices):
            lam[..., j, j] = np.asarray(zeta) ** k
        return self.Bplus(zeta) @ lam @ self.Bminus(zeta)

    def to_json(self) -> dict:
        return {"indices": list(self.indices), "maslov_index": int(sum(self.indices)),
                "residual": self.residual, "nf": self.Bplus.nf}


def _residual(L: MatrixLoop, fac: Factorization, count: int = 1024) -> float:
    z = circle_points(count, 0.5)
    return float(np.max(np.linalg.norm(fac.reconstruct(z) - L(z), ord=2, axis=(1, 2))))


def _factorize_scalar(L: MatrixLoop) -> Factorization:
    f = L.entries[0][0]
    kappa = winding_number(f)
    nf = f.nf
    count = 4 * nf + 4
    z = circle_points(count)
    vals = f.samples(count) * z ** (-kappa)
    logv = np.log(np.abs(vals)) + 1j * np.unwrap(np.angle(vals))
    plus, minus = riesz_split(CircleFunction.from_samples(logv, nf))
    bp = CircleFunction.from_samples(np.exp(plus.samples(count)), nf)
    bm = CircleFunction.from_samples(np.exp(minus.samples(count)), nf)
    fac = Factorization(MatrixLoop([[bp]]), [kappa], MatrixLoop([[bm]]), 0.0)
    return Factorization(fac.Bplus, fac.indices, fac.Bminus, _residual(L, fac))


def factorize(L: MatrixLoop, window: int = 8, degree: int | None = None) -> Factorization:
    """``L = B+ diag(zeta^kappa) B-`` with ``B-(inf)`` normalised inside equal-index blocks."""
    L.check_invertible()
    if L.N == 1:
        return _factorize_scalar(L)
    indices = partial_indices(L, window, degree)
    degree = degree if degree is not None else 2 * window + 16
    N, nf = L.N, L.nf
    coef = L.coefficient_array()
    chosen_minus: list[np.ndarray] = []  # coefficient blocks (N, degree+1), mode -q at column q
    constants = np.zeros((N, 0), complex)
    levels = []
    for kappa in sorted(set(indices), reverse=True):
        need = indices.count(kappa)
        ker = _kernel(_shift_system(coef, nf, kappa, degree))
        blocks = ker.T.reshape(-1, N, degree + 1)
        consts = blocks[:, :, 0].T  # (N, dim)
        if constants.shape[1]:
            q, _ = np.linalg.qr(constants)
            consts_perp = consts - q @ (q.conj().T @ consts)
        else:
            consts_perp = consts
        u, sv, vh = np.linalg.svd(consts_perp)
        if sv.size < need or sv[need - 1] < 1e-6 * max(sv[0], 1e-300):
            raise FactorizationError("factorization unstable at current truncation")
        picks = vh[:need].conj().T  # combinations of kernel vectors
        new = np.tensordot(picks.T, blocks, axes=(1, 0))
        for b in new:
            chosen_minus.append(b)
            levels.append(kappa)
        constants = np.concatenate([constants, new[:, :, 0].T], axis=1)
    order = np.argsort(levels, kind="stable")
    chosen_minus = [chosen_minus[i] for i in order]
    kappas = [levels[i] for i in order]
    # normalise inside blocks of equal index so that B-(inf) is as close to identity as allowed
    C0 = np.stack([b[:, 0] for b in chosen_minus], axis=1)
    T = np.eye(N, dtype=complex)
    for kappa in set(kappas):
        idx = [i for i, k in enumerate(kappas) if k == kappa]
        sub = C0[np.ix_(idx, idx)]
        if abs(np.linalg.det(sub)) > 1e-10:
            T[np.ix_(idx, idx)] = np.linalg.inv(sub)
    count = 4 * nf + 4
    z = circle_points(count)
    Cs = np.zeros((count, N, N), complex)
    powers = z[:, None] ** (-np.arange(degree + 1))[None, :]
    for j, b in enumerate(chosen_minus):
        Cs[:, :, j] = powers @ b.T
    Cs = Cs @ T
    Ls = L.samples(count)
    lam_inv = np.zeros((count, N, N), complex)
    for j, k in enumerate(kappas):
        lam_inv[:, j, j] = z ** (-k)
    Bp = Ls @ Cs @ lam_inv
    Bm = np.linalg.inv(Cs)
    fac = Factorization(MatrixLoop.from_samples(Bp, nf), kappas, MatrixLoop.from_samples(Bm, nf), 0.0)
    for loop in (fac.Bplus,):
        worst = max(np.max(np.abs(c.coeffs[:nf])) for row in loop.entries for c in row)
        if worst > 1e-6 * max(1.0, loop.norm()):
            raise FactorizationError("factorization unstable at current truncation")
    return Factorization(fac.Bplus, kappas, fac.Bminus, _residual(L, fac))


def report(L: MatrixLoop, window: int = 8, degree: int | None = None) -> dict:
    out = {"N": L.N, "nf": L.nf, "window": window, "degree": degree if degree is not None else 2 * window + 16}
    out["maslov_index"] = maslov_index(L)
    out["indices"] = partial_indices(L, window, degree)
    try:
        out["residual"] = factorize(L, window, degree).residual
    except (FactorizationError, IndexRecoveryError) as exc:
        out["residual"] = None
        out["factorization_error"] = str(exc)
    return out
