"""Linearized Riemann-Hilbert system for lifts of stationary discs, and a collocation Newton solver."""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .birkhoff import MatrixLoop
from .circlefns import CircleFunction, circle_points, divide_one_minus_zeta, shift, tau
from .modeldisc import (
    DiscError,
    DiscLift,
    ModelHypersurface,
    along_disc,
    build_lift,
    conormal_equations,
    conormal_residuals,
    constraint_orders,
    divisibility_flags,
    levi_coefficients,
)
from .polyalgebra import HermitianPolynomial, PolynomialError

GAP_RATIO = 1e6
FULL_RANK_RATIO = 1e-6
NEWTON_TOL = 1e-9
MAX_ITER = 50
DET_TOL = 1e-8


class SolverError(RuntimeError):
    pass


class RankAmbiguityError(SolverError):
    pass


class ConvergenceError(SolverError):
    pass


# ---------------------------------------------------------------------------
# perturbed hypersurfaces


ThetaKey = tuple[tuple[int, ...], tuple[int, ...], int]


@dataclass(frozen=True)
class PerturbedHypersurface:
    """``r = -Re w + P(z, zbar) + theta(z, zbar, Im w)`` with polynomial ``theta``."""

    model: ModelHypersurface
    theta: dict[ThetaKey, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        M, d, n = self.model.M, self.model.d, self.model.n
        for (J, K, l), c in self.theta.items():
            J, K, l = tuple(int(x) for x in J), tuple(int(x) for x in K), int(l)
            if len(J) != n or len(K) != n or min(J + K) < 0 or l < 0:
                raise PolynomialError(f"bad perturbation term {(J, K, l)}")
            c = complex(c)
            if c == 0:
                continue
            wd = sum(m * (a + b) for m, a, b in zip(M, J, K))
            if not ((l == 0 and wd >= d + 1) or (l >= 1 and wd + l >= d)):
                raise PolynomialError(f"term {(J, K, l)} is not an allowed deformation (weighted order too low)")
            clean[(J, K, l)] = clean.get((J, K, l), 0j) + c
        for (J, K, l), c in clean.items():
            if abs(c - np.conj(clean.get((K, J, l), 0j))) > 1e-12:
                raise PolynomialError(f"perturbation term {(J, K, l)} breaks real-valuedness")
        object.__setattr__(self, "theta", clean)

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def d(self) -> int:
        return self.model.d

    @property
    def k0(self) -> int:
        return self.model.k0

    @property
    def M(self) -> tuple[int, ...]:
        return self.model.M

    def _theta_parts(self, z, s):
        n = self.n
        th = np.zeros(s.shape, complex)
        thz = np.zeros(s.shape + (n,), complex)
        ths = np.zeros(s.shape, complex)
        zb = np.conj(z)
        for (J, K, l), c in self.theta.items():
            mono = c * np.prod(z ** np.array(J), axis=-1) * np.prod(zb ** np.array(K), axis=-1)
            th += mono * s ** l
            if l:
                ths += l * mono * s ** (l - 1)
            for i in range(n):
                if J[i]:
                    Jd = list(J)
                    Jd[i] -= 1
                    thz[..., i] += (c * J[i] * np.prod(z ** np.array(Jd), axis=-1)
                                    * np.prod(zb ** np.array(K), axis=-1) * s ** l)
        return th.real, thz, ths.real

    def defining(self, z: np.ndarray, w: np.ndarray):
        r, rz, rw = self.model.defining(z, w)
        if not self.theta:
            return r, rz, rw
        th, thz, ths = self._theta_parts(z, w.imag)
        return r + th, rz + thz, rw - 0.5j * ths

    def transformed(self, t: float = 1.0, phases=None) -> "PerturbedHypersurface":
        """Image under ``(z, w) -> (e^{i phi} t^M z, t^d w)``, normalised so ``r_u = -1``."""
        phases = np.zeros(self.n) if phases is None else np.asarray(phases, float)
        model = self.model.transformed(t, phases)
        out = {}
        for (J, K, l), c in self.theta.items():
            wd = sum(m * (a + b) for m, a, b in zip(self.M, J, K))
            out[(J, K, l)] = c * t ** (self.d - wd - self.d * l) * np.exp(-1j * np.dot(phases, np.subtract(J, K)))
        return PerturbedHypersurface(model, out)

    def scaled(self, t: float) -> "PerturbedHypersurface":
        """``r_t = t^-d r o Lambda_t``; tends to the model as ``t -> 0``."""
        return self.transformed(1.0 / t)

    def size(self) -> float:
        return max((abs(c) for c in self.theta.values()), default=0.0)

    @classmethod
    def from_json(cls, model: ModelHypersurface, data: dict | str) -> "PerturbedHypersurface":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            terms = {}
            for i, t in enumerate(data.get("terms", [])):
                key = (tuple(t["J"]), tuple(t["K"]), int(t.get("l", 0)))
                terms[key] = terms.get(key, 0j) + complex(t.get("re", 0.0), t.get("im", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise PolynomialError(f"malformed perturbation JSON: {exc!r}") from exc
        surface = cls(model, terms)
        t = float(data.get("t", 1.0))
        return surface if t == 1.0 else surface.scaled(t)

    def to_json(self) -> dict:
        return {"terms": [{"J": list(J), "K": list(K), "l": l, "re": c.real, "im": c.imag}
                          for (J, K, l), c in sorted(self.theta.items())]}


def as_surface(surface) -> PerturbedHypersurface:
    if isinstance(surface, PerturbedHypersurface):
        return surface
    if isinstance(surface, ModelHypersurface):
        return PerturbedHypersurface(surface)
    if isinstance(surface, HermitianPolynomial):
        return PerturbedHypersurface(ModelHypersurface(surface))
    raise TypeError(f"not a hypersurface: {type(surface).__name__}")


# ---------------------------------------------------------------------------
# the matrices G and A


def build_G(P: HermitianPolynomial, v, nf: int = 64) -> MatrixLoop:
    """Linearization matrix of the boundary equations at ``f^v``: the derivative is ``2 Re(conj(G) f')``.

    Columns ``(h_1..h_n, g, ht_1..ht_n, gt)``; rows ``r``, then ``(Re, Im)`` of the
    conormal equation for each ``z_l``, then the ``w``-covector equation.
    """
    n, M, k0 = P.n, P.weight.m, P.k0
    v = np.atleast_1d(np.asarray(v, complex))
    zero = CircleFunction.zero(nf)
    one = CircleFunction.constant(1.0, nf)
    N = 2 * n + 2
    G = [[zero] * N for _ in range(N)]
    for j in range(n):
        G[0][j] = along_disc(P.poly.diff(j, conjugate=True), v, M, nf)
    G[0][n] = CircleFunction.constant(-0.5, nf)
    for l in range(n):
        odd, even = 2 * l + 1, 2 * l + 2
        Pz = P.poly.diff(l)
        pz = along_disc(Pz, v, M, nf)
        for j in range(n):
            lap = shift(along_disc(Pz.diff(j, conjugate=True), v, M, nf), k0)
            hol = shift(along_disc(Pz.diff(j), v, M, nf), k0).conj()
            G[odd][j] = -lap - hol
            G[even][j] = (hol - lap) * 1j
        G[odd][n + 1 + l] = one
        G[even][n + 1 + l] = one * (-1j)
        G[odd][N - 1] = pz.conj() * 2
        G[even][N - 1] = pz.conj() * (-2j)
    G[N - 1][N - 1] = CircleFunction.monomial(k0, -1j, nf)
    return MatrixLoop(G)


def reduce_to_A(G: MatrixLoop, weights, d: int, check_against: HermitianPolynomial | None = None,
                v=None) -> MatrixLoop:
    """Extract ``Q`` and ``S`` from the ``B`` block of ``G`` and assemble the ``2n x 2n`` matrix ``A``.

    Columns are ordered ``(ht_1, h_1, ..., ht_n, h_n)``.
    """
    n = len(weights)
    nf = G.nf
    homogeneous = all(m == 1 for m in weights)
    if not homogeneous and any(m % 2 for m in weights):
        raise SolverError("A is defined for all-even weights or the homogeneous case")
    zero = CircleFunction.zero(nf)
    A = [[zero] * (2 * n) for _ in range(2 * n)]
    Qp = [[None] * n for _ in range(n)]
    for l in range(n):
        s = (d - 2) // 2 if homogeneous else (d - weights[l]) // 2
        bar = CircleFunction.monomial(-s, 1.0, nf)
        for j in range(n):
            dlj = d - weights[l] - weights[j]
            b_odd, b_even = G.entries[2 * l + 1][j], G.entries[2 * l + 2][j]
            try:
                Q = tau((b_odd - b_even * 1j) * (-0.5), dlj)
                Sbar_shift = tau((b_odd + b_even * 1j) * (-0.5), dlj)  # conj(S) zeta^-dlj
            except Exception as exc:
                raise SolverError(f"division remainder: model and disc incompatible ({exc})") from exc
            Qp[l][j] = shift(Q, -weights[j])
            qs = shift(Qp[l][j], s)
            ss = shift(Sbar_shift, dlj - s)
            A[2 * l][2 * j + 1] = qs + ss
            A[2 * l + 1][2 * j + 1] = (qs - ss) * 1j
        A[2 * l][2 * l] = bar
        A[2 * l + 1][2 * l] = bar * (-1j)
    loop = MatrixLoop(A)
    z = circle_points(512, 0.5)
    detA = np.linalg.det(loop(z))
    Qmat = np.stack([np.stack([Qp[i][j](z) for j in range(n)], -1) for i in range(n)], -2)
    expect = (2j) ** n * np.linalg.det(Qmat)
    err = np.max(np.abs(detA - expect)) / max(np.max(np.abs(expect)), 1e-300)
    if err > DET_TOL:
        raise SolverError(f"det A identity violated (relative error {err:.2e}): assembly bug")
    if check_against is not None:
        levi = levi_coefficients(check_against, v, nf)
        other = levi.Qprime(z)
        err2 = np.max(np.abs(np.linalg.det(Qmat) - other)) / max(np.max(np.abs(other)), 1e-300)
        if err2 > DET_TOL:
            raise SolverError(f"Q' from G disagrees with the Levi coefficients ({err2:.2e})")
    return loop


def det_A_error(P: HermitianPolynomial, v, nf: int = 64, samples: int = 512) -> float:
    """Relative sup error of ``det A = (2i)^n Q'`` against independently computed Levi data."""
    A = reduce_to_A(build_G(P, v, nf), P.weight.m, P.d)
    z = circle_points(samples, 0.5)
    lhs = np.linalg.det(A(z))
    rhs = (2j) ** P.n * levi_coefficients(P, v, nf).Qprime(z)
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))


# ---------------------------------------------------------------------------
# collocation layout


@dataclass(frozen=True)
class Layout:
    """Real unknowns: for each lift component, a polynomial ``q_k`` with ``f'_k = (1-zeta)^{c_k} q_k``."""

    n: int
    weights: tuple[int, ...]
    d: int
    nf: int

    @property
    def orders(self) -> list[int]:
        return constraint_orders(self.weights, self.d)

    @property
    def row_powers(self) -> list[int]:
        out = [1]
        for m in self.weights:
            out += [self.d - m] * 2
        return out + [0]

    @property
    def sizes(self) -> list[int]:
        return [self.nf - c + 1 for c in self.orders]

    @property
    def offsets(self) -> list[int]:
        return list(np.cumsum([0] + [2 * s for s in self.sizes]))

    @property
    def size(self) -> int:
        return self.offsets[-1]

    @property
    def points(self) -> int:
        return 4 * self.nf + 2

    def to_disc(self, x: np.ndarray, base: DiscLift | None = None, nf: int | None = None) -> DiscLift:
        nf = nf or base.nf if base is not None else (nf or self.nf)
        comps = []
        for k, (c, size, off) in enumerate(zip(self.orders, self.sizes, self.offsets)):
            q = x[off: off + size] + 1j * x[off + size: off + 2 * size]
            f = CircleFunction.from_poly(q, 0, nf) * CircleFunction.one_minus_zeta_power(c, nf)
            if base is not None:
                f = f + base.components()[k]
            comps.append(f)
        return DiscLift.from_components(comps, base.v if base is not None else None)

    def from_disc(self, disc: DiscLift, base: DiscLift | None = None) -> np.ndarray:
        x = np.zeros(self.size)
        for k, (c, size, off) in enumerate(zip(self.orders, self.sizes, self.offsets)):
            f = disc.components()[k]
            if base is not None:
                f = f - base.components()[k]
            f = CircleFunction(np.where(np.abs(f.coeffs) > 1e-15, f.coeffs, 0), f.nf)
            q = divide_one_minus_zeta(f, c)
            deg = q.degree(1e-13)
            if deg > size - 1:
                raise SolverError("disc does not fit the truncation")
            coeffs = q.coeffs[q.nf: q.nf + size]
            x[off: off + size] = coeffs.real
            x[off + size: off + 2 * size] = coeffs.imag
        return x


def _row_phase(layout: Layout, zeta: np.ndarray) -> np.ndarray:
    """Unimodular ``((1-zeta)/|1-zeta|)^p`` per row, shape ``(E, K)``."""
    u = (1 - zeta) / np.abs(1 - zeta)
    return np.stack([u ** p for p in layout.row_powers])


def _row_scale(layout: Layout, zeta: np.ndarray) -> np.ndarray:
    dist = np.abs(1 - zeta)
    return np.stack([dist ** (-p) for p in layout.row_powers])  # (E, K)


def collocation_matrix(layout: Layout, Gb2: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """Real matrix of ``q -> 2 Re(Gb2 q)`` at the points ``zeta``; ``Gb2`` has shape ``(K, E, C)``.

    ``Gb2`` is the rescaled ``conj(G) (1-zeta)^c / |1-zeta|^p`` acting on the reduced unknowns.
    """
    K, E, _ = Gb2.shape
    mat = np.zeros((E * K, layout.size))
    for k, (size, off) in enumerate(zip(layout.sizes, layout.offsets)):
        V = zeta[:, None] ** np.arange(size)[None, :]
        for e in range(E):
            prod = Gb2[:, e, k][:, None] * V
            mat[e * K:(e + 1) * K, off: off + size] = 2 * prod.real
            mat[e * K:(e + 1) * K, off + size: off + 2 * size] = -2 * prod.imag
    return mat


def model_scaled_system(G: MatrixLoop, layout: Layout) -> list[list[CircleFunction]]:
    """``tau_p(conj(G) (1-zeta)^c)`` entrywise, computed exactly on Laurent coefficients."""
    out = []
    for e, p in enumerate(layout.row_powers):
        row = []
        for k, c in enumerate(layout.orders):
            entry = G.entries[e][k].conj() * CircleFunction.one_minus_zeta_power(c, G.nf)
            try:
                row.append(tau(entry, p))
            except Exception as exc:
                raise SolverError(f"entry ({e},{k}) of G does not vanish to order {p}: {exc}") from exc
        out.append(row)
    return out


def model_gbar2(G: MatrixLoop, layout: Layout, zeta: np.ndarray) -> np.ndarray:
    H = model_scaled_system(G, layout)
    phase = _row_phase(layout, zeta)
    E, C = len(H), len(H[0])
    out = np.empty((zeta.size, E, C), complex)
    for e in range(E):
        for k in range(C):
            out[:, e, k] = H[e][k](zeta) * phase[e]
    return out


def model_pointwise_jacobian(G: MatrixLoop, zeta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    Gb = np.conj(G(zeta))
    return 2 * Gb.real, -2 * Gb.imag


def gbar2_from_jacobian(layout: Layout, Jx: np.ndarray, Jy: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    Gb = (Jx - 1j * Jy) / 2
    cols = np.stack([(1 - zeta) ** c for c in layout.orders], -1)[:, None, :]
    return Gb * cols * _row_scale(layout, zeta).T[:, :, None]


def pointwise_jacobian(surface, disc: DiscLift, zeta: np.ndarray, step: float = 1e-6):
    """Central differences of the boundary equations in the ``4n+4`` real coordinates."""
    surface = as_surface(surface)
    vals = disc.values(zeta)
    C = vals.shape[0]

    def equations(vv):
        n = disc.n
        z = vv[:n].T
        w = vv[n]
        r, rz, rw = surface.defining(z, w)
        return conormal_equations(zeta, z, w, vv[n + 1: 2 * n + 1].T, vv[-1], surface.k0, r, rz, rw).T

    Jx = np.empty((zeta.size, C, C))
    Jy = np.empty((zeta.size, C, C))
    for k in range(C):
        for target, unit in ((Jx, 1.0), (Jy, 1j)):
            plus = vals.copy()
            minus = vals.copy()
            plus[k] += step * unit
            minus[k] -= step * unit
            target[:, :, k] = (equations(plus) - equations(minus)) / (2 * step)
    return Jx, Jy


def numerical_rank(sv: np.ndarray, gap: float = GAP_RATIO) -> tuple[int, float]:
    """Rank from the largest gap in the singular values; returns ``(rank, gap ratio)``."""
    if sv.size == 0 or sv[0] == 0:
        return 0, np.inf
    pos = np.maximum(sv, 1e-300)
    ratios = pos[:-1] / pos[1:]
    if ratios.size:
        i = int(np.argmax(ratios))
        if ratios[i] >= gap:
            return i + 1, float(ratios[i])
    if sv[-1] / sv[0] > FULL_RANK_RATIO:
        return sv.size, np.inf
    raise RankAmbiguityError("singular-value gap missing: rank ambiguous; increase N_F")


@dataclass(frozen=True, eq=False)
class LinearizedSystem:
    G: MatrixLoop
    A: MatrixLoop | None
    G2_samples: np.ndarray
    matrix: np.ndarray
    layout: Layout
    base: DiscLift
    kernel_basis: np.ndarray  # (size, N), orthonormal columns
    kernel_dim: int
    singular_values: np.ndarray
    gap: float
    rank: int
    l3_kernel_dim: int | None = None

    def kernel_discs(self) -> list[DiscLift]:
        """Kernel elements as lift perturbations ``f'``."""
        return [self.layout.to_disc(self.kernel_basis[:, j], nf=self.base.nf) for j in range(self.kernel_dim)]

    @property
    def surjective(self) -> bool:
        # full column rank of the adjoint on the discretized target is not separately computed
        return self.rank == self.layout.size - self.kernel_dim

    def summary(self) -> dict:
        return {"kernel_dim": self.kernel_dim, "gap": self.gap, "rank": self.rank,
                "unknowns": self.layout.size, "nf": self.layout.nf, "l3_kernel_dim": self.l3_kernel_dim}


def l3_kernel_dim(A: MatrixLoop, nf: int) -> int:
    """Real dimension of ``{u holomorphic, deg <= nf : Re(conj(A) u) = 0}`` on the circle."""
    N = A.N
    K = 4 * nf + 2
    zeta = circle_points(K, 0.5)
    Ab = np.conj(A(zeta))
    powers = zeta[:, None] ** np.arange(nf + 1)[None, :]
    mat = np.zeros((N * K, 2 * N * (nf + 1)))
    for k in range(N):
        for e in range(N):
            a = Ab[:, e, k][:, None]
            mat[e * K:(e + 1) * K, 2 * k * (nf + 1): (2 * k + 1) * (nf + 1)] = (a * powers).real
            mat[e * K:(e + 1) * K, (2 * k + 1) * (nf + 1): (2 * k + 2) * (nf + 1)] = (1j * a * powers).real
    sv = np.linalg.svd(mat, compute_uv=False)
    rank, _ = numerical_rank(sv)
    return mat.shape[1] - rank


def linearize(P: HermitianPolynomial, v, nf: int = 64, base: DiscLift | None = None, with_l3: bool = True) -> LinearizedSystem:
    """Collocated linearization of the boundary problem at the model lift ``f^v``."""
    v = np.atleast_1d(np.asarray(v, complex))
    base = base or build_lift(P, v, nf=2 * nf)
    layout = Layout(P.n, P.weight.m, P.d, nf)
    G = build_G(P, v, base.nf)
    zeta = circle_points(layout.points, 0.5)
    Gb2 = model_gbar2(G, layout, zeta)
    mat = collocation_matrix(layout, Gb2, zeta)
    _, sv, vh = np.linalg.svd(mat, full_matrices=False)
    rank, gap = numerical_rank(sv)
    basis = vh[rank:].T
    A = None
    l3 = None
    if P.weight.even_system:
        A = reduce_to_A(G, P.weight.m, P.d)
        if with_l3:
            l3 = l3_kernel_dim(A, nf)
    return LinearizedSystem(G, A, np.conj(Gb2), mat, layout, base, basis,
                            basis.shape[1], sv, gap, rank, l3)


# ---------------------------------------------------------------------------
# Newton attachment


@dataclass(frozen=True, eq=False)
class AttachResult:
    disc: DiscLift
    iterations: int
    residual: float
    flags: list[bool]
    history: list[float]


def _scaled_residual(surface, layout: Layout, disc: DiscLift, zeta: np.ndarray) -> np.ndarray:
    vals = disc.values(zeta)
    n = disc.n
    z = vals[:n].T
    w = vals[n]
    r, rz, rw = surface.defining(z, w)
    res = conormal_equations(zeta, z, w, vals[n + 1: 2 * n + 1].T, vals[-1], surface.k0, r, rz, rw)
    return (res * _row_scale(layout, zeta)).ravel()


def boundary_residual(surface, disc: DiscLift, count: int = 1024) -> float:
    return float(np.max(np.abs(conormal_residuals(as_surface(surface), disc, count, offset=0.25))))


def newton_attach(surface, system: LinearizedSystem, kernel_coords=None, start: DiscLift | None = None,
                  tol: float = NEWTON_TOL, max_iter: int = MAX_ITER) -> AttachResult:
    """Solve the boundary equations for ``surface`` with the kernel coordinates pinned.

    Unknowns are ``q`` with ``f = base + (1-zeta)^c q``; the pinning rows are
    ``kernel_basis^T q = kernel_coords``.
    """
    surface = as_surface(surface)
    layout, base = system.layout, system.base
    Kb = system.kernel_basis
    coords = np.zeros(system.kernel_dim) if kernel_coords is None else np.asarray(kernel_coords, float)
    if coords.shape != (system.kernel_dim,):
        raise SolverError(f"expected {system.kernel_dim} kernel coordinates, got {coords.shape}")
    x = np.zeros(layout.size) if start is None else layout.from_disc(start, base)
    zeta = circle_points(layout.points, 0.5)
    history = []
    for it in range(1, max_iter + 1):
        disc = layout.to_disc(x, base)
        R = _scaled_residual(surface, layout, disc, zeta)
        pin = Kb.T @ x - coords
        raw = boundary_residual(surface, disc)
        history.append(raw)
        if not np.all(np.isfinite(R)) or raw > 1e3:
            raise ConvergenceError("Newton diverged: outside neighborhood V; reduce t")
        if raw < tol and np.max(np.abs(pin)) < tol:
            return AttachResult(disc, it - 1, raw, divisibility_flags(disc, layout.weights, layout.d), history)
        Jx, Jy = pointwise_jacobian(surface, disc, zeta)
        J = np.vstack([collocation_matrix(layout, gbar2_from_jacobian(layout, Jx, Jy, zeta), zeta), Kb.T])
        step, _, rank, sv = np.linalg.lstsq(J, -np.concatenate([R, pin]), rcond=None)
        if sv[-1] < 1e-13 * sv[0]:
            raise SolverError("Jacobian rank collapse: admissibility lost along path")
        x = x + step
    raise ConvergenceError(f"no convergence in {max_iter} iterations: outside neighborhood V; reduce t "
                           f"(last residual {history[-1]:.2e})")


def disc_family(surface, system: LinearizedSystem, grid, workers: int = 4, tol: float = NEWTON_TOL) -> list[dict]:
    """Solve on each grid point of kernel coordinates, warm-started from the solution at 0."""
    grid = [np.asarray(g, float) for g in grid]
    try:
        center = newton_attach(surface, system, None, tol=tol)
    except SolverError as exc:
        return [{"index": i, "coords": g.tolist(), "ok": False, "error": str(exc)} for i, g in enumerate(grid)]

    def solve(item):
        i, g = item
        if not np.any(g):
            res = center
        else:
            try:
                res = newton_attach(surface, system, g, start=center.disc, tol=tol)
            except SolverError as exc:
                return {"index": i, "coords": g.tolist(), "ok": False, "error": str(exc)}
        return {"index": i, "coords": g.tolist(), "ok": True, "result": res}

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        out = list(pool.map(solve, enumerate(grid)))
    return sorted(out, key=lambda r: r["index"])


def symmetry_directions(P: HermitianPolynomial, v, nf: int, eps: float = 1e-6) -> list[DiscLift]:
    """Tangents of explicit symmetry flows at ``f^v``: reparametrizations (Re a, Im a) and scaling.

    Each direction is a central difference of a family of exact solutions.
    """
    from .modeldisc import reparametrize, scale_model_automorphism

    base = build_lift(P, v, nf)
    k0 = P.k0

    def diff(fp, fm):
        comps = [(a - b) / (2 * eps) for a, b in zip(fp.components(), fm.components())]
        return DiscLift.from_components(comps)

    out = [diff(reparametrize(base, eps, k0), reparametrize(base, -eps, k0)),
           diff(reparametrize(base, 1j * eps, k0), reparametrize(base, -1j * eps, k0)),
           diff(scale_model_automorphism(base, P.weight.m, P.d, 1 + eps),
                scale_model_automorphism(base, P.weight.m, P.d, 1 - eps))]
    return out


def linear_residual(system: LinearizedSystem, direction: DiscLift) -> float:
    """Sup of ``2 Re(conj(G) f')`` on 1024 samples for a tangent vector ``f'``."""
    z = circle_points(1024, 0.25)
    Gb = np.conj(system.G(z))
    fp = direction.values(z).T
    return float(np.max(np.abs(2 * np.einsum("kij,kj->ki", Gb, fp).real)))


__all__ = [
    "PerturbedHypersurface", "LinearizedSystem", "Layout", "build_G", "reduce_to_A", "linearize",
    "newton_attach", "disc_family", "det_A_error", "l3_kernel_dim", "symmetry_directions", "DiscError",
]
