"""Model hypersurfaces ``Re w = P(z, zbar)``, the disc family ``f^v`` and its conormal lift."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .circlefns import (
    DEFAULT_NF,
    WINDING_SAMPLES,
    CircleFunction,
    NotDivisibleError,
    circle_points,
    divide_one_minus_zeta,
    harmonic_extension,
    shift,
    winding_number,
)
from .polyalgebra import HermitianPolynomial, Poly, bihomogeneous_component, eval_poly

BOUNDARY_TOL = 1e-10
RESIDUAL_SAMPLES = 1024


class DiscError(RuntimeError):
    pass


class NonGenericDiscError(DiscError):
    """Disc boundary not generic for P."""


# ---------------------------------------------------------------------------
# exact substitution along h^v


@lru_cache(maxsize=256)
def _binom_poly(p: int, inverse: bool, nf: int) -> CircleFunction:
    return CircleFunction.one_minus_zeta_power(p, nf, inverse=inverse)


def along_disc(poly: Poly, v, weights, nf: int = DEFAULT_NF) -> CircleFunction:
    """Laurent polynomial of ``poly(h^v(zeta), conj(h^v(zeta)))`` on the circle, computed exactly.

    ``z^J zbar^K`` becomes ``v^J conj(v)^K (1-zeta)^{M.J} (1-1/zeta)^{M.K}``.
    """
    v = np.asarray(v, dtype=complex)
    out = CircleFunction.zero(nf)
    for (J, K), c in poly.terms.items():
        coef = c * np.prod(v ** np.array(J)) * np.prod(np.conj(v) ** np.array(K))
        if coef == 0:
            continue
        a = sum(m * j for m, j in zip(weights, J))
        b = sum(m * k for m, k in zip(weights, K))
        out = out + _binom_poly(a, False, nf) * _binom_poly(b, True, nf) * coef
    return out


def poly_det(mat: list[list[CircleFunction]]) -> CircleFunction:
    n = len(mat)
    nf = mat[0][0].nf
    total = CircleFunction.zero(nf)
    for perm in itertools.permutations(range(n)):
        sign = np.linalg.det(np.eye(n)[list(perm)])
        term = CircleFunction.constant(round(sign), nf)
        for i, j in enumerate(perm):
            term = term * mat[i][j]
        total = total + term
    return total


# ---------------------------------------------------------------------------
# hypersurfaces


@dataclass(frozen=True)
class ModelHypersurface:
    P: HermitianPolynomial

    @property
    def d(self) -> int:
        return self.P.d

    @property
    def k0(self) -> int:
        return self.P.k0

    @property
    def M(self) -> tuple[int, ...]:
        return self.P.weight.m

    @property
    def n(self) -> int:
        return self.P.n

    def defining(self, z: np.ndarray, w: np.ndarray):
        """``(r, r_z, r_w)`` at points ``z`` (shape ``(K, n)``) and ``w`` (shape ``(K,)``)."""
        r = -w.real + self.P.poly.evaluate_many(z).real
        rz = np.stack([self.P.poly.diff(i).evaluate_many(z) for i in range(self.n)], axis=-1)
        rw = np.full(w.shape, -0.5 + 0j)
        return r, rz, rw

    def transformed(self, t: float = 1.0, phases=None) -> "ModelHypersurface":
        """Image of the model under ``(z, w) -> (e^{i phi} t^M z, t^d w)``; must preserve it."""
        phases = np.zeros(self.n) if phases is None else np.asarray(phases, float)
        for (J, K), c in self.P.coeffs.items():
            rot = np.exp(-1j * np.dot(phases, np.subtract(J, K)))
            if abs(c * rot - c) > 1e-12 * max(1.0, abs(c)):
                raise DiscError("rotation does not preserve the model")
        return self


def conormal_equations(zeta, z, w, zt, wt, k0, r, rz, rw) -> np.ndarray:
    """The ``2n+2`` real defining equations of the twisted conormal bundle, pointwise.

    Row 0 is ``r``; rows ``2i+1, 2i+2`` are twice the real part and minus twice the
    imaginary part of ``zt_i - wt r_{z_i} / r_w``; the last row is
    ``i(b - conj b)`` with ``b = -2 wt conj(r_w) zeta**-k0``.
    """
    n = z.shape[-1]
    out = np.empty((2 * n + 2, zeta.shape[0]))
    out[0] = r
    x = zt - (wt / rw)[:, None] * rz
    out[1: 2 * n + 1: 2] = 2 * x.real.T
    out[2: 2 * n + 2: 2] = -2 * x.imag.T
    b = -2 * wt * np.conj(rw) * zeta ** (-k0)
    out[-1] = -2 * b.imag
    return out


# ---------------------------------------------------------------------------
# discs


@dataclass(frozen=True, eq=False)
class DiscLift:
    h: tuple[CircleFunction, ...]
    g: CircleFunction
    ht: tuple[CircleFunction, ...]
    gt: CircleFunction
    v: tuple[complex, ...] | None = None
    certificate: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.h)

    @property
    def nf(self) -> int:
        return self.g.nf

    def components(self) -> list[CircleFunction]:
        return [*self.h, self.g, *self.ht, self.gt]

    @classmethod
    def from_components(cls, comps, v=None) -> "DiscLift":
        n = (len(comps) - 2) // 2
        return cls(tuple(comps[:n]), comps[n], tuple(comps[n + 1: 2 * n + 1]), comps[-1], v)

    def values(self, zeta: np.ndarray) -> np.ndarray:
        return np.stack([c(zeta) for c in self.components()])

    def coefficient_vector(self) -> np.ndarray:
        return np.concatenate([c.coeffs for c in self.components()])

    def distance(self, other: "DiscLift") -> float:
        return float(np.max(np.abs(self.coefficient_vector() - other.coefficient_vector())))

    def center(self) -> np.ndarray:
        return np.array([c.coeff(0) for c in (*self.h, self.g)])

    def to_json(self) -> dict:
        def enc(c: CircleFunction):
            deg = max(c.degree(1e-16), 0)
            return {"re": c.coeffs[c.nf: c.nf + deg + 1].real.tolist(),
                    "im": c.coeffs[c.nf: c.nf + deg + 1].imag.tolist()}

        names = [f"h{i + 1}" for i in range(self.n)] + ["g"] + [f"ht{i + 1}" for i in range(self.n)] + ["gt"]
        return {"nf": self.nf, "components": {k: enc(c) for k, c in zip(names, self.components())},
                "certificate": self.certificate}


def constraint_orders(weights, d: int) -> list[int]:
    """Orders of vanishing at ``zeta = 1`` imposed on the lift components."""
    return [*weights, 1, *(d - m for m in weights), 0]


def divisibility_flags(disc: DiscLift, weights, d: int) -> list[bool]:
    flags = []
    for c, order in zip(disc.components(), constraint_orders(weights, d)):
        poly = CircleFunction(np.where(np.abs(c.coeffs) > 1e-14 * max(c.norm(), 1e-300), c.coeffs, 0), c.nf)
        if not c.holomorphic:
            flags.append(False)
            continue
        try:
            divide_one_minus_zeta(poly, order)
            flags.append(True)
        except NotDivisibleError:
            flags.append(False)
    return flags


def conormal_residuals(surface, disc: DiscLift, count: int = RESIDUAL_SAMPLES, offset: float = 0.0) -> np.ndarray:
    zeta = circle_points(count, offset)
    vals = disc.values(zeta)
    n = disc.n
    z = vals[:n].T
    w = vals[n]
    r, rz, rw = surface.defining(z, w)
    return conormal_equations(zeta, z, w, vals[n + 1: 2 * n + 1].T, vals[-1], surface.k0, r, rz, rw)


def build_h(v, weights, nf: int = DEFAULT_NF) -> tuple[CircleFunction, ...]:
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if not np.any(v):
        raise DiscError("v must be nonzero")
    return tuple(_binom_poly(m, False, nf) * vi for m, vi in zip(weights, v))


def boundary_data(P: HermitianPolynomial, v, nf: int = DEFAULT_NF) -> CircleFunction:
    return along_disc(P.poly, v, P.weight.m, nf)


def _closed_form_g(P: HermitianPolynomial, v, nf: int) -> CircleFunction:
    """Binomial series for ``g^v``; uses the weighted holomorphic degree of each component."""
    modes: dict[int, complex] = {}
    d = P.d
    for ell in range(d - P.k0, P.k0 + 1):
        j = d - ell  # holomorphic weighted degree
        val = bihomogeneous_component(P, ell)(np.asarray(v, complex))
        if val == 0:
            continue
        for e in range(0, j + 1):
            s = sum(comb(j, e + l) * comb(d - j, l) for l in range(0, d - j + 1))
            modes[e] = modes.get(e, 0) + (-1) ** e * s * val * (1 if e == 0 else 2)
    g = CircleFunction.from_dict(modes, nf)
    return g - 1j * complex(g(1.0)).imag


def solve_g(P: HermitianPolynomial, v, nf: int = DEFAULT_NF) -> CircleFunction:
    """Holomorphic ``g`` with ``Re g = P(h^v, conj h^v)`` on the circle and ``g(1) = 0``."""
    h = build_h(v, P.weight.m, nf)
    count = 4 * nf + 4
    zeta = circle_points(count)
    z = np.stack([hi.samples(count) for hi in h], axis=-1)
    u = CircleFunction.from_samples(P.poly.evaluate_many(z).real, nf)
    g = harmonic_extension(u.real, anchor=1.0)
    if P.weight.homogeneous:
        closed = _closed_form_g(P, v, nf)
        if np.max(np.abs(closed.coeffs - g.coeffs)) > 1e-8 * max(1.0, closed.norm()):
            raise DiscError("closed-form g disagrees with harmonic extension")
        g = closed
    if abs(g(1.0)) > 1e-9 * max(1.0, g.norm()):
        raise DiscError("g(1) != 0")
    _ = zeta
    return g


def g_prime_zero(P: HermitianPolynomial, v, nf: int = DEFAULT_NF) -> complex:
    """``(g^v)'(0)`` from the binomial formula, checked against ``solve_g``."""
    if not P.weight.homogeneous:
        raise DiscError("closed formula for g'(0) needs unit weights")
    d = P.d
    total = 0j
    for ell in range(d - P.k0, P.k0 + 1):
        j = d - ell
        s = sum(comb(j, 1 + l) * comb(d - j, l) for l in range(0, d - j + 1))
        total += s * bihomogeneous_component(P, ell)(np.asarray(v, complex))
    total *= -2
    g = solve_g(P, v, nf)
    if abs(g.coeff(1) - total) > 1e-10 * max(1.0, abs(total)):
        raise DiscError("g'(0) mismatch between formula and solve_g")
    return complex(total)


# ---------------------------------------------------------------------------
# Levi coefficients and admissibility


@dataclass(frozen=True, eq=False)
class LeviCoefficients:
    Q: list[list[CircleFunction]]
    S: list[list[CircleFunction]]
    detQ: CircleFunction
    Qprime_entries: list[list[CircleFunction]]
    Qprime: CircleFunction
    weights: tuple[int, ...]
    d: int
    k0: int

    def s(self, ell: int) -> int:
        """Row twist exponent used in the reduced matrix ``A``."""
        m = self.weights[ell]
        if all(x == 1 for x in self.weights):
            return (self.d - 2) // 2
        return (self.d - m) // 2


def levi_coefficients(P: HermitianPolynomial, v, nf: int = DEFAULT_NF) -> LeviCoefficients:
    v = np.atleast_1d(np.asarray(v, complex))
    if not np.any(v):
        raise DiscError("v must be nonzero")
    n, M, d, k0 = P.n, P.weight.m, P.d, P.k0
    Q = [[None] * n for _ in range(n)]
    S = [[None] * n for _ in range(n)]
    for i in range(n):
        Pz = P.poly.diff(i)
        for j in range(n):
            dij = d - M[i] - M[j]
            lap = shift(along_disc(Pz.diff(j, conjugate=True), v, M, nf), k0)
            hol = shift(along_disc(Pz.diff(j), v, M, nf), k0)
            try:
                Q[i][j] = divide_one_minus_zeta(lap, dij)
                S[i][j] = divide_one_minus_zeta(hol, dij)
            except (NotDivisibleError, ValueError) as exc:
                raise NonGenericDiscError(f"disc boundary not generic for P: {exc}") from exc
            if Q[i][j].degree() > 2 * k0 - d + M[j] or S[i][j].degree() > 2 * k0 - d:
                raise DiscError("degree overflow: model violates the bihomogeneous constraints")
            low = Q[i][j].support(1e-12 * max(1.0, Q[i][j].norm()))
            if low is not None and low[0] < M[j]:
                raise DiscError(f"Q[{i}][{j}] is not divisible by zeta^{M[j]}")
    detQ = poly_det(Q)
    Qp_entries = [[shift(Q[i][j], -M[j]) for j in range(n)] for i in range(n)]
    Qp = shift(detQ, -sum(M))
    return LeviCoefficients(Q, S, detQ, Qp_entries, Qp, tuple(M), d, k0)


def _circle_min(poly: CircleFunction, count: int = WINDING_SAMPLES) -> tuple[float, float, float]:
    """(min |p|, argmin theta, max |p|) on the circle, refined at roots near the circle."""
    vals = poly.samples(count)
    absv = np.abs(vals)
    i = int(np.argmin(absv))
    best, where = float(absv[i]), 2 * np.pi * i / count
    s = poly.support(1e-14 * max(poly.norm(), 1e-300))
    if s is not None and s[1] > s[0]:
        c = poly.coeffs[s[0] + poly.nf: s[1] + poly.nf + 1]
        for root in np.roots(c[::-1]):
            if abs(abs(root) - 1) < 1e-3:
                th = float(np.angle(root)) % (2 * np.pi)
                val = abs(poly(np.exp(1j * th)))
                if val < best:
                    best, where = val, th
    return best, where, float(np.max(absv))


def is_admissible(P: HermitianPolynomial, v, tol: float = 1e-6, nf: int = DEFAULT_NF) -> tuple[bool, dict]:
    """Certify that ``Q^v`` has no zero on the closed circle and the disc leaves ``S_P``."""
    v = np.atleast_1d(np.asarray(v, complex))
    if not np.any(v):
        return False, {"reason": "v = 0"}
    try:
        levi = levi_coefficients(P, v, nf)
    except DiscError as exc:
        return False, {"reason": str(exc)}
    mn, th, mx = _circle_min(levi.detQ)
    pv = eval_poly(P, v)
    cert = {"min_abs_Qv": mn, "argmin_theta": th, "max_abs_Qv": mx, "P_v": pv}
    if mx == 0 or mn <= tol * mx:
        cert["reason"] = "Q^v vanishes on the boundary circle"
        return False, cert
    if abs(pv) <= tol:
        cert["reason"] = "P(v, conj v) = 0: disc contained in S_P"
        return False, cert
    cert["reason"] = "admissible"
    return True, cert


def random_unit_vectors(n: int, trials: int, seed: int) -> list[np.ndarray]:
    """One independent Philox stream per trial, derived from ``seed``."""
    out = []
    for ss in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.Generator(np.random.Philox(ss))
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        out.append(z / np.linalg.norm(z))
    return out


def find_admissible(P: HermitianPolynomial, trials: int = 64, seed: int = 0, tol: float = 1e-6, nf: int = DEFAULT_NF) -> dict:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    best = None
    for k, v in enumerate(random_unit_vectors(P.n, trials, seed)):
        ok, cert = is_admissible(P, v, tol, nf)
        if ok:
            return {"success": True, "v": v, "trial": k, "certificate": cert}
        ratio = cert.get("min_abs_Qv", 0.0) / cert["max_abs_Qv"] if cert.get("max_abs_Qv") else 0.0
        if best is None or ratio > best["relative_min"]:
            best = {"success": False, "v": v, "trial": k, "certificate": cert, "relative_min": ratio}
    best["trials"] = trials
    return best


# ---------------------------------------------------------------------------
# the lift f^0 and symmetries


def build_lift(P: HermitianPolynomial, v, nf: int = DEFAULT_NF, check_admissible: bool = True) -> DiscLift:
    v = np.atleast_1d(np.asarray(v, complex))
    if check_admissible:
        ok, cert = is_admissible(P, v, nf=nf)
        if not ok:
            raise DiscError(f"v is not admissible: {cert['reason']}")
    M, d, k0 = P.weight.m, P.d, P.k0
    h = build_h(v, M, nf)
    g = solve_g(P, v, nf)
    ht = []
    for i in range(P.n):
        c = shift(along_disc(P.poly.diff(i), v, M, nf), k0)
        if not c.holomorphic:
            raise DiscError("zeta^k0 P_z along the disc is not holomorphic")
        try:
            divide_one_minus_zeta(c, d - M[i])
        except NotDivisibleError as exc:
            raise DiscError(f"lift component {i} not divisible by (1-zeta)^{d - M[i]}") from exc
        ht.append(c)
    gt = CircleFunction.monomial(k0, -0.5, nf)
    disc = DiscLift(h, g, tuple(ht), gt, tuple(v))
    res = conormal_residuals(ModelHypersurface(P), disc)
    worst = float(np.max(np.abs(res)))
    if worst > BOUNDARY_TOL * max(1.0, np.max(np.abs(disc.values(circle_points(64))))):
        raise DiscError(f"boundary equations violated: residual {worst:.3e}")
    disc.certificate["residual"] = worst
    return disc


def mobius(a: complex):
    """Disc automorphism sending ``a`` to 0 and fixing the boundary point 1."""
    lam = (1 - np.conj(a)) / (1 - a)
    return lambda z: lam * (z - a) / (1 - np.conj(a) * z)


def inverse_mobius_parameter(a: complex) -> complex:
    return -a * (1 - np.conj(a)) / (1 - a)


def reparametrize(disc: DiscLift, a: complex, k0: int) -> DiscLift:
    """``f o phi_a`` with the lift re-twisted so its conormal part stays in ``zeta^k0 N*``."""
    if abs(a) >= 1:
        raise DiscError("|a| must be < 1")
    if a == 0:
        return disc
    nf = disc.nf
    count = 4 * nf + 4
    zeta = circle_points(count)
    phi = mobius(a)
    w = (1 - a) * (1 - np.conj(a) * zeta)
    twist = w ** (2 * k0) / abs(1 - a) ** (4 * k0)
    n = disc.n
    comps = []
    for idx, c in enumerate(disc.components()):
        vals = c(phi(zeta))
        if idx > n:
            vals = vals * twist
        comps.append(CircleFunction.from_samples(vals, nf))
    return DiscLift.from_components(comps, disc.v)


def center_jacobian(P: HermitianPolynomial, v, nf: int = DEFAULT_NF) -> float:
    return abs(g_prime_zero(P, v, nf)) ** 2


def scale_model_automorphism(disc: DiscLift, weights, d: int, t: float = 1.0, phases=None, surface=None) -> DiscLift:
    """Push a lift forward by ``(z, w) -> (e^{i phi} t^M z, t^d w)``.

    The cotangent part transforms by the inverse transpose, rescaled by ``t^d`` so
    that the ``w``-covector keeps its normalisation.  With ``surface`` given, the
    image is checked against the transformed hypersurface.
    """
    if t <= 0:
        raise DiscError("t must be positive")
    n = disc.n
    phases = np.zeros(n) if phases is None else np.asarray(phases, float)
    rot = np.exp(1j * phases)
    h = tuple(c * (t ** m * r) for c, m, r in zip(disc.h, weights, rot))
    ht = tuple(c * (t ** (d - m) / r) for c, m, r in zip(disc.ht, weights, rot))
    out = DiscLift(h, disc.g * t ** d, ht, disc.gt, disc.v)
    if surface is not None:
        image = surface.transformed(t, phases)
        res = float(np.max(np.abs(conormal_residuals(image, out))))
        scale = max(1.0, float(np.max(np.abs(out.values(circle_points(64))))))
        if res > 1e-8 * scale:
            raise DiscError(f"transformation did not preserve the hypersurface (residual {res:.2e})")
        out.certificate["residual"] = res
    return out


def degeneracy_dimension_probe(P: HermitianPolynomial, samples: int = 20000, seed: int = 0) -> dict:
    """Monte-Carlo look at the Levi-degenerate locus on the weighted unit sphere (advisory)."""
    rng = np.random.Generator(np.random.Philox(seed))
    n, M = P.n, np.array(P.weight.m)
    z = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))
    radius = np.max(np.abs(z) ** (1.0 / M), axis=1)
    z = z / radius[:, None] ** M
    lev = np.empty((samples, n, n), complex)
    for i in range(n):
        for j in range(n):
            lev[:, i, j] = P.poly.diff(i).diff(j, conjugate=True).evaluate_many(z)
    det = np.linalg.det(lev).real
    scale = float(np.max(np.abs(det))) or 1.0
    rel = det / scale
    fractions = {f"{eps:g}": float(np.mean(np.abs(rel) < eps)) for eps in (1e-2, 1e-3, 1e-4)}
    pos, neg = float(np.mean(rel > 1e-12)), float(np.mean(rel < -1e-12))
    sign_change = pos > 0 and neg > 0
    return {
        "samples": samples,
        "fractions": fractions,
        "positive_fraction": pos,
        "negative_fraction": neg,
        "codim1_suspected": bool(sign_change),
        "note": "advisory Monte-Carlo probe, not a proof",
    }
