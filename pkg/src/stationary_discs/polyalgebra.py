"""Real-valued polynomials in ``(z, zbar)`` with a weighted grading.

A polynomial is a map ``(J, K) -> alpha_JK`` meaning ``alpha_JK z**J zbar**K``.
Real-valuedness is Hermitian symmetry ``alpha_JK = conj(alpha_KJ)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

HERMITIAN_TOL = 1e-12

MultiIndex = tuple[int, ...]
Terms = dict[tuple[MultiIndex, MultiIndex], complex]


class PolynomialError(ValueError):
    pass


@dataclass(frozen=True)
class WeightVector:
    m: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        if not m or any(x < 1 for x in m):
            raise PolynomialError(f"weights must be positive integers, got {self.m}")
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def homogeneous(self) -> bool:
        return all(x == 1 for x in self.m)

    @property
    def even_system(self) -> bool:
        return self.homogeneous or all(x % 2 == 0 for x in self.m)

    def dot(self, J: MultiIndex) -> int:
        if len(J) != self.n:
            raise PolynomialError(f"multi-index {J} does not match {self.n} variables")
        return sum(a * b for a, b in zip(self.m, J))


def weighted_degree(J: MultiIndex, K: MultiIndex, M: WeightVector) -> int:
    if len(J) != len(K):
        raise PolynomialError("J and K have different lengths")
    return M.dot(J) + M.dot(K)


def _clean(terms: Mapping) -> Terms:
    out: Terms = {}
    for (J, K), c in terms.items():
        key = (tuple(int(j) for j in J), tuple(int(k) for k in K))
        out[key] = out.get(key, 0j) + complex(c)
    return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class Poly:
    """Unvalidated coefficient map; closed under differentiation."""

    terms: Terms
    n: int

    def __post_init__(self):
        object.__setattr__(self, "terms", _clean(self.terms))

    def diff(self, var: int, conjugate: bool = False) -> "Poly":
        """Formal derivative in ``z_var`` (or ``zbar_var`` when ``conjugate``)."""
        if not 0 <= var < self.n:
            raise PolynomialError(f"variable index {var} out of range")
        out: Terms = {}
        for (J, K), c in self.terms.items():
            idx = K if conjugate else J
            p = idx[var]
            if p == 0:
                continue
            new = list(idx)
            new[var] -= 1
            key = (J, tuple(new)) if conjugate else (tuple(new), K)
            out[key] = out.get(key, 0j) + c * p
        return Poly(out, self.n)

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        zb = np.conj(z)
        total = 0j
        for (J, K), c in self.terms.items():
            total += c * np.prod(z ** np.array(J)) * np.prod(zb ** np.array(K))
        return complex(total)

    def evaluate_many(self, z: np.ndarray, zbar: np.ndarray | None = None) -> np.ndarray:
        """Vectorised evaluation, ``z`` of shape ``(..., n)``; ``zbar`` defaults to ``conj(z)``."""
        z = np.asarray(z, dtype=complex)
        zbar = np.conj(z) if zbar is None else np.asarray(zbar, dtype=complex)
        total = np.zeros(z.shape[:-1], complex)
        for (J, K), c in self.terms.items():
            total = total + c * np.prod(z ** np.array(J), axis=-1) * np.prod(zbar ** np.array(K), axis=-1)
        return total

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class HermitianPolynomial:
    coeffs: Terms
    weight: WeightVector
    d: int
    k0: int
    _poly: Poly = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_poly", Poly(self.coeffs, self.weight.n))

    @property
    def n(self) -> int:
        return self.weight.n

    @property
    def poly(self) -> Poly:
        return self._poly

    def __call__(self, z) -> float:
        return eval_poly(self, z)

    def diff(self, var: int, conjugate: bool = False) -> Poly:
        return partial_derivative(self, var, conjugate)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "weights": list(self.weight.m),
            "degree": self.d,
            "terms": [
                {"J": list(J), "K": list(K), "re": c.real, "im": c.imag}
                for (J, K), c in sorted(self.coeffs.items())
            ],
        }


def validate_hermitian(terms: Mapping, weight: WeightVector | tuple[int, ...], degree: int | None = None) -> HermitianPolynomial:
    """Check symmetry and grading of a raw coefficient map; compute ``d`` and ``k0``."""
    if not isinstance(weight, WeightVector):
        weight = WeightVector(tuple(weight))
    if not weight.even_system:
        raise PolynomialError("only all-even or all-ones weight systems are supported")
    clean = _clean(terms)
    if not clean:
        raise PolynomialError("zero polynomial")
    for (J, K), c in clean.items():
        if len(J) != weight.n or len(K) != weight.n:
            raise PolynomialError(f"term {(J, K)} does not match {weight.n} variables")
        if min(J + K) < 0:
            raise PolynomialError("negative exponent")
        partner = clean.get((K, J), 0j)
        if abs(c - np.conj(partner)) > HERMITIAN_TOL:
            raise PolynomialError(f"coefficients of {(J, K)} and {(K, J)} are not conjugate")
    degrees = {weighted_degree(J, K, weight) for (J, K) in clean}
    if len(degrees) != 1:
        raise PolynomialError(f"mixed weighted degrees {sorted(degrees)}")
    d = degrees.pop()
    if degree is not None and degree != d:
        raise PolynomialError(f"declared degree {degree} but terms have degree {d}")
    if weight.homogeneous and d % 2:
        raise PolynomialError("homogeneous models need even degree")
    anti = [weight.dot(K) for (J, K) in clean]
    k0 = max(anti)
    if not (d / 2 <= k0 <= d - 1):
        raise PolynomialError(f"k0={k0} outside [d/2, d-1]: not a model of the required form")
    return HermitianPolynomial(clean, weight, d, k0)


def bihomogeneous_component(P: HermitianPolynomial, ell: int) -> Poly:
    """Terms with antiholomorphic weighted degree ``ell``."""
    if not P.d - P.k0 <= ell <= P.k0:
        raise PolynomialError(f"ell={ell} outside [{P.d - P.k0}, {P.k0}]")
    return Poly({(J, K): c for (J, K), c in P.coeffs.items() if P.weight.dot(K) == ell}, P.n)


def partial_derivative(P: HermitianPolynomial | Poly, var: int, conjugate: bool = False) -> Poly:
    poly = P.poly if isinstance(P, HermitianPolynomial) else P
    return poly.diff(var, conjugate)


def eval_poly(P: HermitianPolynomial, z) -> float:
    val = P.poly(z)
    mag = sum(abs(c) * np.prod(np.abs(np.asarray(z, complex)) ** (np.array(J) + np.array(K))) for (J, K), c in P.coeffs.items())
    if abs(val.imag) > 1e-12 * max(mag, 1.0):
        raise PolynomialError(f"internal consistency: imaginary part {val.imag:.3e}")
    return val.real


def load_polynomial(data: dict | str) -> HermitianPolynomial:
    """Read the JSON model schema ``{n, weights, degree, terms: [{J, K, re, im}]}``."""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        n = int(data["n"])
        weights = tuple(data.get("weights", [1] * n))
        terms = {}
        for i, t in enumerate(data["terms"]):
            J, K = tuple(t["J"]), tuple(t["K"])
            if len(J) != n or len(K) != n:
                raise PolynomialError(f"terms[{i}]: multi-index length differs from n={n}")
            key = (J, K)
            terms[key] = terms.get(key, 0j) + complex(t.get("re", 0.0), t.get("im", 0.0))
    except (KeyError, TypeError) as exc:
        raise PolynomialError(f"malformed polynomial JSON: {exc!r}") from exc
    if len(weights) != n:
        raise PolynomialError("weights length differs from n")
    return validate_hermitian(terms, WeightVector(weights), data.get("degree"))


def sum_of_powers(n: int, d: int) -> HermitianPolynomial:
    """``|z_1|^d + ... + |z_n|^d`` with unit weights."""
    terms = {}
    for i in range(n):
        J = tuple(d // 2 if j == i else 0 for j in range(n))
        terms[(J, J)] = 1.0
    return validate_hermitian(terms, WeightVector((1,) * n))
