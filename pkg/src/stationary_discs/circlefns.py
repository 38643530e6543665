"""Truncated Fourier series on the unit circle.

A :class:`CircleFunction` stores the coefficients ``c_k`` for ``-nf <= k <= nf``
of ``f(zeta) = sum_k c_k zeta**k`` with ``|zeta| = 1``.  Holomorphic functions
are the ones with no negative modes, so ``conj`` of a holomorphic function is
represented through ``zeta**-k``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np

DEFAULT_NF = 256
WINDING_SAMPLES = 4096
HOLOMORPHIC_TOL = 1e-10
DIVISIBILITY_TOL = 1e-9
ROUNDTRIP_TOL = 1e-12


class CircleError(ValueError):
    pass


class IndexUndefinedError(CircleError):
    """The function comes too close to 0 on the circle."""


class ResolutionError(CircleError):
    """Argument tracking could not be resolved with the current sampling."""


class NotDivisibleError(CircleError):
    pass


def circle_points(count: int, offset: float = 0.0) -> np.ndarray:
    theta = 2 * np.pi * (np.arange(count) + offset) / count
    return np.exp(1j * theta)


@dataclass(frozen=True, eq=False)
class CircleFunction:
    coeffs: np.ndarray
    nf: int = DEFAULT_NF

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.nf + 1,):
            raise CircleError(f"expected {2 * self.nf + 1} coefficients, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- construction -------------------------------------------------
    @classmethod
    def zero(cls, nf: int = DEFAULT_NF) -> "CircleFunction":
        return cls(np.zeros(2 * nf + 1, complex), nf)

    @classmethod
    def from_dict(cls, modes: dict[int, complex], nf: int = DEFAULT_NF) -> "CircleFunction":
        c = np.zeros(2 * nf + 1, complex)
        for k, v in modes.items():
            if abs(k) > nf:
                if v != 0:
                    raise CircleError(f"mode {k} exceeds truncation {nf}")
                continue
            c[k + nf] += v
        return cls(c, nf)

    @classmethod
    def constant(cls, value: complex, nf: int = DEFAULT_NF) -> "CircleFunction":
        return cls.from_dict({0: value}, nf)

    @classmethod
    def monomial(cls, k: int, value: complex = 1.0, nf: int = DEFAULT_NF) -> "CircleFunction":
        return cls.from_dict({k: value}, nf)

    @classmethod
    def from_poly(cls, coeffs: Sequence[complex], low: int = 0, nf: int = DEFAULT_NF) -> "CircleFunction":
        """Laurent polynomial with ``coeffs[i]`` multiplying ``zeta**(low + i)``."""
        return cls.from_dict({low + i: c for i, c in enumerate(coeffs)}, nf)

    @classmethod
    def one_minus_zeta_power(cls, m: int, nf: int = DEFAULT_NF, inverse: bool = False) -> "CircleFunction":
        """``(1 - zeta)**m``, or ``(1 - 1/zeta)**m`` when ``inverse`` is set."""
        sign = -1 if inverse else 1
        return cls.from_dict({sign * j: comb(m, j) * (-1) ** j for j in range(m + 1)}, nf)

    @classmethod
    def from_samples(cls, values: np.ndarray, nf: int = DEFAULT_NF) -> "CircleFunction":
        """Interpolate equispaced samples ``values[j] = f(exp(2 pi i j / M))``."""
        values = np.asarray(values, dtype=complex)
        m = values.shape[0]
        spectrum = np.fft.fft(values) / m
        c = np.zeros(2 * nf + 1, complex)
        kmax = min(nf, (m - 1) // 2)
        ks = np.arange(-kmax, kmax + 1)
        c[ks + nf] = spectrum[ks % m]
        return cls(c, nf)

    # -- basic structure ------------------------------------------------
    def modes(self) -> np.ndarray:
        return np.arange(-self.nf, self.nf + 1)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.nf:
            return 0j
        return complex(self.coeffs[k + self.nf])

    def support(self, tol: float = 0.0) -> tuple[int, int] | None:
        idx = np.nonzero(np.abs(self.coeffs) > tol)[0]
        if idx.size == 0:
            return None
        return int(idx[0] - self.nf), int(idx[-1] - self.nf)

    def degree(self, tol: float = 1e-12) -> int:
        s = self.support(tol * max(1.0, self.norm()))
        return -1 if s is None else s[1]

    def norm(self) -> float:
        """Sup of the coefficient moduli (a cheap scale, not the sup norm)."""
        return float(np.max(np.abs(self.coeffs)))

    @property
    def holomorphic(self) -> bool:
        return bool(np.all(np.abs(self.coeffs[: self.nf]) < HOLOMORPHIC_TOL))

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))) < tol * max(1.0, self.norm()))

    def with_nf(self, nf: int) -> "CircleFunction":
        if nf == self.nf:
            return self
        s = self.support()
        if s is not None and max(-s[0], s[1]) > nf:
            raise CircleError("truncation overflow when resizing")
        c = np.zeros(2 * nf + 1, complex)
        k = min(nf, self.nf)
        c[nf - k: nf + k + 1] = self.coeffs[self.nf - k: self.nf + k + 1]
        return CircleFunction(c, nf)

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other) -> "CircleFunction":
        if isinstance(other, CircleFunction):
            if other.nf != self.nf:
                raise CircleError("truncation mismatch")
            return other
        return CircleFunction.constant(complex(other), self.nf)

    def __add__(self, other):
        return CircleFunction(self.coeffs + self._lift(other).coeffs, self.nf)

    __radd__ = __add__

    def __sub__(self, other):
        return CircleFunction(self.coeffs - self._lift(other).coeffs, self.nf)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return CircleFunction(-self.coeffs, self.nf)

    def __mul__(self, other):
        if not isinstance(other, CircleFunction):
            return CircleFunction(self.coeffs * complex(other), self.nf)
        other = self._lift(other)
        a, b = self.support(), other.support()
        if a is None or b is None:
            return CircleFunction.zero(self.nf)
        ca = self.coeffs[a[0] + self.nf: a[1] + self.nf + 1]
        cb = other.coeffs[b[0] + other.nf: b[1] + other.nf + 1]
        prod = np.convolve(ca, cb)
        low = a[0] + b[0]
        out = np.zeros(2 * self.nf + 1, complex)
        ks = np.arange(low, low + prod.size)
        inside = np.abs(ks) <= self.nf
        if np.any(np.abs(prod[~inside]) > 1e-13 * max(1.0, np.max(np.abs(prod)))):
            raise CircleError("truncation overflow in product")
        out[ks[inside] + self.nf] = prod[inside]
        return CircleFunction(out, self.nf)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return CircleFunction(self.coeffs / complex(scalar), self.nf)

    def __pow__(self, p: int):
        out = CircleFunction.constant(1.0, self.nf)
        for _ in range(p):
            out = out * self
        return out

    def conj(self) -> "CircleFunction":
        """Pointwise complex conjugate on the circle."""
        return CircleFunction(np.conj(self.coeffs[::-1]), self.nf)

    @property
    def real(self) -> "CircleFunction":
        return (self + self.conj()) / 2

    # -- evaluation ---------------------------------------------------------
    def __call__(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        s = self.support()
        if s is None:
            return np.zeros(zeta.shape, complex)
        ks = np.arange(s[0], s[1] + 1)
        c = self.coeffs[ks + self.nf]
        return np.power.outer(zeta, ks) @ c if zeta.ndim else complex(np.sum(c * zeta ** ks))

    def samples(self, count: int) -> np.ndarray:
        """Values at ``exp(2 pi i j / count)`` via the FFT (count must exceed the support)."""
        if count < 2 * self.nf + 1:
            return self(circle_points(count))
        arr = np.zeros(count, complex)
        ks = self.modes()
        arr[ks % count] = self.coeffs
        return np.fft.ifft(arr) * count

    def sup_norm(self, count: int = 1024) -> float:
        return float(np.max(np.abs(self.samples(count))))

    def derivative(self) -> "CircleFunction":
        return CircleFunction(self.coeffs * self.modes(), self.nf)

    def to_csv(self, path, count: int = 1024) -> None:
        """Write boundary samples ``theta, Re f, Im f``."""
        vals = self.samples(count)
        theta = 2 * np.pi * np.arange(count) / count
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "re", "im"])
            for t, v in zip(theta, vals):
                w.writerow([f"{t:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])


def winding_number(f: CircleFunction, samples: int = WINDING_SAMPLES) -> int:
    """Winding number of ``f`` around the origin by continuous argument tracking."""
    vals = f.samples(samples)
    if np.min(np.abs(vals)) <= 1e-8:
        raise IndexUndefinedError("index undefined: function nearly vanishes on the circle")
    steps = np.angle(np.roll(vals, -1) / vals)
    if np.max(np.abs(steps)) > np.pi / 2:
        raise ResolutionError("argument step too large; increase sampling")
    total = np.sum(steps) / (2 * np.pi)
    k = int(round(total))
    if abs(total - k) > 0.1:
        raise ResolutionError(f"non-integer winding accumulation {total:.4f}")
    return k


def riesz_split(f: CircleFunction) -> tuple[CircleFunction, CircleFunction]:
    """Split into the part with modes ``k >= 0`` and the part with ``k < 0``."""
    plus = f.coeffs.copy()
    plus[: f.nf] = 0
    minus = f.coeffs.copy()
    minus[f.nf:] = 0
    return CircleFunction(plus, f.nf), CircleFunction(minus, f.nf)


def harmonic_extension(u: CircleFunction, anchor: complex = 1.0) -> CircleFunction:
    """Holomorphic ``g`` with ``Re g = u`` on the circle and ``Im g(anchor) = 0``."""
    if not u.is_real(1e-10):
        raise CircleError("harmonic extension needs a real-valued boundary function")
    c = np.zeros_like(u.coeffs)
    c[u.nf] = u.coeffs[u.nf].real
    c[u.nf + 1:] = 2 * u.coeffs[u.nf + 1:]
    g = CircleFunction(c, u.nf)
    return g - 1j * complex(g(anchor)).imag


def divide_one_minus_zeta(f: CircleFunction, m: int) -> CircleFunction:
    """Exact quotient ``q`` with ``f = (1 - zeta)**m q`` for a holomorphic polynomial ``f``."""
    if not f.holomorphic:
        raise CircleError("divide_one_minus_zeta needs a holomorphic polynomial")
    scale = max(f.norm(), 1e-300)
    deg = f.degree(0.0)
    if deg < 0:
        return f
    if deg > f.nf:
        raise CircleError("degree exceeds truncation")
    a = f.coeffs[f.nf: f.nf + deg + 1].copy()
    for _ in range(m):
        # (1 - z) q = a  =>  q_k = sum_{j<=k} a_j, remainder = sum of all a_j
        q = np.cumsum(a)
        if abs(q[-1]) > DIVISIBILITY_TOL * scale:
            raise NotDivisibleError(f"not divisible by (1-zeta)^{m}")
        a = q[:-1]
        if a.size == 0:
            break
    return CircleFunction.from_poly(a, 0, f.nf)


def in_R_m(f: CircleFunction, m: int, samples: int = 1024, tol: float = 1e-9) -> bool:
    """Membership of ``f`` in the space where ``f = (-1)**m zeta**-m conj(f)``."""
    z = circle_points(samples)
    vals = f(z)
    other = (-1) ** m * z ** (-m) * np.conj(vals)
    return bool(np.max(np.abs(vals - other)) < tol)


def shift(f: CircleFunction, p: int) -> CircleFunction:
    """Multiply by ``zeta**p``."""
    s = f.support()
    if s is None:
        return f
    if s[0] + p < -f.nf or s[1] + p > f.nf:
        raise CircleError("truncation overflow in shift")
    return CircleFunction(np.roll(f.coeffs, p), f.nf)


def tau(f: CircleFunction, m: int) -> CircleFunction:
    """Remove the factor ``(1 - zeta)**m`` from a Laurent polynomial."""
    s = f.support()
    if s is None:
        return f
    low = min(s[0], 0)
    q = divide_one_minus_zeta(shift(f, -low), m)
    return shift(q, low)


def compose(f: CircleFunction, phi, samples: int | None = None) -> CircleFunction:
    """``f o phi`` for a circle automorphism ``phi`` by resampling and FFT."""
    count = samples or 4 * f.nf + 4
    z = circle_points(count)
    return CircleFunction.from_samples(f(phi(z)), f.nf)


def product(factors: Iterable[CircleFunction], nf: int = DEFAULT_NF) -> CircleFunction:
    out = CircleFunction.constant(1.0, nf)
    for fac in factors:
        out = out * fac
    return out
