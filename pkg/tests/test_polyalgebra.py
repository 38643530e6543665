import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stationary_discs.polyalgebra import (
    PolynomialError,
    WeightVector,
    bihomogeneous_component,
    eval_poly,
    load_polynomial,
    partial_derivative,
    sum_of_powers,
    validate_hermitian,
    weighted_degree,
)


def test_quartic_degree_and_k0(quartic):
    assert (quartic.d, quartic.k0) == (4, 2)


def test_tilted_k0(tilted):
    assert (tilted.d, tilted.k0) == (4, 3)


@pytest.mark.parametrize("terms, weights", [
    ({((2,), (2,)): 1, ((3,), (1,)): 1j}, (1,)),          # not conjugate-symmetric
    ({((2,), (2,)): 1, ((1,), (1,)): 1}, (1,)),           # mixed degrees
    ({((4,), (0,)): 1, ((0,), (4,)): 1}, (1,)),           # harmonic: k0 = d
    ({((1,), (2,)): 1, ((2,), (1,)): 1}, (1,)),           # odd homogeneous degree
    ({((1, 0), (1, 0)): 1, ((0, 1), (0, 1)): 1}, (1, 2)),  # mixed parity weights
])
def test_rejects_invalid_models(terms, weights):
    with pytest.raises(PolynomialError):
        validate_hermitian(terms, weights)


def test_weighted_degree():
    assert weighted_degree((2, 0), (1, 1), WeightVector((2, 4))) == 10


def test_derivatives_of_quartic(quartic):
    z = np.array([0.3 - 0.7j])
    assert partial_derivative(quartic, 0)(z) == pytest.approx(2 * np.conj(z[0]) * abs(z[0]) ** 2)
    assert partial_derivative(quartic, 0).diff(0, conjugate=True)(z) == pytest.approx(4 * abs(z[0]) ** 2)
    assert partial_derivative(quartic, 0).diff(0)(z) == pytest.approx(2 * np.conj(z[0]) ** 2)


def test_bihomogeneous_split(tilted):
    z = np.array([0.4 + 0.2j])
    total = sum(bihomogeneous_component(tilted, l)(z) for l in range(1, 4))
    assert total == pytest.approx(eval_poly(tilted, z))
    with pytest.raises(PolynomialError):
        bihomogeneous_component(tilted, 0)


def test_load_polynomial_roundtrip(weighted):
    again = load_polynomial(weighted.to_json())
    assert again.coeffs == weighted.coeffs and again.weight == weighted.weight


def test_load_polynomial_diagnostics():
    with pytest.raises(PolynomialError, match="terms\\[0\\]"):
        load_polynomial({"n": 2, "terms": [{"J": [1], "K": [1]}]})
    with pytest.raises(PolynomialError):
        load_polynomial({"terms": []})


@given(st.integers(1, 3), st.sampled_from([2, 4, 6]),
       st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=3, max_size=3),
       st.floats(0.1, 3.0))
@settings(max_examples=40, deadline=None)
def test_sum_of_powers_is_real_and_homogeneous(n, d, zs, t):
    P = sum_of_powers(n, d)
    z = np.array(zs[:n])
    val = eval_poly(P, z)
    assert val >= 0
    assert eval_poly(P, t * z) == pytest.approx(t ** d * val, rel=1e-9, abs=1e-9)
