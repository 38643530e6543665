import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stationary_discs.circlefns import CircleFunction
from stationary_discs.jets import (
    JetError,
    decoupled_blocks,
    jet_at_one,
    jet_bound,
    kernel_jet_injectivity,
    rank_profile,
)
from stationary_discs.modeldisc import build_lift
from stationary_discs.polyalgebra import sum_of_powers, validate_hermitian
from stationary_discs.rhsolver import linearize

NF = 32
coeff = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
poly = st.dictionaries(st.integers(0, 6), coeff, max_size=5)


@pytest.fixture(scope="module")
def quartic_kernel():
    return linearize(sum_of_powers(1, 4), [1.0], NF).kernel_discs()


def test_jet_of_one_minus_zeta_squared():
    # (1 - z)^2: value 0, first derivative 0 at 1, second derivative 2
    jet = jet_at_one(CircleFunction.one_minus_zeta_power(2, NF), 3)
    assert np.allclose(jet.entries[0], [0, 0, 2, 0])


def test_jet_of_g_for_quartic(quartic):
    # g = 6 - 8z + 2z^2
    disc = build_lift(quartic, [1.0], NF)
    assert np.allclose(jet_at_one(disc.g, 2).entries[0], [0, -4, 4])


@pytest.mark.parametrize("k, ell", [(3, 0), (3, 2), (5, 4), (2, 3)])
def test_monomial_jets(k, ell):
    got = jet_at_one(CircleFunction.monomial(k, 1.0, NF), ell).entries[0][ell]
    expect = np.prod(np.arange(k, k - ell, -1)) if ell <= k else 0
    assert got == pytest.approx(expect)


def test_jet_rejects_antiholomorphic_and_high_order():
    with pytest.raises(JetError):
        jet_at_one(CircleFunction.monomial(-1, 1.0, NF), 1)
    with pytest.raises(JetError):
        jet_at_one(CircleFunction.monomial(1, 1.0, NF), NF)


@given(poly, poly, st.floats(-3, 3), st.integers(0, 4))
@settings(max_examples=40, deadline=None)
def test_jet_is_real_linear(a, b, t, ell):
    f, g = CircleFunction.from_dict(a, NF), CircleFunction.from_dict(b, NF)
    lhs = jet_at_one(f + g * t, ell).entries
    rhs = jet_at_one(f, ell).entries + t * jet_at_one(g, ell).entries
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_quartic_rank_profile(quartic_kernel):
    prof = rank_profile(quartic_kernel, 6)
    ranks = prof["ranks"]
    assert ranks == sorted(ranks) and ranks[-1] == len(quartic_kernel)
    assert ranks[:3] == [1, 5, 7]
    assert prof["saturation"] == 2
    assert prof["saturation"] <= jet_bound(sum_of_powers(1, 4), [1.0])["refined"]


def test_zero_order_not_injective(quartic_kernel):
    assert not kernel_jet_injectivity(quartic_kernel, 0)["injective"]


def test_empty_kernel_is_injective():
    assert kernel_jet_injectivity([], 3)["injective"]


def test_pair_profile_saturates_within_refined(quartic_pair):
    kern = linearize(quartic_pair, [0.6, 0.8], NF).kernel_discs()
    prof = rank_profile(kern, 5)
    assert prof["saturation"] is not None
    assert prof["saturation"] <= jet_bound(quartic_pair, [0.6, 0.8])["refined"]


@pytest.mark.parametrize("n, generic, refined", [(1, 24, 4), (2, 48, 4)])
def test_bound_values_for_quartic_models(n, generic, refined):
    out = jet_bound(sum_of_powers(n, 4), np.ones(n) / np.sqrt(n))
    assert out["generic"] == generic and out["refined"] == refined
    assert out["N_homogeneous_formula"] == 2 * (n + 1) * 3 - 4 * n


def test_decoupled_bound(quartic_pair):
    out = jet_bound(quartic_pair, [0.6, 0.8])
    assert out["blocks"] == [[0], [1]]
    assert out["N_decoupled"] == 16 and out["N_decoupled_literal"] == 8


def test_coupled_model_single_block():
    P = validate_hermitian({((2, 0), (2, 0)): 1, ((0, 2), (0, 2)): 1,
                            ((1, 1), (1, 1)): 0.5}, (1, 1))
    assert decoupled_blocks(P) == [[0, 1]]


def test_bound_reports_non_admissible(degenerate):
    out = jet_bound(degenerate, trials=8)
    assert out["admissible"] is False and out["reason"]
