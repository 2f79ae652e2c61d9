import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from ahsharp.bessel import eval_J, zeros_up_to
from ahsharp.coefficients import SphereDim, lambda_values
from ahsharp.sharp_constant import AmbiguousAtZero, CaseTag, ZeroHint, sharp_constant
from ahsharp.stability import (
    HarmonicMixture,
    Subcase,
    brute_stability,
    deficit,
    j_frak,
    j_frak_rearranged,
    jfrak_zero,
    random_mixtures,
    stability_constant,
    verify_sandwich,
)

J0J1_AT_1 = 0.33672569018050122043  # mpmath
JFRAK_ZERO_D2 = 5.751940108825700083  # mpmath findroot


def _sph(n, x):
    return math.sqrt(2 * x / math.pi) * special.spherical_jn(n, x)


def test_subcases_case_i():
    assert stability_constant(2, 1.0).subcase is Subcase.I_POS
    st_ = stability_constant(2, 1.0)
    lam = lambda_values(2, 1.0, 2)
    assert st_.value == pytest.approx(lam[0] - lam[1], abs=1e-16)
    assert st_.equality_degrees == {1}
    tri = stability_constant(2, zero_hint=ZeroHint(2, 1))
    assert tri.subcase is Subcase.I_ZERO and tri.equality_degrees == {1, 2, 3}


def test_subcases_case_ii():
    st_ = stability_constant(2, 3.0)
    assert st_.case is CaseTag.II_NEG_PRODUCT
    assert j_frak(2, 3.0) > 0 and st_.equality_degrees == {0}
    z = stability_constant(2, zero_hint=ZeroHint(None, 1))
    assert z.subcase is Subcase.II_ZERO and z.equality_degrees == {0, 3}
    assert abs(z.rho - JFRAK_ZERO_D2) < 1e-13


def test_jfrak_zero_ambiguous_without_hint():
    with pytest.raises(AmbiguousAtZero):
        stability_constant(2, jfrak_zero(2, 1))


def test_hinted_rows_cases_iii_iv():
    s3 = stability_constant(2, zero_hint=ZeroHint(0, 1))
    assert s3.case is CaseTag.III_JNU_ZERO and s3.subcase in (Subcase.III_POS, Subcase.III_NEG)
    s4 = stability_constant(2, zero_hint=ZeroHint(1, 1))
    assert s4.case is CaseTag.IV_JNU1_ZERO and s4.subcase in (Subcase.IV_POS, Subcase.IV_NEG)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_table_equals_brute_force(d):
    for rho in np.round(np.arange(1, 301) * 0.1, 10):
        s = stability_constant(d, rho)
        b = brute_stability(d, rho)
        assert abs(s.value - b.value) <= 1e-10
        assert s.equality_degrees == b.argmin
        assert 0 < s.value <= s.sharp
        assert not (s.equality_degrees & s.maximiser_degrees)
    for hint in [ZeroHint(o, i) for o in (0, 1, 2) for i in (1, 2, 3)] + [ZeroHint(None, i) for i in (1, 2, 3)]:
        s = stability_constant(d, zero_hint=hint)
        b = brute_stability(d, zero_hint=hint)
        assert abs(s.value - b.value) <= 1e-10
        assert s.equality_degrees == b.argmin


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 9), st.floats(0.05, 80.0))
def test_jfrak_two_forms(d, rho):
    lam = lambda_values(d, rho, 3)
    assert abs(j_frak(d, rho) - j_frak_rearranged(d, rho)) < 1e-12
    assert abs(lam[0] - lam[3] - j_frak(d, rho)) < 1e-12


def test_jfrak_half_integer_elementary():
    for x in (0.5, 3.3, 9.0, 27.0):
        j = [_sph(n, x) for n in range(4)]
        ref = j[0] * j[1] + j[1] * j[2] + j[2] * j[3]
        assert abs(j_frak(3, x) - ref) < 1e-13


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_jfrak_positive_at_zeros_of_nu4(d):
    # J_{nu+4} = 0 forces J_{nu+2} J_{nu+3} > 0, hence jfrak > 0 by the
    # rearranged form; no such zero lands in case II below 200 anyway
    nu = SphereDim(d).nu
    in_case_ii = 0
    for z in zeros_up_to(nu + 4, 200.0).zeros:
        j = [eval_J(nu + i, z).value for i in range(4)]
        assert j[2] * j[3] > 0
        assert j_frak(d, z) > 0
        in_case_ii += sharp_constant(d, z).case is CaseTag.II_NEG_PRODUCT
    assert in_case_ii == 0


def test_deficit_examples():
    rep = deficit({0: 1, 1: 1}, 2, 1.0)
    assert abs(rep.deficit - J0J1_AT_1) < 1e-15
    assert rep.distance_sq == 1.0
    on_m = deficit({1: 2.0}, 2, 3.0)
    assert on_m.deficit == 0 and on_m.distance_sq == 0
    at_zero = deficit({0: 1.0, 1: 1.0}, 2, zero_hint=ZeroHint(0, 1))
    assert at_zero.deficit == 0


def test_deficit_uses_structural_membership():
    # at a hinted zero Lambda_0 and Lambda_1 differ by rounding; degree 1 still counts as maximiser
    rep = deficit({1: 1.0}, 2, zero_hint=ZeroHint(0, 3))
    assert rep.distance_sq == 0.0 and rep.deficit == 0.0


def test_mixture_validation():
    with pytest.raises(ValueError):
        HarmonicMixture({-1: 1.0})
    with pytest.raises(ValueError):
        HarmonicMixture({0: -1.0})
    with pytest.raises(ValueError):
        deficit({0: 0.0}, 2, 1.0)
    with pytest.raises(ValueError, match="3:1"):
        HarmonicMixture.parse(["0=1", "3:1"])
    assert HarmonicMixture.parse(["0=1", "0=0.5"]).weights == {0: 1.5}


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 6),
    st.floats(0.1, 40.0),
    st.dictionaries(st.integers(0, 12), st.floats(0.0, 1.0), min_size=1, max_size=12),
)
def test_sandwich_property(d, rho, weights):
    if not any(w > 0 for w in weights.values()):
        return
    try:
        rep = deficit(weights, d, rho)
    except AmbiguousAtZero:
        return
    slack = 1e-12 * rep.upper
    assert rep.lower - slack <= rep.deficit <= rep.upper + slack
    assert (rep.deficit == 0) == (rep.distance_sq == 0)


def test_random_mixture_generator():
    w = random_mixtures(400, np.random.default_rng(5), frozenset({0, 1}))
    assert w.shape == (400, 13)
    assert np.all((w == 0) | ((w > 0) & (w <= 1)))
    support = (w > 0).sum(axis=1)
    assert support.min() >= 1 and support.max() <= 12
    assert np.all(w[::4, 2:] == 0)


def test_verify_sandwich_reproducible_and_clean():
    a = verify_sandwich(2, 3.0, 2000, seed=11)
    b = verify_sandwich(2, 3.0, 2000, seed=11)
    assert a == b and a.ok
    assert a.n_left_equality_cases > 0 and a.n_strict_cases > 0
    assert a.max_left_eq_residual <= 1e-11


@pytest.mark.parametrize("hint", ["nu:1", "nu+1:1", "nu+2:1", "jfrak:2"])
def test_verify_sandwich_at_hinted_zeros(hint):
    rep = verify_sandwich(3, trials=2000, seed=3, zero_hint=ZeroHint.parse(hint))
    assert rep.ok, rep


def test_perturbed_lambda_breaks_gap_identity():
    from ahsharp.coefficients import gap_consecutive, perturbed

    with perturbed(1, 1.0 + 1e-6):
        s = stability_constant(2, 1.0)
    assert abs(s.value - gap_consecutive(0, 2, 1.0)) > 1e-8
    assert abs(stability_constant(2, 1.0).value - gap_consecutive(0, 2, 1.0)) < 1e-15
