import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from ahsharp import bessel
from ahsharp import _kernels as K
from ahsharp.bessel import BesselDomainError, Method, Order, Sign

# mpmath, 30 digits
J_ZEROS = {
    (0, 1): 2.4048255576957727686,
    (0, 2): 5.5200781102863106496,
    (0, 3): 8.653727912911012217,
    (2, 1): 3.8317059702075123156,
    (2, 2): 7.0155866698156187535,
    (4, 1): 5.1356223018406825563,
    (1, 1): math.pi,
    (3, 1): 4.4934094579090641753,
}


def test_order_parsing():
    assert Order.of(0.5) == Order(1)
    assert Order.of(3) == Order(6)
    assert str(Order(5)) == "5/2"
    assert Order(2) + 3 == Order(8)
    with pytest.raises(BesselDomainError):
        Order.of(0.3)
    with pytest.raises(BesselDomainError):
        Order(-1)


@pytest.mark.parametrize("twice", [0, 1, 2, 3, 4, 7, 12, 25, 60])
def test_matches_scipy_on_wide_grid(twice):
    x = np.concatenate([np.geomspace(1e-3, 1, 40), np.linspace(1, 200, 400), [500.0, 1234.5, 2000.0]])
    ours = np.array([bessel.eval_J(Order(twice), v).value for v in x])
    ref = special.jv(twice / 2, x)
    assert np.max(np.abs(ours - ref)) < 5e-14


def test_vectorised_ladder_matches_scalar():
    x = np.linspace(0.1, 80, 333)
    lad = bessel.ladder(1.5, 6, x)
    for j in range(6):
        assert np.max(np.abs(lad[:, j] - special.jv(1.5 + j, x))) < 5e-14


@pytest.mark.parametrize("order0", [-2, -1.5, -1, -0.5])
def test_negative_orders_in_ladder(order0):
    x = np.array([0.3, 2.0, 9.7, 40.0])
    lad = bessel.ladder(order0, 3, x)
    for j in range(3):
        assert np.allclose(lad[:, j], special.jv(order0 + j, x), rtol=0, atol=5e-14)


def test_error_estimates_are_honest():
    mp.mp.dps = 30
    worst = 0.0
    for twice in (0, 1, 3, 10, 31):
        for x in (1e-3, 0.4, 2.0, 5.5, 17.0, 90.0):
            bv = bessel.eval_J(Order(twice), x)
            exact = float(mp.besselj(mp.mpf(twice) / 2, x))
            err = abs(bv.value - exact)
            if err > 0:
                worst = max(worst, err / bv.abs_err_estimate)
    assert worst <= 1.0


def test_series_and_recurrence_agree_in_overlap():
    for twice in (0, 1, 6):
        alpha = twice / 2
        x = 2.0 * math.sqrt(alpha + 1.0)
        log_s, total, _, _ = K.series_parts(twice, x)
        rec = K.ladder(twice, 1, x)[0]
        assert abs(math.exp(log_s) * total - rec) < 1e-14


def test_regime_labels():
    assert bessel.eval_J(0, 0.5).method is Method.SERIES
    assert bessel.eval_J(0, 50.0).method is Method.RECURRENCE_DOWN


def test_domain_errors():
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(BesselDomainError):
            bessel.eval_J(0, bad)


def test_underflow_is_reported():
    with pytest.raises(bessel.BesselRangeError):
        bessel.eval_J(Order(400), 1e-3)


def test_derivative_identity():
    for a in (0, 0.5, 2, 3.5):
        for x in (0.7, 4.0, 19.0):
            d = bessel.eval_J_derivative(a, x).value
            assert abs(d - special.jvp(a, x)) < 1e-14


def test_upward_recurrence_step():
    x = 30.0
    j0, j1 = special.jv(0, x), special.jv(1, x)
    assert abs(bessel.recurrence_next(1, x, j0, j1) - special.jv(2, x)) < 1e-15


def test_hankel_asymptotic_as_independent_check():
    for a in (0, 1.5, 4):
        bv = bessel.asymptotic_J(a, 60.0)
        assert abs(bv.value - bessel.eval_J(a, 60.0).value) < 1e-12
    assert abs(bessel.leading_asymptotic(0, 1e4) - special.jv(0, 1e4)) < 1e-5


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 40), st.floats(0.01, 12.0))
def test_crude_bound_dominates(twice, z):
    assert abs(bessel.eval_J(Order(twice), z).value) <= bessel.crude_bound(Order(twice), z) * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 40), st.floats(0.01, 300.0))
def test_power_envelope_dominates(twice, z):
    v = abs(bessel.eval_J(Order(twice), z).value)
    assert math.log(max(v, 1e-300)) <= bessel.log_power_envelope(twice / 2, z) + 1e-12


@pytest.mark.parametrize("key", sorted(J_ZEROS))
def test_zeros_match_frozen_values(key):
    twice, k = key
    z = bessel.nth_zero(Order(twice), k)
    assert abs(z - J_ZEROS[key]) < 1e-13 * J_ZEROS[key]
    assert abs(bessel.eval_J(Order(twice), z).value) < 1e-15


def test_zero_value_hits_band():
    z = bessel.nth_zero(0, 1)
    assert bessel.eval_J(0, z).is_zero()
    assert bessel.sign_product((0, 1), z) is Sign.ZERO
    assert bessel.sign_product((0, 1), 1.0) is Sign.POSITIVE
    assert bessel.sign_product((0, 1), 3.0) is Sign.NEGATIVE


def test_zero_table_rows_and_index():
    table = bessel.zeros_up_to(0, 20.0)
    assert len(table) == 6
    rows = list(table.csv_rows())
    assert rows[0][:2] == (0, 1)
    with pytest.raises(IndexError):
        table.zero(7)
    assert bessel.zeros_up_to(20, 5.0).zeros == ()


def test_half_integer_zeros_are_multiples_of_pi():
    zs = bessel.zeros_up_to(0.5, 40.0).zeros
    assert np.allclose(zs, np.pi * np.arange(1, len(zs) + 1), rtol=0, atol=1e-13)


@pytest.mark.parametrize("nu", [0, 0.5, 1, 1.5, 2])
def test_interlacing(nu):
    for i in range(6):
        a = bessel.zeros_up_to(nu + i, 50.0).zeros
        b = bessel.zeros_up_to(nu + i + 1, 50.0).zeros
        assert bessel.interlaced(a, b)


def test_interlacing_detects_violation():
    assert not bessel.interlaced([1.0, 2.0, 3.0], [1.5, 1.7])


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_bourget_separation(m):
    for nu in (0, 0.5, 1, 1.5):
        rep = bessel.check_bourget(nu, m, 50.0, 1e-3)
        assert rep.passed and rep.min_separation > 1e-3


def test_sign_at_zeros_of_next_order():
    # J_{a-1} J_a > 0 wherever J_{a+1} vanishes, a > 0
    for a in (0.5, 1, 1.5, 2, 3):
        for z in bessel.zeros_up_to(a + 1, 50.0).zeros:
            assert bessel.sign_product((a - 1, a), z) is Sign.POSITIVE


def test_jit_and_numpy_ladders_agree():
    xs = np.concatenate([np.geomspace(1e-3, 3, 30), np.linspace(3, 400, 200)])
    for two_a0, count in ((0, 5), (-4, 9), (-3, 6), (7, 4), (40, 3)):
        loop = K._ladder_loop(two_a0, count, xs)
        vec = K._ladder_vec(two_a0, count, xs)
        assert np.max(np.abs(loop - vec) / np.maximum(1.0, np.abs(vec))) < 1e-15
