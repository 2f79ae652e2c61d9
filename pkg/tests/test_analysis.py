import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from ahsharp.analysis import (
    Regularity,
    classify_gap,
    lambda0_origin_slope,
    lambda_prime,
    lambda_prime_simple,
    limit_check,
    lipschitz_scan,
    one_sided_derivative,
    probe_C_kink,
    probe_S_jump,
    probe_S_kink_at_Jnu2,
)
from ahsharp.coefficients import ONE_OVER_PI


def test_one_sided_derivative_on_smooth_function():
    for side in (-1, 1):
        assert abs(one_sided_derivative(math.sin, 0.7, side) - math.cos(0.7)) < 1e-10


def test_one_sided_derivative_on_abs():
    assert one_sided_derivative(abs, 0.0, 1) == pytest.approx(1.0, abs=1e-12)
    assert one_sided_derivative(abs, 0.0, -1) == pytest.approx(-1.0, abs=1e-12)


def test_classify_gap_bands():
    assert classify_gap(1e-3) is Regularity.KINK
    assert classify_gap(-1e-3) is Regularity.KINK
    assert classify_gap(1e-9) is Regularity.SMOOTH
    assert classify_gap(1e-5) is Regularity.INCONCLUSIVE


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("hint", ["nu:1", "nu+1:1", "nu:2", "nu+1:2"])
def test_C_kink_gap_matches_product_derivative(d, hint):
    p = probe_C_kink(d, hint)
    assert p.classification is Regularity.KINK
    assert p.gap_error <= 1e-5 * max(1.0, abs(p.predicted_gap))
    assert p.measured_gap > 0


def test_C_kink_signed_value_at_first_zero():
    # d(J_0 J_1)/drho at j_{0,1} equals -J_1(j_{0,1})^2
    p = probe_C_kink(2, "nu:1")
    j1 = special.j1(p.location)
    assert abs(p.extra["product_derivative"] + j1 * j1) < 1e-14
    assert abs(p.predicted_gap - j1 * j1) < 1e-14


@pytest.mark.parametrize("rho", [1.0, 5.0, 11.3])
def test_C_smooth_away_from_zeros(rho):
    p = probe_C_kink(2, rho)
    assert p.classification is Regularity.SMOOTH
    assert p.predicted_gap == 0.0


def test_C_probe_rejects_other_zero_kinds():
    with pytest.raises(ValueError):
        probe_C_kink(2, "nu+2:1")


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("hint", ["nu:1", "nu+1:1", "nu:2"])
def test_S_jump(d, hint):
    p = probe_S_jump(d, hint)
    assert p.classification is Regularity.JUMP
    ex = p.extra
    assert ex["on_zero"] > 1e-2
    assert max(ex["left_values"][-1], ex["right_values"][-1]) < 1e-3
    # one-sided values vanish at least linearly in eps
    assert min(ex["loglog_slope_left"], ex["loglog_slope_right"]) > 0.9


def test_S_jump_requires_hint():
    with pytest.raises(ValueError):
        probe_S_jump(2, 2.4)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2])
def test_S_kink_at_zero_of_nu2(d, k):
    p = probe_S_kink_at_Jnu2(d, f"nu+2:{k}")
    if not p.extra["case_i_window"]:
        pytest.skip("zero outside case I")
    assert p.classification is Regularity.KINK
    assert p.measured_gap < 0
    assert p.gap_error <= 1e-5 * max(1.0, abs(p.predicted_gap))
    assert p.extra["continuity_gap"] < 1e-3


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 8), st.integers(0, 6), st.floats(0.05, 60.0))
def test_lambda_prime_two_forms(d, k, rho):
    a = float(lambda_prime(k, d, rho))
    b = float(lambda_prime_simple(k, d, rho))
    assert abs(a - b) < 1e-11


def test_lambda_prime_against_finite_difference():
    from ahsharp.coefficients import lambda_values

    h = 1e-5
    for d, k, rho in [(2, 0, 1.3), (3, 2, 7.7), (5, 1, 20.0)]:
        fd = (lambda_values(d, rho + h, k)[k] - lambda_values(d, rho - h, k)[k]) / (2 * h)
        assert abs(float(lambda_prime(k, d, rho)) - fd) < 1e-8


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_origin_slope(d):
    target = 0.5 if d == 2 else 0.0
    assert abs(lambda0_origin_slope(d) - target) < 1e-4


@pytest.mark.parametrize("d", [2, 3, 4])
def test_lipschitz_scan_finite_and_stable(d):
    rep = lipschitz_scan(d, 200.0)
    assert all(np.isfinite(rep.max_slope))
    assert rep.stable
    assert rep.points == 20000


def test_lipschitz_scan_rejects_bad_range():
    with pytest.raises(ValueError):
        lipschitz_scan(2, 0.0)


def test_limit_check():
    rep = limit_check(2, 0, [100, 200, 400, 800, 1600])
    assert rep.bounded and rep.sup < 1.0
    assert abs(rep.sharp[-1] - ONE_OVER_PI) < 1e-3
    assert rep.stability[-1] < rep.stability[0]
    with pytest.raises(ValueError):
        limit_check(2, 0, [10, 5])



def test_no_kink_at_random_non_zero_locations():
    from ahsharp.bessel import zeros_up_to
    from ahsharp.stability import jfrak_zero, stability_constant

    d, hi = 2, 40.0
    bad = list(zeros_up_to(0, hi).zeros + zeros_up_to(1, hi).zeros + zeros_up_to(2, hi).zeros)
    k = 1
    while (z := jfrak_zero(2, k)) < hi:
        bad.append(z)
        k += 1
    rng = np.random.default_rng(9)
    checked = 0
    while checked < 100:
        rho = float(rng.uniform(0.5, hi))
        if min(abs(rho - z) for z in bad) < 0.01:
            continue
        checked += 1
        assert probe_C_kink(d, rho).classification is Regularity.SMOOTH

        def s(x):
            return stability_constant(d, x).value

        gap = one_sided_derivative(s, rho, 1) - one_sided_derivative(s, rho, -1)
        assert classify_gap(gap) is Regularity.SMOOTH, rho
