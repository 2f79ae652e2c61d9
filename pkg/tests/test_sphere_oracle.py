import math

import numpy as np
import pytest
from scipy import special

from ahsharp.coefficients import lambda_values
from ahsharp.sharp_constant import sharp_constant
from ahsharp.sphere_oracle import (
    CircleFunction,
    ball_energy,
    brute_rayleigh_argmax,
    extension_at,
    rayleigh_quotient,
)


@pytest.mark.parametrize("m", [0, 1, 3, -2, 7])
def test_extension_of_pure_mode_is_bessel(m):
    # int e^{i m t} e^{-i r cos(t - phi)} dt = 2 pi (-i)^m J_m(r) e^{i m phi}
    f = CircleFunction.mode(m)
    for r, phi in [(0.5, 0.0), (3.7, 1.1), (12.0, -2.0)]:
        xi = (r * math.cos(phi), r * math.sin(phi))
        ref = 2 * math.pi * (-1j) ** m * special.jv(m, r) * np.exp(1j * m * phi)
        assert abs(extension_at(f, xi) - ref) < 1e-13


@pytest.mark.parametrize("rho", [0.5, 2.0, 6.0, 14.5])
def test_pure_mode_energy_matches_lambda(rho):
    lam = lambda_values(2, rho, 8)
    for k in range(9):
        e = ball_energy(CircleFunction.mode(k), rho)
        assert abs(e - 2 * math.pi * lam[k]) <= 1e-7 * e + 1e-13


def test_negative_mode_same_energy():
    a = ball_energy(CircleFunction.mode(3), 4.0)
    b = ball_energy(CircleFunction.mode(-3), 4.0)
    assert abs(a - b) < 1e-12


def test_energy_is_diagonal_in_modes():
    rho = 5.0
    f = CircleFunction({0: 1.0, 2: 0.5j, -5: 0.3})
    lam = lambda_values(2, rho, 5)
    ref = 2 * math.pi * (lam[0] + 0.25 * lam[2] + 0.09 * lam[5])
    assert abs(ball_energy(f, rho) - ref) < 1e-8 * ref
    assert f.norm_sq == pytest.approx(2 * math.pi * (1 + 0.25 + 0.09))


def test_rayleigh_quotient_bounded_by_C():
    rng = np.random.default_rng(2)
    for rho in (1.0, 3.0, 7.5):
        c = sharp_constant(2, rho).value
        for _ in range(5):
            coeffs = {m: complex(*rng.normal(size=2)) for m in range(-4, 5)}
            q = rayleigh_quotient(CircleFunction(coeffs), rho)
            assert q <= c * (1 + 1e-8)
        k = min(sharp_constant(2, rho).argmax_degrees)
        assert rayleigh_quotient(CircleFunction.mode(k), rho) == pytest.approx(c, rel=1e-8)


@pytest.mark.parametrize("rho", list(np.linspace(0.37, 14.9, 25)))
def test_brute_argmax_matches_case_split(rho):
    assert brute_rayleigh_argmax(rho, 12) == sharp_constant(2, rho).argmax_degrees


def test_validation():
    with pytest.raises(ValueError):
        ball_energy(CircleFunction.mode(0), 0.0)
    with pytest.raises(ValueError):
        brute_rayleigh_argmax(1.0, 13)
    assert CircleFunction({0: 0, 2: 1}).coefficients == {2: 1 + 0j}
