"""Brute-force extension energies on the unit circle (d = 2).

Nothing here touches the Lommel closed forms: functions are sampled on
the circle, their Fourier extension is a trapezoid sum, and the ball
energy is a polar quadrature of |extension|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import gl_panels

TWO_PI = 2.0 * math.pi
ENERGY_RTOL = 1e-8
# FFT rounding floor relative to ||f||^2; high modes at small rho sit below it
ENERGY_FLOOR = 1e-14
MAX_RADIAL_PANELS = 1 << 14
MAX_DEGREE = 12
TIE_REL = 1e-6


class QuadratureBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class CircleFunction:
    """f(theta) = sum_m c_m exp(i m theta)."""

    coefficients: dict

    def __post_init__(self):
        clean = {int(m): complex(c) for m, c in dict(self.coefficients).items() if c != 0}
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    @classmethod
    def mode(cls, m: int, amplitude: complex = 1.0) -> "CircleFunction":
        return cls({m: amplitude})

    @property
    def max_mode(self) -> int:
        return max((abs(m) for m in self.coefficients), default=0)

    @property
    def norm_sq(self) -> float:
        return TWO_PI * math.fsum(abs(c) ** 2 for c in self.coefficients.values())

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for m, c in self.coefficients.items():
            out += c * np.exp(1j * m * theta)
        return out


def _nodes(max_mode: int, radius: float) -> int:
    return int(math.ceil(64 + 8 * (max_mode + radius)))


def extension_at(f: CircleFunction, xi) -> complex:
    """int_0^{2 pi} f(theta) exp(-i (xi_1 cos theta + xi_2 sin theta)) dtheta."""
    x1, x2 = (float(v) for v in xi)
    n = _nodes(f.max_mode, math.hypot(x1, x2))
    theta = TWO_PI * np.arange(n) / n
    vals = f(theta) * np.exp(-1j * (x1 * np.cos(theta) + x2 * np.sin(theta)))
    return complex(vals.sum() * (TWO_PI / n))


def _shell_energy(fhat: np.ndarray, r: np.ndarray, n: int) -> np.ndarray:
    """int_0^{2 pi} |extension(r e^{i phi})|^2 dphi for each radius in ``r``.

    With theta_l = phi_l = 2 pi l / n the trapezoid sum over theta is a
    circular convolution of f with g(l) = exp(-i r cos(2 pi l / n)).
    """
    t = TWO_PI * np.arange(n) / n
    g = np.exp(-1j * r[:, None] * np.cos(t)[None, :])
    ext = np.fft.ifft(fhat[None, :] * np.fft.fft(g, axis=1), axis=1) * (TWO_PI / n)
    return np.sum(np.abs(ext) ** 2, axis=1) * (TWO_PI / n)


def _radial(rho: float, panels: int, n: int, fhat: np.ndarray) -> float:
    edges = np.linspace(0.0, rho, panels + 1)
    nodes, weights = gl_panels(edges[:-1], edges[1:])
    r = nodes.ravel()
    shell = _shell_energy(fhat, r, n)
    return float(np.sum(weights.ravel() * r * shell))


def ball_energy(f: CircleFunction, rho: float, rtol: float = ENERGY_RTOL) -> float:
    """(1/rho) int_{|x| < rho} |extension of f|^2 dx / (2 pi)^2.

    Radial panels are doubled until two passes agree to ``rtol`` relative,
    or to ENERGY_FLOOR * ||f||^2 for energies below rounding level.
    """
    rho = float(rho)
    if not rho > 0:
        raise ValueError("rho must be positive")
    n = _nodes(f.max_mode, rho)
    fhat = np.fft.fft(f(TWO_PI * np.arange(n) / n))
    panels = max(1, int(math.ceil(rho)))
    atol = ENERGY_FLOOR * f.norm_sq * rho * TWO_PI**2
    prev = _radial(rho, panels, n, fhat)
    while True:
        panels *= 2
        if panels > MAX_RADIAL_PANELS:
            raise QuadratureBudgetError(f"radial quadrature did not settle at rho={rho}")
        cur = _radial(rho, panels, n, fhat)
        if abs(cur - prev) <= rtol * abs(cur) + atol:
            break
        prev = cur
    return cur / (rho * TWO_PI**2)


def rayleigh_quotient(f: CircleFunction, rho: float) -> float:
    return ball_energy(f, rho) / f.norm_sq


def brute_rayleigh_argmax(rho: float, max_degree: int = MAX_DEGREE) -> frozenset:
    """Degrees k <= max_degree whose pure mode exp(i k theta) maximises the quotient."""
    if not 0 <= max_degree <= MAX_DEGREE:
        raise ValueError(f"max_degree must be in 0..{MAX_DEGREE}")
    q = np.array([rayleigh_quotient(CircleFunction.mode(k), rho) for k in range(max_degree + 1)])
    best = q.max()
    return frozenset(int(k) for k in np.nonzero(q >= best - TIE_REL * best)[0])
