"""Lommel coefficients Lambda_{k,d}(rho) = (1/rho) int_0^rho J_{nu+k}(r)^2 r dr.

Three independent routes: the Lommel closed form, the rearranged form with
no J_{nu+k-1}, and adaptive Gauss-Legendre quadrature of the defining
integral.  Everything indexes harmonic degree ``k`` on S^{d-1}, with
``nu = d/2 - 1``.
"""

from __future__ import annotations

import contextlib
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .bessel import Order, ladder, log_power_envelope, jv

ONE_OVER_PI = 1.0 / math.pi
TAIL_TARGET = 1e-12
K_MAX_FLOOR = 8

# (k, factor) pairs applied to the closed form only; self-test hook for `verify`
_PERTURB: dict = {}


@contextlib.contextmanager
def perturbed(k: int, factor: float):
    """Temporarily scale the closed-form Lambda_k by ``factor``."""
    _PERTURB[k] = factor
    try:
        yield
    finally:
        _PERTURB.pop(k, None)


@dataclass(frozen=True)
class SphereDim:
    d: int

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))

    @classmethod
    def of(cls, d) -> "SphereDim":
        return d if isinstance(d, SphereDim) else cls(d)

    @property
    def nu(self) -> Order:
        return Order(self.d - 2)

    @property
    def two_nu(self) -> int:
        return self.d - 2


class LambdaMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    ALTERNATIVE_FORM = "alternative_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class LambdaEval:
    k: int
    dim: SphereDim
    rho: float
    value: float
    method: LambdaMethod
    abs_err_estimate: float

    def __float__(self) -> float:
        return self.value


class QuadratureError(RuntimeError):
    pass


def _rho(rho) -> float:
    rho = float(rho)
    if not math.isfinite(rho) or rho <= 0.0:
        raise ValueError(f"rho must be positive and finite, got {rho}")
    return rho


def _ladder_from(dim: SphereDim, k0: int, count: int, rho):
    """J_{nu+k0-1}, ..., J_{nu+k0-1+count-1} at rho."""
    return ladder((dim.two_nu + 2 * k0 - 2) / 2, count, rho)


def _apply_perturbation(values: np.ndarray, k0: int = 0) -> np.ndarray:
    if _PERTURB:
        for k, factor in _PERTURB.items():
            if 0 <= k - k0 < values.shape[-1]:
                values[..., k - k0] *= factor
    return values


def lambda_values(dim, rho, kmax: int, form: str = "closed") -> np.ndarray:
    """Lambda_{0..kmax,d} at rho from one recurrence ladder.

    ``rho`` may be a scalar (result shape ``(kmax+1,)``) or a 1-d array
    (shape ``(len(rho), kmax+1)``).
    """
    dim = SphereDim.of(dim)
    j = _ladder_from(dim, 0, kmax + 3, rho)
    r = np.asarray(rho, dtype=np.float64)[..., None]
    jm, j0, jp = j[..., :-2], j[..., 1:-1], j[..., 2:]
    if form == "closed":
        vals = 0.5 * r * (j0 * j0 - jm * jp)
        return _apply_perturbation(vals)
    if form == "alternative":
        mu = dim.nu.alpha + np.arange(kmax + 1)
        return 0.5 * r * (j0 * j0 + jp * jp) - mu * j0 * jp
    raise ValueError(f"unknown form {form!r}")


def _err(rho: float, j) -> float:
    peak = float(np.max(np.abs(j)))
    return rho * K.EPS * (20.0 + 0.25 * K.miller_start(0.0, rho)) * max(peak * peak, 1e-300)


def lambda_closed(k: int, dim, rho) -> LambdaEval:
    """(rho/2) J_{nu+k}^2 - (rho/2) J_{nu+k-1} J_{nu+k+1}."""
    dim = SphereDim.of(dim)
    rho = _rho(rho)
    jm, j0, jp = _ladder_from(dim, k, 3, rho)
    value = 0.5 * rho * (j0 * j0 - jm * jp) * _PERTURB.get(k, 1.0)
    return LambdaEval(k, dim, rho, float(value), LambdaMethod.CLOSED_FORM, _err(rho, (jm, j0, jp)))


def lambda_alternative(k: int, dim, rho) -> LambdaEval:
    """(rho/2)(J_mu^2 - (2 mu/rho) J_mu J_{mu+1} + J_{mu+1}^2), mu = nu + k."""
    dim = SphereDim.of(dim)
    rho = _rho(rho)
    j0, jp = ladder((dim.two_nu + 2 * k) / 2, 2, rho)
    mu = dim.nu.alpha + k
    value = 0.5 * rho * (j0 * j0 + jp * jp) - mu * j0 * jp
    return LambdaEval(k, dim, rho, float(value), LambdaMethod.ALTERNATIVE_FORM, _err(rho, (j0, jp)))


def lambda_quadrature(k: int, dim, rho, rel_tol: float = 1e-11, max_panels: int = 2**16) -> LambdaEval:
    """Adaptive composite 15-point Gauss-Legendre for (1/rho) int_0^rho J_mu(r)^2 r dr."""
    dim = SphereDim.of(dim)
    rho = _rho(rho)
    order = (dim.two_nu + 2 * k) / 2

    def integrate(a, b):
        nodes, weights = K.gl_panels(a, b)
        f = jv(order, nodes.ravel()).reshape(nodes.shape)
        return np.sum(weights * f * f * nodes, axis=1)

    n0 = max(1, int(math.ceil(rho)))
    edges = np.linspace(0.0, rho, n0 + 1)
    a, b = edges[:-1], edges[1:]
    coarse = integrate(a, b)
    tol = rel_tol * max(1.0, float(np.sum(coarse)) / rho) * rho
    total, err_total, used = 0.0, 0.0, n0
    while a.size:
        mid = 0.5 * (a + b)
        left = integrate(a, mid)
        right = integrate(mid, b)
        fine = left + right
        err = np.abs(fine - coarse)
        ok = err <= tol * (b - a) / rho
        total += float(np.sum(fine[ok]))
        err_total += float(np.sum(err[ok]))
        bad = ~ok
        if not bad.any():
            break
        used += int(bad.sum())
        if used > max_panels:
            raise QuadratureError(
                f"quadrature for Lambda_{k},{dim.d}({rho}) needs more than {max_panels} panels "
                f"(worst panel [{a[bad][0]}, {b[bad][0]}])"
            )
        a = np.concatenate([a[bad], mid[bad]])
        b = np.concatenate([mid[bad], b[bad]])
        coarse = np.concatenate([left[bad], right[bad]])
    err_total += K.EPS * abs(total) * 16
    return LambdaEval(k, dim, rho, total / rho, LambdaMethod.QUADRATURE, err_total / rho)


def gap_consecutive(k: int, dim, rho) -> float:
    """Lambda_k - Lambda_{k+1} = J_{nu+k} J_{nu+k+1}."""
    dim = SphereDim.of(dim)
    j0, j1 = ladder((dim.two_nu + 2 * k) / 2, 2, _rho(rho))
    return float(j0 * j1)


def gap_two_apart(k: int, dim, rho) -> float:
    """Lambda_k - Lambda_{k+2} = (2(nu+k+1)/rho) J_{nu+k+1}^2 >= 0."""
    dim = SphereDim.of(dim)
    rho = _rho(rho)
    j1 = ladder((dim.two_nu + 2 * k + 2) / 2, 1, rho)[0]
    return float(2.0 * (dim.nu.alpha + k + 1) / rho * j1 * j1)


def _envelope(alpha: float, rho: float) -> float:
    if alpha < -0.5:
        alpha = -alpha  # integer orders only: |J_{-n}| = |J_n|
    b = math.exp(min(700.0, log_power_envelope(alpha, rho))) * (1.0 + 1e-12)
    return min(1.0, b) if alpha >= 0 else b


def _tail_term(dim: SphereDim, rho: float, k: int) -> float:
    mu = dim.nu.alpha + k
    b0 = _envelope(mu, rho)
    return 0.5 * rho * (b0 * b0 + _envelope(mu - 1.0, rho) * _envelope(mu + 1.0, rho))


def lambda_tail_bound(dim, rho, k_min: int) -> float:
    """Rigorous upper bound on sup_{k >= k_min} Lambda_{k,d}(rho).

    Uses |J_a(rho)| <= min(1, (rho/2)^a / Gamma(a+1)) in the closed form; the
    envelope is non-increasing in the order once the order exceeds rho/2 - 1,
    so the sup is a finite scan up to that point.
    """
    dim = SphereDim.of(dim)
    rho = _rho(rho)
    best = _tail_term(dim, rho, k_min)
    k = k_min
    while dim.nu.alpha + k < 0.5 * rho:
        k += 1
        best = max(best, _tail_term(dim, rho, k))
    return best


def truncation_index(dim, rho, target: float = TAIL_TARGET) -> int:
    """K_max: smallest k >= 8 with lambda_tail_bound(k) < target."""
    dim = SphereDim.of(dim)
    rho = _rho(rho)
    if lambda_tail_bound(dim, rho, K_MAX_FLOOR) < target:
        return K_MAX_FLOOR
    # the bound is a sup over k' >= k, hence non-increasing in k
    lo, hi = K_MAX_FLOOR, 2 * K_MAX_FLOOR
    while lambda_tail_bound(dim, rho, hi) >= target:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if lambda_tail_bound(dim, rho, mid) < target:
            hi = mid
        else:
            lo = mid
    return hi


def lambda_asymptotic(k: int, dim, rho) -> float:
    """Leading large-rho approximation; equals 1/pi up to O(1/rho)."""
    dim = SphereDim.of(dim)
    rho = _rho(rho)
    phase = rho - (2 * dim.nu.alpha + 2 * k + 1) * math.pi / 4.0
    return ONE_OVER_PI * (math.cos(phase) ** 2 + math.cos(phase - math.pi / 2.0) ** 2)


def lambda_half_integer_d3(rho) -> float:
    """Lambda_{0,3}(rho) from the elementary J_{1/2}: (1/pi)(1 - sin(2 rho)/(2 rho))."""
    rho = _rho(rho)
    return ONE_OVER_PI * (1.0 - math.sin(2.0 * rho) / (2.0 * rho))
