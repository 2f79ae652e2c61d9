"""Regularity detectors and large-rho checks.

Kinks are found by comparing one-sided derivatives, each taken from a
three-point one-sided stencil and Richardson-extrapolated over steps
1e-3, 5e-4, 2.5e-4.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bessel import eval_J, eval_J_derivative, ladder
from .coefficients import ONE_OVER_PI, SphereDim, lambda_values
from .sharp_constant import ZeroHint, sharp_constant
from .stability import stability_constant

STEPS = (1e-3, 5e-4, 2.5e-4)
KINK_GAP = 1e-4
SMOOTH_GAP = 1e-7
JUMP_EPS = (1e-2, 1e-3, 1e-4)
JUMP_SIDE_MAX = 1e-3
JUMP_ON_ZERO_MIN = 1e-2


class Regularity(str, enum.Enum):
    SMOOTH = "smooth"
    KINK = "kink"
    JUMP = "jump"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class KinkProbe:
    location: float
    left_slope: float
    right_slope: float
    h: float
    classification: Regularity
    predicted_gap: float = 0.0
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def measured_gap(self) -> float:
        return self.right_slope - self.left_slope

    @property
    def gap_error(self) -> float:
        return abs(self.measured_gap - self.predicted_gap)


def one_sided_derivative(f: Callable[[float], float], x: float, side: int, steps=STEPS) -> float:
    """Derivative of f at x from the right (side=+1) or left (side=-1)."""
    fx = f(x)

    def stencil(h):
        return side * (-3.0 * fx + 4.0 * f(x + side * h) - f(x + 2 * side * h)) / (2.0 * h)

    d = [stencil(h) for h in steps]
    # error ~ c2 h^2 + c3 h^3 with halving steps
    r1 = [(4.0 * d[i + 1] - d[i]) / 3.0 for i in range(len(d) - 1)]
    if len(r1) == 1:
        return r1[0]
    return (8.0 * r1[1] - r1[0]) / 7.0


def classify_gap(gap: float) -> Regularity:
    gap = abs(gap)
    if gap > KINK_GAP:
        return Regularity.KINK
    if gap < SMOOTH_GAP:
        return Regularity.SMOOTH
    return Regularity.INCONCLUSIVE


def _location(dim: SphereDim, at) -> tuple:
    if isinstance(at, str):
        at = ZeroHint.parse(at)
    if isinstance(at, ZeroHint):
        return at.resolve(dim), at
    rho = float(at)
    if not rho > 0:
        raise ValueError("probe location must be positive")
    return rho, None


def _value_C(dim, rho, hint=None):
    return sharp_constant(dim, rho, hint).value


def _value_S(dim, rho, hint=None):
    return stability_constant(dim, rho, hint).value


def probe_C_kink(dim, at) -> KinkProbe:
    """One-sided slopes of C_d at ``at`` (a ZeroHint, ``nu:k`` text, or plain rho).

    C_d = Lambda_1 + max(0, J_nu J_{nu+1}), so across a zero of that product
    the right-minus-left slope is |(J_nu J_{nu+1})'|: |J'_nu J_{nu+1}| at a
    zero of J_nu, |J_nu J'_{nu+1}| at a zero of J_{nu+1}, and 0 elsewhere.
    """
    dim = SphereDim.of(dim)
    rho, hint = _location(dim, at)
    if hint is not None and hint.offset not in (0, 1):
        raise ValueError("C_d kinks sit at zeros of J_nu or J_nu+1; use nu:k or nu+1:k")

    def f(x):
        return _value_C(dim, x, hint if x == rho else None)

    left = one_sided_derivative(f, rho, -1)
    right = one_sided_derivative(f, rho, +1)
    predicted, signed = 0.0, 0.0
    if hint is not None:
        a, b = dim.nu + hint.offset, dim.nu + (1 - hint.offset)
        signed = eval_J_derivative(a, rho).value * eval_J(b, rho).value
        predicted = abs(signed)
    extra = {"product_derivative": signed}
    return KinkProbe(rho, left, right, STEPS[0], classify_gap(right - left), predicted, extra)


def probe_S_jump(dim, at) -> KinkProbe:
    """S_d just left/right of a zero of J_nu J_{nu+1} versus S_d at the hinted zero."""
    dim = SphereDim.of(dim)
    rho, hint = _location(dim, at)
    if hint is None or hint.offset not in (0, 1):
        raise ValueError("S_d jumps sit at zeros of J_nu or J_nu+1; use nu:k or nu+1:k")
    on_zero = _value_S(dim, rho, hint)
    left = [_value_S(dim, rho - e) for e in JUMP_EPS]
    right = [_value_S(dim, rho + e) for e in JUMP_EPS]
    le = np.log(JUMP_EPS)
    slope_l = float(np.polyfit(le, np.log(left), 1)[0])
    slope_r = float(np.polyfit(le, np.log(right), 1)[0])
    side = max(left[-1], right[-1])
    jump = side < JUMP_SIDE_MAX and on_zero > JUMP_ON_ZERO_MIN
    cls = Regularity.JUMP if jump else Regularity.INCONCLUSIVE
    extra = {
        "eps": list(JUMP_EPS),
        "left_values": left,
        "right_values": right,
        "on_zero": on_zero,
        "loglog_slope_left": slope_l,
        "loglog_slope_right": slope_r,
    }
    return KinkProbe(rho, math.nan, math.nan, JUMP_EPS[-1], cls, 0.0, extra)


def probe_S_kink_at_Jnu2(dim, at) -> KinkProbe:
    """One-sided slopes of S_d across a zero of J_{nu+2}.

    S_d switches between Lambda_0 - Lambda_1 and Lambda_0 - Lambda_2 there, so
    the right-minus-left slope is -|J_{nu+1} J'_{nu+2}|.
    """
    dim = SphereDim.of(dim)
    rho, hint = _location(dim, at)
    if hint is None or hint.offset != 2:
        raise ValueError("expected a zero of J_nu+2, e.g. nu+2:1")

    def f(x):
        return _value_S(dim, x, hint if x == rho else None)

    left = one_sided_derivative(f, rho, -1)
    right = one_sided_derivative(f, rho, +1)
    j1 = eval_J(dim.nu + 1, rho).value
    dj2 = eval_J_derivative(dim.nu + 2, rho).value
    # S = Lambda_0 - Lambda_1 + min(0, J_{nu+1} J_{nu+2}): a concave corner
    g = j1 * dj2
    predicted = -abs(g)
    window = np.linspace(rho - 2 * STEPS[0], rho + 2 * STEPS[0], 9)
    jj = ladder(dim.nu.alpha, 2, window)
    case_ok = bool(np.all(jj[:, 0] * jj[:, 1] > 0))
    cont = abs(_value_S(dim, rho + JUMP_EPS[-1]) - _value_S(dim, rho - JUMP_EPS[-1]))
    extra = {"case_i_window": case_ok, "continuity_gap": cont, "J_nu1_dJ_nu2": g}
    return KinkProbe(rho, left, right, STEPS[0], classify_gap(right - left), predicted, extra)


def lambda_prime(k: int, dim, rho) -> np.ndarray:
    """d/drho Lambda_{k,d} from the closed Bessel expression (mu = nu + k).

    1/2 (J_mu^2 - J_{mu-1} J_{mu+1})
      + rho/4 (J_{mu-1} J_mu - J_{mu-2} J_{mu+1} - J_mu J_{mu+1} + J_{mu-1} J_{mu+2})
    """
    dim = SphereDim.of(dim)
    mu = dim.nu.alpha + k
    j = ladder(mu - 2, 5, rho)
    jm2, jm1, j0, jp1, jp2 = (j[..., i] for i in range(5))
    r = np.asarray(rho, dtype=float)
    return 0.5 * (j0 * j0 - jm1 * jp1) + 0.25 * r * (jm1 * j0 - jm2 * jp1 - j0 * jp1 + jm1 * jp2)


def lambda_prime_simple(k: int, dim, rho) -> np.ndarray:
    """J_mu(rho)^2 - Lambda_k(rho)/rho, straight from the integral definition."""
    dim = SphereDim.of(dim)
    r = np.asarray(rho, dtype=float)
    j = ladder(dim.nu.alpha + k, 1, r)[..., 0]
    lam = lambda_values(dim, r, k)[..., k]
    return j * j - lam / r


ORIGIN_SAMPLES = (1e-2, 1e-3, 1e-4)


def lambda0_origin_slope(dim) -> float:
    """Right derivative of Lambda_{0,d} at 0, extrapolated from Lambda_0(rho)/rho."""
    dim = SphereDim.of(dim)
    q = [float(lambda_values(dim, r, 0)[0]) / r for r in ORIGIN_SAMPLES]
    # q(rho) = s + a rho + b rho^2 + ..., steps shrink by 10
    r1 = [(10.0 * q[i + 1] - q[i]) / 9.0 for i in range(2)]
    return (100.0 * r1[1] - r1[0]) / 99.0


@dataclass(frozen=True)
class LipschitzReport:
    rho_max: float
    max_slope: tuple
    max_slope_half: tuple
    points: int

    @property
    def stable(self) -> bool:
        """The sup over [0, rho_max] is already reached on [0, rho_max/2] up to 1%."""
        return all(a <= 1.01 * b for a, b in zip(self.max_slope, self.max_slope_half))


def lipschitz_scan(dim, rho_max: float, step: float = 0.01) -> LipschitzReport:
    """max |Lambda'_{0,d}|, |Lambda'_{1,d}| over (0, rho_max] on a uniform grid."""
    dim = SphereDim.of(dim)
    if not rho_max > 0:
        raise ValueError("rho_max must be positive")
    x = np.arange(step, rho_max + step / 2, step)
    half = x <= rho_max / 2
    full, part = [], []
    for k in (0, 1):
        s = np.abs(lambda_prime(k, dim, x))
        full.append(float(s.max()))
        part.append(float(s[half].max()) if half.any() else 0.0)
    return LipschitzReport(float(rho_max), tuple(full), tuple(part), int(x.size))


@dataclass(frozen=True)
class LimitReport:
    dim: int
    k: int
    rhos: tuple
    scaled_residuals: tuple
    sharp: tuple
    stability: tuple

    @property
    def sup(self) -> float:
        return max(self.scaled_residuals)

    @property
    def bounded(self) -> bool:
        """The scaled residual does not grow along the list (first half vs whole)."""
        n = len(self.scaled_residuals)
        head = max(self.scaled_residuals[: max(1, n // 2)])
        return self.sup <= 2.0 * head


def limit_check(dim, k: int, rho_list) -> LimitReport:
    """rho |Lambda_{k,d}(rho) - 1/pi| along ``rho_list``, plus C_d and S_d there."""
    dim = SphereDim.of(dim)
    rhos = [float(r) for r in rho_list]
    if any(b <= a for a, b in zip(rhos, rhos[1:])):
        raise ValueError("rho_list must be increasing")
    lam = lambda_values(dim, np.array(rhos), k)[:, k]
    scaled = tuple(float(r * abs(v - ONE_OVER_PI)) for r, v in zip(rhos, lam))
    sharp = tuple(sharp_constant(dim, r).value for r in rhos)
    stab = tuple(stability_constant(dim, r).value for r in rhos)
    return LimitReport(dim.d, k, tuple(rhos), scaled, sharp, stab)
