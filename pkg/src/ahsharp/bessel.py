"""Bessel functions of the first kind for integer and half-integer orders.

Only real positive arguments and orders ``alpha = n/2 >= 0`` are exposed.
Small arguments use the power series; everything else goes through Miller's
backward recurrence (``_kernels.ladder_many``), normalised by the Neumann sum
rule for integer orders and by the elementary ``J_{-1/2}``, ``J_{1/2}`` for
half-integer ones.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K

ZERO_BAND = 64.0


class BesselDomainError(ValueError):
    pass


class BesselRangeError(ArithmeticError):
    pass


class ConvergenceError(RuntimeError):
    pass


class Method(str, enum.Enum):
    SERIES = "series"
    RECURRENCE_DOWN = "recurrence_down"
    ASYMPTOTIC = "asymptotic"


class Sign(enum.Enum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


@functools.total_ordering
@dataclass(frozen=True)
class Order:
    """Order ``twice / 2``; integer or half-integer, never negative."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)) or self.twice < 0:
            raise BesselDomainError(f"order must be n/2 with integer n >= 0, got twice={self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def of(cls, alpha) -> "Order":
        if isinstance(alpha, Order):
            return alpha
        doubled = Fraction(alpha) * 2
        if doubled.denominator != 1:
            raise BesselDomainError(f"order {alpha!r} is not an integer or half-integer")
        return cls(int(doubled))

    @property
    def alpha(self) -> float:
        return self.twice / 2

    def __add__(self, k: int) -> "Order":
        return Order(self.twice + 2 * int(k))

    def __lt__(self, other: "Order") -> bool:
        return self.twice < Order.of(other).twice

    def __str__(self) -> str:
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"


@dataclass(frozen=True)
class BesselValue:
    value: float
    abs_err_estimate: float
    method: Method

    def __float__(self) -> float:
        return self.value

    def is_zero(self, guard: float = ZERO_BAND) -> bool:
        return abs(self.value) <= guard * self.abs_err_estimate


def _check_x(x) -> float:
    try:
        x = float(x)
    except (TypeError, ValueError) as exc:
        raise BesselDomainError(f"argument {x!r} is not a real number") from exc
    if not math.isfinite(x):
        raise BesselDomainError(f"argument must be finite, got {x}")
    if x <= 0.0:
        raise BesselDomainError(f"argument must be positive, got {x}")
    return x


def _ladder_err(value: float, alpha: float, x: float) -> float:
    """Rounding-error scale of a recurrence value."""
    n = K.miller_start(abs(alpha) + 1.0, x)
    envelope = min(1.0, math.sqrt(2.0 / (math.pi * x))) if abs(alpha) < x else 0.0
    return K.EPS * (8.0 + 0.25 * n) * max(abs(value), envelope, 1e-300)


def _series_value(order: Order, x: float) -> BesselValue:
    log_scale, total, abs_sum, _ = K.series_parts(order.twice, x)
    if log_scale < -708.0:
        raise BesselRangeError(f"J_{order}({x}) underflows binary64 (log scale {log_scale:.1f})")
    if log_scale > 709.0:
        raise BesselRangeError(f"J_{order}({x}) scale factor overflows (log scale {log_scale:.1f})")
    scale = math.exp(log_scale)
    # exp(log_scale) carries ~|log_scale| ulps, log Gamma ~ one per factor
    err = scale * K.EPS * (4.0 * abs_sum + (4.0 + 2.0 * abs(log_scale) + order.twice) * abs(total))
    return BesselValue(scale * total, err, Method.SERIES)


def eval_J(order, x) -> BesselValue:
    """J_alpha(x) with an absolute error estimate and the regime used."""
    order = Order.of(order)
    x = _check_x(x)
    if x * x <= 4.0 * (order.alpha + 1.0) or x < K.MIN_ARG:
        return _series_value(order, x)
    v = float(K.ladder(order.twice, 1, x)[0])
    return BesselValue(v, _ladder_err(v, order.alpha, x), Method.RECURRENCE_DOWN)


def eval_J_derivative(order, x) -> BesselValue:
    """J'_alpha(x), computed as (alpha/x) J_alpha - J_{alpha+1}.

    Identical to (J_{alpha-1} - J_{alpha+1})/2 but never touches a negative
    order, so J'_0 = -J_1 falls out directly.
    """
    order = Order.of(order)
    x = _check_x(x)
    a = eval_J(order, x)
    b = eval_J(order + 1, x)
    value = (order.alpha / x) * a.value - b.value
    err = (order.alpha / x) * a.abs_err_estimate + b.abs_err_estimate
    return BesselValue(value, err, b.method)


def recurrence_next(order, x, j_prev, j_curr) -> float:
    """J_{alpha+1}(x) from J_{alpha-1}(x) and J_alpha(x) (upward three-term step).

    Only trustworthy for x > alpha; below that the error grows like J/Y.
    """
    order = Order.of(order)
    x = _check_x(x)
    j_prev = float(j_prev)
    j_curr = float(j_curr)
    if not (math.isfinite(j_prev) and math.isfinite(j_curr)):
        raise BesselDomainError("recurrence inputs must be finite")
    return (2.0 * order.alpha / x) * j_curr - j_prev


def ladder(order0, count: int, x) -> np.ndarray:
    """J at ``order0, order0 + 1, ..., order0 + count - 1`` for scalar or array x.

    ``order0`` may be a float down to -2 here (needed by the Lommel forms);
    returns shape ``(count,)`` for scalar x and ``(len(x), count)`` otherwise.
    """
    two_a0 = int(round(2 * float(order0.alpha if isinstance(order0, Order) else order0)))
    scalar = np.ndim(x) == 0
    xs = K.check_ladder_args(two_a0, count, np.atleast_1d(x))
    out = K.ladder_many(two_a0, int(count), xs)
    return out[0] if scalar else out


def jv(order, x) -> np.ndarray:
    """Vectorised J_alpha over an array of x (no error metadata)."""
    return ladder(order, 1, x)[..., 0]


def asymptotic_J(order, x, terms: int = 8) -> BesselValue:
    """Hankel large-argument expansion; meant as an independent check for x >> alpha."""
    order = Order.of(order)
    x = _check_x(x)
    mu = 4.0 * order.alpha**2
    omega = x - (2.0 * order.alpha + 1.0) * math.pi / 4.0
    p, q = 1.0, 0.0
    a_k = 1.0
    last = 0.0
    for k in range(1, 2 * terms):
        a_k *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(a_k) > abs(last) and k > 2:
            break
        if k % 2 == 1:
            q += (-1) ** ((k - 1) // 2) * a_k
        else:
            p += (-1) ** (k // 2) * a_k
        last = a_k
    amp = math.sqrt(2.0 / (math.pi * x))
    return BesselValue(amp * (p * math.cos(omega) - q * math.sin(omega)), amp * abs(last), Method.ASYMPTOTIC)


def leading_asymptotic(order, x) -> float:
    order = Order.of(order)
    return math.sqrt(2.0 / (math.pi * x)) * math.cos(x - (2.0 * order.alpha + 1.0) * math.pi / 4.0)


def crude_bound(order, z) -> float:
    """(z/2)^alpha e^{z^2/4} / Gamma(alpha+1), the bound from dropping the series signs."""
    order = Order.of(order)
    z = abs(float(z))
    if z == 0.0:
        return 1.0 if order.twice == 0 else 0.0
    log_b = order.alpha * math.log(z / 2.0) + z * z / 4.0 - K.log_gamma_half(order.twice + 2)
    return math.exp(log_b) if log_b < 709.0 else math.inf


def log_power_envelope(alpha: float, z: float) -> float:
    """log of (z/2)^alpha / Gamma(alpha+1); bounds |J_alpha(z)| for real z, alpha >= -1/2."""
    if alpha == 0.0:
        return 0.0
    return alpha * math.log(z / 2.0) - math.lgamma(alpha + 1.0)


@dataclass(frozen=True)
class ZeroTable:
    order: Order
    zeros: tuple
    residuals: tuple = field(repr=False)
    tol: float = 1e-13
    x_max: float = math.inf

    def __len__(self) -> int:
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)

    def zero(self, k: int) -> float:
        """k-th positive zero, 1-based."""
        if k < 1 or k > len(self.zeros):
            raise IndexError(f"zero index {k} outside 1..{len(self.zeros)} for order {self.order}")
        return self.zeros[k - 1]

    def csv_rows(self):
        for k, (z, r) in enumerate(zip(self.zeros, self.residuals), start=1):
            yield (self.order.twice, k, z, r)


def _mcmahon(alpha: float, k: int) -> float:
    beta = (k + alpha / 2.0 - 0.25) * math.pi
    m = 4.0 * alpha * alpha
    return beta - (m - 1.0) / (8.0 * beta) - 4.0 * (m - 1.0) * (7.0 * m - 31.0) / (3.0 * (8.0 * beta) ** 3)


def _refine(order: Order, a: float, b: float, fa: float, guess: float, max_iter: int = 100):
    z = guess if a < guess < b else 0.5 * (a + b)
    for _ in range(max_iter):
        j0, j1 = K.ladder(order.twice, 2, z)
        if j0 == 0.0:
            return z, 0.0
        if (j0 > 0) == (fa > 0):
            a, fa = z, j0
        else:
            b = z
        deriv = (order.alpha / z) * j0 - j1
        step = j0 / deriv if deriv != 0.0 else math.inf
        znew = z - step
        if not (a < znew < b):
            znew = 0.5 * (a + b)
        if abs(znew - z) <= 4.0 * K.EPS * z or b - a <= 4.0 * K.EPS * z:
            z = znew
            j0, j1 = K.ladder(order.twice, 2, z)
            return z, abs(j0)
        z = znew
    raise ConvergenceError(f"Newton did not converge for J_{order} in bracket [{a!r}, {b!r}]")


def zeros_up_to(order, x_max) -> ZeroTable:
    """All positive zeros of J_alpha in (0, x_max]."""
    order = Order.of(order)
    x_max = _check_x(x_max)
    alpha = order.alpha
    # no zeros below sqrt(alpha(alpha+2)); start a little under it
    lo = max(0.05, 0.9 * math.sqrt(alpha * (alpha + 2.0)))
    if lo >= x_max:
        return ZeroTable(order, (), (), x_max=x_max)
    step = math.pi / 5.0
    n = int(math.ceil((x_max - lo) / step)) + 1
    grid = np.linspace(lo, x_max, max(n, 2))
    vals = K.ladder_many(order.twice, 1, grid)[:, 0]
    zeros, residuals = [], []
    k = 0
    for i in range(len(grid) - 1):
        if vals[i] == 0.0 and i > 0:
            k += 1
            zeros.append(float(grid[i]))
            residuals.append(0.0)
            continue
        if vals[i] * vals[i + 1] < 0.0:
            k += 1
            z, res = _refine(order, float(grid[i]), float(grid[i + 1]), float(vals[i]), _mcmahon(alpha, k))
            zeros.append(float(z))
            residuals.append(float(res))
    if len(vals) and vals[-1] == 0.0:
        zeros.append(float(grid[-1]))
        residuals.append(0.0)
    return ZeroTable(order, tuple(zeros), tuple(residuals), x_max=x_max)


@functools.lru_cache(maxsize=512)
def zero_table(order: Order, x_max: float) -> ZeroTable:
    return zeros_up_to(order, x_max)


@functools.lru_cache(maxsize=4096)
def nth_zero(order, k: int) -> float:
    """j_{alpha,k}, the k-th positive zero (1-based)."""
    order = Order.of(order)
    if k < 1:
        raise ValueError("zero index is 1-based")
    x_max = (k + order.alpha / 2.0 + 1.0) * math.pi + 2.0
    while True:
        table = zero_table(order, float(x_max))
        if len(table) >= k:
            return table.zero(k)
        x_max *= 1.5


@dataclass(frozen=True)
class BourgetReport:
    order: Order
    m: int
    x_max: float
    min_separation: float
    closest: tuple
    passed: bool


def check_bourget(order, m: int, x_max, sep_tol) -> BourgetReport:
    """J_alpha and J_{alpha+m} should share no positive zero below x_max."""
    order = Order.of(order)
    if m not in (1, 2, 3, 4):
        raise ValueError("m must be in 1..4")
    a = np.array(zeros_up_to(order, x_max).zeros)
    b = np.array(zeros_up_to(order + m, x_max).zeros)
    if a.size == 0 or b.size == 0:
        return BourgetReport(order, m, float(x_max), math.inf, (), True)
    diff = np.abs(a[:, None] - b[None, :])
    i, j = np.unravel_index(np.argmin(diff), diff.shape)
    sep = float(diff[i, j])
    return BourgetReport(order, m, float(x_max), sep, (float(a[i]), float(b[j])), sep > sep_tol)


def _eval_any(twice: int, x: float) -> BesselValue:
    if twice >= 0:
        return eval_J(Order(twice), x)
    v = float(K.ladder(twice, 1, x)[0])
    return BesselValue(v, _ladder_err(v, twice / 2, x), Method.RECURRENCE_DOWN)


def _twice(o) -> int:
    if isinstance(o, Order):
        return o.twice
    return int(round(2 * float(o)))


def sign_product(orders: Iterable, x, guard: float = ZERO_BAND) -> Sign:
    """Sign of prod J_{alpha_i}(x), ZERO if any factor sits inside its error band.

    Orders may be half-integers down to -2 (sign checks at zeros need J_{alpha-1}).
    """
    x = _check_x(x)
    sign = 1
    for o in orders:
        bv = _eval_any(_twice(o), x)
        if bv.is_zero(guard):
            return Sign.ZERO
        if bv.value < 0:
            sign = -sign
    return Sign.POSITIVE if sign > 0 else Sign.NEGATIVE


def interlaced(a: Sequence[float], b: Sequence[float]) -> bool:
    """True if the merged sequences strictly alternate between a and b."""
    tagged = sorted([(z, 0) for z in a] + [(z, 1) for z in b])
    for (z0, t0), (z1, t1) in zip(tagged, tagged[1:]):
        if t0 == t1 or z0 == z1:
            return False
    return True
