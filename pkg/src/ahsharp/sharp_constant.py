"""Optimal constant C_d(rho) and maximiser degrees.

``sharp_constant`` follows the case split on the sign of J_nu J_{nu+1};
``certified_max`` is the brute-force oracle (max of Lambda_k over a
certified finite range of k).  Exact Bessel zeros are never reached by
float luck: callers designate them with a ``ZeroHint``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .bessel import Sign, nth_zero, sign_product
from .coefficients import SphereDim, lambda_tail_bound, lambda_values, truncation_index

# ties are relative to C_d(rho); Lambda itself scales like rho^(2 nu + 1) near 0
TIE_REL = 1e-10
STRICT_REL = 1e-12
EQUAL_ABS = 1e-11


class AmbiguousAtZero(ValueError):
    """rho sits inside the floating-point band of a Bessel zero and no hint says which."""


class CaseTag(str, enum.Enum):
    I_POS_PRODUCT = "I_pos_product"
    II_NEG_PRODUCT = "II_neg_product"
    III_JNU_ZERO = "III_Jnu_zero"
    IV_JNU1_ZERO = "IV_Jnu1_zero"


CASE_DEGREES = {
    CaseTag.I_POS_PRODUCT: frozenset({0}),
    CaseTag.II_NEG_PRODUCT: frozenset({1}),
    CaseTag.III_JNU_ZERO: frozenset({0, 1}),
    CaseTag.IV_JNU1_ZERO: frozenset({0, 1, 2}),
}

_HINT_RE = re.compile(r"^\s*(nu(?:\s*\+\s*(\d+))?|jfrak)\s*:\s*(\d+)\s*$")


@dataclass(frozen=True)
class ZeroHint:
    """Designates rho as the ``index``-th positive zero of J_{nu+offset}.

    ``offset=None`` means the ``index``-th zero of the case-(ii) selector
    J_nu J_{nu+1} + J_{nu+1} J_{nu+2} + J_{nu+2} J_{nu+3} inside a region
    where J_nu J_{nu+1} < 0.
    """

    offset: int | None
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("zero index is 1-based")
        if self.offset is not None and not 0 <= self.offset <= 6:
            raise ValueError("offset must be in 0..6")

    @classmethod
    def parse(cls, text: str) -> "ZeroHint":
        m = _HINT_RE.match(text)
        if not m:
            raise ValueError(f"bad zero designator {text!r}; expected nu:k, nu+m:k or jfrak:k")
        if m.group(1) == "jfrak":
            return cls(None, int(m.group(3)))
        return cls(int(m.group(2) or 0), int(m.group(3)))

    @property
    def is_jfrak(self) -> bool:
        return self.offset is None

    def label(self) -> str:
        if self.offset is None:
            return f"jfrak:{self.index}"
        return f"nu:{self.index}" if self.offset == 0 else f"nu+{self.offset}:{self.index}"

    def resolve(self, dim) -> float:
        dim = SphereDim.of(dim)
        if self.offset is None:
            from .stability import jfrak_zero

            return jfrak_zero(dim, self.index)
        return nth_zero(dim.nu + self.offset, self.index)


def resolve_rho(dim, rho=None, zero_hint: ZeroHint | None = None) -> float:
    """rho from either a float or a hint; both given must agree."""
    if zero_hint is None:
        if rho is None:
            raise ValueError("need rho or a zero hint")
        rho = float(rho)
        if not math.isfinite(rho) or rho <= 0:
            raise ValueError(f"rho must be positive, got {rho}")
        return rho
    z = zero_hint.resolve(dim)
    if rho is not None and abs(float(rho) - z) > 1e-12 * z:
        raise ValueError(f"rho={rho} does not match {zero_hint.label()} = {z!r}")
    return z


@dataclass(frozen=True)
class MaximiserSpace:
    degrees: frozenset
    case: CaseTag


@dataclass(frozen=True)
class SharpConstant:
    dim: SphereDim
    rho: float
    value: float
    argmax_degrees: frozenset
    case: CaseTag
    lambdas: tuple = field(repr=False, default=())

    @property
    def maximisers(self) -> MaximiserSpace:
        return MaximiserSpace(self.argmax_degrees, self.case)


def classify_case(dim, rho=None, zero_hint: ZeroHint | None = None) -> CaseTag:
    dim = SphereDim.of(dim)
    rho = resolve_rho(dim, rho, zero_hint)
    if zero_hint is not None and zero_hint.offset == 0:
        return CaseTag.III_JNU_ZERO
    if zero_hint is not None and zero_hint.offset == 1:
        return CaseTag.IV_JNU1_ZERO
    s = sign_product((dim.nu, dim.nu + 1), rho)
    if s is Sign.POSITIVE:
        return CaseTag.I_POS_PRODUCT
    if s is Sign.NEGATIVE:
        return CaseTag.II_NEG_PRODUCT
    raise AmbiguousAtZero(
        f"rho={rho!r} is within rounding of a zero of J_{dim.nu} J_{dim.nu + 1}; "
        "pass a zero hint such as nu:k or nu+1:k"
    )


def sharp_constant(dim, rho=None, zero_hint: ZeroHint | None = None) -> SharpConstant:
    dim = SphereDim.of(dim)
    rho = resolve_rho(dim, rho, zero_hint)
    case = classify_case(dim, rho, zero_hint)
    lam = lambda_values(dim, rho, 2)
    value = lam[1] if case is CaseTag.II_NEG_PRODUCT else lam[0]
    return SharpConstant(dim, rho, float(value), CASE_DEGREES[case], case, tuple(float(v) for v in lam))


@dataclass(frozen=True)
class CertifiedMax:
    value: float
    argmax: frozenset
    k_max: int
    tail_bound: float
    lambdas: np.ndarray = field(repr=False, compare=False)


class CertificateError(RuntimeError):
    pass


def certified_max(dim, rho) -> CertifiedMax:
    """max_k Lambda_{k,d}(rho) by enumeration, with a tail bound covering k > K_max."""
    dim = SphereDim.of(dim)
    rho = resolve_rho(dim, rho)
    k_max = truncation_index(dim, rho)
    lam = lambda_values(dim, rho, k_max)
    best = float(lam.max())
    tail = lambda_tail_bound(dim, rho, k_max + 1)
    while tail >= best * (1.0 - TIE_REL):
        # tiny rho: Lambda_0 itself is below the default target
        k_max *= 2
        lam = lambda_values(dim, rho, k_max)
        best = float(lam.max())
        tail = lambda_tail_bound(dim, rho, k_max + 1)
        if k_max > 1 << 24:
            raise CertificateError(f"no tail certificate for d={dim.d}, rho={rho}")
    argmax = frozenset(int(k) for k in np.nonzero(lam >= best - TIE_REL * best)[0])
    return CertifiedMax(best, argmax, k_max, tail, lam)


@dataclass(frozen=True)
class ChainCheck:
    lhs: int
    relation: str
    rhs: int
    margin: float
    ok: bool


@dataclass
class ChainReport:
    dim: SphereDim
    rho: float
    case: CaseTag
    checks: list
    k_max: int

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def first_violation(self) -> ChainCheck | None:
        return next((c for c in self.checks if not c.ok), None)


def _chain_spec(case: CaseTag, k_max: int):
    """(lhs, relation, rhs) triples of the case's inequality chains."""
    def tail(start):
        return [(k, ">=", k + 2) for k in range(start, k_max - 1, 2)]

    if case is CaseTag.I_POS_PRODUCT:
        return [(0, ">", 1), (0, ">", 2)] + tail(1) + tail(2)
    if case is CaseTag.II_NEG_PRODUCT:
        return [(1, ">", 0), (1, ">", 3)] + tail(0) + tail(3)
    if case is CaseTag.III_JNU_ZERO:
        return [(0, "=", 1), (0, ">", 2), (1, ">", 3)] + tail(2) + tail(3)
    return [(0, "=", 1), (0, "=", 2), (2, ">", 4), (1, ">", 3)] + tail(4) + tail(3)


def verify_chains(dim, rho=None, zero_hint: ZeroHint | None = None) -> ChainReport:
    """Check every link of the case's Lambda inequality chains up to K_max."""
    dim = SphereDim.of(dim)
    rho = resolve_rho(dim, rho, zero_hint)
    case = classify_case(dim, rho, zero_hint)
    k_max = truncation_index(dim, rho)
    lam = lambda_values(dim, rho, k_max + 1)
    scale = float(lam.max())
    checks = []
    for a, rel, b in _chain_spec(case, k_max):
        margin = float(lam[a] - lam[b])
        if rel == ">":
            ok = margin > STRICT_REL * scale
        elif rel == ">=":
            ok = margin >= -STRICT_REL * scale
        else:
            ok = abs(margin) <= EQUAL_ABS
        checks.append(ChainCheck(a, rel, b, margin, ok))
    return ChainReport(dim, rho, case, checks, k_max)
