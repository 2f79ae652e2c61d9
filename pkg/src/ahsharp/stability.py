"""Stability constant S_d(rho), equality degrees E_d(rho), and the deficit.

A function on the sphere is modelled by the squared norms of its
spherical-harmonic components (``HarmonicMixture``); everything here is a
weighted sum over degrees.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bessel import Sign, eval_J, ladder, sign_product
from .coefficients import SphereDim, lambda_tail_bound, lambda_values, truncation_index
from .sharp_constant import (
    AmbiguousAtZero,
    CaseTag,
    CertificateError,
    ZeroHint,
    resolve_rho,
    sharp_constant,
)

# quadratic gaps near zeros of J_{nu+k} reach 1e-11 on plain grids; Lambda is good to ~1e-15
ARGMIN_REL = 1e-12
LEFT_EQ_REL = 1e-11
SANDWICH_REL = 1e-12
MIXTURE_DEGREES = 13  # support drawn from 0..12
HEAVY_WEIGHT = 0.1


class Subcase(str, enum.Enum):
    I_POS = "i_pos"
    I_ZERO = "i_zero"
    I_NEG = "i_neg"
    II_POS = "ii_pos"
    II_ZERO = "ii_zero"
    II_NEG = "ii_neg"
    III_POS = "iii_pos"
    III_NEG = "iii_neg"
    IV_POS = "iv_pos"
    IV_NEG = "iv_neg"


# subcase -> (degree whose Lambda is subtracted from C, equality degrees)
_TABLE = {
    Subcase.I_POS: (1, frozenset({1})),
    Subcase.I_ZERO: (1, frozenset({1, 2, 3})),
    Subcase.I_NEG: (2, frozenset({2})),
    Subcase.II_POS: (0, frozenset({0})),
    Subcase.II_ZERO: (0, frozenset({0, 3})),
    Subcase.II_NEG: (3, frozenset({3})),
    Subcase.III_POS: (2, frozenset({2})),
    Subcase.III_NEG: (3, frozenset({3})),
    Subcase.IV_POS: (3, frozenset({3})),
    Subcase.IV_NEG: (4, frozenset({4})),
}


@dataclass(frozen=True)
class HarmonicMixture:
    """Squared norms ||Y_k||^2 of the degree-k components of f."""

    weights: dict

    def __post_init__(self):
        clean = {}
        for k, w in dict(self.weights).items():
            if int(k) != k or k < 0:
                raise ValueError(f"degree must be a non-negative integer, got {k!r}")
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"weight for degree {k} must be finite and >= 0, got {w}")
            if w > 0:
                clean[int(k)] = clean.get(int(k), 0.0) + w
        object.__setattr__(self, "weights", dict(sorted(clean.items())))

    @property
    def support(self) -> frozenset:
        return frozenset(self.weights)

    @property
    def total(self) -> float:
        return math.fsum(self.weights.values())

    @classmethod
    def parse(cls, tokens) -> "HarmonicMixture":
        """From ``k=weight`` tokens."""
        weights = {}
        for tok in tokens:
            k, sep, w = tok.partition("=")
            try:
                if not sep:
                    raise ValueError
                kk, ww = int(k), float(w)
            except ValueError:
                raise ValueError(f"malformed mixture token {tok!r}; expected k=weight") from None
            weights[kk] = weights.get(kk, 0.0) + ww
        return cls(weights)


@dataclass(frozen=True)
class StabilityConstant:
    dim: SphereDim
    rho: float
    value: float
    equality_degrees: frozenset
    case: CaseTag
    subcase: Subcase
    maximiser_degrees: frozenset
    sharp: float


@dataclass(frozen=True)
class DeficitReport:
    deficit: float
    distance_sq: float
    lower: float
    upper: float
    sharp: float
    stability: float
    touches_maximisers: bool
    touches_equality: bool


def j_frak(dim, rho) -> float:
    """J_nu J_{nu+1} + J_{nu+1} J_{nu+2} + J_{nu+2} J_{nu+3}."""
    dim = SphereDim.of(dim)
    j = ladder(dim.nu.alpha, 4, float(rho))
    return float(j[0] * j[1] + j[1] * j[2] + j[2] * j[3])


def j_frak_rearranged(dim, rho) -> float:
    """(2/rho)(nu+1) J_{nu+1}^2 + J_{nu+2} J_{nu+3}; same function, no J_nu."""
    dim = SphereDim.of(dim)
    rho = float(rho)
    j1, j2, j3 = ladder(dim.nu.alpha + 1, 3, rho)
    return float(2.0 / rho * (dim.nu.alpha + 1) * j1 * j1 + j2 * j3)


def _jfrak_sign(dim: SphereDim, rho: float) -> Sign:
    vals = [eval_J(dim.nu + i, rho) for i in range(4)]
    v = [b.value for b in vals]
    e = [b.abs_err_estimate for b in vals]
    total = v[0] * v[1] + v[1] * v[2] + v[2] * v[3]
    err = sum(abs(v[i]) * e[i + 1] + abs(v[i + 1]) * e[i] for i in range(3))
    err += 8 * np.finfo(float).eps * sum(abs(v[i] * v[i + 1]) for i in range(3))
    if abs(total) <= 64.0 * err:
        return Sign.ZERO
    return Sign.POSITIVE if total > 0 else Sign.NEGATIVE


def _jfrak_grid(dim: SphereDim, x: np.ndarray) -> tuple:
    j = ladder(dim.nu.alpha, 4, x)
    return j[:, 0] * j[:, 1] + j[:, 1] * j[:, 2] + j[:, 2] * j[:, 3], j[:, 0] * j[:, 1]


@lru_cache(maxsize=None)
def _jfrak_zeros(d: int, count: int) -> tuple:
    dim = SphereDim(d)
    found: list = []
    lo, step, width = 0.05, 0.01, 50.0
    while len(found) < count:
        if lo > 5000:
            raise ValueError(f"fewer than {count} selector zeros below rho=5000 for d={d}")
        x = np.arange(lo, lo + width + step / 2, step)
        f, prod = _jfrak_grid(dim, x)
        idx = np.nonzero((np.sign(f[:-1]) != np.sign(f[1:])) & (prod[:-1] < 0) & (prod[1:] < 0))[0]
        for i in idx:
            a, b, fa = float(x[i]), float(x[i + 1]), float(f[i])
            for _ in range(200):
                m = 0.5 * (a + b)
                if m in (a, b):
                    break
                fm = j_frak(dim, m)
                if fm == 0.0:
                    a = b = m
                    break
                if (fm > 0) == (fa > 0):
                    a, fa = m, fm
                else:
                    b = m
            z = a if abs(j_frak(dim, a)) <= abs(j_frak(dim, b)) else b
            found.append(z)
        lo = float(x[-1])
    return tuple(found[:count])


def jfrak_zero(dim, k: int) -> float:
    """k-th positive zero (1-based) of the case-(ii) selector where J_nu J_{nu+1} < 0."""
    dim = SphereDim.of(dim)
    if k < 1:
        raise ValueError("zero index is 1-based")
    return _jfrak_zeros(dim.d, k)[k - 1]


def _subcase(dim: SphereDim, rho: float, case: CaseTag, hint: ZeroHint | None) -> Subcase:
    nu = dim.nu
    if case is CaseTag.I_POS_PRODUCT:
        if hint is not None and hint.offset == 2:
            return Subcase.I_ZERO
        s = sign_product((nu + 1, nu + 2), rho)
        return {Sign.POSITIVE: Subcase.I_POS, Sign.NEGATIVE: Subcase.I_NEG, Sign.ZERO: Subcase.I_ZERO}[s]
    if case is CaseTag.II_NEG_PRODUCT:
        if hint is not None and hint.is_jfrak:
            return Subcase.II_ZERO
        s = _jfrak_sign(dim, rho)
        if s is Sign.ZERO:
            raise AmbiguousAtZero(
                f"rho={rho!r} is within rounding of a zero of the case-(ii) selector; pass jfrak:k"
            )
        return Subcase.II_POS if s is Sign.POSITIVE else Subcase.II_NEG
    if case is CaseTag.III_JNU_ZERO:
        s = sign_product((nu + 2, nu + 3), rho)
        if s is Sign.ZERO:
            raise AmbiguousAtZero(f"J_{nu + 2} J_{nu + 3} vanishes together with J_{nu} at rho={rho!r}")
        return Subcase.III_POS if s is Sign.POSITIVE else Subcase.III_NEG
    s = sign_product((nu + 3, nu + 4), rho)
    if s is Sign.ZERO:
        raise AmbiguousAtZero(f"J_{nu + 3} J_{nu + 4} vanishes together with J_{nu + 1} at rho={rho!r}")
    return Subcase.IV_POS if s is Sign.POSITIVE else Subcase.IV_NEG


def stability_constant(dim, rho=None, zero_hint: ZeroHint | None = None) -> StabilityConstant:
    dim = SphereDim.of(dim)
    rho = resolve_rho(dim, rho, zero_hint)
    sc = sharp_constant(dim, rho, zero_hint)
    if zero_hint is not None and zero_hint.is_jfrak and sc.case is not CaseTag.II_NEG_PRODUCT:
        raise ValueError(f"{zero_hint.label()} does not lie where J_nu J_nu+1 < 0")
    sub = _subcase(dim, rho, sc.case, zero_hint)
    k, eq = _TABLE[sub]
    lam = lambda_values(dim, rho, 4)
    return StabilityConstant(dim, rho, float(sc.value - lam[k]), eq, sc.case, sub, sc.argmax_degrees, sc.value)


@dataclass(frozen=True)
class BruteStability:
    value: float
    argmin: frozenset
    k_max: int
    tail_bound: float


def brute_stability(dim, rho=None, zero_hint: ZeroHint | None = None) -> BruteStability:
    """inf of C - Lambda_k over non-maximiser k by enumeration plus tail certificate."""
    dim = SphereDim.of(dim)
    rho = resolve_rho(dim, rho, zero_hint)
    sc = sharp_constant(dim, rho, zero_hint)
    k_max = truncation_index(dim, rho)
    while True:
        lam = lambda_values(dim, rho, k_max)
        mask = np.ones(k_max + 1, dtype=bool)
        mask[list(sc.argmax_degrees)] = False
        gaps = sc.value - lam
        best = float(gaps[mask].min())
        tail = lambda_tail_bound(dim, rho, k_max + 1)
        # every k > k_max has C - Lambda_k >= C - tail > best
        if sc.value - tail > best * (1.0 + ARGMIN_REL):
            break
        k_max *= 2
        if k_max > 1 << 24:
            raise CertificateError(f"no tail certificate for d={dim.d}, rho={rho}")
    tie = ARGMIN_REL * sc.value
    argmin = frozenset(int(k) for k in np.nonzero(mask & (gaps <= best + tie))[0])
    return BruteStability(best, argmin, k_max, tail)


def _lambda_row(dim: SphereDim, rho: float, kmax: int) -> np.ndarray:
    return lambda_values(dim, rho, max(kmax, 4))


def deficit(f: HarmonicMixture, dim, rho=None, zero_hint: ZeroHint | None = None) -> DeficitReport:
    if not isinstance(f, HarmonicMixture):
        f = HarmonicMixture(f)
    if not f.weights:
        raise ValueError("deficit of the zero function is undefined")
    st = stability_constant(dim, rho, zero_hint)
    lam = _lambda_row(st.dim, st.rho, max(f.support))
    terms, dist = [], []
    for k, w in f.weights.items():
        if k in st.maximiser_degrees:
            continue
        terms.append((st.sharp - lam[k]) * w)
        dist.append(w)
    dsq = math.fsum(dist)
    return DeficitReport(
        deficit=math.fsum(terms),
        distance_sq=dsq,
        lower=st.value * dsq,
        upper=st.sharp * dsq,
        sharp=st.sharp,
        stability=st.value,
        touches_maximisers=bool(f.support & st.maximiser_degrees),
        touches_equality=bool(f.support & st.equality_degrees),
    )


@dataclass
class SandwichReport:
    dim: int
    rho: float
    trials: int
    seed: int
    lower_violations: int = 0
    upper_violations: int = 0
    right_equality_failures: int = 0
    left_equality_failures: int = 0
    strict_gap_failures: int = 0
    n_left_equality_cases: int = 0
    n_strict_cases: int = 0
    max_left_eq_residual: float = 0.0
    min_strict_margin: float = math.inf
    examples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.lower_violations
            or self.upper_violations
            or self.right_equality_failures
            or self.left_equality_failures
            or self.strict_gap_failures
        )


def random_mixtures(trials: int, rng: np.random.Generator, special: frozenset | None = None) -> np.ndarray:
    """Weight matrix (trials, 13).  Every fourth row, if ``special`` is given, lives on it."""
    w = np.zeros((trials, MIXTURE_DEGREES))
    size = rng.integers(1, MIXTURE_DEGREES, size=trials)  # 1..12
    order = np.argsort(rng.random((trials, MIXTURE_DEGREES)), axis=1)
    vals = 1.0 - rng.random((trials, MIXTURE_DEGREES))  # (0, 1]
    chosen = np.arange(MIXTURE_DEGREES)[None, :] < size[:, None]
    rows = np.repeat(np.arange(trials), MIXTURE_DEGREES).reshape(trials, MIXTURE_DEGREES)
    w[rows[chosen], order[chosen]] = vals[chosen]
    if special:
        degs = np.array(sorted(special))
        sel = np.arange(0, trials, 4)
        w[sel] = 0.0
        pick = rng.random((sel.size, degs.size)) < 0.6
        pick[np.arange(sel.size), rng.integers(0, degs.size, size=sel.size)] = True
        w[np.ix_(sel, degs)] = np.where(pick, 1.0 - rng.random(pick.shape), 0.0)
    return w


def verify_sandwich(dim, rho=None, trials: int = 10_000, seed: int = 0, zero_hint: ZeroHint | None = None) -> SandwichReport:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    st = stability_constant(dim, rho, zero_hint)
    rng = np.random.default_rng(seed)
    me = st.maximiser_degrees | st.equality_degrees
    w = random_mixtures(trials, rng, me)
    lam = _lambda_row(st.dim, st.rho, MIXTURE_DEGREES - 1)[:MIXTURE_DEGREES]
    not_m = np.ones(MIXTURE_DEGREES, dtype=bool)
    not_m[list(st.maximiser_degrees)] = False
    gap = np.where(not_m, st.sharp - lam, 0.0)
    defi = w @ gap
    dist = w @ not_m.astype(float)
    lower = st.value * dist
    upper = st.sharp * dist
    # upper - deficit summed directly, so positivity is not lost to cancellation
    right_gap = w @ np.where(not_m, lam, 0.0)
    tol = SANDWICH_REL * upper

    rep = SandwichReport(st.dim.d, st.rho, trials, seed)
    low_bad = defi < lower - tol
    up_bad = defi > upper + tol
    rep.lower_violations = int(low_bad.sum())
    rep.upper_violations = int(up_bad.sum())
    rep.right_equality_failures = int(np.sum((dist > 0) & (right_gap <= 0)) + np.sum((dist == 0) & (defi != 0)))

    outside = np.ones(MIXTURE_DEGREES, dtype=bool)
    outside[list(me)] = False
    in_me = ~np.any((w > 0) & outside[None, :], axis=1)
    scale = np.maximum(np.abs(defi), np.abs(lower))
    resid = np.abs(defi - lower)
    rel = np.divide(resid, scale, out=np.zeros_like(resid), where=scale > 0)
    rep.n_left_equality_cases = int(in_me.sum())
    if in_me.any():
        rep.max_left_eq_residual = float(rel[in_me].max())
        rep.left_equality_failures = int(np.sum(in_me & (rel > LEFT_EQ_REL)))
    heavy = np.any((w >= HEAVY_WEIGHT) & outside[None, :], axis=1)
    rep.n_strict_cases = int(heavy.sum())
    if heavy.any():
        margin = (defi - lower)[heavy]
        rep.min_strict_margin = float(margin.min())
        rep.strict_gap_failures = int(np.sum(margin <= LEFT_EQ_REL * np.abs(defi[heavy])))
    bad = np.nonzero(low_bad | up_bad)[0][:5]
    rep.examples = [
        {k: float(w[i, k]) for k in range(MIXTURE_DEGREES) if w[i, k] > 0} for i in bad
    ]
    return rep
