"""Self-verification suite behind ``ahsharp verify``.

Each check compares a closed-form computation with an independent route
and records the worst residual against its tolerance.  Nothing raises:
failures, including unexpected exceptions, become failed checks.
"""

from __future__ import annotations

import math
import time
import traceback
from dataclasses import asdict, dataclass, field

import numpy as np

from . import analysis, bessel, coefficients, sphere_oracle, stability
from .coefficients import SphereDim, lambda_values
from .sharp_constant import AmbiguousAtZero, ZeroHint, certified_max, sharp_constant, verify_chains


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    residual: float = 0.0
    tolerance: float = 0.0
    detail: str = ""
    seconds: float = 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        for key in ("residual", "tolerance"):
            if not math.isfinite(d[key]):
                d[key] = str(d[key])
        return d


@dataclass
class Report:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n_checks": len(self.checks),
            "n_failed": sum(not c.passed for c in self.checks),
            "checks": [c.as_dict() for c in self.checks],
        }


def _run(report: Report, suite: str, name: str, fn) -> None:
    t = time.perf_counter()
    try:
        residual, tol, ok, detail = fn()
        check = Check(suite, name, bool(ok), float(residual), float(tol), detail)
    except Exception as exc:  # itemise, never abort the suite
        check = Check(suite, name, False, math.inf, 0.0, f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}")
    check.seconds = round(time.perf_counter() - t, 3)
    report.checks.append(check)


def _oracle(dims, rhos, kmax=6):
    worst, where = 0.0, ""
    for d in dims:
        for rho in rhos:
            for k in range(kmax + 1):
                a = coefficients.lambda_closed(k, d, rho).value
                b = coefficients.lambda_quadrature(k, d, rho).value
                if abs(a - b) > worst:
                    worst, where = abs(a - b), f"k={k} d={d} rho={rho}"
    return worst, 1e-10, worst <= 1e-10, where


def _identities(n, seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        d = int(rng.integers(2, 9))
        k = int(rng.integers(0, 12))
        rho = float(rng.uniform(0.05, 60.0))
        lam = lambda_values(d, rho, k + 3)
        alt = lambda_values(d, rho, k + 3, form="alternative")
        r = [
            lam[k] - lam[k + 1] - coefficients.gap_consecutive(k, d, rho),
            lam[k] - lam[k + 2] - coefficients.gap_two_apart(k, d, rho),
            lam[k] - alt[k],
            stability.j_frak(d, rho) - stability.j_frak_rearranged(d, rho),
            lam[0] - lam[3] - stability.j_frak(d, rho),
        ]
        worst = max(worst, max(abs(x) for x in r))
    return worst, 1e-11, worst <= 1e-11, f"{n} random (k, d, rho)"


def _hints(d, count):
    for off in (0, 1):
        for i in range(1, count + 1):
            yield ZeroHint(off, i)


def _sharp(dims, grid, hint_count):
    worst, bad, amb = 0.0, [], 0
    for d in dims:
        points = [(r, None) for r in grid] + [(None, h) for h in _hints(d, hint_count)]
        for rho, hint in points:
            try:
                s = sharp_constant(d, rho, hint)
            except AmbiguousAtZero:
                amb += 1
                continue
            c = certified_max(d, s.rho)
            worst = max(worst, abs(s.value - c.value))
            if s.argmax_degrees != c.argmax or not verify_chains(d, s.rho, hint).ok:
                bad.append((d, s.rho))
    ok = worst <= 1e-10 and not bad
    return worst, 1e-10, ok, f"mismatches={bad[:5]} ambiguous_skipped={amb}"


def _stab(dims, grid, hint_count):
    worst, bad = 0.0, []
    for d in dims:
        points = [(r, None) for r in grid] + [(None, h) for h in _hints(d, hint_count)]
        points += [(None, ZeroHint(2, i)) for i in range(1, hint_count + 1)]
        points += [(None, ZeroHint(None, i)) for i in range(1, hint_count + 1)]
        for rho, hint in points:
            try:
                st = stability.stability_constant(d, rho, hint)
            except AmbiguousAtZero:
                continue
            b = stability.brute_stability(d, st.rho, hint)
            worst = max(worst, abs(st.value - b.value))
            if st.equality_degrees != b.argmin:
                bad.append((d, st.rho))
    return worst, 1e-10, worst <= 1e-10 and not bad, f"mismatches={bad[:5]}"


def _sandwich(samples, trials, seed):
    fails = []
    worst_left = 0.0
    for d, rho, hint in samples:
        rep = stability.verify_sandwich(d, rho, trials, seed, hint)
        worst_left = max(worst_left, rep.max_left_eq_residual)
        if not rep.ok:
            fails.append((d, rep.rho))
    return worst_left, 1e-11, not fails, f"{len(samples)} samples x {trials} mixtures; failing={fails[:5]}"


def _probes():
    worst = 0.0
    notes = []
    for h in ("nu:1", "nu+1:1", "nu:2"):
        p = analysis.probe_C_kink(2, h)
        worst = max(worst, p.gap_error)
        if p.classification is not analysis.Regularity.KINK:
            notes.append(f"C {h} {p.classification.value}")
        j = analysis.probe_S_jump(2, h)
        if j.classification is not analysis.Regularity.JUMP:
            notes.append(f"S {h} {j.classification.value}")
    p = analysis.probe_S_kink_at_Jnu2(2, "nu+2:1")
    worst = max(worst, p.gap_error)
    if p.classification is not analysis.Regularity.KINK:
        notes.append("S nu+2:1 not a kink")
    if analysis.probe_C_kink(2, 5.0).classification is not analysis.Regularity.SMOOTH:
        notes.append("C at 5.0 not smooth")
    return worst, 1e-5, worst <= 1e-5 and not notes, "; ".join(notes)


def _origin():
    worst = 0.0
    for d in range(2, 7):
        target = 0.5 if d == 2 else 0.0
        worst = max(worst, abs(analysis.lambda0_origin_slope(d) - target))
    return worst, 1e-4, worst <= 1e-4, "d = 2..6"


def _limit():
    rep = analysis.limit_check(2, 0, [100, 200, 400, 800, 1600])
    c = rep.sharp[2]
    s = stability.stability_constant(2, 1000.0).value
    c1000 = sharp_constant(2, 1000.0).value
    ok = rep.bounded and abs(c1000 - coefficients.ONE_OVER_PI) <= 2e-3 and s < 0.02
    return rep.sup, 1.0, ok and c > 0, f"sup rho|Lambda-1/pi|={rep.sup:.4g} C_2(1000)={c1000:.6f} S_2(1000)={s:.3g}"


def _sphere(rhos, kmax):
    worst = 0.0
    for rho in rhos:
        lam = lambda_values(2, rho, kmax)
        for k in range(kmax + 1):
            e = sphere_oracle.ball_energy(sphere_oracle.CircleFunction.mode(k), rho)
            worst = max(worst, abs(e - 2 * math.pi * lam[k]) / max(1.0, e))
    return worst, 1e-6, worst <= 1e-6, f"{len(rhos)} radii, modes 0..{kmax}"


def _sphere_argmax(grid):
    bad = []
    for rho in grid:
        try:
            m = sharp_constant(2, rho).argmax_degrees
        except AmbiguousAtZero:
            continue
        if sphere_oracle.brute_rayleigh_argmax(rho, 12) != m:
            bad.append(rho)
    return float(len(bad)), 0.0, not bad, f"mismatch at {bad[:5]}"


def _bessel(dims, x_max=50.0):
    notes, min_sep = [], math.inf
    for d in dims:
        nu = SphereDim(d).nu
        for i in range(6):
            a = bessel.zeros_up_to(nu + i, x_max).zeros
            b = bessel.zeros_up_to(nu + i + 1, x_max).zeros
            if not bessel.interlaced(a, b):
                notes.append(f"interlacing J_{nu + i}/J_{nu + i + 1}")
        for m in (1, 2, 3, 4):
            r = bessel.check_bourget(nu, m, x_max, 1e-3)
            min_sep = min(min_sep, r.min_separation)
            if not r.passed:
                notes.append(f"Bourget J_{nu}, m={m}")
        for i in range(1, 7):
            alpha = nu + i
            for z in bessel.zeros_up_to(alpha + 1, x_max).zeros:
                if bessel.sign_product((alpha.alpha - 1, alpha), z) is not bessel.Sign.POSITIVE:
                    notes.append(f"sign at zero {z} of J_{alpha + 1}")
    return min_sep, 1e-3, not notes, "; ".join(notes[:5]) or f"min Bourget separation {min_sep:.4g}"


def run(dims=(2, 3, 4, 5), quick: bool = False, seed: int = 0) -> Report:
    report = Report()
    dims = tuple(dims)
    if quick:
        oracle_rhos = [0.5, 3.0, 11.5, 30.0]
        grid = np.round(np.arange(1, 301) * 0.1, 10)
        hint_count, trials, sphere_rhos, sphere_k = 3, 1000, [1.0, 3.0, 8.0], 4
        argmax_grid = np.linspace(0.37, 14.9, 12)
    else:
        oracle_rhos = [0.5 * i for i in range(1, 61)]
        grid = np.round(np.arange(1, 3001) * 0.01, 10)
        hint_count, trials, sphere_rhos, sphere_k = 5, 10_000, [0.5, 1, 2, 3, 5, 8, 13], 8
        argmax_grid = np.linspace(0.37, 14.9, 50)
    samples = []
    for d in dims:
        samples += [(d, r, None) for r in (0.7, 3.0, 6.3, 12.1)]
        samples += [(d, None, ZeroHint(o, 1)) for o in (0, 1, 2)] + [(d, None, ZeroHint(None, 1))]

    _run(report, "coefficients", "closed form vs quadrature", lambda: _oracle(dims, oracle_rhos))
    _run(report, "coefficients", "identities", lambda: _identities(200 if quick else 1000, seed))
    _run(report, "sharp_constant", "case split vs certified max, chains", lambda: _sharp(dims, grid, hint_count))
    _run(report, "stability", "case table vs brute-force inf", lambda: _stab(dims, grid, hint_count))
    _run(report, "stability", "sandwich and equality cases", lambda: _sandwich(samples, trials, seed))
    _run(report, "analysis", "regularity probes", _probes)
    _run(report, "analysis", "slope of Lambda_0 at the origin", _origin)
    _run(report, "analysis", "large-rho limit", _limit)
    _run(report, "sphere_oracle", "pure-mode ball energy", lambda: _sphere(sphere_rhos, sphere_k))
    _run(report, "sphere_oracle", "brute Rayleigh argmax", lambda: _sphere_argmax(argmax_grid))
    _run(report, "bessel", "interlacing, Bourget, sign at zeros", lambda: _bessel(dims))
    return report
