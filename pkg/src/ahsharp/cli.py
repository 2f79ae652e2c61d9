"""Command-line interface: ``ahsharp {constants,verify,deficit,zeros,probe}``.

Exit status: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from decimal import Decimal, InvalidOperation

from . import analysis, bessel, coefficients, verify
from .coefficients import SphereDim
from .sharp_constant import AmbiguousAtZero, ZeroHint, sharp_constant
from .stability import HarmonicMixture, deficit, stability_constant

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
WORKERS_ENV = "AHSHARP_WORKERS"
MAX_GRID = 10_000_000
COLUMNS = ("rho", "C_d", "S_d", "case", "subcase", "maximiser_degrees", "equality_degrees", "flag")


class UsageError(Exception):
    pass


def fmt_real(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def fmt_degrees(ds) -> str:
    return "" if ds is None else "|".join(str(k) for k in sorted(ds))


def parse_rho(text: str) -> list:
    """``start:stop:step`` (inclusive of stop) or a comma list."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"--rho range must be start:stop:step, got {text!r}")
            start, stop, step = (Decimal(p) for p in parts)
            if step <= 0:
                raise UsageError("--rho step must be > 0")
            if start <= 0:
                raise UsageError("--rho start must be > 0")
            n = int((stop - start) / step) + 1
            if n < 1:
                raise UsageError(f"empty --rho range {text!r}")
            if n > MAX_GRID:
                raise UsageError(f"--rho range has {n} points, limit is {MAX_GRID}")
            return [float(start + i * step) for i in range(n)]
        vals = [float(Decimal(p)) for p in text.split(",") if p.strip()]
    except InvalidOperation:
        raise UsageError(f"cannot parse --rho {text!r}") from None
    if not vals or any(not v > 0 for v in vals):
        raise UsageError("--rho values must be positive")
    return vals


def parse_hint(text: str) -> ZeroHint:
    try:
        return ZeroHint.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def constants_row(d: int, rho: float | None, hint_text: str | None) -> dict:
    hint = ZeroHint.parse(hint_text) if hint_text else None
    row = dict.fromkeys(COLUMNS)
    try:
        sc = sharp_constant(d, rho, hint)
    except AmbiguousAtZero:
        row.update(rho=rho, flag="AMBIGUOUS")
        return row
    row.update(rho=sc.rho, C_d=sc.value, case=sc.case.value, maximiser_degrees=sc.argmax_degrees, flag="")
    if hint is not None:
        row["flag"] = f"zero:{hint.label()}"
    try:
        st = stability_constant(d, sc.rho, hint)
    except AmbiguousAtZero:
        row["flag"] = "AMBIGUOUS"
        return row
    row.update(S_d=st.value, subcase=st.subcase.value, equality_degrees=st.equality_degrees)
    return row


def _star(args):
    return constants_row(*args)


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def compute_rows(d: int, rhos: list, hints: list) -> list:
    jobs = [(d, r, None) for r in rhos] + [(d, None, h.label()) for h in hints]
    n = _workers()
    if n > 1 and len(jobs) > 64:
        with ProcessPoolExecutor(n) as ex:
            rows = list(ex.map(_star, jobs, chunksize=max(1, len(jobs) // (4 * n))))
    else:
        rows = [constants_row(*j) for j in jobs]
    # hinted rows are merged in by rho; map preserves job order otherwise
    return sorted(rows, key=lambda r: r["rho"])


def _csv_row(row: dict) -> list:
    return [
        fmt_real(row["rho"]),
        fmt_real(row["C_d"]),
        fmt_real(row["S_d"]),
        row["case"] or "",
        row["subcase"] or "",
        fmt_degrees(row["maximiser_degrees"]),
        fmt_degrees(row["equality_degrees"]),
        row["flag"] or "",
    ]


def _json_row(row: dict) -> dict:
    out = dict(row)
    for k in ("maximiser_degrees", "equality_degrees"):
        out[k] = None if row[k] is None else sorted(row[k])
    return out


def cmd_constants(args, out) -> int:
    d = SphereDim(args.d).d
    rhos = parse_rho(args.rho) if args.rho else []
    hints = [parse_hint(h) for h in args.at_zero]
    if not rhos and not hints:
        raise UsageError("give --rho and/or --at-zero")
    rows = compute_rows(d, rhos, hints)
    if args.format == "json":
        json.dump({"d": d, "rows": [_json_row(r) for r in rows]}, out, indent=1)
        out.write("\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow(_csv_row(r))
    return EXIT_OK


def _parse_perturb(text: str):
    try:
        k, f = text.split(":")
        return int(k), float(f)
    except ValueError:
        raise UsageError(f"--perturb expects k:factor, got {text!r}") from None


def cmd_verify(args, out) -> int:
    dims = args.d_list or ([2, 3] if args.quick else [2, 3, 4, 5])
    if any(d < 2 for d in dims):
        raise UsageError("dimensions must be >= 2")
    if args.perturb:
        k, f = _parse_perturb(args.perturb)
        with coefficients.perturbed(k, f):
            report = verify.run(dims, args.quick, args.seed)
    else:
        report = verify.run(dims, args.quick, args.seed)
    payload = report.as_dict()
    payload.update(dims=list(dims), quick=args.quick, seed=args.seed, perturb=args.perturb)
    json.dump(payload, out, indent=1)
    out.write("\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_deficit(args, out) -> int:
    try:
        f = HarmonicMixture.parse(args.mixture)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not f.weights:
        raise UsageError("mixture has no positive weight")
    hint = parse_hint(args.at_zero) if args.at_zero else None
    rho = None
    if args.rho is not None:
        vals = parse_rho(args.rho)
        if len(vals) != 1:
            raise UsageError("deficit takes a single --rho")
        rho = vals[0]
    if rho is None and hint is None:
        raise UsageError("give --rho or --at-zero")
    try:
        rep = deficit(f, args.d, rho, hint)
        st = stability_constant(args.d, rho, hint)
    except AmbiguousAtZero as exc:
        out.write(f"AMBIGUOUS: {exc}\n")
        return EXIT_FAIL
    payload = {
        "d": args.d,
        "rho": st.rho,
        "mixture": f.weights,
        "deficit": rep.deficit,
        "distance_sq": rep.distance_sq,
        "lower": rep.lower,
        "upper": rep.upper,
        "C_d": rep.sharp,
        "S_d": rep.stability,
        "maximiser_degrees": sorted(st.maximiser_degrees),
        "equality_degrees": sorted(st.equality_degrees),
        "touches_maximisers": rep.touches_maximisers,
        "touches_equality": rep.touches_equality,
    }
    if args.format == "json":
        json.dump(payload, out, indent=1)
        out.write("\n")
    else:
        for key, val in payload.items():
            if isinstance(val, float):
                val = fmt_real(val)
            elif key == "mixture":
                val = " ".join(f"{k}={fmt_real(w)}" for k, w in val.items())
            elif isinstance(val, list):
                val = fmt_degrees(val)
            out.write(f"{key},{val}\n")
    return EXIT_OK


def cmd_zeros(args, out) -> int:
    try:
        order = bessel.Order.of(args.order)
    except (ValueError, bessel.BesselDomainError) as exc:
        raise UsageError(str(exc)) from None
    if not args.x_max > 0:
        raise UsageError("--x-max must be > 0")
    table = bessel.zeros_up_to(order, args.x_max)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("order", "k", "zero", "residual"))
    for twice, k, z, r in table.csv_rows():
        w.writerow((str(bessel.Order(twice)), k, fmt_real(z), fmt_real(r)))
    return EXIT_OK


def cmd_probe(args, out) -> int:
    kind = args.kind
    at = args.at
    try:
        at_val = ZeroHint.parse(at) if not _is_number(at) else float(at)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if kind == "origin":
        payload = {"d": args.d, "lambda0_origin_slope": analysis.lambda0_origin_slope(args.d)}
    else:
        fn = {"C": analysis.probe_C_kink, "S-jump": analysis.probe_S_jump, "S-kink": analysis.probe_S_kink_at_Jnu2}[kind]
        try:
            p = fn(args.d, at_val)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        payload = {
            "d": args.d,
            "kind": kind,
            "location": p.location,
            "left_slope": p.left_slope,
            "right_slope": p.right_slope,
            "measured_gap": p.measured_gap,
            "predicted_gap": p.predicted_gap,
            "classification": p.classification.value,
            "extra": p.extra,
        }
    json.dump(payload, out, indent=1, default=str)
    out.write("\n")
    return EXIT_OK


def _is_number(text: str) -> bool:
    try:
        float(text)
    except (TypeError, ValueError):
        return False
    return True


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ahsharp", description="Sharp and stability constants of the ball extension estimate.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="C_d, S_d, cases and degree sets on a rho grid")
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--rho", help="start:stop:step or comma list")
    c.add_argument("--at-zero", action="append", default=[], metavar="ROLE:INDEX", help="nu:k, nu+m:k or jfrak:k")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.set_defaults(func=cmd_constants)

    v = sub.add_parser("verify", help="run the self-verification suite, JSON report")
    v.add_argument("--d", dest="d_list", type=int, action="append", help="dimension (repeatable)")
    v.add_argument("--quick", action="store_true")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--perturb", metavar="K:FACTOR", help="scale Lambda_K by FACTOR (self-test; should fail)")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("deficit", help="deficit and sandwich bounds for a mixture k=weight ...")
    f.add_argument("--d", type=int, required=True)
    f.add_argument("--rho")
    f.add_argument("--at-zero", metavar="ROLE:INDEX")
    f.add_argument("--format", choices=("csv", "json"), default="csv")
    f.add_argument("mixture", nargs="+", metavar="k=weight")
    f.set_defaults(func=cmd_deficit)

    z = sub.add_parser("zeros", help="positive zeros of J_order up to --x-max")
    z.add_argument("--order", type=float, required=True)
    z.add_argument("--x-max", type=float, default=50.0)
    z.set_defaults(func=cmd_zeros)

    r = sub.add_parser("probe", help="regularity probes")
    r.add_argument("kind", choices=("C", "S-jump", "S-kink", "origin"))
    r.add_argument("--d", type=int, required=True)
    r.add_argument("--at", default="nu:1", help="zero designator or plain rho")
    r.set_defaults(func=cmd_probe)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if getattr(args, "d", None) is not None and args.d < 2:
            raise UsageError("--d must be >= 2")
        return args.func(args, out)
    except UsageError as exc:
        print(f"ahsharp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
