"""JIT vs pure-numpy kernels.

Each mode runs in its own interpreter because the switch is read at import
time.  Usage: ``python benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from ahsharp import _jit, _kernels
from ahsharp.coefficients import lambda_values
from ahsharp.bessel import eval_J
from ahsharp.cli import compute_rows

repeat = int(sys.argv[1])

def best(fn):
    fn()  # warm-up, includes compilation
    ts = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        ts.append(time.perf_counter() - t)
    return min(ts), out

xs = np.linspace(0.01, 200.0, 20000)
res = {"jit": _jit.JIT_ENABLED}
res["ladder_20k_x_8_orders"], lad = best(lambda: _kernels.ladder_many(0, 8, xs))
res["lambda_values_20k_kmax_12"], lam = best(lambda: lambda_values(2, xs, 12))
res["eval_J_scalar_2000"], _ = best(lambda: [eval_J(1.5, float(x)) for x in xs[::10]])
res["constants_grid_1500"], rows = best(lambda: compute_rows(2, [i / 100 for i in range(1, 1501)], []))
res["checksum"] = float(np.sum(lad)) + float(np.sum(lam)) + sum(r["C_d"] for r in rows)
print(json.dumps(res))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env["AHSHARP_DISABLE_JIT"] = "1" if disable else "0"
    p = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True)
    return json.loads(p.stdout)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    jit = run(False, args.repeat)
    ref = run(True, args.repeat)
    keys = [k for k in jit if k not in ("jit", "checksum")]
    print(f"{'workload':32s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for k in keys:
        print(f"{k:32s} {jit[k]:10.4f} {ref[k]:10.4f} {ref[k] / jit[k]:8.2f}")
    rel = abs(jit["checksum"] - ref["checksum"]) / abs(ref["checksum"])
    print(f"checksum relative difference: {rel:.2e} (numba active: {jit['jit']})")


if __name__ == "__main__":
    main()
