"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json]

Times ``collapse`` on wide arrays and ``sign_enum`` on tall ones, then an
end-to-end exact all-sup norm, with each backend, and checks that values agree.
"""

import argparse
import json
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from hlineq import kernels

CASES = [
    ("collapse", (256, 4096), 2.0),
    ("collapse", (256, 4096), 12 / 5),
    ("collapse", (4096, 8), math.inf),
    ("sign_enum", (14, 8), math.inf),
    ("sign_enum", (16, 16), 1.0),
    ("sign_enum", (18, 4), 2.0),
]


def bench(repeat):
    rng = np.random.default_rng(0)
    backends = kernels.backends()
    rows = []
    for kind, shape, q in CASES:
        a = np.ascontiguousarray(rng.standard_normal(shape))
        entry = {"kernel": kind, "shape": list(shape), "q": q if math.isfinite(q) else "inf"}
        values = {}
        for name, (collapse, sign_enum) in backends.items():
            fn = collapse if kind == "collapse" else sign_enum
            out = fn(a, q)
            values[name] = out if kind == "collapse" else out[0]
            entry[f"{name}_s"] = min(timeit.repeat(lambda: fn(a, q), number=1, repeat=repeat))
        if "cython" in values:
            ref = np.asarray(values["python"], dtype=float)
            entry["max_rel_diff"] = float(np.max(np.abs(np.asarray(values["cython"]) - ref) / np.maximum(np.abs(ref), 1e-300)))
            entry["speedup"] = entry["python_s"] / entry["cython_s"]
        rows.append(entry)
    return rows


def end_to_end(repeat):
    """Exact trilinear all-sup norm, run once per backend in a fresh interpreter."""
    code = ("import timeit;from hlineq.norms import brute_force_norm;from hlineq.tensor import random_gaussian;"
            "t=random_gaussian(3,7,1);"
            f"print(min(timeit.repeat(lambda: brute_force_norm(t,['inf']*3),number=1,repeat={repeat})))")
    out = {}
    for name, env in (("cython", {}), ("python", {"HLINEQ_PURE": "1"})):
        if name == "cython" and "cython" not in kernels.backends():
            continue
        res = subprocess.run([sys.executable, "-c", code], env={**os.environ, **env},
                             capture_output=True, text=True, check=True)
        out[f"{name}_s"] = float(res.stdout)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    rows = bench(args.repeat)
    e2e = end_to_end(args.repeat)
    if args.json:
        print(json.dumps({"kernels": rows, "exact_norm_m3_n7": e2e}, indent=2))
        return
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<10} {'shape':<12} {'q':>6} {'python ms':>10} {'cython ms':>10} {'speedup':>8} {'rel diff':>9}")
    for r in rows:
        cy = r.get("cython_s")
        print(f"{r['kernel']:<10} {str(tuple(r['shape'])):<12} {str(r['q'])[:6]:>6} {1e3 * r['python_s']:>10.2f} "
              f"{(1e3 * cy if cy else float('nan')):>10.2f} {r.get('speedup', float('nan')):>8.1f} "
              f"{r.get('max_rel_diff', float('nan')):>9.1e}")
    print("exact all-sup norm, m=3 n=7: " + ", ".join(f"{k[:-2]} {1e3 * v:.1f} ms" for k, v in e2e.items()))


if __name__ == "__main__":
    main()
