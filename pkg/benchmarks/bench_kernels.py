"""Timing comparison of the compiled and pure-python product kernels.

Runs two layers:
  * kernel microbenchmark: both implementations imported side by side,
    same nonzero lists, best-of-``--repeat`` wall time plus a parity check
    on the output coefficients and reported tails;
  * end-to-end: one conjugation step (remainder + transformed curvature)
    timed in a subprocess per backend, selected with LIE_KAM_BACKEND.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--terms K]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from lie_kam import _convpy
from lie_kam import series as fts
from lie_kam.series import DEFAULT_DOMAIN, TruncationSpec

try:
    from lie_kam import _convkernel
except ImportError:
    _convkernel = None

END_TO_END = r"""
import time
import lie_kam.backend as bk
from lie_kam import normalform as nf
from lie_kam import operators as ops
from lie_kam import presets as pr

params = pr.default_params()
dio = pr.default_diophantine(params)
v = pr.reduced_drive_series(1e-3)
q = ops.generic_curvature(params, pr.DEFAULT_TRUNC)
t0 = time.perf_counter()
res = nf.compute_v_star(v, q, params, dio=dio)
dt = time.perf_counter() - t0
print(f"{bk.BACKEND_NAME} {dt:.3f} {res.series_terms_used}")
"""


def nonzero_lists(series):
    idx = np.nonzero(series.coeffs)
    tr = series.trunc
    return (idx[0].astype(np.int64) - tr.l_t,
            idx[1].astype(np.int64) - tr.l_theta,
            idx[2].astype(np.int64),
            np.ascontiguousarray(series.coeffs[idx]))


def bench_kernel(repeat, terms):
    trunc = TruncationSpec(n_x=6, l_theta=8, l_t=8, pad=2)
    rng = np.random.default_rng(0)
    a = fts.random_real_series(trunc, 2.0, rng, n_terms=terms)
    b = fts.random_real_series(trunc, 2.0, rng, n_terms=terms)
    la, ma, na, va = nonzero_lists(a)
    lb, mb, nb, vb = nonzero_lists(b)
    xpow = DEFAULT_DOMAIN.x_half ** np.arange(2 * trunc.n_x + 1,
                                              dtype=np.float64)
    args = (la, ma, na, va, lb, mb, nb, vb,
            trunc.l_t, trunc.l_theta, trunc.n_x, xpow)

    impls = [("python", _convpy.convolve_nonzeros)]
    if _convkernel is not None:
        impls.append(("cython", _convkernel.convolve_nonzeros))

    print(f"kernel microbenchmark: {len(va)} x {len(vb)} nonzero terms, "
          f"best of {repeat}")
    results = {}
    for name, fn in impls:
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            out, tail = fn(*args)
            best = min(best, time.perf_counter() - t0)
        results[name] = (best, out, tail)
        print(f"  {name:7s} {best * 1e3:8.3f} ms")
    if len(results) == 2:
        py_t, py_out, py_tail = results["python"]
        cy_t, cy_out, cy_tail = results["cython"]
        diff = float(np.max(np.abs(py_out - cy_out)))
        print(f"  speedup {py_t / cy_t:.1f}x, parity: max coeff diff "
              f"{diff:.3e}, tail diff {abs(py_tail - cy_tail):.3e}")
    else:
        print("  compiled kernel not importable; python fallback only")


def bench_end_to_end():
    print("end-to-end conjugation step (compute_v_star, eps = 1e-3):")
    for backend in ("cython", "python"):
        if backend == "cython" and _convkernel is None:
            print("  cython   skipped (extension not built)")
            continue
        env = dict(os.environ, LIE_KAM_BACKEND=backend)
        proc = subprocess.run([sys.executable, "-c", END_TO_END], env=env,
                              capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"  {backend:7s} failed:\n{proc.stderr}")
            continue
        name, dt, terms = proc.stdout.split()
        print(f"  {name:7s} {float(dt) * 1e3:8.1f} ms "
              f"({terms} series terms)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7,
                    help="repetitions per kernel timing (default 7)")
    ap.add_argument("--terms", type=int, default=400,
                    help="random nonzero terms per factor (default 400)")
    args = ap.parse_args()
    bench_kernel(args.repeat, args.terms)
    bench_end_to_end()


if __name__ == "__main__":
    main()
