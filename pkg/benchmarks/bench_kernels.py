"""Compare the compiled and pure-Python special-function kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is timed with :mod:`timeit` on both backends using identical
arguments, and the per-call times and speed-up are tabulated.  An end-to-end
timing of one capacity evaluation is taken in a subprocess per backend, since
the backend is fixed at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from gkrelay.specfun import _pykernels

try:
    from gkrelay.specfun import _ckernels
except ImportError:
    _ckernels = None

_RNG = np.random.default_rng(0)
_TAU = np.linspace(0.0, 40.0, 400)
_LOG_PHI = -0.5 * _TAU + 1j * _RNG.uniform(-3, 3, _TAU.size)
_LOGZ = np.linspace(-3.0, 3.0, 8)
_Z = 0.3 + 1j * np.linspace(-20.0, 20.0, 400)

CASES = [
    ("loggamma", lambda k: k.loggamma(2.7 + 4.1j)),
    ("loggamma_array[400]", lambda k: k.loggamma_array(_Z)),
    ("expint_e1", lambda k: k.expint_e1(0.37)),
    ("bessel_k", lambda k: k.bessel_k(1.3, 2.2)),
    ("hyperu_integral", lambda k: k.hyperu_integral(2.5, 0.3, 0.8)),
    ("hyperu_asymptotic", lambda k: k.hyperu_asymptotic(2.5, 0.3, 45.0)),
    ("hyp_series 2F1", lambda k: k.hyp_series((0.5, 1.5), (2.5,), 0.3, 1e-15, 10000)),
    ("mb_sum[400x8]", lambda k: k.mb_sum(_LOG_PHI, _TAU, _LOGZ, 0.5)),
]

END_TO_END = ("import time; from gkrelay.capacity import ergodic_capacity, table1_scenario; "
              "from gkrelay.specfun import BACKEND; scn = table1_scenario(0.3, 10.0); "
              "t = time.perf_counter(); ergodic_capacity(scn); "
              "print(BACKEND, time.perf_counter() - t)")


def per_call(func, repeat):
    timer = timeit.Timer(func)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def end_to_end(pure_python):
    env = dict(os.environ)
    env.pop("GKRELAY_PURE_PYTHON", None)
    if pure_python:
        env["GKRELAY_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                         text=True, check=True)
    backend, seconds = out.stdout.split()
    return backend, float(seconds)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timeit repeats (best is kept)")
    parser.add_argument("--skip-end-to-end", action="store_true")
    args = parser.parse_args(argv)

    if _ckernels is None:
        print("compiled extension not built; only the pure-Python kernels are available")
    print("%-22s %14s %14s %9s" % ("kernel", "python [us]", "cython [us]", "speed-up"))
    for name, call in CASES:
        py = per_call(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print("%-22s %14.2f %14s %9s" % (name, py * 1e6, "-", "-"))
            continue
        cy = per_call(lambda: call(_ckernels), args.repeat)
        print("%-22s %14.2f %14.2f %8.1fx" % (name, py * 1e6, cy * 1e6, py / cy))

    if not args.skip_end_to_end:
        print("\nergodic_capacity, Table-1 cell d_j = 0.3, w = 10 dB (first call, fresh process)")
        for pure in (True, False):
            backend, seconds = end_to_end(pure)
            print("  %-8s %.3f s" % (backend, seconds))


if __name__ == "__main__":
    main()
