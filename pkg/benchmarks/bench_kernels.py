"""Time the hot kernels on the numba path and on the pure-numpy fallback.

The backend is fixed at import time, so each backend runs in its own
interpreter.  Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-``repeat`` wall time per kernel call and the speed ratio.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np


def _cases():
    from boundstate import _kernels as K
    from boundstate import oracle
    from boundstate.model import PotentialSpec, RadialProblem

    cs = np.linspace(0.01, 40.0, 2000)
    s = np.random.default_rng(0).uniform(0.0, 1.0, 100_000)
    pot = PotentialSpec(v1=0.3, v2=-1.0, v3=-0.5, v4=0.5, alpha=0.1)
    problem = RadialProblem(1.0, 3, 1)
    r, h, diag, weight, off2 = oracle._pencil(pot, problem, "exact", 1e-6, 150.0, 16000)
    lo = float(np.min((diag - 2.0 / h**2) / weight)) - 1.0
    idx = np.arange(4)
    return {
        "aim_delta_table (2000 c x k=30)": lambda: K.aim_delta_table(cs, 1.3, -4.0, -90.0, 0.5, 30),
        "pencil_eigenvalues (n=16000, 4 levels)": lambda: K.pencil_eigenvalues(diag, weight, off2, idx, lo, pot.asymptote),
        "sturm_count (n=16000)": lambda: K.sturm_count(diag, weight, off2, -0.5),
        "hyp2f1_terminating (n=8, 1e5 points)": lambda: K.hyp2f1_terminating(8, 20.5, 9.0, s),
    }


def _worker(repeat):
    from boundstate import _kernels as K

    out = {}
    for name, fn in _cases().items():
        fn()  # compile / warm caches
        out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(json.dumps({"numba": K.USE_NUMBA, "times": out}))


def _run(disable, repeat):
    env = dict(os.environ)
    env.pop("BOUNDSTATE_DISABLE_NUMBA", None)
    if disable:
        env["BOUNDSTATE_DISABLE_NUMBA"] = "1"
    proc = subprocess.run(
        [sys.executable, __file__, "--worker", "--repeat", str(repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.worker:
        _worker(args.repeat)
        return
    jit = _run(False, args.repeat)
    ref = _run(True, args.repeat)
    if not jit["numba"]:
        print("numba unavailable: both columns use the numpy path")
    width = max(len(k) for k in jit["times"])
    print(f"{'kernel':<{width}}  {'numba [ms]':>11}  {'numpy [ms]':>11}  {'numpy/numba':>11}")
    for name, t_jit in jit["times"].items():
        t_np = ref["times"][name]
        print(f"{name:<{width}}  {1e3 * t_jit:11.3f}  {1e3 * t_np:11.3f}  {t_np / t_jit:11.2f}")


if __name__ == "__main__":
    main()
