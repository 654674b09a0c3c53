"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--sizes 10 40 80] [--repeat 5]

Each row reports the best-of-``repeat`` wall time per call for both
backends and the speed-up. Results are also checked to agree.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from pathfinder import numerics as nm
from pathfinder.mappedbasis import BSplineBasis, eval_bspline


def _spd(n, rng):
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


def _indefinite(n, rng):
    a = rng.standard_normal((n, n))
    return a + a.T


def cases(sizes, rng):
    for n in sizes:
        spd, ind = _spd(n, rng), _indefinite(n, rng)
        b = rng.standard_normal(n)
        yield f"lu_solve n={n}", lambda a=ind, b=b: nm.lu_solve(a, b)
        yield f"cholesky n={n}", lambda a=spd: nm.cholesky(a)
        yield f"ldlt_inertia n={n}", lambda a=ind: nm.ldlt_inertia(a)
        if n <= 40:
            yield f"sym_eig n={n}", lambda a=ind: nm.sym_eig(a)[0]
    basis = BSplineBasis.uniform(3, 0.0, 1.0, 64)
    xs = np.linspace(0.0, 1.0, 500)
    yield "eval_bspline p=3 x500", lambda: np.array([eval_bspline(basis, x, 2) for x in xs])


def _result(obj):
    if isinstance(obj, nm.Factorization):
        return obj.factor
    return np.asarray(obj, dtype=float)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 40, 80])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if "compiled" not in nm.available_backends():
        print("compiled kernels not built; only the python backend is available")
        return 1
    print(f"{'case':<26}{'compiled [s]':>14}{'python [s]':>14}{'speed-up':>10}  agree")
    for name, fn in cases(args.sizes, np.random.default_rng(0)):
        times, outs = {}, {}
        for backend in ("compiled", "python"):
            nm.set_backend(backend)
            outs[backend] = _result(fn())
            number = 3 if backend == "python" else 20
            times[backend] = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
        agree = np.allclose(outs["compiled"], outs["python"], rtol=1e-10, atol=1e-12)
        print(f"{name:<26}{times['compiled']:>14.3e}{times['python']:>14.3e}"
              f"{times['python'] / times['compiled']:>9.1f}x  {agree}")
    nm.set_backend("compiled")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
