"""Benchmark the compiled kernels against the NumPy fallback.

Run with:  python -m covspectra.bench [--p 200] [--count 1000000] [--repeat 3]

Times the two backend kernels (normal generation, Jacobi eigensolve) plus a
full Monte Carlo trial under each available backend. Covariance formation is
shared BLAS code and not part of the comparison.
"""

import argparse
import time

from covspectra._kernels import _pykernels
from covspectra.wishart import sample_covariance


def _load_backends():
    backends = [("python", _pykernels)]
    try:
        from covspectra._kernels import _cykernels
        backends.insert(0, ("cython", _cykernels))
    except ImportError:
        pass
    return backends


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _full_trial(mod, p, n):
    z = mod.normals(7, 0, 42, n * p).reshape(n, p)
    S = sample_covariance(z)
    return mod.jacobi_eigenvalues(S, 100, 1e-12)[0]


def run(p: int, count: int, repeat: int) -> None:
    n = 10 * p
    backends = _load_backends()
    if len(backends) == 1:
        print("note: compiled backend unavailable; timing the fallback only")

    # one fixed matrix so both backends solve the identical problem
    z = _pykernels.normals(7, 0, 42, n * p).reshape(n, p)
    S = sample_covariance(z)

    kernels = [
        (f"normals[{count}]", lambda mod: mod.normals(7, 0, 1, count)),
        (f"jacobi[{p}x{p}]", lambda mod: mod.jacobi_eigenvalues(S, 100, 1e-12)),
        (f"full trial[p={p}]", lambda mod: _full_trial(mod, p, n)),
    ]

    print(f"{'kernel':<22}" + "".join(f"{name + ' (s)':>16}" for name, _ in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    for label, fn in kernels:
        times = [_time(lambda m=mod: fn(m), repeat) for _, mod in backends]
        line = f"{label:<22}" + "".join(f"{t:>16.6f}" for t in times)
        if len(times) == 2 and times[0] > 0:
            line += f"   {times[1] / times[0]:7.1f}x"
        print(line)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=int, default=200)
    parser.add_argument("--count", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    run(args.p, args.count, args.repeat)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
