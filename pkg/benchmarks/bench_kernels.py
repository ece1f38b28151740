"""Compiled vs NumPy kernels on the hot paths.

    python benchmarks/bench_kernels.py [--m 20000] [--repeat 5]

Prints the best-of-``repeat`` wall time per kernel and backend, and the
largest disagreement between the backends.
"""
import argparse
import math
import timeit

import numpy as np

from slcurv import _kernels_py

try:
    from slcurv import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def make_inputs(m, n, seed=0):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(m, n, n)))
    lam = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=(m, n)))
    stack = np.einsum("mij,mj,mkj->mik", q, lam, q)
    theta = rng.uniform(0.1, n * math.pi / 2 - 0.1, size=m)
    return stack, np.sort(lam, axis=1), theta


def _values(out):
    """Eigenvalues or radii as one flat array, whatever the kernel returned."""
    if isinstance(out, list):
        return np.concatenate([np.ravel(o[0] if isinstance(o, tuple) else o) for o in out])
    return np.ravel(out)


def cases(stack, lam, theta):
    k = min(2000, len(theta))
    return {
        "jacobi_eigh_batch": lambda mod: mod.jacobi_eigh_batch(stack),
        "invert_angle_batch": lambda mod: mod.invert_angle_batch(lam, theta),
        "sl_angle_batch": lambda mod: mod.sl_angle_batch(lam, theta / len(lam[0])),
        f"invert_angle x{k} (scalar calls)": lambda mod: [mod.invert_angle(lam[i], theta[i]) for i in range(k)],
        f"jacobi_eigh x{k} (scalar calls)": lambda mod: [mod.jacobi_eigh(stack[i]) for i in range(k)],
        f"eigvalsh x{k} (scalar calls)": lambda mod: [mod.eigvalsh(stack[i]) for i in range(k)],
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=20_000, help="batch size")
    ap.add_argument("--n", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    if _kernels_c is None:
        print("compiled extension not built; timing the NumPy backend only")
    print(f"{'kernel':38s} {'n':>2s} " + " ".join(f"{b:>12s}" for b, _ in backends) + "   speedup  max diff")
    for n in args.n:
        stack, lam, theta = make_inputs(args.m, n)
        for name, fn in cases(stack, lam, theta).items():
            times, outs = [], []
            for _, mod in backends:
                times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
                outs.append(_values(fn(mod)))
            cols = " ".join(f"{t * 1e3:10.2f}ms" for t in times)
            if len(times) == 2:
                diff = float(np.max(np.abs(outs[0] - outs[1])))
                print(f"{name:38s} {n:2d} {cols} {times[0] / times[1]:8.1f}x  {diff:.1e}")
            else:
                print(f"{name:38s} {n:2d} {cols}")


if __name__ == "__main__":
    main()
