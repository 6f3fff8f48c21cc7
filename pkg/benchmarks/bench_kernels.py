"""Compare the compiled and numpy kernel backends.

Run with ``python3 benchmarks/bench_kernels.py [--states N] [--repeat R]``.
Reports the best wall time per call of ``correlation_core`` on random
4-qubit states, a full 91 x 91 scan of Delta M, and the largest
disagreement between the two backends.
"""
import argparse
import importlib
import time

import numpy as np

from multicorr import _backend, _pykernels
from multicorr.families import make_gabcd
from multicorr.povm import scan_deltas
from multicorr.state import random_amplitudes


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def with_backend(module, fn):
    names = ("jacobi_eigh", "singular_values", "concurrence_batch", "correlation_core")
    saved = {name: getattr(_backend, name) for name in names}
    try:
        for name in names:
            setattr(_backend, name, getattr(module, name))
        return fn()
    finally:
        for name, value in saved.items():
            setattr(_backend, name, value)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--states", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    try:
        compiled = importlib.import_module("multicorr._ckernels")
    except ImportError:
        print("compiled extension not built; only the numpy backend is available")
        compiled = None
    backends = [("python", _pykernels)] + ([("cython", compiled)] if compiled else [])

    amps = random_amplitudes(4, args.states, 1)
    state = make_gabcd(1.0, 0.5, 1.0, 0.5)
    results = {}
    print(f"{'backend':<8} {'core us/state':>14} {'91x91 scan s':>13}")
    for name, mod in backends:
        core = best_of(lambda: mod.correlation_core(amps, 4), args.repeat)
        scan = best_of(lambda: with_backend(mod, lambda: scan_deltas(state, 0, workers=1)), args.repeat)
        results[name] = mod.correlation_core(amps, 4)
        print(f"{name:<8} {1e6 * core / args.states:14.2f} {scan:13.3f}")
    if compiled:
        tau_gap = np.abs(results["python"][0] - results["cython"][0]).max()
        c2_gap = np.abs(results["python"][1] - results["cython"][1]).max()
        print(f"max backend difference: tau {tau_gap:.1e}, C^2 {c2_gap:.1e}")


if __name__ == "__main__":
    main()
