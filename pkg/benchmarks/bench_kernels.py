"""Time the compiled and numpy gate kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat R]

Prints microseconds per call for each backend and the speedup, plus one
full forward pass of the default network for a batch of states.
"""

import argparse
import timeit

import numpy as np

from qdm import kernels
from qdm.circuit import run_buffer
from qdm.gates import CNOT, X, Y, rotation
from qdm.qunet import build_qunet


def _state(batch, n, seed=0):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=(batch, 1 << n)) + 1j * rng.normal(size=(batch, 1 << n))
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


def workloads():
    u1 = rotation(X, 0.3)
    u2 = np.kron(rotation(Y, 0.2), rotation(X, 0.7)) @ CNOT
    rows = np.ascontiguousarray(np.broadcast_to(u1, (64, 2, 2)))
    for n, batch in ((8, 64), (12, 8), (16, 1)):
        psi = _state(batch, n)
        t = n // 2
        yield f"1q     n={n:2d} B={batch:2d}", lambda psi=psi, n=n, t=t: kernels.apply_1q(psi, u1, n, t)
        yield f"2q     n={n:2d} B={batch:2d}", lambda psi=psi, n=n, t=t: kernels.apply_2q(psi, u2, n, t, 0)
        yield f"cnot   n={n:2d} B={batch:2d}", lambda psi=psi, n=n, t=t: kernels.apply_cnot(psi, n, 0, t)
        if batch == 64:
            yield f"1q-row n={n:2d} B={batch:2d}", lambda psi=psi, n=n, t=t: kernels.apply_1q_rows(psi, rows, n, t)
    circuit, desc = build_qunet(8)
    params = np.random.default_rng(1).uniform(-1, 1, desc.param_count)
    psi = _state(64, 8)
    yield "network forward n=8 B=64", lambda: run_buffer(circuit, psi, params)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    results = {}
    for name in backends:
        kernels.set_backend(name)
        for label, fn in workloads():
            number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
            best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            results.setdefault(label, {})[name] = best * 1e6
    print(f"{'workload':28s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for label, times in results.items():
        line = f"{label:28s}" + "".join(f"{times[b]:12.1f}" for b in backends)
        if len(backends) == 2:
            line += f"{times['python'] / times['cython']:11.1f}x"
        print(line)
    kernels.set_backend(backends[0])


if __name__ == "__main__":
    main()
