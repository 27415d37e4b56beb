"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from morphqec import _fallback, kernels


def histogram_case(m, rng):
    syn = rng.integers(0, 2 ** 14, m).astype(np.uint64)
    log = rng.integers(0, 2, m).astype(np.uint64)
    return syn, log, 0, 0


def parity_case(shots, n, rows, rng):
    H = rng.random((rows, n)) < 6 / n
    ptr = np.zeros(rows + 1, dtype=np.int32)
    ptr[1:] = np.cumsum(H.sum(axis=1))
    idx = np.nonzero(H)[1].astype(np.int32)
    err = (rng.random((shots, n)) < 0.1).astype(np.uint8)
    return ptr, idx, err


def bench(label, fast, slow, args, repeat):
    assert np.array_equal(fast(*args), slow(*args))
    tf = min(timeit.repeat(lambda: fast(*args), number=1, repeat=repeat))
    ts = min(timeit.repeat(lambda: slow(*args), number=1, repeat=repeat))
    print(f"{label:34s} {kernels.BACKEND:>7s} {tf * 1e3:10.2f} ms   python {ts * 1e3:10.2f} ms   x{ts / tf:7.1f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    rng = np.random.default_rng(0)
    if kernels.BACKEND != "cython":
        print("compiled extension not available; timings compare the fallback with itself")
    for m in (10, 15, 18):
        bench(f"weight_histogram m={m}", kernels.weight_histogram, _fallback.weight_histogram,
              histogram_case(m, rng), a.repeat)
    for shots, n in ((1000, 432), (2000, 1296)):
        bench(f"sparse_parity {shots}x{n}", kernels.sparse_parity, _fallback.sparse_parity,
              parity_case(shots, n, n // 2, rng), a.repeat)


if __name__ == "__main__":
    main()
