import numpy as np
import pytest

from morphqec import _fallback, kernels


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("m", [1, 5, 17, 20])
def test_weight_histogram_matches_fallback(rng, m):
    syn = rng.integers(0, 2 ** 12, m).astype(np.uint64)
    log = rng.integers(0, 4, m).astype(np.uint64)
    a = kernels.weight_histogram(syn, log, 3, 1)
    b = _fallback.weight_histogram(syn, log, 3, 1)
    assert np.array_equal(a, b)
    assert a.sum() == 2 ** m


def test_weight_histogram_oracle(rng):
    m = 8
    syn = rng.integers(0, 8, m).astype(np.uint64)
    log = rng.integers(0, 2, m).astype(np.uint64)
    want = np.zeros((m + 1, 3), dtype=np.int64)
    for s in range(1 << m):
        sy = lg = 0
        for i in range(m):
            if (s >> i) & 1:
                sy ^= int(syn[i])
                lg ^= int(log[i])
        want[bin(s).count("1"), 0 if sy else (2 if lg else 1)] += 1
    assert np.array_equal(kernels.weight_histogram(syn, log), want)


def test_sparse_parity_matches_dense(rng):
    n, rows = 30, 12
    H = (rng.random((rows, n)) < 0.2).astype(np.uint8)
    ptr = np.zeros(rows + 1, dtype=np.int32)
    ptr[1:] = np.cumsum(H.sum(axis=1))
    idx = np.nonzero(H)[1].astype(np.int32)
    E = (rng.random((50, n)) < 0.3).astype(np.uint8)
    want = (E.astype(int) @ H.T.astype(int)) % 2
    assert np.array_equal(kernels.sparse_parity(ptr, idx, E), want)
    assert np.array_equal(_fallback.sparse_parity(ptr, idx, E), want)
