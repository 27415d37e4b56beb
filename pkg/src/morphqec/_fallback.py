"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
from __future__ import annotations

import numpy as np

_TABLE_BITS = 16


def _popcount8():
    t = np.zeros(256, dtype=np.int64)
    for i in range(256):
        t[i] = bin(i).count("1")
    return t


_POP8 = _popcount8()


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    out = np.zeros(a.shape, dtype=np.int64)
    for shift in range(0, 64, 8):
        out += _POP8[((a >> np.uint64(shift)) & np.uint64(0xFF)).astype(np.int64)]
    return out


def _span_table(cols: np.ndarray, start: int) -> np.ndarray:
    table = np.array([start], dtype=np.uint64)
    for c in cols:
        table = np.concatenate([table, table ^ np.uint64(c)])
    return table


def weight_histogram(syn_cols, log_cols, syn0: int = 0, log0: int = 0) -> np.ndarray:
    syn_cols = np.asarray(syn_cols, dtype=np.uint64)
    log_cols = np.asarray(log_cols, dtype=np.uint64)
    m = len(syn_cols)
    if len(log_cols) != m:
        raise ValueError("column arrays differ in length")
    if m > 40:
        raise ValueError("refusing to enumerate more than 2**40 patterns")
    lo = min(m, _TABLE_BITS)
    syn_lo = _span_table(syn_cols[:lo], 0)
    log_lo = _span_table(log_cols[:lo], 0)
    w_lo = _popcount(np.arange(1 << lo, dtype=np.uint64))
    out = np.zeros((m + 1, 3), dtype=np.int64)
    hi = m - lo
    for h in range(1 << hi):
        s = np.uint64(syn0)
        g = np.uint64(log0)
        for j in range(hi):
            if (h >> j) & 1:
                s ^= syn_cols[lo + j]
                g ^= log_cols[lo + j]
        syn = syn_lo ^ s
        log = log_lo ^ g
        w = w_lo + bin(h).count("1")
        status = np.where(syn != 0, 0, np.where(log != 0, 2, 1))
        np.add.at(out, (w, status), 1)
    return out


def sparse_parity(indptr, indices, errors) -> np.ndarray:
    errors = np.asarray(errors, dtype=np.uint8)
    nrows = len(indptr) - 1
    out = np.zeros((errors.shape[0], nrows), dtype=np.uint8)
    for r in range(nrows):
        cols = indices[indptr[r]:indptr[r + 1]]
        if len(cols):
            out[:, r] = np.bitwise_xor.reduce(errors[:, cols], axis=1)
    return out
