# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Mirrors :mod:`morphqec._fallback` exactly."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t, int32_t

cnp.import_array()


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int _ctz(uint64_t v) noexcept nogil:
    return __builtin_ctzll(v)


def weight_histogram(const uint64_t[:] syn_cols, const uint64_t[:] log_cols,
                     uint64_t syn0=0, uint64_t log0=0):
    """Histogram of all 2**m patterns by (weight, status).

    status 0: nonzero syndrome; 1: zero syndrome, trivial logical class;
    2: zero syndrome, nontrivial logical class.
    """
    cdef Py_ssize_t m = syn_cols.shape[0]
    if log_cols.shape[0] != m:
        raise ValueError("column arrays differ in length")
    if m > 40:
        raise ValueError("refusing to enumerate more than 2**40 patterns")
    out_np = np.zeros((m + 1, 3), dtype=np.int64)
    cdef int64_t[:, :] out = out_np
    cdef uint64_t syn = syn0, log = log0
    cdef uint64_t i, total = (<uint64_t>1) << m, gray = 0
    cdef int w = 0, j
    with nogil:
        out[0, 0 if syn else (2 if log else 1)] += 1
        for i in range(1, total):
            j = _ctz(i)
            gray ^= (<uint64_t>1) << j
            syn ^= syn_cols[j]
            log ^= log_cols[j]
            if (gray >> j) & 1:
                w += 1
            else:
                w -= 1
            if syn:
                out[w, 0] += 1
            elif log:
                out[w, 2] += 1
            else:
                out[w, 1] += 1
    return out_np


def sparse_parity(const int32_t[:] indptr, const int32_t[:] indices,
                  const uint8_t[:, :] errors):
    """Per-shot parity of each sparse row: out[s, r] = xor_{q in row r} errors[s, q]."""
    cdef Py_ssize_t shots = errors.shape[0], nrows = indptr.shape[0] - 1
    out_np = np.zeros((shots, nrows), dtype=np.uint8)
    cdef uint8_t[:, :] out = out_np
    cdef Py_ssize_t s, r, k
    cdef uint8_t acc
    with nogil:
        for s in range(shots):
            for r in range(nrows):
                acc = 0
                for k in range(indptr[r], indptr[r + 1]):
                    acc ^= errors[s, indices[k]]
                out[s, r] = acc & 1
    return out_np
