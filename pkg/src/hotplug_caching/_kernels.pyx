# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled byte kernels for GF(2^m) vector arithmetic (m <= 8)."""


def xor_into(unsigned char[::1] dst, const unsigned char[::1] src):
    """dst[i] ^= src[i] for all i."""
    cdef Py_ssize_t i, n = dst.shape[0]
    if src.shape[0] != n:
        raise ValueError("length mismatch")
    for i in range(n):
        dst[i] ^= src[i]


def axpy_into(unsigned char[::1] dst, const unsigned char[::1] table,
              const unsigned char[::1] src):
    """dst[i] ^= table[src[i]] for all i, table being a 256-entry scaling row."""
    cdef Py_ssize_t i, n = dst.shape[0]
    if src.shape[0] != n:
        raise ValueError("length mismatch")
    if table.shape[0] != 256:
        raise ValueError("table must have 256 entries")
    for i in range(n):
        dst[i] ^= table[src[i]]
