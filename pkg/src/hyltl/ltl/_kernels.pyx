# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Backward scans over truth vectors ordered by t + j."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def eventually(const unsigned char[::1] a):
    cdef Py_ssize_t n = a.shape[0], i
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] r = out
    cdef unsigned char acc = 0
    for i in range(n - 1, -1, -1):
        if a[i]:
            acc = 1
        r[i] = acc
    return out


def always(const unsigned char[::1] a):
    cdef Py_ssize_t n = a.shape[0], i
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] r = out
    cdef unsigned char acc = 1
    for i in range(n - 1, -1, -1):
        if not a[i]:
            acc = 0
        r[i] = acc
    return out


def until(const unsigned char[::1] p, const unsigned char[::1] q, bint weak):
    cdef Py_ssize_t n = p.shape[0], i
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] r = out
    # value just past the last sample
    cdef unsigned char acc = 1 if weak else 0
    for i in range(n - 1, -1, -1):
        if q[i]:
            acc = 1
        elif not p[i]:
            acc = 0
        r[i] = acc
    return out


def next_op(const unsigned char[::1] a, const unsigned char[::1] prejump):
    cdef Py_ssize_t n = a.shape[0], i
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] r = out
    # inputs are 0/1, so a bitwise and avoids a data-dependent branch
    for i in range(n - 1):
        r[i] = (prejump[i] != 0) & (a[i + 1] != 0)
    return out
