"""NumPy fallback for the compiled scans in ``_kernels.pyx``."""

import numpy as np


def eventually(a):
    a = np.asarray(a, dtype=np.uint8)
    return np.logical_or.accumulate(a[::-1])[::-1].astype(np.uint8)


def always(a):
    a = np.asarray(a, dtype=np.uint8)
    return np.logical_and.accumulate(a[::-1])[::-1].astype(np.uint8)


def until(p, q, weak):
    p = np.asarray(p, dtype=bool)
    q = np.asarray(q, dtype=bool)
    n = len(p)
    out = np.zeros(n, dtype=np.uint8)
    acc = bool(weak)
    for i in range(n - 1, -1, -1):
        if q[i]:
            acc = True
        elif not p[i]:
            acc = False
        out[i] = acc
    return out


def next_op(a, prejump):
    a = np.asarray(a, dtype=bool)
    pj = np.asarray(prejump, dtype=bool)
    out = np.zeros(len(a), dtype=np.uint8)
    if len(a) > 1:
        out[:-1] = pj[:-1] & a[1:]
    return out
