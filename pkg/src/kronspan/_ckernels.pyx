# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular elimination kernels; same API as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.uint64_t u64

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"


cdef inline u64 mulmod(u64 a, u64 b, u64 p) nogil:
    return <u64>((<u128>a * <u128>b) % p)


cdef u64 invmod(u64 a, u64 p) nogil:
    cdef long long t = 0, newt = 1, q, tmp
    cdef long long r = <long long>p, newr = <long long>a
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += <long long>p
    return <u64>t


cdef Py_ssize_t _rref(u64[:, ::1] a, u64 p, Py_ssize_t[::1] pivots, bint full) nogil:
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv, start
    cdef u64 inv, f, tmp, negf
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(n):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        inv = invmod(a[r, c], p)
        for j in range(c, n):
            a[r, j] = mulmod(a[r, j], inv, p)
        start = 0 if full else r + 1
        for i in range(start, m):
            if i == r:
                continue
            f = a[i, c]
            if f == 0:
                continue
            negf = p - f
            for j in range(c, n):
                if a[r, j] != 0:
                    a[i, j] = <u64>((<u128>a[i, j] + <u128>negf * <u128>a[r, j]) % p)
        pivots[r] = c
        r += 1
    return r


def _as_array(rows, u64 p):
    arr = np.array([[int(x) % p for x in row] for row in rows], dtype=np.uint64)
    return np.ascontiguousarray(arr.reshape(len(rows), -1))


def rref_mod_p(rows, p):
    if len(rows) == 0:
        return [], []
    cdef u64 pp = p
    a = _as_array(rows, pp)
    piv = np.zeros(min(a.shape[0], a.shape[1]) + 1, dtype=np.intp)
    cdef Py_ssize_t r = _rref(a, pp, piv, True)
    return [[int(x) for x in a[i]] for i in range(r)], [int(c) for c in piv[:r]]


def rank_mod_p(rows, p):
    if len(rows) == 0:
        return 0
    cdef u64 pp = p
    a = _as_array(rows, pp)
    piv = np.zeros(min(a.shape[0], a.shape[1]) + 1, dtype=np.intp)
    return int(_rref(a, pp, piv, False))


def reduce_row_mod_p(basis, pivots, row, p):
    cdef u64 pp = p
    cdef Py_ssize_t t, j, n = len(row), c
    cdef u64 f, negf
    v_arr = np.array([int(x) % pp for x in row], dtype=np.uint64)
    cdef u64[::1] v = v_arr
    cdef u64[::1] b
    for t in range(len(pivots)):
        c = pivots[t]
        f = v[c]
        if f == 0:
            continue
        b = np.asarray(basis[t], dtype=np.uint64)
        negf = pp - f
        for j in range(n):
            if b[j] != 0:
                v[j] = <u64>((<u128>v[j] + <u128>negf * <u128>b[j]) % pp)
    return [int(x) for x in v_arr]
