# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""
from libc.stdlib cimport malloc, free
import numpy as np


cdef inline Py_ssize_t _imin(Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    return a if a < b else b


cdef Py_UCS4* _codepoints(str s, Py_ssize_t* n) except NULL:
    cdef Py_ssize_t i = 0
    cdef Py_UCS4 ch
    cdef Py_UCS4* buf = <Py_UCS4*> malloc((len(s) + 1) * sizeof(Py_UCS4))
    if buf == NULL:
        raise MemoryError()
    for ch in s:
        buf[i] = ch
        i += 1
    n[0] = i
    return buf


cdef Py_ssize_t _edit(Py_UCS4* a, Py_ssize_t la, Py_UCS4* b, Py_ssize_t lb,
                      Py_ssize_t sub_cost) except -1:
    cdef Py_ssize_t i, j, best
    cdef Py_ssize_t* prev
    cdef Py_ssize_t* cur
    cdef Py_ssize_t* tmp
    if lb == 0:
        return la
    prev = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cur = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()
    with nogil:
        for j in range(lb + 1):
            prev[j] = j
        for i in range(1, la + 1):
            cur[0] = i
            for j in range(1, lb + 1):
                if a[i - 1] == b[j - 1]:
                    best = prev[j - 1]
                else:
                    best = prev[j - 1] + sub_cost
                best = _imin(best, prev[j] + 1)
                best = _imin(best, cur[j - 1] + 1)
                cur[j] = best
            tmp = prev
            prev = cur
            cur = tmp
        best = prev[lb]
    free(prev)
    free(cur)
    return best


cdef Py_ssize_t _distance(str a, str b, Py_ssize_t sub_cost) except -1:
    cdef Py_ssize_t la, lb, d
    cdef Py_UCS4* ca
    cdef Py_UCS4* cb
    if len(a) < len(b):
        a, b = b, a
    ca = _codepoints(a, &la)
    try:
        cb = _codepoints(b, &lb)
    except MemoryError:
        free(ca)
        raise
    try:
        d = _edit(ca, la, cb, lb, sub_cost)
    finally:
        free(ca)
        free(cb)
    return d


def indel_distance(str a, str b):
    return _distance(a, b, 2)


def levenshtein_distance(str a, str b):
    return _distance(a, b, 1)


def sequence_cost(q, seq):
    cdef double[:, ::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    cdef long long[::1] sv = np.ascontiguousarray(seq, dtype=np.int64)
    cdef Py_ssize_t nf = qv.shape[0]
    cdef Py_ssize_t t, i
    cdef double prod = 1.0
    cdef double total = 0.0
    cdef long long[::1] counts = np.zeros(nf, dtype=np.int64)
    for t in range(sv.shape[0]):
        i = sv[t]
        prod = prod * qv[i, counts[i]]
        if prod < 0.0:
            prod = 0.0
        counts[i] += 1
        total = total + prod
    return total


cdef struct _Search:
    double* q
    Py_ssize_t stride
    Py_ssize_t nf
    Py_ssize_t n
    long long* remaining
    long long* done
    long long* seq
    long long* best_seq
    double best


cdef void _dfs(_Search* s, Py_ssize_t depth, double prod, double total) noexcept nogil:
    cdef Py_ssize_t i, k
    cdef double p
    if total >= s.best:
        return
    if depth == s.n:
        s.best = total
        for k in range(s.n):
            s.best_seq[k] = s.seq[k]
        return
    for i in range(s.nf):
        if s.remaining[i] == 0:
            continue
        p = prod * s.q[i * s.stride + s.done[i]]
        if p < 0.0:
            p = 0.0
        s.remaining[i] -= 1
        s.done[i] += 1
        s.seq[depth] = i
        _dfs(s, depth + 1, p, total + p)
        s.remaining[i] += 1
        s.done[i] -= 1


def brute_force_min(q, counts):
    cdef double[:, ::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    cdef long long[::1] remaining = np.ascontiguousarray(counts, dtype=np.int64).copy()
    cdef Py_ssize_t nf = remaining.shape[0]
    cdef Py_ssize_t n = int(np.sum(remaining))
    cdef long long[::1] done = np.zeros(nf, dtype=np.int64)
    cdef long long[::1] seq = np.zeros(max(n, 1), dtype=np.int64)
    best_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] best_seq = np.zeros(max(n, 1), dtype=np.int64)
    cdef _Search s
    s.q = &qv[0, 0]
    s.stride = qv.shape[1]
    s.nf = nf
    s.n = n
    s.remaining = &remaining[0]
    s.done = &done[0]
    s.seq = &seq[0]
    s.best_seq = &best_seq[0]
    s.best = float("inf")
    with nogil:
        _dfs(&s, 0, 1.0, 0.0)
    best_arr[:] = np.asarray(best_seq)[:n]
    return s.best, best_arr
