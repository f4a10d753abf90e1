# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels: unification solver and access/region matcher."""

from libc.stdlib cimport malloc, free

DEF UNIFY = 0


cdef inline long long _find(long long[:] parent, long long x) nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def solve_unification(long long[:] parent, long long[:] pts, long long[:] kinds,
                      long long[:] lhs, long long[:] rhs):
    cdef Py_ssize_t n = parent.shape[0]
    cdef Py_ssize_t nops = kinds.shape[0]
    cdef Py_ssize_t cap = 2 * n + 16
    cdef long long *sa = <long long *> malloc(cap * sizeof(long long))
    cdef long long *sb = <long long *> malloc(cap * sizeof(long long))
    cdef Py_ssize_t top, i, x
    cdef long long a, b, ra, rb, pa, pb, r, tmp
    cdef long long merges = 0
    if sa == NULL or sb == NULL:
        free(sa)
        free(sb)
        raise MemoryError()
    try:
        for i in range(nops):
            a = lhs[i]
            b = rhs[i]
            if kinds[i] != UNIFY:
                r = _find(parent, a)
                if pts[r] == -1:
                    pts[r] = b
                    continue
                a = pts[r]
            top = 0
            sa[0] = a
            sb[0] = b
            top = 1
            while top > 0:
                top -= 1
                ra = _find(parent, sa[top])
                rb = _find(parent, sb[top])
                if ra == rb:
                    continue
                if rb < ra:
                    tmp = ra
                    ra = rb
                    rb = tmp
                parent[rb] = ra
                merges += 1
                pa = pts[ra]
                pb = pts[rb]
                if pa == -1:
                    pts[ra] = pb
                elif pb != -1:
                    # every push follows a merge, so depth never exceeds n
                    sa[top] = pa
                    sb[top] = pb
                    top += 1
        for x in range(n):
            _find(parent, x)
        for x in range(n):
            if parent[x] == x and pts[x] != -1:
                pts[x] = _find(parent, pts[x])
    finally:
        free(sa)
        free(sb)
    return merges


def match_accesses(long long[:] r_open, long long[:] r_close, long long[:] r_lo,
                   long long[:] r_hi, long long[:] r_mask, long long[:] e_seq,
                   long long[:] e_lo, long long[:] e_hi, long long[:] e_mask,
                   long long[:] out):
    cdef Py_ssize_t nreg = r_open.shape[0]
    cdef Py_ssize_t nev = e_seq.shape[0]
    cdef Py_ssize_t *active = <Py_ssize_t *> malloc((nreg + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t nact = 0, p = 0, i, j, k, r
    cdef long long s, lo, hi, m, found
    cdef long long hits = 0
    if active == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(nev):
                s = e_seq[i]
                while p < nreg and r_open[p] < s:
                    active[nact] = p
                    nact += 1
                    p += 1
                k = 0
                for j in range(nact):
                    if r_close[active[j]] > s:
                        active[k] = active[j]
                        k += 1
                nact = k
                lo = e_lo[i]
                hi = e_hi[i]
                m = e_mask[i]
                found = -1
                for j in range(nact):
                    r = active[j]
                    if (r_mask[r] & m) and r_lo[r] < hi and lo < r_hi[r]:
                        found = r
                        break
                out[i] = found
                if found >= 0:
                    hits += 1
    finally:
        free(active)
    return hits
