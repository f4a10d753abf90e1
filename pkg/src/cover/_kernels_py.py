"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``.

Both implementations must return identical results; the test-suite runs them
side by side.
"""

from __future__ import annotations

UNIFY = 0
POINTS_TO = 1


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def solve_unification(parent, pts, kinds, lhs, rhs) -> int:
    """Run Steensgaard-style unification in place.

    ``parent``/``pts`` are int64 buffers sized to the node count (``pts`` is
    -1 where a class has no pointee yet). ``kinds[i]`` is UNIFY (merge
    ``lhs[i]`` and ``rhs[i]``) or POINTS_TO (the pointee of ``lhs[i]`` is
    merged with ``rhs[i]``). Roots are always the smallest node id of their
    class. Returns the number of merges performed.
    """
    merges = 0
    stack = []

    def union(a, b):
        nonlocal merges
        stack.append((a, b))
        while stack:
            a, b = stack.pop()
            ra, rb = _find(parent, a), _find(parent, b)
            if ra == rb:
                continue
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra
            merges += 1
            pa, pb = pts[ra], pts[rb]
            if pa == -1:
                pts[ra] = pb
            elif pb != -1:
                stack.append((pa, pb))

    for i in range(len(kinds)):
        a, b = lhs[i], rhs[i]
        if kinds[i] == UNIFY:
            union(a, b)
        else:
            r = _find(parent, a)
            if pts[r] == -1:
                pts[r] = b
            else:
                union(pts[r], b)
    # canonicalise pointee ids to class roots
    for x in range(len(parent)):
        _find(parent, x)
    for x in range(len(parent)):
        if parent[x] == x and pts[x] != -1:
            pts[x] = _find(parent, pts[x])
    return merges


def match_accesses(r_open, r_close, r_lo, r_hi, r_mask, e_seq, e_lo, e_hi, e_mask, out) -> int:
    """For each memory event, store the first region that forbids it in ``out``.

    Regions are ordered by ``r_open``; a region covers events with
    ``r_open < seq < r_close`` and byte range overlapping ``[r_lo, r_hi)``
    whose access bit is set in ``r_mask`` (1 = read, 2 = write). Events must
    be sorted by ``e_seq``. ``out[i]`` is -1 when nothing matches. Returns
    the number of matched events.
    """
    nreg = len(r_open)
    active: list[int] = []
    p = 0
    hits = 0
    for i in range(len(e_seq)):
        s = e_seq[i]
        while p < nreg and r_open[p] < s:
            active.append(p)
            p += 1
        if active:
            active = [r for r in active if r_close[r] > s]
        found = -1
        lo, hi, m = e_lo[i], e_hi[i], e_mask[i]
        for r in active:
            if r_mask[r] & m and r_lo[r] < hi and lo < r_hi[r]:
                found = r
                break
        out[i] = found
        if found >= 0:
            hits += 1
    return hits
