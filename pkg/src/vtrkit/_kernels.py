"""Compiled kernels for the scoring hot path.

Strings are passed as flat ``int64`` arrays of code points plus an offsets
array (``codes[off[i]:off[i + 1]]`` is string ``i``).
"""
from __future__ import annotations

import threading

import numba as nb
import numpy as np

_MAX_CODEPOINT = 0x110000
_local = threading.local()


def peq_table() -> np.ndarray:
    """Per-thread scratch table of bit masks, indexed by code point.

    Kernels leave it all-zero on return; untouched pages are never resident.
    """
    table = getattr(_local, "peq", None)
    if table is None:
        table = np.zeros(_MAX_CODEPOINT, np.uint64)
        _local.peq = table
    return table


def encode(strings) -> tuple[np.ndarray, np.ndarray]:
    n = len(strings)
    codes = np.frombuffer("".join(strings).encode("utf-32-le", "surrogatepass"), dtype=np.uint32)
    off = np.zeros(n + 1, np.int64)
    np.cumsum(np.fromiter(map(len, strings), np.int64, n), out=off[1:])
    return codes, off


@nb.njit(cache=True, nogil=True)
def _lev_dp(a, b):
    la = a.shape[0]
    lb = b.shape[0]
    row = np.arange(lb + 1)
    for x in range(1, la + 1):
        prev = row[0]
        row[0] = x
        ca = a[x - 1]
        for y in range(1, lb + 1):
            cur = row[y]
            c = prev + (0 if ca == b[y - 1] else 1)
            if row[y - 1] + 1 < c:
                c = row[y - 1] + 1
            if cur + 1 < c:
                c = cur + 1
            row[y] = c
            prev = cur
    return row[lb]


@nb.njit(cache=True, nogil=True)
def _myers_span(la, codes, lo, hi, peq):
    # Myers/Hyyro bit-parallel distance of the pattern held in peq (length
    # la <= 64) against codes[lo:hi]. The score update is branchless because
    # its sign is data dependent and mispredicts badly.
    one = np.uint64(1)
    pv = ~np.uint64(0)
    mv = np.uint64(0)
    score = la
    top = np.uint64(la - 1)
    for y in range(lo, hi):
        eq = peq[codes[y]]
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = mv | ~(xh | pv)
        mh = pv & xh
        score += np.int64((ph >> top) & one) - np.int64((mh >> top) & one)
        ph = (ph << one) | one
        mh = mh << one
        pv = mh | ~(xv | ph)
        mv = ph & xv
    return score


@nb.njit(cache=True, nogil=True)
def levenshtein_codes(a, b, peq):
    if a.shape[0] > b.shape[0]:
        a, b = b, a
    la = a.shape[0]
    if la == 0:
        return b.shape[0]
    if la > 64:
        return _lev_dp(a, b)
    one = np.uint64(1)
    for x in range(la):
        peq[a[x]] |= one << np.uint64(x)
    d = _myers_span(la, b, 0, b.shape[0], peq)
    for x in range(la):
        peq[a[x]] = np.uint64(0)
    return d


@nb.njit(cache=True, nogil=True)
def _same(codes_a, lo_a, codes_b, lo_b, n):
    for x in range(n):
        if codes_a[lo_a + x] != codes_b[lo_b + x]:
            return False
    return True


@nb.njit(cache=True, nogil=True)
def ned_matrix(codes_a, off_a, codes_b, off_b, peq):
    m = off_a.shape[0] - 1
    n = off_b.shape[0] - 1
    out = np.empty((m, n))
    one = np.uint64(1)
    for i in range(m):
        lo_a = off_a[i]
        la = off_a[i + 1] - lo_a
        use_bits = 0 < la <= 64
        if use_bits:
            for x in range(la):
                peq[codes_a[lo_a + x]] |= one << np.uint64(x)
        for j in range(n):
            lo_b = off_b[j]
            lb = off_b[j + 1] - lo_b
            mx = la if la > lb else lb
            if mx == 0:
                out[i, j] = 0.0
            elif la == 0 or lb == 0:
                out[i, j] = 1.0
            elif la == lb and _same(codes_a, lo_a, codes_b, lo_b, la):
                out[i, j] = 0.0
            elif use_bits:
                out[i, j] = _myers_span(la, codes_b, lo_b, lo_b + lb, peq) / mx
            else:
                a = codes_a[lo_a:lo_a + la]
                b = codes_b[lo_b:lo_b + lb]
                if lb <= 64:
                    out[i, j] = levenshtein_codes(b, a, peq) / mx
                else:
                    out[i, j] = _lev_dp(a, b) / mx
        if use_bits:
            for x in range(la):
                peq[codes_a[lo_a + x]] = np.uint64(0)
    return out


@nb.njit(cache=True, nogil=True)
def _reroute(start, target_col, tight, row_of, col_of, fixed_row, fixed_col):
    # Alternating DFS over tight edges from `start` to the free `target_col`;
    # flips the path in place on success.
    n = tight.shape[0]
    reached_from = np.full(n, -1, np.int64)
    seen = np.zeros(n, np.bool_)
    stack = np.empty(n + 1, np.int64)
    stack[0] = start
    sp = 1
    while sp > 0:
        sp -= 1
        r = stack[sp]
        if tight[r, target_col] and not seen[target_col]:
            seen[target_col] = True
            reached_from[target_col] = r
            c = target_col
            while True:
                rr = reached_from[c]
                old = col_of[rr]
                col_of[rr] = c
                row_of[c] = rr
                if rr == start:
                    return True
                c = old
        for c in range(n):
            if tight[r, c] and not seen[c] and not fixed_col[c]:
                seen[c] = True
                reached_from[c] = r
                nr = row_of[c]
                if nr >= 0 and not fixed_row[nr]:
                    stack[sp] = nr
                    sp += 1
    return False


@nb.njit(cache=True, nogil=True)
def lex_min_assignment(cost_in):
    """Minimum-cost assignment of an m x k matrix.

    Returns ``col_of_row`` (length m); entries >= k mean the row is unassigned.
    Among optimal assignments, the one whose sorted (row, col) list is
    lexicographically smallest is returned.
    """
    m, k = cost_in.shape
    n = max(m, k)
    cost = np.zeros((n, n))
    cost[:m, :k] = cost_in
    inf = np.inf
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, np.int64)
    way = np.zeros(n + 1, np.int64)
    minv = np.empty(n + 1)
    used = np.empty(n + 1, np.bool_)
    # shortest augmenting path with row/column potentials
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv[:] = inf
        used[:] = False
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break

    row_of = np.empty(n, np.int64)
    col_of = np.empty(n, np.int64)
    for j in range(1, n + 1):
        row_of[j - 1] = p[j] - 1
        col_of[p[j] - 1] = j - 1

    # Every optimal assignment lives on the tight edges of the optimal duals;
    # walk rows in order and take the smallest column that still admits a
    # perfect matching of the remaining rows.
    scale = 1.0
    for i in range(n):
        for j in range(n):
            if abs(cost[i, j]) > scale:
                scale = abs(cost[i, j])
    eps = 1e-9 * scale
    tight = np.empty((n, n), np.bool_)
    for i in range(n):
        for j in range(n):
            tight[i, j] = cost[i, j] - u[i + 1] - v[j + 1] <= eps
    fixed_row = np.zeros(n, np.bool_)
    fixed_col = np.zeros(n, np.bool_)
    save_r = np.empty(n, np.int64)
    save_c = np.empty(n, np.int64)
    for i in range(m):
        fixed_row[i] = True
        for c in range(n):
            if fixed_col[c] or not tight[i, c]:
                continue
            if col_of[i] == c:
                break
            owner = row_of[c]
            freed = col_of[i]
            save_r[:] = row_of
            save_c[:] = col_of
            col_of[i] = c
            row_of[c] = i
            row_of[freed] = -1
            fixed_col[c] = True
            ok = _reroute(owner, freed, tight, row_of, col_of, fixed_row, fixed_col)
            fixed_col[c] = False
            if ok:
                break
            row_of[:] = save_r
            col_of[:] = save_c
        fixed_col[col_of[i]] = True
    return col_of[:m].copy()
