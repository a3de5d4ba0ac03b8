"""Compiled inner loops for simplex enumeration and matrix reduction.

Everything here operates on flat integer arrays so numba can compile it;
the object-level wrapping lives in filtration.py and persistence.py.
All kernels are strictly sequential, so results are bit-reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import njit


# ---------------------------------------------------------------------------
# triangle enumeration over the distance-thresholded graph
#
# Adjacency is given in CSR form (sorted neighbor lists). Triangles i<j<k
# are produced per edge (i,j) by two-pointer intersection of the neighbor
# lists restricted to k > j, i.e. genuine clique extension rather than a
# sweep over all index subsets.

@njit(cache=True)
def tri_count(indptr, nbrs, ei, ej):
    E = ei.size
    counts = np.zeros(E, np.int64)
    for e in range(E):
        i, j = ei[e], ej[e]
        ai, bi = indptr[i], indptr[i + 1]
        aj, bj = indptr[j], indptr[j + 1]
        ai += np.searchsorted(nbrs[ai:bi], j + 1)
        aj += np.searchsorted(nbrs[aj:bj], j + 1)
        c = 0
        while ai < bi and aj < bj:
            u, v = nbrs[ai], nbrs[aj]
            if u == v:
                c += 1
                ai += 1
                aj += 1
            elif u < v:
                ai += 1
            else:
                aj += 1
        counts[e] = c
    return counts


@njit(cache=True)
def tri_fill(indptr, nbrs, ei, ej, offs, ti, tj, tk):
    E = ei.size
    for e in range(E):
        i, j = ei[e], ej[e]
        ai, bi = indptr[i], indptr[i + 1]
        aj, bj = indptr[j], indptr[j + 1]
        ai += np.searchsorted(nbrs[ai:bi], j + 1)
        aj += np.searchsorted(nbrs[aj:bj], j + 1)
        o = offs[e]
        while ai < bi and aj < bj:
            u, v = nbrs[ai], nbrs[aj]
            if u == v:
                ti[o] = i
                tj[o] = j
                tk[o] = u
                o += 1
                ai += 1
                aj += 1
            elif u < v:
                ai += 1
            else:
                aj += 1


# ---------------------------------------------------------------------------
# interface (0,1): reduction of the vertex-edge boundary matrix
#
# Every reduced edge column has exactly two vertex entries (the endpoints
# of the 1-chain it represents), so columns are stored as index pairs and
# each GF(2) addition is O(1).

@njit(cache=True)
def edge_reduction(eu, ev, order, m):
    """Reduce edge columns in filtration order.

    eu, ev: edge endpoints (lex enumeration order), order: edge ids sorted
    by filtration rank. Returns per-edge paired vertex (-1 for a cycle
    creator).
    """
    E = eu.size
    owner = np.full(m, -1, np.int64)
    stored_lo = np.empty(m, np.int64)
    stored_hi = np.empty(m, np.int64)
    death_vertex = np.full(E, -1, np.int64)
    for idx in range(E):
        e = order[idx]
        a, b = eu[e], ev[e]
        if a > b:
            a, b = b, a
        while True:
            s = owner[b]
            if s == -1:
                owner[b] = e
                stored_lo[b] = a
                stored_hi[b] = b
                death_vertex[e] = b
                break
            a2 = stored_lo[b]
            if a2 == a:
                break  # column cancelled to zero: creator
            if a2 < a:
                a, b = a2, a
            else:
                a, b = a, a2
    return death_vertex


# ---------------------------------------------------------------------------
# interface (p, p+1), p >= 1: coboundary-matrix reduction
#
# Columns are p-simplices in reverse filtration order, rows are their
# cofacets identified by filtration rank; the pivot is the minimal rank.
# The working column lives in a binary min-heap where equal entries cancel
# in pairs (GF(2)), which keeps long reduction chains linear in the total
# number of pushed entries instead of quadratic as with array merges.

@njit(cache=True)
def _hpush(heap, n, v):
    if n == heap.size:
        bigger = np.empty(heap.size * 2, np.int64)
        bigger[:n] = heap[:n]
        heap = bigger
    heap[n] = v
    i = n
    n += 1
    while i > 0:
        p = (i - 1) >> 1
        if heap[p] <= heap[i]:
            break
        heap[p], heap[i] = heap[i], heap[p]
        i = p
    return heap, n


@njit(cache=True)
def _hpop(heap, n):
    v = heap[0]
    n -= 1
    if n > 0:
        x = heap[n]
        i = 0
        while True:
            l = 2 * i + 1
            if l >= n:
                break
            c = l
            r = l + 1
            if r < n and heap[r] < heap[l]:
                c = r
            if heap[c] >= x:
                break
            heap[i] = heap[c]
            i = c
        heap[i] = x
    return v, n


@njit(cache=True)
def coboundary_reduction(indptr, data, col_order, skip, n_rows):
    """Reduce coboundary columns; returns pairs and essential columns.

    indptr/data: per-column cofacet ranks, each column sorted ascending.
    col_order: column ids in reverse filtration order. skip: columns
    already known to reduce to zero (cleared from the interface below).
    """
    ncols = col_order.size
    owner = np.full(n_rows, -1, np.int64)
    # claimed-column storage: src 0 -> slice of `data`, src 1 -> slice of pool
    col_src = np.empty(n_rows, np.int8)
    col_lo = np.empty(n_rows, np.int64)
    col_len = np.empty(n_rows, np.int64)
    pool = np.empty(1024, np.int64)
    pool_used = 0
    pair_col = np.empty(ncols, np.int64)
    pair_row = np.empty(ncols, np.int64)
    npairs = 0
    ess = np.empty(ncols, np.int64)
    ness = 0
    heap = np.empty(1024, np.int64)
    for ci in range(ncols):
        c = col_order[ci]
        if skip[c]:
            continue
        lo, hi = indptr[c], indptr[c + 1]
        ln = hi - lo
        if ln == 0:
            ess[ness] = c
            ness += 1
            continue
        piv = data[lo]
        if owner[piv] == -1:
            # claimed on sight: reference the raw column, no copying
            owner[piv] = c
            col_src[piv] = 0
            col_lo[piv] = lo
            col_len[piv] = ln
            pair_col[npairs] = c
            pair_row[npairs] = piv
            npairs += 1
            continue
        # chain mode: work in the cancelling heap
        hn = 0
        for t in range(lo, hi):
            heap, hn = _hpush(heap, hn, data[t])
        zero = True
        while hn > 0:
            v, hn = _hpop(heap, hn)
            if hn > 0 and heap[0] == v:
                _, hn = _hpop(heap, hn)
                continue
            s = owner[v]
            if s == -1:
                # claim: drain the heap into the pool (ascending, cancelled)
                owner[v] = c
                start = pool_used
                if pool_used + 1 + hn > pool.size:
                    need = pool_used + 1 + hn
                    newsize = pool.size
                    while newsize < need:
                        newsize *= 2
                    newpool = np.empty(newsize, np.int64)
                    newpool[:pool_used] = pool[:pool_used]
                    pool = newpool
                pool[pool_used] = v
                pool_used += 1
                while hn > 0:
                    w, hn = _hpop(heap, hn)
                    if hn > 0 and heap[0] == w:
                        _, hn = _hpop(heap, hn)
                        continue
                    if pool_used == pool.size:
                        newpool = np.empty(pool.size * 2, np.int64)
                        newpool[:pool_used] = pool[:pool_used]
                        pool = newpool
                    pool[pool_used] = w
                    pool_used += 1
                col_src[v] = 1
                col_lo[v] = start
                col_len[v] = pool_used - start
                pair_col[npairs] = c
                pair_row[npairs] = v
                npairs += 1
                zero = False
                break
            # add the owning column (its pivot v already cancelled above)
            if col_src[v] == 0:
                slo = col_lo[v]
                for t in range(slo + 1, slo + col_len[v]):
                    heap, hn = _hpush(heap, hn, data[t])
            else:
                slo = col_lo[v]
                for t in range(slo + 1, slo + col_len[v]):
                    heap, hn = _hpush(heap, hn, pool[t])
        if zero:
            ess[ness] = c
            ness += 1
    return pair_col[:npairs].copy(), pair_row[:npairs].copy(), ess[:ness].copy()


@njit(cache=True)
def cofacet_columns(tri_e0, tri_e1, tri_e2, rank_to_tid, n_edges):
    """CSR cofacet lists per edge, entries in ascending triangle rank."""
    T = rank_to_tid.size
    counts = np.zeros(n_edges, np.int64)
    for t in range(T):
        counts[tri_e0[t]] += 1
        counts[tri_e1[t]] += 1
        counts[tri_e2[t]] += 1
    indptr = np.empty(n_edges + 1, np.int64)
    indptr[0] = 0
    for e in range(n_edges):
        indptr[e + 1] = indptr[e] + counts[e]
    data = np.empty(indptr[n_edges], np.int64)
    cur = indptr[:-1].copy()
    for r in range(T):
        t = rank_to_tid[r]
        e = tri_e0[t]
        data[cur[e]] = r
        cur[e] += 1
        e = tri_e1[t]
        data[cur[e]] = r
        cur[e] += 1
        e = tri_e2[t]
        data[cur[e]] = r
        cur[e] += 1
    return indptr, data


# ---------------------------------------------------------------------------
# reference algorithm: plain column reduction of the full boundary matrix,
# processed dimension-descending with clearing. Used for cross-validation
# and small inputs; the column store is a flat append-only pool.

@njit(cache=True)
def full_boundary_reduction(indptr, indices, dims, pmax):
    n = dims.size
    owner = np.full(n, -1, np.int64)
    cleared = np.zeros(n, np.uint8)
    pool = np.empty(1024, np.int64)
    pool_used = 0
    col_start = np.empty(n, np.int64)
    col_len = np.empty(n, np.int64)
    nslots = 0
    pair_row = np.empty(n, np.int64)
    pair_col = np.empty(n, np.int64)
    npairs = 0
    bufa = np.empty(n + 1, np.int64)
    bufb = np.empty(n + 1, np.int64)
    for p in range(pmax, -1, -1):
        for g in range(n):
            if dims[g] != p or cleared[g]:
                continue
            lo, hi = indptr[g], indptr[g + 1]
            ln = hi - lo
            cur = bufa
            other = bufb
            for t in range(ln):
                cur[t] = indices[lo + t]
            while ln > 0:
                piv = cur[ln - 1]
                s = owner[piv]
                if s == -1:
                    owner[piv] = nslots
                    if pool_used + ln > pool.size:
                        newsize = pool.size
                        while newsize < pool_used + ln:
                            newsize *= 2
                        newpool = np.empty(newsize, np.int64)
                        newpool[:pool_used] = pool[:pool_used]
                        pool = newpool
                    col_start[nslots] = pool_used
                    col_len[nslots] = ln
                    for t in range(ln):
                        pool[pool_used + t] = cur[t]
                    pool_used += ln
                    nslots += 1
                    pair_row[npairs] = piv
                    pair_col[npairs] = g
                    npairs += 1
                    cleared[piv] = 1
                    break
                st, sl = col_start[s], col_len[s]
                ia = 0
                ib = 0
                k = 0
                while ia < ln and ib < sl:
                    va = cur[ia]
                    vb = pool[st + ib]
                    if va == vb:
                        ia += 1
                        ib += 1
                    elif va < vb:
                        other[k] = va
                        k += 1
                        ia += 1
                    else:
                        other[k] = vb
                        k += 1
                        ib += 1
                while ia < ln:
                    other[k] = cur[ia]
                    k += 1
                    ia += 1
                while ib < sl:
                    other[k] = pool[st + ib]
                    k += 1
                    ib += 1
                tmp = cur
                cur = other
                other = tmp
                ln = k
    return pair_row[:npairs].copy(), pair_col[:npairs].copy()
