"""Compiled kernels of the brute-force grid oracle.

A state is a cyclic label sequence of length 2, 4 or 6 starting at a
minimum, stored as a flat index in base R over grid coordinates.  Costs are
integers in units of half a grid step.  The search is A* with bucketed
priorities; every heuristic used is consistent, so the first time a target
is popped its cost is final.
"""
import numba
import numpy as np
from numba.typed import Dict, List

INF16 = 32767


@numba.njit(cache=True, inline="always")
def _decode(idx, k, R, out):
    for p in range(k - 1, -1, -1):
        out[p] = idx % R
        idx //= R


@numba.njit(cache=True, inline="always")
def _encode(c, k, R):
    idx = 0
    for p in range(k):
        idx = idx * R + c[p]
    return idx


@numba.njit(cache=True)
def _valid(c, k):
    """Every max exceeds both neighbours (equal non-adjacent labels allowed)."""
    for p in range(1, k, 2):
        if c[p] <= c[p - 1] or c[p] <= c[(p + 1) % k]:
            return False
    return True


@numba.njit(cache=True)
def _injective(c, k):
    for p in range(k):
        for q in range(p + 1, k):
            if c[p] == c[q]:
                return False
    return True


@numba.njit(cache=True)
def _pairs(c, k, sign, out, work):
    """Finite 0-dim persistence pairs of ``sign * c`` on the k-cycle.

    Writes (birth, death) rows into ``out`` and returns their number; the
    essential class is born at the global minimum and never dies.  ``work``
    is a (3, 6) scratch array.
    """
    vals = work[0]
    order = work[1]
    root = work[2]
    for p in range(k):
        vals[p] = sign * c[p]
        root[p] = -1
        # stable insertion sort of positions by value
        r = p
        while r > 0 and vals[order[r - 1]] > vals[p]:
            order[r] = order[r - 1]
            r -= 1
        order[r] = p
    n = 0
    for r in range(k):
        p = order[r]
        root[p] = p
        for q in ((p - 1) % k, (p + 1) % k):
            if root[q] < 0:
                continue
            a = p
            while root[a] != a:
                a = root[a]
            b = q
            while root[b] != b:
                b = root[b]
            if a == b:
                continue
            # the root of a component is its lowest vertex; the younger dies
            if vals[a] < vals[b] or (vals[a] == vals[b] and a < b):
                a, b = b, a
            if vals[a] < vals[p]:
                out[n, 0] = vals[a]
                out[n, 1] = vals[p]
                n += 1
            root[a] = b
    return n


@numba.njit(cache=True)
def _bottleneck2(P, np_, Q, nq):
    """Twice the bottleneck distance between two diagrams of at most two points."""
    best = 1 << 30
    # assignment[i] = j matches P[i] to Q[j]; -1 sends it to the diagonal
    for a0 in range(-1, nq if np_ > 0 else 0):
        for a1 in range(-1, nq if np_ > 1 else 0):
            if np_ > 1 and a0 >= 0 and a0 == a1:
                continue
            cost = 0
            used0 = False
            used1 = False
            for i in range(np_):
                j = a0 if i == 0 else a1
                if j < 0:
                    v = P[i, 1] - P[i, 0]
                else:
                    v = 2 * max(abs(P[i, 0] - Q[j, 0]), abs(P[i, 1] - Q[j, 1]))
                    if j == 0:
                        used0 = True
                    else:
                        used1 = True
                if v > cost:
                    cost = v
            for j in range(nq):
                if (j == 0 and not used0) or (j == 1 and not used1):
                    v = Q[j, 1] - Q[j, 0]
                    if v > cost:
                        cost = v
            if cost < best:
                best = cost
    return best


@numba.njit(cache=True)
def _heuristic(c, k, tdiag, tk, P, work):
    """Consistent lower bound on the remaining cost, in half-step units.

    The persistence diagrams of sublevel and superlevel sets, together with
    the global extrema, move by at most the cost of any edit, so their
    distance to the target's diagrams is a consistent heuristic.  A state with
    more vertices than the target also needs a death, which costs at least
    half the smallest gap of an adjacent pair.
    """
    lo, hi = c[0], c[0]
    for p in range(k):
        if c[p] < lo:
            lo = c[p]
        if c[p] > hi:
            hi = c[p]
    h = 2 * max(abs(lo - tdiag[0, 0]), abs(hi - tdiag[0, 1]))
    npts = _pairs(c, k, 1, P, work)
    v = _bottleneck2(P, npts, tdiag[1:3], tdiag[5, 0])
    if v > h:
        h = v
    npts = _pairs(c, k, -1, P, work)
    v = _bottleneck2(P, npts, tdiag[3:5], tdiag[5, 1])
    if v > h:
        h = v
    if k > tk:
        gap = 1 << 30
        for p in range(1, k, 2):
            g1 = c[p] - c[p - 1]
            g2 = c[p] - c[(p + 1) % k]
            if g1 < gap:
                gap = g1
            if g2 < gap:
                gap = g2
        if gap > h:
            h = gap
    elif k < tk and h < 1:
        h = 1
    return h


@numba.njit(cache=True)
def target_summary(t, k):
    """Rows: (min, max), two sublevel pairs, two superlevel pairs, counts."""
    out = np.zeros((6, 2), dtype=np.int64)
    out[0, 0] = t[:k].min()
    out[0, 1] = t[:k].max()
    P = np.empty((3, 2), dtype=np.int64)
    work = np.empty((3, 6), dtype=np.int64)
    n = _pairs(t, k, 1, P, work)
    out[1:1 + n] = P[:n]
    out[5, 0] = n
    n = _pairs(t, k, -1, P, work)
    out[3:3 + n] = P[:n]
    out[5, 1] = n
    return out


@numba.njit(cache=True)
def _push(data, sizes, level, entry):
    while len(data) <= level:
        data.append(np.empty(16, dtype=np.int64))
        sizes.append(0)
    n = sizes[level]
    arr = data[level]
    if n == arr.size:
        bigger = np.empty(2 * arr.size, dtype=np.int64)
        bigger[:n] = arr
        data[level] = bigger
        arr = bigger
    arr[n] = entry
    sizes[level] = n + 1


@numba.njit(cache=True)
def _push_below(bound, data, sizes, level, entry):
    if level < bound:
        _push(data, sizes, level, entry)


@numba.njit(cache=True)
def _rotate_to_min(seq, k, out):
    """Copy a cyclic alternating sequence so that it starts at a minimum."""
    # positions alternate; seq[0] is either a min or a max
    start = 0
    if k >= 2 and seq[0] > seq[1]:
        start = 1
    for p in range(k):
        out[p] = seq[(start + p) % k]


@numba.njit(cache=True)
def grid_search(R, src, targets, tk, allow6, max_levels, bound):
    """Cheapest grid path cost from ``src`` to any state in ``targets``.

    ``targets`` is a 2-d array of coordinate rows of length ``tk``.  Returns
    (cost, levels processed); cost is -1 when no target is reachable below
    ``bound`` and -2 when the level budget is exhausted.  States whose
    priority reaches ``bound`` are never queued.
    """
    D2 = np.full(R * R, INF16, dtype=np.int16)
    D4 = np.full(R * R * R * R, INF16, dtype=np.int16)
    # six-vertex states are few under A*, so they live in a hash table
    D6 = Dict.empty(key_type=numba.types.int64, value_type=numba.types.int64)
    tdiag = target_summary(targets[0], tk)
    P = np.empty((3, 2), dtype=np.int64)
    work = np.empty((3, 6), dtype=np.int64)
    tidx = np.empty(targets.shape[0], dtype=np.int64)
    for t in range(targets.shape[0]):
        tidx[t] = _encode(targets[t], tk, R)

    data = List.empty_list(numba.types.int64[::1])
    sizes = List.empty_list(numba.types.int64)
    c = np.empty(6, dtype=np.int64)
    n = np.empty(8, dtype=np.int64)
    m = np.empty(8, dtype=np.int64)
    off = np.empty(6, dtype=np.int64)

    k0 = src.size
    for p in range(k0):
        c[p] = src[p]
    i0 = _encode(c, k0, R)
    if k0 == 2:
        D2[i0] = 0
    elif k0 == 4:
        D4[i0] = 0
    else:
        D6[i0] = 0
    _push_below(bound, data, sizes, _heuristic(c, k0, tdiag, tk, P, work), i0 * 8 + k0)

    level = 0
    processed = 0
    while level < len(data):
        if sizes[level] == 0:
            level += 1
            continue
        processed += 1
        if processed > max_levels:
            return -2, processed
        # last in, first out: ties are broken towards deeper states
        while sizes[level] > 0:
            sizes[level] -= 1
            entry = data[level][sizes[level]]
            k = np.int64(entry % 8)
            idx = entry // 8
            _decode(idx, k, R, c)
            if k == 2:
                g = D2[idx]
            elif k == 4:
                g = D4[idx]
            else:
                g = D6[idx]
            f = g + _heuristic(c, k, tdiag, tk, P, work)
            if f != level:
                continue  # stale entry
            if k == tk:
                for t in range(tidx.size):
                    if tidx[t] == idx:
                        return g, processed

            # relabel: move every label by at most one step
            total = 1
            for p in range(k):
                total *= 3
            for code in range(total):
                x = code
                nonzero = False
                for p in range(k):
                    off[p] = x % 3 - 1
                    x //= 3
                    if off[p] != 0:
                        nonzero = True
                if not nonzero:
                    continue
                ok = True
                for p in range(k):
                    v = c[p] + off[p]
                    if v < 0 or v >= R:
                        ok = False
                        break
                    n[p] = v
                if not ok or not _valid(n, k):
                    continue
                j = _encode(n, k, R)
                ng = g + 2
                if k == 2:
                    if ng < D2[j]:
                        D2[j] = ng
                        _push_below(bound, data, sizes, ng + _heuristic(n, k, tdiag, tk, P, work), j * 8 + k)
                elif k == 4:
                    if ng < D4[j]:
                        D4[j] = ng
                        _push_below(bound, data, sizes, ng + _heuristic(n, k, tdiag, tk, P, work), j * 8 + k)
                else:
                    if ng < D6.get(j, INF16):
                        D6[j] = ng
                        _push_below(bound, data, sizes, ng + _heuristic(n, k, tdiag, tk, P, work), j * 8 + k)

            if not _injective(c, k):
                continue

            # deaths: remove an adjacent (max p, min q) pair
            if k >= 4:
                for p in range(1, k, 2):
                    for d in (-1, 1):
                        q = (p + d) % k
                        v1 = c[(p - d) % k]
                        v2 = c[(q + d) % k]
                        if not (v1 < c[q] and c[q] < c[p] and c[p] < v2):
                            continue
                        r = 0
                        for s in range(k):
                            if s != p and s != q:
                                n[r] = c[s]
                                r += 1
                        _rotate_to_min(n, k - 2, m)
                        j = _encode(m, k - 2, R)
                        ng = g + (c[p] - c[q])
                        if k == 4:
                            if ng < D2[j]:
                                D2[j] = ng
                                _push_below(bound, data, sizes, ng + _heuristic(m, 2, tdiag, tk, P, work), j * 8 + 2)
                        else:
                            if ng < D4[j]:
                                D4[j] = ng
                                _push_below(bound, data, sizes, ng + _heuristic(m, 4, tdiag, tk, P, work), j * 8 + 4)

            # births: insert (u1 max, u2 min) inside an edge, u1 next to the min end
            if k == 2 or (k == 4 and allow6):
                for e in range(k):
                    x0, x1 = c[e], c[(e + 1) % k]
                    lo_end = min(x0, x1)
                    hi_end = max(x0, x1)
                    for u2 in range(lo_end + 1, hi_end):
                        for u1 in range(u2 + 1, min(hi_end, u2 + bound - g)):
                            clash = False
                            for s in range(k):
                                if c[s] == u1 or c[s] == u2:
                                    clash = True
                            if clash:
                                continue
                            r = 0
                            for s in range(e + 1):
                                n[r] = c[s]
                                r += 1
                            # e even: c[e] is a min, so u1 comes first
                            if e % 2 == 0:
                                n[r] = u1
                                n[r + 1] = u2
                            else:
                                n[r] = u2
                                n[r + 1] = u1
                            r += 2
                            for s in range(e + 1, k):
                                n[r] = c[s]
                                r += 1
                            _rotate_to_min(n, k + 2, m)
                            j = _encode(m, k + 2, R)
                            ng = g + (u1 - u2)
                            if k == 2:
                                if ng < D4[j]:
                                    D4[j] = ng
                                    _push_below(bound, data, sizes, ng + _heuristic(m, 4, tdiag, tk, P, work), j * 8 + 4)
                            else:
                                if ng < D6.get(j, INF16):
                                    D6[j] = ng
                                    _push_below(bound, data, sizes, ng + _heuristic(m, 6, tdiag, tk, P, work), j * 8 + 6)
        level += 1
    return -1, processed
