"""Bounds on the natural pseudo-distance inf_tau ||f - g o tau||_inf.

``pseudo_lower`` and ``persistence_lower`` are certified lower bounds, valid
for the editing distance as well.  ``pseudo_upper`` exhibits an explicit
monotone correspondence between samples of f and g and reports its sup cost,
so it bounds the pseudo-distance from above.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numba
import numpy as np
from scipy.optimize import linear_sum_assignment

from .circlefn import (DEFAULT_CONFIG, TWO_PI, CircleFunction, Config, PiecewiseLinear,
                       _raw_critical_points, evaluate, extrema)
from .errors import ResolutionTooLow
from .reeb import LabelledReebGraph

DEFAULT_RESOLUTION = 512


@dataclass(frozen=True)
class Alignment:
    """Monotone correspondence between the circles of f and g.

    ``pairs`` lists matched angles (theta_f, theta_g) in traversal order; the
    map between consecutive pairs is linear.  ``reversed`` is true when g is
    traversed against its orientation.
    """
    pairs: Tuple[Tuple[float, float], ...]
    cost: float
    reversed: bool
    resolution: int


# ------------------------------------------------------------ lower bounds

def pseudo_lower(f: CircleFunction, g: CircleFunction, config: Config = DEFAULT_CONFIG) -> float:
    """max(|max f - max g|, |min f - min g|)."""
    f_lo, f_hi = extrema(f, config)
    g_lo, g_hi = extrema(g, config)
    return max(abs(f_hi - g_hi), abs(f_lo - g_lo))


def improved_edit_lower(f: CircleFunction, g: CircleFunction, config: Config = DEFAULT_CONFIG) -> float:
    """A lower bound for the editing distance of the Reeb graphs of f and g.

    Global extrema are invariant under reparameterization, and the editing
    distance dominates the natural pseudo-distance, so this is sound.
    """
    return pseudo_lower(f, g, config)


def _critical_values(obj) -> np.ndarray:
    """Cyclic sequence of values whose sublevel persistence equals that of obj."""
    if isinstance(obj, LabelledReebGraph):
        return np.asarray(obj.labels, dtype=float)
    if isinstance(obj, PiecewiseLinear):
        return np.asarray(obj.values, dtype=float)
    points, _ = _raw_critical_points(obj)
    if not points:
        return np.asarray([float(evaluate(obj, 0.0))])
    return np.asarray([p.value for p in points], dtype=float)


def persistence_pairs(values: Sequence[float]) -> Tuple[List[Tuple[float, float]], float]:
    """Finite 0-dimensional sublevel persistence pairs of a cyclic sequence.

    Returns (pairs, essential birth).  The loop class born at the global
    maximum is not reported.
    """
    vals = np.asarray(values, dtype=float)
    n = vals.size
    order = np.argsort(vals, kind="stable")
    parent = np.full(n, -1)
    birth = np.zeros(n)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    pairs = []
    for k in order:
        parent[k] = k
        birth[k] = vals[k]
        for nb in ((k - 1) % n, (k + 1) % n):
            if nb == k or parent[nb] < 0:
                continue
            a, b = find(k), find(nb)
            if a == b:
                continue
            # elder rule: the younger component dies here
            young, old = (a, b) if birth[a] > birth[b] else (b, a)
            if birth[young] < vals[k]:
                pairs.append((float(birth[young]), float(vals[k])))
            parent[young] = old
    return pairs, float(vals.min())


def bottleneck(d1: Sequence[Tuple[float, float]], d2: Sequence[Tuple[float, float]]) -> float:
    """Bottleneck distance between finite persistence diagrams (L-inf ground metric)."""
    a = np.asarray(d1, dtype=float).reshape(-1, 2)
    b = np.asarray(d2, dtype=float).reshape(-1, 2)
    n, m = len(a), len(b)
    if n + m == 0:
        return 0.0
    diag_a = (a[:, 1] - a[:, 0]) / 2.0
    diag_b = (b[:, 1] - b[:, 0]) / 2.0
    big = np.inf
    # (n+m) x (m+n): real points of a and diagonal copies of b's points against
    # real points of b and diagonal copies of a's points
    cost = np.zeros((n + m, m + n))
    if n and m:
        cost[:n, :m] = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)
    cost[:n, m:] = big
    cost[n:, :m] = big
    for i in range(n):
        cost[i, m + i] = diag_a[i]
    for j in range(m):
        cost[n + j, j] = diag_b[j]
    candidates = np.unique(cost[np.isfinite(cost)])
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching(cost <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def _perfect_matching(allowed: np.ndarray) -> bool:
    penalty = np.where(allowed, 0.0, 1.0)
    rows, cols = linear_sum_assignment(penalty)
    return bool(penalty[rows, cols].sum() == 0.0)


def persistence_lower(f: Union[CircleFunction, LabelledReebGraph],
                      g: Union[CircleFunction, LabelledReebGraph]) -> float:
    """Lower bound from 0-dimensional sublevel and superlevel persistence.

    Persistence diagrams are invariant under reparameterization and 1-Lipschitz
    in the sup norm, so their bottleneck distance never exceeds the natural
    pseudo-distance.  Essential classes are matched to each other, which
    recovers ``pseudo_lower`` as a special case.
    """
    vf, vg = _critical_values(f), _critical_values(g)
    best = max(abs(vf.min() - vg.min()), abs(vf.max() - vg.max()))
    for sign in (1.0, -1.0):
        pf, _ = persistence_pairs(sign * vf)
        pg, _ = persistence_pairs(sign * vg)
        best = max(best, bottleneck(pf, pg))
    return float(best)


# ------------------------------------------------------------ upper bound

@numba.njit(cache=True)
def _anchored(F, G, i0, j0, bound):
    """Bottleneck cost of the best closed monotone coupling through (i0, j0).

    Only the band of cells reachable below ``bound`` is swept; returns inf as
    soon as that band is empty.
    """
    n, m = F.size, G.size
    inf = np.inf
    prev = np.empty(m + 1)
    cur = np.empty(m + 1)
    f0 = F[i0]
    v = abs(f0 - G[j0])
    if v >= bound:
        return inf
    prev[0] = v
    l = 1
    while l <= m:
        c = abs(f0 - G[(j0 + l) % m])
        if c < prev[l - 1]:
            c = prev[l - 1]
        if c >= bound:
            break
        prev[l] = c
        l += 1
    lo_p, hi_p = 0, l - 1
    for k in range(1, n + 1):
        fk = F[(i0 + k) % n]
        lo, hi = -1, -1
        last = inf
        l = lo_p
        while l <= m:
            b = last
            if l <= hi_p and prev[l] < b:
                b = prev[l]
            if lo_p <= l - 1 <= hi_p and prev[l - 1] < b:
                b = prev[l - 1]
            if b == inf and l > hi_p + 1:
                break
            c = abs(fk - G[(j0 + l) % m])
            v = c if c > b else b
            if v >= bound:
                v = inf
            else:
                if lo < 0:
                    lo = l
                hi = l
            cur[l] = v
            last = v
            l += 1
        if lo < 0:
            return inf
        prev, cur = cur, prev
        lo_p, hi_p = lo, hi
    if hi_p < m:
        return inf
    return prev[m]


@numba.njit(cache=True)
def _candidate_count(F, G, i, best):
    cnt = 0
    fi = F[i]
    for j in range(G.size):
        if abs(G[j] - fi) < best:
            cnt += 1
    return cnt


@numba.njit(cache=True)
def _region_path(A, B, a, L, j, left, right, buf, out_s, out_e):
    """Fewest cells with |A - B| >= L on a closed coupling anchored at (a, j).

    Rows k = 0..n stand for A[(a + k) % n], columns are unrolled (column l
    stands for B[l % m]) and the path runs from (0, j) to (n, j + m) inside
    the per-row column range [left[k], right[k]].  The cells of an optimal
    path are written as per-row column ranges into out_s, out_e.
    """
    n, m = A.size, B.size
    big = 1 << 30
    offsets = np.empty(n + 1, dtype=np.int64)
    off = 0
    for k in range(n + 1):
        offsets[k] = off
        off += right[k] - left[k] + 1
    for k in range(n + 1):
        lo, hi, base = left[k], right[k], offsets[k]
        fk = A[(a + k) % n]
        for l in range(lo, hi + 1):
            best = big
            if k == 0:
                if l == j:
                    best = 0
                elif l > j and l > lo:
                    best = buf[base + l - 1 - lo]
            else:
                plo, phi, pb = left[k - 1], right[k - 1], offsets[k - 1]
                if plo <= l <= phi and buf[pb + l - plo] < best:
                    best = buf[pb + l - plo]
                if plo <= l - 1 <= phi and buf[pb + l - 1 - plo] < best:
                    best = buf[pb + l - 1 - plo]
                if l > lo and buf[base + l - 1 - lo] < best:
                    best = buf[base + l - 1 - lo]
            if best < big:
                best += 1 if abs(fk - B[l % m]) >= L else 0
            buf[base + l - lo] = best
    k, l = n, j + m
    total = buf[offsets[n] + l - left[n]]
    if total >= big:
        # no path inside the region; fall back to the region itself as bounds
        out_s[:] = left
        out_e[:] = right
        return total
    out_s[k] = l
    out_e[k] = l
    while not (k == 0 and l == j):
        cur = buf[offsets[k] + l - left[k]]
        w = 1 if abs(A[(a + k) % n] - B[l % m]) >= L else 0
        want = cur - w
        lo = left[k]
        if l > lo and (k > 0 or l > j) and buf[offsets[k] + l - 1 - lo] == want:
            l -= 1
            out_s[k] = l
            continue
        plo, phi, pb = left[k - 1], right[k - 1], offsets[k - 1]
        if plo <= l - 1 <= phi and buf[pb + l - 1 - plo] == want:
            l -= 1
        k -= 1
        out_s[k] = l
        out_e[k] = l
    return total


@numba.njit(cache=True)
def _feasible(A, B, a, L, cands):
    """For each candidate column, whether a closed coupling through (a, j) stays below L.

    Optimal paths of the 0/1 counting problem can be taken pairwise
    non-crossing, so the search divides the sorted candidates and confines
    each path between those of its neighbours.
    """
    n, m = A.size, B.size
    t = cands.size
    out = np.zeros(t, dtype=np.bool_)
    ps = np.empty((t + 1, n + 1), dtype=np.int64)
    pe = np.empty((t + 1, n + 1), dtype=np.int64)
    buf = np.empty((n + 1) * (m + 1), dtype=np.int64)
    left = np.empty(n + 1, dtype=np.int64)
    right = np.empty(n + 1, dtype=np.int64)
    j0 = cands[0]
    left[:] = j0
    right[:] = j0 + m
    out[0] = _region_path(A, B, a, L, j0, left, right, buf, ps[0], pe[0]) == 0
    # the same path shifted by one period bounds every later start
    for k in range(n + 1):
        ps[t, k] = ps[0, k] + m
        pe[t, k] = pe[0, k] + m
    stack = [(0, t)]
    while len(stack) > 0:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        mid = (lo + hi) // 2
        j = cands[mid]
        for k in range(n + 1):
            left[k] = max(ps[lo, k], j)
            right[k] = min(pe[hi, k], j + m)
        out[mid] = _region_path(A, B, a, L, j, left, right, buf, ps[mid], pe[mid]) == 0
        stack.append((lo, mid))
        stack.append((mid, hi))
    return out


@numba.njit(cache=True)
def _search(F, G, bound):
    """Best closed coupling of F and G, or (bound, ..., -1) if none beats ``bound``.

    Every closed coupling meets each row and each column, so it suffices to
    anchor one sample and consider the partners within the current best.  The
    anchor (a row of F or a column of G) with the fewest partners is used.
    Partners that admit a coupling strictly below the current best are found
    all at once; the exact cost is computed for the closest one, and this
    repeats until no partner improves.  Returns (cost, transposed, anchor
    index, partner index).
    """
    best = bound
    w_t, w_a, w_j = False, 0, -1
    if best == np.inf:
        i = np.argmax(F)
        j = np.argmin(np.abs(G - F[i]))
        best = _anchored(F, G, i, j, np.inf)
        w_a, w_j = i, j
    # choose the anchor with the fewest admissible partners
    a_best, t_best, n_best = 0, False, F.size + G.size + 1
    for i in range(F.size):
        c = _candidate_count(F, G, i, best)
        if c < n_best:
            a_best, t_best, n_best = i, False, c
    for j in range(G.size):
        c = _candidate_count(G, F, j, best)
        if c < n_best:
            a_best, t_best, n_best = j, True, c
    A, B = (G, F) if t_best else (F, G)
    gaps = np.abs(B - A[a_best])
    while True:
        cands = np.nonzero(gaps < best)[0]
        if cands.size == 0:
            break
        ok = _feasible(A, B, a_best, best, cands)
        if not ok.any():
            break
        feas = cands[ok]
        j = feas[np.argmin(gaps[feas])]
        c = _anchored(A, B, a_best, j, best)
        if not c < best:  # cannot happen for an exact feasibility test
            break
        best = c
        w_t, w_a, w_j = t_best, a_best, j
    return best, w_t, w_a, w_j


@numba.njit(cache=True)
def _coupling(F, G, i0, j0):
    """Full DP and backtracked optimal path through (i0, j0) as index pairs."""
    n, m = F.size, G.size
    D = np.empty((n + 1, m + 1))
    for k in range(n + 1):
        fk = F[(i0 + k) % n]
        for l in range(m + 1):
            c = abs(fk - G[(j0 + l) % m])
            if k == 0 and l == 0:
                D[k, l] = c
                continue
            best = np.inf
            if k > 0 and l > 0:
                best = D[k - 1, l - 1]
            if k > 0 and D[k - 1, l] < best:
                best = D[k - 1, l]
            if l > 0 and D[k, l - 1] < best:
                best = D[k, l - 1]
            D[k, l] = c if c > best else best
    path_k = np.empty(n + m + 1, dtype=np.int64)
    path_l = np.empty(n + m + 1, dtype=np.int64)
    k, l, t = n, m, 0
    while True:
        path_k[t] = k
        path_l[t] = l
        t += 1
        if k == 0 and l == 0:
            break
        if k > 0 and l > 0 and D[k - 1, l - 1] <= D[k - 1, l] and D[k - 1, l - 1] <= D[k, l - 1]:
            k, l = k - 1, l - 1
        elif k > 0 and (l == 0 or D[k - 1, l] <= D[k, l - 1]):
            k -= 1
        else:
            l -= 1
    return D[n, m], path_k[:t][::-1], path_l[:t][::-1]


def _sample_positions(f: CircleFunction, resolution: int) -> np.ndarray:
    theta = np.arange(resolution) * (TWO_PI / resolution)
    if isinstance(f, PiecewiseLinear):
        extra = np.asarray(f.positions)
    else:
        points, _ = _raw_critical_points(f)
        extra = np.asarray([p.position for p in points])
    theta = np.union1d(theta, extra)
    # drop near-duplicates that union1d keeps because of rounding
    keep = np.concatenate([[True], np.diff(theta) > 1e-14])
    return theta[keep]


def _critical_count(f: CircleFunction) -> int:
    points, _ = _raw_critical_points(f)
    return len(points)


def _single_resolution(f, g, resolution, bound):
    tf = _sample_positions(f, resolution)
    tg = _sample_positions(g, resolution)
    F = np.ascontiguousarray(evaluate(f, tf))
    best = (bound, None)
    for rev in (False, True):
        t_g = tg[::-1].copy() if rev else tg
        G = np.ascontiguousarray(evaluate(g, t_g))
        cost, transposed, a0, b0 = _search(F, G, best[0])
        if b0 >= 0 and (best[1] is None or cost < best[0]):
            i0, j0 = (b0, a0) if transposed else (a0, b0)
            best = (cost, (rev, i0, j0, F, G, tf, t_g))
    return best


def pseudo_upper(f: CircleFunction, g: CircleFunction, resolution: int = DEFAULT_RESOLUTION) -> Alignment:
    """Best sampled monotone alignment of f and g under the sup cost.

    Samples are the uniform grid of ``resolution`` angles together with the
    critical points (PL breakpoints).  The value is the minimum over the
    dyadic resolutions resolution, resolution/2, ... down to the admissible
    floor, so it never increases when the resolution doubles.
    """
    floor = 4 * (_critical_count(f) + _critical_count(g))
    if resolution < floor:
        raise ResolutionTooLow(
            f"resolution {resolution} is below 4 x the {floor // 4} critical points of f and g")
    levels = [resolution]
    while levels[-1] // 2 >= max(floor, 8):
        levels.append(levels[-1] // 2)
    best = (np.inf, None)
    for r in reversed(levels):
        cost, witness = _single_resolution(f, g, r, best[0])
        if witness is not None and cost < best[0]:
            best = (cost, witness)
    cost, (rev, i0, j0, F, G, tf, t_g) = best
    _, pk, pl = _coupling(F, G, i0, j0)
    n, m = F.size, G.size
    pairs = tuple((float(tf[(i0 + k) % n]), float(t_g[(j0 + l) % m])) for k, l in zip(pk, pl))
    return Alignment(pairs, float(cost), rev, resolution)


def alignment_cost(f: CircleFunction, g: CircleFunction, alignment: Alignment) -> float:
    """Recompute sup |f - g| over the matched angle pairs of an alignment."""
    a = np.asarray(alignment.pairs)
    return float(np.max(np.abs(evaluate(f, a[:, 0]) - evaluate(g, a[:, 1]))))
