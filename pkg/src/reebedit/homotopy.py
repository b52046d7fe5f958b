"""Linear homotopies between circle functions.

Along h(lam) = (1 - lam) f + lam g the labelled Reeb graph only changes at
finitely many parameters for a generic pair: a degenerate critical point
appears or disappears (a birth or death of a max/min pair), or two critical
points momentarily share a value.  ``trace`` locates these events by a coarse
scan followed by bisection and turns the path into an edit script.  Between
events every critical point moves continuously, so one Relabel per interval
maps the old values onto the new ones.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .circlefn import (DEFAULT_CONFIG, TWO_PI, CircleFunction, Config, CriticalPoint, Index,
                       TrigPoly, _raw_critical_points, cr_norm, critical_points, difference,
                       genericity_report, linear_combination)
from .edits import Birth, Death, Deformation, Relabel, apply, apply_sequence
from .errors import NonGenericPath, PreconditionViolated, ReplayMismatch
from .reeb import LabelledReebGraph, Vertex, extract, is_isomorphic

log = logging.getLogger(__name__)

TOL_LAMBDA = 1e-10
TOL_TRACE = 1e-6


class EventKind(enum.Enum):
    BIRTH_DEATH = "BirthDeath"
    VALUE_SWAP = "ValueSwap"


@dataclass(frozen=True)
class StratumEvent:
    """A parameter at which the path crosses a codimension-one stratum.

    For a BirthDeath event ``detail`` holds the direction ("birth" or
    "death") and the positions of the pair; for a ValueSwap it holds the
    positions of the two critical points whose values cross.
    """
    lam: float
    kind: EventKind
    detail: Dict[str, object] = field(default_factory=dict)


@dataclass
class TraceResult:
    events: List[StratumEvent]
    script: Deformation
    script_cost: float
    c2_bound: float


# ------------------------------------------------------------ observations

@dataclass
class _State:
    """Critical points of h(lam) sorted by position, or None when degenerate."""
    lam: float
    points: Optional[List[CriticalPoint]]

    @property
    def ok(self) -> bool:
        return self.points is not None

    def __len__(self):
        return len(self.points)


def _observe(f, g, lam: float, config: Config) -> _State:
    h = linear_combination(f, g, lam)
    points, problems = _raw_critical_points(h, config)
    idx = [p.index for p in points]
    if problems or len(idx) < 2 or len(idx) % 2 or any(a == b for a, b in zip(idx, idx[1:] + idx[:1])):
        return _State(lam, None)
    if len({p.value for p in points}) != len(points):
        return _State(lam, None)
    return _State(lam, points)


def _cyclic_gap(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a - b) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def _match_same(p: Sequence[CriticalPoint], q: Sequence[CriticalPoint]) -> Tuple[int, float]:
    """Cyclic shift s (q[(k + s) % n] tracks p[k]) with agreeing indices and least drift."""
    n = len(p)
    pp = np.array([x.position for x in p])
    best = (None, np.inf)
    for s in range(n):
        if p[0].index != q[s % n].index:
            continue
        qq = np.array([q[(k + s) % n].position for k in range(n)])
        drift = float(_cyclic_gap(pp, qq).max())
        if drift < best[1]:
            best = (s, drift)
    return best


def _match_removed(big: Sequence[CriticalPoint], small: Sequence[CriticalPoint]):
    """Which adjacent pair of ``big`` is absent from ``small``.

    Returns (k, shift, drift): positions k, k+1 of ``big`` are removed and the
    remaining points, in cyclic order from k+2, track small[shift], ...
    """
    n = len(big)
    best = (None, None, np.inf)
    for k in range(n):
        rest = [big[(k + 2 + j) % n] for j in range(n - 2)]
        s, drift = _match_same(rest, small)
        if s is not None and drift < best[2]:
            best = (k, s, drift)
    return best


def _ranks(points: Sequence[CriticalPoint]) -> np.ndarray:
    return np.argsort(np.argsort([p.value for p in points]))


def _same_type(a: _State, b: _State) -> bool:
    """Same number of critical points and the same value order under tracking."""
    if not (a.ok and b.ok) or len(a) != len(b):
        return False
    s, _ = _match_same(a.points, b.points)
    if s is None:
        return False
    n = len(a)
    moved = [b.points[(k + s) % n] for k in range(n)]
    return bool(np.array_equal(_ranks(a.points), _ranks(moved)))


def _classify(a: _State, b: _State) -> StratumEvent:
    """The single elementary change between two states a tolerance apart."""
    lam = 0.5 * (a.lam + b.lam)
    na, nb = len(a), len(b)
    if abs(na - nb) == 2:
        big, small = (a, b) if na > nb else (b, a)
        k, s, _ = _match_removed(big.points, small.points)
        if k is None:
            raise NonGenericPath(f"unrecognised change of critical points near lambda={lam!r}")
        n = len(big)
        rest = [big.points[(k + 2 + j) % n] for j in range(n - 2)]
        moved = [small.points[(j + s) % (n - 2)] for j in range(n - 2)]
        if not np.array_equal(_ranks(rest), _ranks(moved)):
            raise NonGenericPath(f"a value swap coincides with a birth or death near lambda={lam!r}")
        pair = [big.points[k].position, big.points[(k + 1) % n].position]
        return StratumEvent(lam, EventKind.BIRTH_DEATH,
                            {"direction": "death" if na > nb else "birth", "positions": pair})
    if na == nb:
        s, _ = _match_same(a.points, b.points)
        if s is not None:
            moved = [b.points[(k + s) % nb] for k in range(nb)]
            ra, rb = _ranks(a.points), _ranks(moved)
            changed = np.flatnonzero(ra != rb)
            if len(changed) == 2 and abs(int(ra[changed[0]]) - int(ra[changed[1]])) == 1:
                pos = [a.points[int(k)].position for k in changed]
                return StratumEvent(lam, EventKind.VALUE_SWAP, {"positions": pos})
    raise NonGenericPath(f"several strata crossed within {TOL_LAMBDA:g} near lambda={lam!r}")


def _nudge(f, g, lam: float, limit: float, config: Config) -> _State:
    """First non-degenerate state after lam, stepping geometrically towards ``limit``.

    Just past a fold the vanishing pair is too close to resolve and the
    critical point finder reports a near-double root for a short while.
    """
    step = TOL_LAMBDA
    while lam + step < limit:
        st = _observe(f, g, lam + step, config)
        if st.ok:
            return st
        step *= 2.0
    st = _observe(f, g, limit, config)
    if st.ok:
        return st
    raise NonGenericPath(f"path is degenerate around lambda={lam!r}")


def _scan(f, g, a: _State, b: _State, config: Config, out: List[Tuple[_State, _State]]):
    """Append (before, after) state pairs for every event between a and b."""
    while not _same_type(a, b):
        start = a
        lo, hi = a.lam, b.lam
        hi_state = b
        # bisect for the first parameter whose state differs from ``a``
        while hi - lo > TOL_LAMBDA:
            mid = 0.5 * (lo + hi)
            st = _observe(f, g, mid, config)
            if _same_type(a, st):
                lo, a = mid, st
            else:
                hi, hi_state = mid, st
        if not hi_state.ok:
            hi_state = _nudge(f, g, hi, b.lam, config)
        if out and out[-1][1] is start and hi_state.lam - start.lam <= 2 * TOL_LAMBDA:
            raise NonGenericPath(f"two events closer than {TOL_LAMBDA:g} near lambda={hi!r}")
        out.append((a, hi_state))
        if hi_state.lam >= b.lam:
            break
        a = hi_state


def _endpoint(f, g, lam: float, config: Config) -> _State:
    st = _observe(f, g, lam, config)
    if not st.ok:
        raise NonGenericPath(f"the {'first' if lam == 0.0 else 'second'} endpoint is not simple Morse")
    return st


def _event_pairs(f, g, coarse_steps: int, config: Config):
    states = [_endpoint(f, g, 0.0, config)]
    for k in range(1, coarse_steps):
        lam = k / coarse_steps
        st = _observe(f, g, lam, config)
        if not st.ok:
            st = _nudge(f, g, lam, (k + 1) / coarse_steps, config)
        states.append(st)
    states.append(_endpoint(f, g, 1.0, config))
    pairs: List[Tuple[_State, _State]] = []
    for a, b in zip(states, states[1:]):
        _scan(f, g, a, b, config, pairs)
    return states, pairs


def detect_events(f: CircleFunction, g: CircleFunction, coarse_steps: int = 256,
                  config: Config = DEFAULT_CONFIG) -> List[StratumEvent]:
    """Stratum crossings of the segment from f to g, sorted by parameter."""
    _, pairs = _event_pairs(f, g, coarse_steps, config)
    return [_classify(a, b) for a, b in pairs]


# ------------------------------------------------------------------ trace

PAIR_MARGIN = 1e-12


def _separate(hi: float, lo: float) -> Tuple[float, float]:
    """Values for a max/min pair at a fold, pulled apart to a strict order.

    Near a fold the two values agree to rounding level and may even come out
    inverted; the pair is widened symmetrically to a gap of 2 * PAIR_MARGIN.
    """
    if hi - lo >= 2 * PAIR_MARGIN:
        return hi, lo
    mid = 0.5 * (hi + lo)
    return mid + PAIR_MARGIN, mid - PAIR_MARGIN


class _Builder:
    """Accumulates the edit script while following ids of tracked points.

    Relabels are deferred: tracking through a value swap only updates the
    pending values, and one Relabel is emitted right before the next birth
    or death (or at the end).
    """

    def __init__(self, start: _State):
        self.graph = LabelledReebGraph(tuple(Vertex(k, p.value, p.index)
                                             for k, p in enumerate(start.points)))
        self.ids = list(range(len(start)))  # ids[k] belongs to the k-th point by position
        self.state = start
        self.next_id = len(start)
        self.steps = []

    def _push(self, op):
        self.steps.append(op)
        self.graph = apply(op, self.graph)

    def flush(self, values: Optional[Dict[int, float]] = None):
        if values is None:
            values = {vid: p.value for vid, p in zip(self.ids, self.state.points)}
        current = self.graph.label_map()
        if any(current[k] != v for k, v in values.items()):
            self._push(Relabel({**current, **values}))

    def follow(self, st: _State):
        """Track the points into a state of the same type."""
        s, _ = _match_same(self.state.points, st.points)
        n = len(st)
        ids = [None] * n
        for k in range(n):
            ids[(k + s) % n] = self.ids[k]
        self.ids = ids
        self.state = st

    def death(self, after: _State):
        pts = self.state.points
        n = len(pts)
        k, s, _ = _match_removed(pts, after.points)
        u1, u2 = (k, (k + 1) % n) if pts[k].index is Index.MAX else ((k + 1) % n, k)
        values = {vid: p.value for vid, p in zip(self.ids, pts)}
        values[self.ids[u1]], values[self.ids[u2]] = _separate(pts[u1].value, pts[u2].value)
        self.flush(values)
        self._push(Death((self.ids[u1], self.ids[u2])))
        ids = [None] * (n - 2)
        for j in range(n - 2):
            ids[(j + s) % (n - 2)] = self.ids[(k + 2 + j) % n]
        self.ids = ids
        self.state = after

    def birth(self, after: _State):
        pts = after.points
        n = len(pts)
        k, s, _ = _match_removed(pts, self.state.points)
        m = n - 2
        ids = [None] * n
        for j in range(m):
            ids[(k + 2 + j) % n] = self.ids[(j + s) % m]
        # old vertices take their new values first, then the pair appears
        self.flush({ids[(k + 2 + j) % n]: pts[(k + 2 + j) % n].value for j in range(m)})
        new = (k, (k + 1) % n)
        mx, mn = new if pts[new[0]].index is Index.MAX else new[::-1]
        # the max sits next to the lower end of the edge
        left, right = ids[(k - 1) % n], ids[(k + 2) % n]
        lab = self.graph.label_map()
        v1, v2 = (left, right) if lab[left] < lab[right] else (right, left)
        fresh = (self.next_id, self.next_id + 1)
        ids[mx], ids[mn] = fresh
        self.next_id += 2
        self._push(Birth((v1, v2), *_separate(pts[mx].value, pts[mn].value), fresh))
        self.ids = ids
        self.state = after


def _trace_once(f, g, coarse_steps: int, config: Config):
    states, pairs = _event_pairs(f, g, coarse_steps, config)
    events = [_classify(a, b) for a, b in pairs]
    births = sum(e.kind is EventKind.BIRTH_DEATH and e.detail["direction"] == "birth" for e in events)
    deaths = sum(e.kind is EventKind.BIRTH_DEATH and e.detail["direction"] == "death" for e in events)
    parity_ok = len(states[0]) - len(states[-1]) == 2 * (deaths - births)
    return states, pairs, events, parity_ok


def trace(f: CircleFunction, g: CircleFunction, coarse_steps: int = 256, retries: int = 3,
          seed: int = 0, config: Config = DEFAULT_CONFIG) -> TraceResult:
    """Edit script from extract(f) to extract(g) following the segment between them.

    The coarse grid is refined (x4, up to 4096 steps) whenever the detected
    events disagree with the change in vertex count.  A non-generic path is
    retried up to ``retries`` times with g perturbed by seeded noise of size
    1e-9 on its coefficients; a final Relabel then moves the perturbed
    endpoint onto extract(g).
    """
    rng = np.random.default_rng(seed)
    target = extract(g, config)
    g_used = g
    for attempt in range(retries + 1):
        try:
            steps = coarse_steps
            while True:
                states, pairs, events, parity_ok = _trace_once(f, g_used, steps, config)
                if parity_ok or steps >= 4096:
                    break
                steps *= 4
            if not parity_ok:
                raise NonGenericPath("events disagree with the change in vertex count")
            break
        except NonGenericPath as exc:
            if attempt == retries or not isinstance(g, TrigPoly):
                raise
            log.info("retrying a non-generic path (%s)", exc)
            noise = lambda c: tuple(np.asarray(c) + 1e-9 * rng.uniform(-1, 1, len(c)))
            g_used = TrigPoly(g.a0 + 1e-9 * rng.uniform(-1, 1), noise(g.cos), noise(g.sin))

    builder = _Builder(states[0])
    for before, after in pairs:
        builder.follow(before)
        if len(after) < len(before):
            builder.death(after)
        elif len(after) > len(before):
            builder.birth(after)
        else:
            builder.follow(after)
    builder.follow(states[-1])
    if g_used is not g:
        end = _State(1.0, critical_points(g, config))
        if len(end) != len(builder.state):
            raise NonGenericPath("the perturbed endpoint changed the graph of g")
        builder.follow(end)
    builder.flush()

    script = Deformation(tuple(builder.steps))
    try:
        end, total = apply_sequence(script, extract(f, config))
    except Exception as exc:  # any failure here is an internal inconsistency
        raise ReplayMismatch(f"trace script does not replay: {exc}") from exc
    if not is_isomorphic(end, target, 1e-6)[0]:
        raise ReplayMismatch("trace script ends away from extract(g)")
    return TraceResult(events, script, float(total), cr_norm(difference(f, g), 2, config))


# --------------------------------------------------------------- stability

def stability_radius(f: CircleFunction, config: Config = DEFAULT_CONFIG) -> float:
    """Half the smallest gap between distinct critical values of f."""
    values = np.sort([p.value for p in critical_points(f, config)])
    if values.size < 2:
        return float("inf")
    return 0.5 * float(np.min(np.diff(values)))


@dataclass(frozen=True)
class ValueMatch:
    value: float
    index: Index
    partner: Optional[float]
    distance: float
    passed: bool


@dataclass
class StabilityReport:
    delta: float
    matches: List[ValueMatch]

    @property
    def all_passed(self) -> bool:
        return all(m.passed for m in self.matches)


def check_critical_value_stability(f: CircleFunction, g: CircleFunction, delta: float,
                                   config: Config = DEFAULT_CONFIG,
                                   tol: float = 1e-12) -> StabilityReport:
    """For each critical value c of f, look for one of g with the same index in [c - delta, c + delta]."""
    if not genericity_report(f, config).is_simple or not genericity_report(g, config).is_simple:
        raise PreconditionViolated("both functions must be simple Morse")
    gap = cr_norm(difference(f, g), 0, config)
    radius = stability_radius(f, config)
    if not gap <= delta + tol:
        raise PreconditionViolated(f"||f - g||_C0 = {gap!r} exceeds delta = {delta!r}")
    if not delta <= radius + tol:
        raise PreconditionViolated(f"delta = {delta!r} exceeds the stability radius {radius!r}")
    theirs = critical_points(g, config)
    matches = []
    for p in critical_points(f, config):
        cands = [q.value for q in theirs if q.index is p.index]
        if cands:
            best = min(cands, key=lambda v: abs(v - p.value))
            dist = abs(best - p.value)
        else:
            best, dist = None, float("inf")
        matches.append(ValueMatch(p.value, p.index, best, dist, dist <= delta + tol))
    return StabilityReport(delta, matches)


def local_relabel(f: CircleFunction, g: CircleFunction,
                  config: Config = DEFAULT_CONFIG) -> Deformation:
    """The single Relabel from extract(f) to extract(g) through the position-preserving bijection.

    Needs f and g to have the same number of critical points; the caller is
    responsible for g being close enough to f for the result to be valid.
    """
    p, q = critical_points(f, config), critical_points(g, config)
    if len(p) != len(q):
        raise PreconditionViolated("f and g have different numbers of critical points")
    s, _ = _match_same(p, q)
    if s is None:
        raise PreconditionViolated("no index-preserving correspondence between critical points")
    n = len(p)
    return Deformation((Relabel({k: q[(k + s) % n].value for k in range(n)}),))
