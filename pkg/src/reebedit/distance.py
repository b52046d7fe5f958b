"""Certified bounds on the editing distance between labelled Reeb graphs.

Upper bounds come from *plans*.  A plan fixes which vertices of G1 survive
(matched to vertices of G2), which die and which are born, and a middle
cyclic sequence in which all of them coexist.  It is realized as

    Births (pairs of almost equal labels)  ->  one Relabel  ->  Deaths

and its cost is the infimum of the Relabel cost over all admissible middle
labels, the birth and death costs tending to zero.  Each born or deleted
pair collapses to a single unknown value ``x`` whose Relabel cost is
max(|x - A|, |x - B|) for the pair's labels A > B; each Birth or Death asks
that value to lie between the pair's outer neighbours.  The constraints are
difference constraints, so the optimum is read off the transitive closure of
the ``<=`` relation.

Lower bounds come from the pseudodist module.  ``brute_force_oracle`` is an
independent grid search used to validate both on small instances.
"""
from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .circlefn import Index
from .edits import Birth, Death, Deformation, Relabel, apply_sequence, connect_canonical
from .errors import BudgetExceeded, InvalidDeformation, InvalidGraph, InvalidPlan
from .pseudodist import persistence_lower, pseudo_lower
from .reeb import LabelledReebGraph, is_isomorphic, realize, validate

log = logging.getLogger(__name__)

Token = Tuple[str, int]  # ("m", id1) matched, ("d", id1) deleted, ("b", id2) born


@dataclass(frozen=True)
class Plan:
    """A structured edit strategy from G1 to G2.

    ``middle`` is the cyclic vertex sequence once every birth has happened and
    before any death; matched tokens carry the G1 id.  ``deletions`` lists
    G1 (max id, min id) pairs in death order, ``insertions`` lists G2
    (max id, min id) pairs in birth order.  ``reflected`` records that G2 is
    read against its stored orientation.
    """
    matching: Tuple[Tuple[int, int], ...]
    middle: Tuple[Token, ...]
    deletions: Tuple[Tuple[int, int], ...]
    insertions: Tuple[Tuple[int, int], ...]
    reflected: bool = False

    @property
    def edit_count(self) -> int:
        return len(self.deletions) + len(self.insertions)


@dataclass
class DistanceOptions:
    max_plan_size: int = 12      # exhaustive matching search up to this many vertices
    beam_width: int = 64         # start pairs tried beyond that size
    max_arc_tokens: int = 10     # unmatched vertices allowed per arc and side
    max_sequences: int = 20000   # reduction sequences examined per arc system
    oracle: bool = False
    grid_step: float = 0.01


@dataclass
class DistanceEstimate:
    lower: float
    upper: float
    witness_script: Deformation
    witness_plan: Optional[Plan]
    lower_source: str
    eta: float
    upper_source: str = "plan"
    oracle: Optional[float] = None
    timings: Dict[str, float] = field(default_factory=dict)


# ------------------------------------------------------------ constraint systems

def _reduce(seq: List, removals: Sequence[Tuple], cyclic: bool):
    """Replay adjacent-pair removals; return (v1, v2) outer neighbours of each.

    Each removal is (u1, u2) with u1 the max; v1 is u1's other neighbour and
    v2 is u2's.  Raises InvalidPlan when a pair is not adjacent.
    """
    seq = list(seq)
    out = []
    for u1, u2 in removals:
        try:
            k1, k2 = seq.index(u1), seq.index(u2)
        except ValueError:
            raise InvalidPlan(f"pair {u1}, {u2} is not present") from None
        n = len(seq)
        if cyclic:
            if n < 4:
                raise InvalidPlan("a removal needs at least four vertices")
            fwd = (k1 + 1) % n == k2
            bwd = (k2 + 1) % n == k1
        else:
            fwd, bwd = k1 + 1 == k2, k2 + 1 == k1
            if min(k1, k2) == 0 or max(k1, k2) == n - 1:
                raise InvalidPlan("arc endpoints cannot be removed")
        if not (fwd or bwd):
            raise InvalidPlan(f"pair {u1}, {u2} is not adjacent when removed")
        step = 1 if fwd else -1
        v1 = seq[(k1 - step) % n]
        v2 = seq[(k2 + step) % n]
        out.append((v1, v2))
        for k in sorted((k1, k2), reverse=True):
            del seq[k]
    return out


@dataclass
class _System:
    """Box and order constraints on collapsed pair values.

    Variable k has box [A_k - t, B_k + t]; relations are (lo, hi) node pairs
    meaning value(lo) <= value(hi), where a node is ("v", k) or ("c", label).
    """
    boxes: List[Tuple[float, float]]
    relations: List[Tuple[Tuple[str, float], Tuple[str, float]]]

    def closure(self):
        consts = sorted({node[1] for rel in self.relations for node in rel if node[0] == "c"})
        nv = len(self.boxes)
        index = {("v", k): k for k in range(nv)}
        index.update({("c", c): nv + i for i, c in enumerate(consts)})
        n = nv + len(consts)
        reach = np.zeros((n, n), dtype=bool)
        for lo, hi in self.relations:
            reach[index[lo], index[hi]] = True
        for k in range(n):
            reach |= reach[:, k:k + 1] & reach[k:k + 1, :]
        return reach, np.asarray(consts, dtype=float)

    def optimum(self) -> float:
        """Smallest t for which the system is feasible (inf if never)."""
        nv = len(self.boxes)
        if nv == 0:
            return 0.0
        A = np.array([b[0] for b in self.boxes])
        B = np.array([b[1] for b in self.boxes])
        reach, consts = self.closure()
        rc = reach[nv:, nv:]
        if rc.size and np.any(rc & (consts[:, None] >= consts[None, :])):
            return float("inf")
        t = float(np.max(A - B) / 2.0)
        rv = reach[:nv, :nv]
        if rv.any():
            t = max(t, float(np.max(np.where(rv, (A[:, None] - B[None, :]) / 2.0, -np.inf))))
        if consts.size:
            cv = reach[nv:, :nv]   # constant <= variable
            if cv.any():
                t = max(t, float(np.max(np.where(cv, consts[:, None] - B[None, :], -np.inf))))
            vc = reach[:nv, nv:]   # variable <= constant
            if vc.any():
                t = max(t, float(np.max(np.where(vc, A[:, None] - consts[None, :], -np.inf))))
        return max(t, 0.0)

    def midpoints(self, t: float) -> np.ndarray:
        """A feasible assignment at ``t``: midpoints of the propagated intervals."""
        nv = len(self.boxes)
        A = np.array([b[0] for b in self.boxes])
        B = np.array([b[1] for b in self.boxes])
        reach, consts = self.closure()
        lo, hi = A - t, B + t
        rv = reach[:nv, :nv]
        lo = np.maximum(lo, np.max(np.where(rv, (A - t)[:, None], -np.inf), axis=0, initial=-np.inf))
        hi = np.minimum(hi, np.min(np.where(rv, (B + t)[None, :], np.inf), axis=1, initial=np.inf))
        if consts.size:
            lo = np.maximum(lo, np.max(np.where(reach[nv:, :nv], consts[:, None], -np.inf), axis=0))
            hi = np.minimum(hi, np.min(np.where(reach[:nv, nv:], consts[None, :], np.inf), axis=1))
        return 0.5 * (lo + hi)


def _system(pairs, outer, var_label, const_label) -> _System:
    """Build the constraint system for a reduction.

    ``pairs`` are the removed (u1, u2) tokens, ``outer`` their (v1, v2)
    neighbours; ``var_label`` gives the pair labels that fix each box and
    ``const_label`` the fixed label of a surviving token.
    """
    owner = {}
    boxes = []
    for k, (u1, u2) in enumerate(pairs):
        owner[u1] = owner[u2] = k
        a, b = var_label(u1), var_label(u2)
        boxes.append((max(a, b), min(a, b)))

    def node(tok):
        if tok in owner:
            return ("v", owner[tok])
        return ("c", const_label(tok))

    rels = []
    for k, (v1, v2) in enumerate(outer):
        rels.append((node(v1), ("v", k)))
        rels.append((("v", k), node(v2)))
    return _System(boxes, rels)


# ------------------------------------------------------------ plan cost

def _token_index(tok, g1, g2) -> Index:
    kind, vid = tok
    return (g2 if kind == "b" else g1).vertex(vid).index


def _check_plan(plan: Plan, g1: LabelledReebGraph, g2: LabelledReebGraph):
    try:
        match = dict(plan.matching)
        if len(match) != len(plan.matching) or len(set(match.values())) != len(match):
            raise InvalidPlan("matching is not a bijection")
        if len(match) < 2:
            raise InvalidPlan("a plan must match at least two vertices")
        mids = plan.middle
        if len(set(mids)) != len(mids):
            raise InvalidPlan("middle sequence repeats a token")
        want = ({("m", a) for a in match} | {("d", v) for v in g1.ids if v not in match}
                | {("b", v) for v in g2.ids if v not in match.values()})
        if set(mids) != want:
            raise InvalidPlan("middle sequence does not cover every vertex exactly once")
        for a, b in plan.matching:
            if g1.vertex(a).index != g2.vertex(b).index:
                raise InvalidPlan(f"matched vertices {a}, {b} have different indices")
        idx = [_token_index(t, g1, g2) for t in mids]
        if any(x == y for x, y in zip(idx, idx[1:] + idx[:1])):
            raise InvalidPlan("middle sequence does not alternate")
        # dropping born tokens must give G1, dropping deleted ones must give G2
        seq1 = [t[1] for t in mids if t[0] != "b"]
        seq2 = [match[t[1]] if t[0] == "m" else t[1] for t in mids if t[0] != "d"]
        if not _is_rotation(seq1, g1.ids):
            raise InvalidPlan("middle sequence is not compatible with G1")
        ref = g2.ids[::-1] if plan.reflected else g2.ids
        if not _is_rotation(seq2, ref):
            raise InvalidPlan("middle sequence is not compatible with G2")
        deleted = {("d", v) for p in plan.deletions for v in p}
        if len(deleted) != 2 * len(plan.deletions) or deleted != {t for t in mids if t[0] == "d"}:
            raise InvalidPlan("deletions must pair every unmatched vertex of G1")
        born = {("b", v) for p in plan.insertions for v in p}
        if len(born) != 2 * len(plan.insertions) or born != {t for t in mids if t[0] == "b"}:
            raise InvalidPlan("insertions must pair every unmatched vertex of G2")
    except KeyError as exc:
        raise InvalidPlan(f"unknown vertex id {exc.args[0]}") from None


def _is_rotation(seq, ref) -> bool:
    if len(seq) != len(ref):
        return False
    n = len(ref)
    return any(list(seq) == list(ref[s:]) + list(ref[:s]) for s in range(n))


def _plan_systems(plan: Plan, g1, g2):
    """Death system (end state) and birth system (start state) of a plan."""
    lab1, lab2 = g1.label_map(), g2.label_map()
    match = dict(plan.matching)
    mids = list(plan.middle)
    deaths = [(("d", a), ("d", b)) for a, b in plan.deletions]
    births = [(("b", a), ("b", b)) for a, b in reversed(plan.insertions)]
    for pairs in (deaths, births):
        for u1, u2 in pairs:
            if _token_index(u1, g1, g2) is not Index.MAX or _token_index(u2, g1, g2) is not Index.MIN:
                raise InvalidPlan(f"pair {u1[1]}, {u2[1]} must be (max, min)")
    end_label = lambda t: lab2[match[t[1]]] if t[0] == "m" else lab2[t[1]]  # noqa: E731
    start_label = lambda t: lab2[t[1]] if t[0] == "b" else lab1[t[1]]  # noqa: E731
    death_sys = _system(deaths, _reduce(mids, deaths, True), start_label, end_label)
    birth_sys = _system(births, _reduce(mids, births, True), end_label, start_label)
    return death_sys, birth_sys, deaths, births


def plan_cost(plan: Plan, g1: LabelledReebGraph, g2: LabelledReebGraph) -> float:
    """Infimum of the cost of deformations realizing ``plan``."""
    _check_plan(plan, g1, g2)
    death_sys, birth_sys, _, _ = _plan_systems(plan, g1, g2)
    lab1, lab2 = g1.label_map(), g2.label_map()
    t = max((abs(lab1[a] - lab2[b]) for a, b in plan.matching), default=0.0)
    t = max(t, death_sys.optimum(), birth_sys.optimum())
    if not np.isfinite(t):
        raise InvalidPlan("the plan's ordering constraints cannot be met")
    return t


def plan_script(plan: Plan, g1: LabelledReebGraph, g2: LabelledReebGraph,
                slack: float) -> Deformation:
    """Explicit deformation realizing ``plan`` at cost close to plan_cost + slack.

    Collapsed pairs are opened to width proportional to their removal rank
    times a tiny unit, so that nested pairs stay nested.
    """
    t = plan_cost(plan, g1, g2) + slack
    death_sys, birth_sys, deaths, births = _plan_systems(plan, g1, g2)
    lab1, lab2 = g1.label_map(), g2.label_map()
    match = dict(plan.matching)
    unit = slack / (16.0 * (len(deaths) + len(births) + 1) ** 2)

    end, start = {}, {}
    for tok in plan.middle:
        kind, vid = tok
        start[tok] = lab1[vid] if kind != "b" else None
        end[tok] = lab2[match[vid]] if kind == "m" else (lab2[vid] if kind == "b" else None)
    if deaths:
        vals = death_sys.midpoints(t)
        for k, (u1, u2) in enumerate(deaths):
            end[u1], end[u2] = vals[k] + (k + 1) * unit, vals[k] - (k + 1) * unit
    if births:
        vals = birth_sys.midpoints(t)
        for k, (u1, u2) in enumerate(births):
            start[u1], start[u2] = vals[k] + (k + 1) * unit, vals[k] - (k + 1) * unit

    fresh = max(g1.ids) + 1
    new_id = {}
    for a, b in plan.insertions:
        for v in (a, b):
            new_id[("b", v)] = fresh
            fresh += 1
    ident = lambda tok: new_id[tok] if tok[0] == "b" else tok[1]  # noqa: E731

    steps = []
    outer = _reduce(list(plan.middle), births, True)
    for (u1, u2), (v1, v2) in reversed(list(zip(births, outer))):
        steps.append(Birth((ident(v1), ident(v2)), start[u1], start[u2], (ident(u1), ident(u2))))
    steps.append(Relabel({ident(tok): end[tok] for tok in plan.middle}))
    for u1, u2 in deaths:
        steps.append(Death((ident(u1), ident(u2))))
    return Deformation(tuple(steps))


# ------------------------------------------------------------ plan search

def _reductions(seq: List, removable, max_sequences: int):
    """Yield (pairs, outer) for reduction sequences removing every removable token.

    Removals in disjoint parts of the sequence commute; the search only
    allows a removal left of the previous one when the two interact, which
    skips most duplicate orders.  ``seq`` is linear with fixed end tokens.
    """
    budget = [max_sequences]
    pos = {tok: k for k, tok in enumerate(seq)}

    def rec(cur, pairs, outer, last, seam):
        if budget[0] <= 0:
            return
        if not any(removable(t) for t in cur):
            budget[0] -= 1
            yield list(pairs), list(outer)
            return
        for j in range(1, len(cur) - 2):
            x, y = cur[j], cur[j + 1]
            if not (removable(x) and removable(y)):
                continue
            if pos[x] < last and x not in seam and y not in seam:
                continue
            u1, u2, v1, v2 = (x, y, cur[j - 1], cur[j + 2]) if x[2] is Index.MAX \
                else (y, x, cur[j + 2], cur[j - 1])
            pairs.append((u1, u2))
            outer.append((v1, v2))
            yield from rec(cur[:j] + cur[j + 2:], pairs, outer, pos[x], {cur[j - 1], cur[j + 2]})
            pairs.pop()
            outer.pop()

    yield from rec(list(seq), [], [], -1, set())


class _ArcSolver:
    """Cost of the cheapest way to handle the vertices between two matched ones."""

    def __init__(self, l1, i1, l2, i2, options: DistanceOptions):
        self.l1, self.i1, self.l2, self.i2 = l1, i1, l2, i2
        self.n1, self.n2 = len(l1), len(l2)
        self.options = options
        self.memo = {}

    def cost(self, ps, length1, qs, length2, bound):
        """Arc from G1 position ps (length1 steps ahead) and G2 position qs."""
        key = (ps % self.n1, length1, qs % self.n2, length2)
        hit = self.memo.get(key)
        if hit is not None and (hit[0] < bound or hit[2] >= bound):
            return hit[0], hit[1]
        value, choice = self._solve(ps, length1, qs, length2, bound)
        self.memo[key] = (value, choice, bound)
        return value, choice

    def _solve(self, ps, length1, qs, length2, bound):
        a = [(ps + k) % self.n1 for k in range(1, length1)]
        b = [(qs + k) % self.n2 for k in range(1, length2)]
        if not a and not b:
            return 0.0, ((), (), ())
        if max(len(a), len(b)) > self.options.max_arc_tokens:
            return float("inf"), None
        l1, l2 = self.l1, self.l2
        p_end = ("P", 0, None)
        q_end = ("Q", 0, None)
        pe, qe = ps % self.n1, (ps + length1) % self.n1
        pf, qf = qs % self.n2, (qs + length2) % self.n2
        atok = [("a", k, self.i1[p]) for k, p in enumerate(a)]
        btok = [("b", k, self.i2[q]) for k, q in enumerate(b)]

        def end_label(tok):
            if tok[0] == "P":
                return l2[pf]
            if tok[0] == "Q":
                return l2[qf]
            return l2[b[tok[1]]]

        def start_label(tok):
            if tok[0] == "P":
                return l1[pe]
            if tok[0] == "Q":
                return l1[qe]
            if tok[0] == "a":
                return l1[a[tok[1]]]
            return l2[b[tok[1]]]

        best = (float("inf"), None)
        blocks_a = [atok[k:k + 2] for k in range(0, len(atok), 2)]
        blocks_b = [btok[k:k + 2] for k in range(0, len(btok), 2)]
        na, nb = len(blocks_a), len(blocks_b)
        for slots in itertools.combinations(range(na + nb), na):
            slots = set(slots)
            ia, ib = iter(blocks_a), iter(blocks_b)
            body = []
            for s in range(na + nb):
                body.extend(next(ia) if s in slots else next(ib))
            seq = [p_end] + body + [q_end]
            limit = min(bound, best[0])
            t_d, d_choice = self._best_reduction(seq, "a", start_label, end_label, limit)
            if t_d >= limit:
                continue
            t_b, b_choice = self._best_reduction(seq, "b", end_label, start_label, limit)
            t = max(t_d, t_b)
            if t < best[0]:
                best = (t, (tuple(seq), d_choice, b_choice))
        return best

    def _best_reduction(self, seq, kind, var_label, const_label, limit):
        best = (float("inf"), None)
        if not any(t[0] == kind for t in seq):
            return 0.0, ()
        for pairs, outer in _reductions(seq, lambda t: t[0] == kind, self.options.max_sequences):
            t = _system(pairs, outer, var_label, const_label).optimum()
            if t < best[0]:
                best = (t, tuple(pairs))
                if t <= 0.0:
                    break
        return best


def _search_plans(g1, g2, bound, lower, options: DistanceOptions):
    """Bottleneck dynamic programme over cyclic, index-preserving matchings."""
    best = (bound, None)
    n1, n2 = len(g1), len(g2)
    l1 = np.asarray(g1.labels)
    i1 = [v.index for v in g1.vertices]
    for reflected in (False, True):
        verts2 = list(g2.vertices[::-1]) if reflected else list(g2.vertices)
        l2 = np.asarray([v.label for v in verts2])
        i2 = [v.index for v in verts2]
        arcs = _ArcSolver(l1, i1, l2, i2, options)
        starts = [(p, q) for p in range(n1) for q in range(n2)
                  if i1[p] is Index.MAX and i2[q] is Index.MAX]
        starts.sort(key=lambda pq: abs(l1[pq[0]] - l2[pq[1]]))
        if max(n1, n2) > options.max_plan_size:
            starts = starts[:options.beam_width]
        for p0, q0 in starts:
            if best[0] <= lower:
                return best
            base = abs(l1[p0] - l2[q0])
            if base >= best[0]:
                continue
            # states (dp, dq): offsets of the last matched pair from the start
            table = {(0, 0): (base, None, None)}
            order = sorted(((dp, dq) for dp in range(1, n1) for dq in range(1, n2)
                            if dp % 2 == dq % 2), key=lambda s: s[0] + s[1])
            for dp, dq in order:
                here = abs(l1[(p0 + dp) % n1] - l2[(q0 + dq) % n2])
                if here >= best[0]:
                    continue
                cand = None
                for (pp, pq), (val, _, _) in table.items():
                    if pp >= dp or pq >= dq or (dp - pp) % 2 == 0 or (dq - pq) % 2 == 0:
                        continue
                    limit = min(best[0], cand[0] if cand else np.inf)
                    if val >= limit:
                        continue
                    arc, choice = arcs.cost(p0 + pp, dp - pp, q0 + pq, dq - pq, limit)
                    v = max(val, here, arc)
                    if v < limit:
                        cand = (v, (pp, pq), choice)
                if cand is not None:
                    table[(dp, dq)] = cand
            for (pp, pq), (val, _, _) in table.items():
                if (n1 - pp) % 2 == 0 or (n2 - pq) % 2 == 0 or val >= best[0]:
                    continue
                arc, choice = arcs.cost(p0 + pp, n1 - pp, q0 + pq, n2 - pq, best[0])
                v = max(val, arc)
                if v < best[0]:
                    best = (v, (reflected, p0, q0, table, (pp, pq), choice, verts2))
    return best


def _assemble(found, g1, g2) -> Plan:
    """Turn the dynamic programme's back pointers into an id-based Plan."""
    reflected, p0, q0, table, last, closing, verts2 = found
    n1, n2 = len(g1), len(g2)
    v1 = g1.vertices
    chain = [(last, closing, (n1, n2))]
    state = last
    while state != (0, 0):
        _, prev, choice = table[state]
        chain.append((prev, choice, state))
        state = prev
    chain.reverse()
    matching, middle, deletions, insertions = [], [], [], []
    for (pp, pq), choice, (dp, dq) in chain:
        a = v1[(p0 + pp) % n1]
        b = verts2[(q0 + pq) % n2]
        matching.append((a.id, b.id))
        middle.append(("m", a.id))
        seq, d_pairs, b_pairs = choice
        if not seq:
            continue

        def ident(tok, pp=pp, pq=pq):
            if tok[0] == "a":
                return ("d", v1[(p0 + pp + 1 + tok[1]) % n1].id)
            return ("b", verts2[(q0 + pq + 1 + tok[1]) % n2].id)

        middle.extend(ident(t) for t in seq[1:-1])
        deletions.extend((ident(u1)[1], ident(u2)[1]) for u1, u2 in d_pairs)
        # arc reductions remove born pairs in reverse birth order
        insertions[:0] = [(ident(u1)[1], ident(u2)[1]) for u1, u2 in reversed(b_pairs)]
    return Plan(tuple(matching), tuple(middle), tuple(deletions), tuple(insertions), reflected)


def edit_distance(g1: LabelledReebGraph, g2: LabelledReebGraph,
                  options: Optional[DistanceOptions] = None) -> DistanceEstimate:
    """Interval [lower, upper] containing the editing distance, with a witness script."""
    options = options or DistanceOptions()
    validate(g1)
    validate(g2)
    timings = {}
    t0 = time.perf_counter()
    f1, f2 = realize(g1), realize(g2)
    extrema_bound = pseudo_lower(f1, f2)
    pers_bound = persistence_lower(g1, g2)
    lower = max(extrema_bound, pers_bound)
    source = "persistence bottleneck" if pers_bound > extrema_bound else "extrema"
    timings["lower"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    canonical = connect_canonical(g1, g2)
    _, canonical_cost = apply_sequence(canonical, g1)
    cost, found = _search_plans(g1, g2, canonical_cost, lower, options)
    timings["search"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    plan, script, upper, upper_source = None, canonical, canonical_cost, "canonical"
    if found is not None:
        plan = _assemble(found, g1, g2)
        upper = plan_cost(plan, g1, g2)
        upper_source = "plan"
        scale = max(1.0, float(np.max(np.abs(g1.labels + g2.labels))))
        script = None
        for slack in (1e-10, 1e-8, 1e-6):
            try:
                candidate = plan_script(plan, g1, g2, slack * scale)
                end, _ = apply_sequence(candidate, g1)
            except InvalidDeformation as exc:
                log.debug("witness at slack %g failed: %s", slack, exc)
                continue
            if is_isomorphic(end, g2, 1e-12)[0]:
                script = candidate
                break
        if script is None:
            log.warning("could not realize the optimal plan; falling back to the canonical script")
            plan, script, upper, upper_source = None, canonical, canonical_cost, "canonical"
    _, script_cost = apply_sequence(script, g1)
    timings["witness"] = time.perf_counter() - t0

    if lower > upper:
        # both bounds are exact expressions in the labels; only rounding can invert them
        if lower - upper > 1e-12 * max(1.0, upper):
            raise AssertionError(f"lower bound {lower} exceeds upper bound {upper}")
        lower = upper
    est = DistanceEstimate(lower=float(lower), upper=float(upper), witness_script=script,
                           witness_plan=plan, lower_source=source,
                           eta=float(script_cost - upper), upper_source=upper_source,
                           timings=timings)
    if options.oracle:
        t0 = time.perf_counter()
        est.oracle = brute_force_oracle(g1, g2, options.grid_step)
        timings["oracle"] = time.perf_counter() - t0
    return est


# ------------------------------------------------------------ brute force oracle

# largest number of cells of the dense four-vertex table
_ORACLE_CELLS = 260_000_000


def _grid_indices(labels, lo, step):
    q = (np.asarray(labels, dtype=float) - lo) / step
    k = np.rint(q)
    if np.any(np.abs(q - k) > 1e-6):
        raise InvalidGraph("oracle labels must lie on the grid")
    return k.astype(np.int64)


def _as_cells(graph: LabelledReebGraph, lo, step) -> np.ndarray:
    """Grid coordinates of the cyclic label sequence, starting at a minimum."""
    verts = list(graph.vertices)
    k = next(i for i, v in enumerate(verts) if v.index is Index.MIN)
    verts = verts[k:] + verts[:k]
    return _grid_indices([v.label for v in verts], lo, step)


def _dihedral_images(cells: np.ndarray) -> np.ndarray:
    """All rotations and reflections of a cyclic sequence that start at a minimum."""
    n = len(cells)
    rows = set()
    for seq in (list(cells), [cells[0]] + list(cells[:0:-1])):
        for r in range(0, n, 2):
            rows.add(tuple(seq[r:] + seq[:r]))
    return np.array(sorted(rows), dtype=np.int64)


def oracle_grid(graphs: Sequence[LabelledReebGraph], grid_step: float, margin: int = 2):
    """(lo, hi) of a label grid covering ``graphs`` with ``margin`` spare steps."""
    labels = [x for g in graphs for x in g.labels]
    lo = grid_step * np.round(min(labels) / grid_step) - margin * grid_step
    hi = grid_step * np.round(max(labels) / grid_step) + margin * grid_step
    return float(lo), float(hi)


def brute_force_oracle(g1: LabelledReebGraph, g2: LabelledReebGraph, grid_step: float,
                       max_levels: int = 100000, max_vertices: int = 6) -> float:
    """Cheapest edit path from g1 to g2 with every label kept on a grid.

    The search runs over all labelled graphs with at most ``max_vertices``
    vertices (2, 4 or 6) whose labels lie on the grid within two steps of the
    input range.  Moving every label by at most one step costs one step; a
    birth or death of a pair k steps apart costs k/2 steps.  Relabel moves may
    pass through states in which non-adjacent labels coincide, since
    consecutive moves merge into one valid Relabel of no greater cost; births
    and deaths only act on injective states.  The value bounds the editing
    distance from above and converges to it as the grid is refined.
    """
    from ._gridsearch import grid_search

    validate(g1)
    validate(g2)
    if len(g1) > 4 or len(g2) > 4:
        raise BudgetExceeded("the oracle handles graphs with at most four vertices")
    if max_vertices not in (4, 6):
        raise ValueError("max_vertices must be 4 or 6")
    lo, hi = oracle_grid([g1, g2], grid_step)
    R = int(round((hi - lo) / grid_step)) + 1
    if R ** 4 > _ORACLE_CELLS or 2 * R * 6 > 32000:
        raise BudgetExceeded(f"grid of {R} levels per label is too large for the oracle")
    src = _as_cells(g1, lo, grid_step)
    dst = _as_cells(g2, lo, grid_step)
    args = (R, src, _dihedral_images(dst), len(dst))
    # four-vertex search first; its value bounds the six-vertex search from above
    cost, _ = grid_search(*args, False, max_levels, 32000)
    if cost == -2:
        raise BudgetExceeded(f"oracle exceeded {max_levels} cost levels")
    if cost < 0:
        return float("inf")
    if max_vertices == 6:
        better, _ = grid_search(*args, True, max_levels, cost)
        if better == -2:
            raise BudgetExceeded(f"oracle exceeded {max_levels} cost levels")
        if better >= 0:
            cost = better
    return float(cost) * grid_step / 2.0
