"""Elementary deformations of labelled Reeb graphs on the circle.

Three operations act on a graph:

* ``Birth`` inserts an adjacent (max, min) pair inside an edge,
* ``Death`` removes such a pair,
* ``Relabel`` moves every label while keeping local extremality and injectivity.

Vertices are addressed by id so that a script stays meaningful while the
graph gains and loses vertices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .circlefn import Index
from .errors import (DeathOnTwoVertexGraph, FormatError, InvalidDeformation,
                     UnknownVertexId)
from .reeb import LabelledReebGraph, Vertex, violations


@dataclass(frozen=True)
class Birth:
    """Insert u1 (max, next to v1) and u2 (min, next to v2) on the edge v1 -- v2."""
    edge: Tuple[int, int]
    max_label: float
    min_label: float
    new_ids: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        object.__setattr__(self, "edge", (int(self.edge[0]), int(self.edge[1])))
        object.__setattr__(self, "max_label", float(self.max_label))
        object.__setattr__(self, "min_label", float(self.min_label))
        if self.new_ids is not None:
            object.__setattr__(self, "new_ids", (int(self.new_ids[0]), int(self.new_ids[1])))


@dataclass(frozen=True)
class Death:
    """Remove the adjacent pair (u1 max, u2 min)."""
    pair: Tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "pair", (int(self.pair[0]), int(self.pair[1])))


@dataclass(frozen=True)
class Relabel:
    """Assign a new label to every current vertex."""
    assignment: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        items = self.assignment.items() if isinstance(self.assignment, Mapping) else self.assignment
        object.__setattr__(self, "assignment",
                           tuple(sorted((int(k), float(v)) for k, v in items)))

    @property
    def mapping(self) -> Dict[int, float]:
        return dict(self.assignment)


ElementaryDeformation = Union[Birth, Death, Relabel]


@dataclass(frozen=True)
class Deformation:
    steps: Tuple[ElementaryDeformation, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def counts(self) -> Dict[str, int]:
        out = {"birth": 0, "death": 0, "relabel": 0}
        for s in self.steps:
            out[_op_name(s)] += 1
        return out


def _op_name(op) -> str:
    if isinstance(op, Birth):
        return "birth"
    if isinstance(op, Death):
        return "death"
    if isinstance(op, Relabel):
        return "relabel"
    raise TypeError(f"not an elementary deformation: {op!r}")


def _position(graph: LabelledReebGraph, vid: int) -> int:
    try:
        return graph.position(vid)
    except KeyError:
        raise UnknownVertexId(f"unknown vertex id {vid}") from None


def _birth_ids(op: Birth, graph: LabelledReebGraph) -> Tuple[int, int]:
    if op.new_ids is not None:
        return op.new_ids
    nxt = graph.next_id()
    return nxt, nxt + 1


def _death_context(op: Death, graph: LabelledReebGraph):
    """Positions of u1, u2 and the outer neighbours v1, v2 of a Death."""
    n = len(graph)
    if n < 4:
        raise DeathOnTwoVertexGraph("a death needs at least four vertices")
    k1, k2 = _position(graph, op.pair[0]), _position(graph, op.pair[1])
    u1, u2 = graph.vertices[k1], graph.vertices[k2]
    if u1.index is not Index.MAX or u2.index is not Index.MIN:
        raise InvalidDeformation("death pair must be (max, min)")
    if (k1 + 1) % n == k2:
        step = 1
    elif (k2 + 1) % n == k1:
        step = -1
    else:
        raise InvalidDeformation("death pair is not adjacent")
    v1 = graph.vertices[(k1 - step) % n]
    v2 = graph.vertices[(k2 + step) % n]
    return k1, k2, u1, u2, v1, v2


def _check_result(graph: LabelledReebGraph, what: str) -> LabelledReebGraph:
    problems = violations(graph)
    if problems:
        raise InvalidDeformation(f"{what} produces an invalid graph: " + "; ".join(problems))
    return graph


def apply(op: ElementaryDeformation, graph: LabelledReebGraph) -> LabelledReebGraph:
    """The graph obtained by applying ``op`` to ``graph``."""
    verts = list(graph.vertices)
    n = len(verts)
    if isinstance(op, Birth):
        a, b = op.edge
        ka, kb = _position(graph, a), _position(graph, b)
        v1, v2 = verts[ka], verts[kb]
        if not v1.label < op.min_label < op.max_label < v2.label:
            raise InvalidDeformation(
                "birth requires label(v1) < min_label < max_label < label(v2)")
        u1_id, u2_id = _birth_ids(op, graph)
        if u1_id == u2_id or u1_id in graph.ids or u2_id in graph.ids:
            raise InvalidDeformation("birth ids must be fresh and distinct")
        u1 = Vertex(u1_id, op.max_label, Index.MAX)
        u2 = Vertex(u2_id, op.min_label, Index.MIN)
        if (ka + 1) % n == kb:
            # walking forward v1 -> v2; for two vertices this picks the edge after v1
            verts[ka + 1:ka + 1] = [u1, u2]
        elif (kb + 1) % n == ka:
            verts[kb + 1:kb + 1] = [u2, u1]
        else:
            raise InvalidDeformation("birth edge endpoints are not adjacent")
        return _check_result(LabelledReebGraph(tuple(verts)), "birth")
    if isinstance(op, Death):
        k1, k2, u1, u2, v1, v2 = _death_context(op, graph)
        if not v1.label < u2.label < u1.label < v2.label:
            raise InvalidDeformation(
                "death requires label(v1) < label(u2) < label(u1) < label(v2)")
        keep = tuple(v for k, v in enumerate(verts) if k not in (k1, k2))
        return _check_result(LabelledReebGraph(keep), "death")
    if isinstance(op, Relabel):
        mapping = op.mapping
        unknown = set(mapping) - set(graph.ids)
        if unknown:
            raise UnknownVertexId(f"relabel names unknown vertex id {min(unknown)}")
        missing = set(graph.ids) - set(mapping)
        if missing:
            raise InvalidDeformation(f"relabel misses vertex id {min(missing)}")
        new = tuple(Vertex(v.id, mapping[v.id], v.index) for v in verts)
        return _check_result(LabelledReebGraph(new), "relabel")
    raise TypeError(f"not an elementary deformation: {op!r}")


def cost(op: ElementaryDeformation, graph: LabelledReebGraph) -> float:
    """Cost of ``op`` applied to ``graph``; the op is validated first."""
    apply(op, graph)
    if isinstance(op, Birth):
        return abs(op.max_label - op.min_label) / 2.0
    if isinstance(op, Death):
        lab = graph.label_map()
        return abs(lab[op.pair[0]] - lab[op.pair[1]]) / 2.0
    mapping = op.mapping
    return max(abs(v.label - mapping[v.id]) for v in graph.vertices)


def invert(op: ElementaryDeformation, graph: LabelledReebGraph) -> ElementaryDeformation:
    """The deformation undoing ``op`` on ``graph`` (same cost)."""
    apply(op, graph)
    if isinstance(op, Birth):
        return Death(_birth_ids(op, graph))
    if isinstance(op, Death):
        _, _, u1, u2, v1, v2 = _death_context(op, graph)
        return Birth((v1.id, v2.id), u1.label, u2.label, (u1.id, u2.id))
    return Relabel({v.id: v.label for v in graph.vertices})


def apply_sequence(script, graph: LabelledReebGraph) -> Tuple[LabelledReebGraph, float]:
    """Replay a deformation; errors report the failing step (1-based)."""
    total = 0.0
    for k, op in enumerate(script, start=1):
        try:
            c = cost(op, graph)
            graph = apply(op, graph)
        except InvalidDeformation as exc:
            raise type(exc)(str(exc), step=k) from exc
        total += c
    return graph, total


def invert_sequence(script, graph: LabelledReebGraph) -> Deformation:
    """Deformation from the end of ``script`` back to ``graph``."""
    inverses = []
    for op in script:
        inverses.append(invert(op, graph))
        graph = apply(op, graph)
    return Deformation(tuple(reversed(inverses)))


# ------------------------------------------------------------ canonical path

def find_deletable_pairs(graph: LabelledReebGraph) -> List[Death]:
    """Every valid Death on ``graph``, cheapest first."""
    n = len(graph)
    if n < 4:
        return []
    out = []
    verts = graph.vertices
    for k, u in enumerate(verts):
        if u.index is not Index.MAX:
            continue
        for step in (1, -1):
            w = verts[(k + step) % n]
            v1 = verts[(k - step) % n]
            v2 = verts[(k + 2 * step) % n]
            if v1.label < w.label < u.label < v2.label:
                out.append((u.label - w.label, u.id, w.id))
    out.sort()
    return [Death((a, b)) for _, a, b in out]


def reduce_to_two(graph: LabelledReebGraph) -> Tuple[LabelledReebGraph, List[Death]]:
    """Greedily delete the cheapest pair until two vertices remain."""
    deaths = []
    while len(graph) > 2:
        # existence is guaranteed for >= 4 vertices
        op = find_deletable_pairs(graph)[0]
        deaths.append(op)
        graph = apply(op, graph)
    return graph, deaths


def connect_canonical(g1: LabelledReebGraph, g2: LabelledReebGraph) -> Deformation:
    """Deaths down to two vertices, one Relabel, then Births rebuilding ``g2``.

    Vertices born on the way receive fresh ids above every id of ``g1``.  The
    final graph carries exactly the labels of ``g2``.
    """
    core1, deaths1 = reduce_to_two(g1)
    core2, deaths2 = reduce_to_two(g2)
    # identify the two surviving vertices by index
    by_index = {v.index: v.id for v in core1.vertices}
    idmap = {v.id: by_index[v.index] for v in core2.vertices}
    relabel = Relabel({idmap[v.id]: v.label for v in core2.vertices})
    # replay g2's reduction to know each Birth's context
    states = [g2]
    for op in deaths2:
        states.append(apply(op, states[-1]))
    fresh = max(g1.ids) + 1
    births = []
    for op, before in zip(reversed(deaths2), reversed(states[:-1])):
        back = invert(op, before)
        for old in back.new_ids:
            idmap[old] = fresh
            fresh += 1
        births.append(Birth((idmap[back.edge[0]], idmap[back.edge[1]]), back.max_label,
                            back.min_label, (idmap[back.new_ids[0]], idmap[back.new_ids[1]])))
    return Deformation(tuple(deaths1) + (relabel,) + tuple(births))


# ------------------------------------------------------------ serialisation

def step_to_dict(op: ElementaryDeformation) -> dict:
    if isinstance(op, Birth):
        out = {"op": "birth", "edge": list(op.edge), "labels": [op.max_label, op.min_label]}
        if op.new_ids is not None:
            out["ids"] = list(op.new_ids)
        return out
    if isinstance(op, Death):
        return {"op": "death", "pair": list(op.pair)}
    return {"op": "relabel", "map": {str(k): v for k, v in op.assignment}}


def step_from_dict(data: dict) -> ElementaryDeformation:
    try:
        kind = data["op"]
        if kind == "birth":
            hi, lo = data["labels"]
            ids = data.get("ids")
            return Birth(tuple(data["edge"]), hi, lo, tuple(ids) if ids is not None else None)
        if kind == "death":
            return Death(tuple(data["pair"]))
        if kind == "relabel":
            return Relabel({int(k): float(v) for k, v in data["map"].items()})
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed edit step: {exc}") from exc
    raise FormatError(f"unknown edit op {data.get('op')!r}")


def script_to_dict(script) -> dict:
    return {"steps": [step_to_dict(s) for s in script]}


def script_from_dict(data: dict) -> Deformation:
    try:
        steps = data["steps"]
    except (KeyError, TypeError) as exc:
        raise FormatError("edit script JSON needs a 'steps' list") from exc
    return Deformation(tuple(step_from_dict(s) for s in steps))
