"""Labelled Reeb graphs of simple Morse functions on the circle.

For a curve the Reeb graph is a cycle whose vertices are the critical
points, alternately minima and maxima, labelled by their critical values.
A graph is stored as the cyclic sequence of its vertices; edges join cyclic
neighbours.  Vertex ids are stable tokens so that edit scripts can address
vertices while the graph changes shape.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .circlefn import (DEFAULT_CONFIG, TWO_PI, CircleFunction, Config, Index,
                       PiecewiseLinear, critical_points)
from .errors import FormatError, InvalidGraph


@dataclass(frozen=True)
class Vertex:
    id: int
    label: float
    index: Index


@dataclass(frozen=True)
class LabelledReebGraph:
    vertices: Tuple[Vertex, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))

    def __len__(self):
        return len(self.vertices)

    @property
    def labels(self) -> List[float]:
        return [v.label for v in self.vertices]

    @property
    def ids(self) -> List[int]:
        return [v.id for v in self.vertices]

    def position(self, vid: int) -> int:
        for k, v in enumerate(self.vertices):
            if v.id == vid:
                return k
        raise KeyError(vid)

    def vertex(self, vid: int) -> Vertex:
        return self.vertices[self.position(vid)]

    def label_map(self) -> Dict[int, float]:
        return {v.id: v.label for v in self.vertices}

    def neighbours(self, vid: int) -> Tuple[Vertex, Vertex]:
        """(previous, next) vertex in cyclic order."""
        k = self.position(vid)
        n = len(self.vertices)
        return self.vertices[k - 1], self.vertices[(k + 1) % n]

    def next_id(self) -> int:
        return max(self.ids) + 1 if self.vertices else 0


def graph_from_labels(labels: Sequence[float], ids: Optional[Sequence[int]] = None) -> LabelledReebGraph:
    """Build a graph from a cyclic label sequence, inferring min/max indices."""
    labels = [float(x) for x in labels]
    n = len(labels)
    if ids is None:
        ids = range(n)
    first = Index.MAX if n > 1 and labels[0] > labels[1] else Index.MIN
    verts = []
    for k, (vid, lab) in enumerate(zip(ids, labels)):
        verts.append(Vertex(int(vid), lab, first if k % 2 == 0 else first.opposite()))
    graph = LabelledReebGraph(tuple(verts))
    validate(graph)
    return graph


def violations(graph: LabelledReebGraph) -> List[str]:
    """All invariant violations of ``graph``; empty when it is valid."""
    out = []
    verts = graph.vertices
    n = len(verts)
    if n < 2 or n % 2:
        out.append(f"vertex count must be even and >= 2 (got {n})")
        return out
    ids = [v.id for v in verts]
    if len(set(ids)) != n:
        out.append("duplicate vertex ids")
    for k, v in enumerate(verts):
        nxt = verts[(k + 1) % n]
        if v.index == nxt.index:
            out.append(f"indices do not alternate at id={v.id}")
    labels = [v.label for v in verts]
    if not all(np.isfinite(labels)):
        out.append("non-finite label")
    for k, v in enumerate(verts):
        prev, nxt = verts[k - 1], verts[(k + 1) % n]
        if v.index is Index.MAX and not (v.label > prev.label and v.label > nxt.label):
            out.append(f"local extremality violated at id={v.id}")
        if v.index is Index.MIN and not (v.label < prev.label and v.label < nxt.label):
            out.append(f"local extremality violated at id={v.id}")
    if len(set(labels)) != n:
        out.append("labels are not pairwise distinct")
    return out


def validate(graph: LabelledReebGraph) -> LabelledReebGraph:
    problems = violations(graph)
    if problems:
        raise InvalidGraph("; ".join(problems))
    return graph


def extract(f: CircleFunction, config: Config = DEFAULT_CONFIG) -> LabelledReebGraph:
    """Labelled Reeb graph of a simple Morse function."""
    points = critical_points(f, config)
    return LabelledReebGraph(tuple(Vertex(k, p.value, p.index) for k, p in enumerate(points)))


def realize(graph: LabelledReebGraph) -> PiecewiseLinear:
    """A piecewise linear function whose labelled Reeb graph is ``graph``.

    Breakpoints sit at uniformly spaced angles, starting at 0 with the first
    vertex of the cyclic sequence.
    """
    validate(graph)
    n = len(graph)
    positions = tuple(TWO_PI * k / n for k in range(n))
    return PiecewiseLinear(positions, tuple(graph.labels))


def _dihedral_images(seq: Sequence) -> Iterable[Tuple[bool, int, List]]:
    n = len(seq)
    for reflected in (False, True):
        base = list(seq[::-1]) if reflected else list(seq)
        for shift in range(n):
            yield reflected, shift, base[shift:] + base[:shift]


def is_isomorphic(g1: LabelledReebGraph, g2: LabelledReebGraph, tol: float = 0.0):
    """Return (True, bijection id1 -> id2) or (False, None).

    Edge-preserving bijections of a cycle are exactly its rotations and
    reflections, so those are tried exhaustively.
    """
    if len(g1) != len(g2):
        return False, None
    v1 = g1.vertices
    for _, _, image in _dihedral_images(g2.vertices):
        if all(a.index == b.index and abs(a.label - b.label) <= tol for a, b in zip(v1, image)):
            return True, {a.id: b.id for a, b in zip(v1, image)}
    return False, None


def same_cycle(g1: LabelledReebGraph, g2: LabelledReebGraph) -> bool:
    """Identical ids and labels up to rotation of the stored sequence."""
    if len(g1) != len(g2):
        return False
    n = len(g1)
    seq2 = [(v.id, v.label) for v in g2.vertices]
    seq1 = [(v.id, v.label) for v in g1.vertices]
    return any(seq1 == seq2[s:] + seq2[:s] for s in range(n))


def canonical_form(graph: LabelledReebGraph) -> LabelledReebGraph:
    """Lexicographically least label sequence among dihedral images starting at a minimum."""
    best = None
    for _, _, image in _dihedral_images(graph.vertices):
        if image[0].index is not Index.MIN:
            continue
        key = [v.label for v in image]
        if best is None or key < best[0]:
            best = (key, image)
    return LabelledReebGraph(tuple(best[1]))


# ------------------------------------------------------------ serialisation

def graph_to_dict(graph: LabelledReebGraph) -> dict:
    return {"vertices": [{"id": v.id, "label": v.label, "index": str(v.index)} for v in graph.vertices]}


def graph_from_dict(data: dict) -> LabelledReebGraph:
    try:
        verts = tuple(Vertex(int(v["id"]), float(v["label"]), Index.parse(v["index"]))
                      for v in data["vertices"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed graph JSON: {exc}") from exc
    return LabelledReebGraph(verts)


def to_dot(graph: LabelledReebGraph, name: str = "reeb") -> str:
    lines = [f"graph {name} {{"]
    for v in graph.vertices:
        shape = "triangle" if v.index is Index.MAX else "invtriangle"
        lines.append(f'  v{v.id} [label="{v.id}: {v.label:.6g}", shape={shape}];')
    n = len(graph)
    for k, v in enumerate(graph.vertices):
        w = graph.vertices[(k + 1) % n]
        lines.append(f"  v{v.id} -- v{w.id};")
    lines.append("}")
    return "\n".join(lines) + "\n"
