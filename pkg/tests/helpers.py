"""Random graphs and functions shared by the test modules."""
import numpy as np
from hypothesis import strategies as st

from reebedit.reeb import graph_from_labels


def random_graph(rng: np.random.Generator, n: int):
    """Random valid labelled graph with n vertices (n even), first vertex a minimum."""
    k = n // 2
    mins = rng.uniform(0.0, 1.0, k)
    maxs = np.maximum(mins, np.roll(mins, -1)) + rng.uniform(0.01, 1.0, k)
    labels = np.empty(n)
    labels[0::2], labels[1::2] = mins, maxs
    return graph_from_labels(labels)


def random_grid_graph(rng: np.random.Generator, n: int, step: float, top: int):
    """Random valid graph with distinct labels on the grid step * {0..top}."""
    while True:
        c = rng.choice(top + 1, n, replace=False)
        if all(c[p] > c[p - 1] and c[p] > c[(p + 1) % n] for p in range(1, n, 2)):
            return graph_from_labels(np.round(c * step, 12))


@st.composite
def graphs(draw, min_pairs=1, max_pairs=4):
    k = draw(st.integers(min_pairs, max_pairs))
    mins = draw(st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k, unique=True))
    bumps = draw(st.lists(st.floats(0.01, 1.0), min_size=k, max_size=k))
    labels = []
    for i in range(k):
        labels.append(mins[i])
        labels.append(max(mins[i], mins[(i + 1) % k]) + bumps[i])
    if len(set(labels)) != len(labels):
        from hypothesis import assume
        assume(False)
    return graph_from_labels(labels)
