import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import graphs, random_graph
from reebedit.distance import edit_distance
from reebedit.edits import (Birth, Death, Deformation, Relabel, apply, apply_sequence,
                            connect_canonical, cost, find_deletable_pairs, invert, invert_sequence,
                            script_from_dict, script_to_dict)
from reebedit.errors import (DeathOnTwoVertexGraph, FormatError, InvalidDeformation,
                             UnknownVertexId)
from reebedit.reeb import graph_from_labels, is_isomorphic, violations

PSE1 = graph_from_labels([0.0, 0.6, 0.2, 1.0])
PSE2 = graph_from_labels([0.0, 0.5, 0.1, 1.0, 0.12, 0.52])
TWO = graph_from_labels([0.0, 1.0])


class TestApply:
    def test_death(self):
        assert apply(Death((1, 2)), PSE1).labels == [0.0, 1.0]

    def test_birth(self):
        g = apply(Birth((0, 1), 0.6, 0.2), TWO)
        assert is_isomorphic(g, PSE1)[0]
        assert len(set(g.ids)) == 4

    def test_relabel(self):
        assert apply(Relabel({0: 0.1, 1: 0.9}), TWO).labels == [0.1, 0.9]

    def test_relabel_may_cross_non_adjacent(self):
        # the two minima swap their order; local extremality still holds
        g = apply(Relabel({0: 0.25, 1: 0.6, 2: 0.15, 3: 1.0}), PSE1)
        assert violations(g) == []

    def test_errors(self):
        with pytest.raises(DeathOnTwoVertexGraph):
            apply(Death((1, 0)), TWO)
        with pytest.raises(UnknownVertexId):
            apply(Death((7, 2)), PSE1)
        with pytest.raises(InvalidDeformation):
            apply(Death((3, 0)), PSE1)  # 0 < 0.6 fails the outer pattern check
        with pytest.raises(InvalidDeformation):
            apply(Birth((0, 1), 0.3, 0.3), TWO)
        with pytest.raises(InvalidDeformation):
            apply(Birth((0, 1), 0.2, 0.6), TWO)
        with pytest.raises(InvalidDeformation):
            apply(Relabel({0: 0.5, 1: 0.4}), TWO)


class TestCost:
    def test_examples(self):
        assert cost(Death((1, 2)), PSE1) == pytest.approx(0.2)
        assert cost(Relabel({0: 0.1, 1: 0.9}), TWO) == pytest.approx(0.1)
        assert cost(Relabel({0: 0.0, 1: 1.0}), TWO) == 0.0

    def test_sequence(self):
        assert apply_sequence(Deformation(), PSE1) == (PSE1, 0.0)
        _, total = apply_sequence([Relabel({0: 0.1, 1: 1.2})], TWO)
        assert total == pytest.approx(0.2)

    def test_pipeline_three_deaths(self):
        g = graph_from_labels([0.0, 0.5, 0.1, 0.9, 0.3, 0.7, 0.2, 1.0])
        steps = []
        for _ in range(3):
            op = find_deletable_pairs(g)[0]
            steps.append(op)
            g = apply(op, g)
        steps.append(Relabel({g.ids[0]: 0.05, g.ids[1]: 1.05}))
        steps.append(Birth((g.ids[0], g.ids[1]), 0.8, 0.4))
        steps.append(Birth((g.ids[0], g.ids[1]), 0.6, 0.5))
        end, _ = apply_sequence(steps, graph_from_labels([0.0, 0.5, 0.1, 0.9, 0.3, 0.7, 0.2, 1.0]))
        assert len(end) == 6 and violations(end) == []

    def test_step_index_reported(self):
        with pytest.raises(InvalidDeformation) as info:
            apply_sequence([Relabel({0: 0.1, 1: 0.9}), Death((0, 1))], TWO)
        assert info.value.step == 2


def _ops(g, rng):
    ops = list(find_deletable_pairs(g))
    for k in range(len(g)):
        a, b = g.vertices[k], g.vertices[(k + 1) % len(g)]
        lo, hi = sorted((a.label, b.label))
        u2, u1 = np.sort(rng.uniform(lo, hi, 2))
        v1, v2 = (a, b) if a.label < b.label else (b, a)
        ops.append(Birth((v1.id, v2.id), u1, u2))
    ops.append(Relabel({v.id: v.label + rng.uniform(-1e-3, 1e-3) for v in g.vertices}))
    return ops


class TestInverse:
    def test_death_inverse_is_birth(self):
        inv = invert(Death((1, 2)), PSE1)
        assert isinstance(inv, Birth)
        assert (inv.max_label, inv.min_label) == (0.6, 0.2)

    def test_relabel_inverse(self):
        inv = invert(Relabel({0: 0.1, 1: 0.9}), TWO)
        assert inv.mapping == {0: 0.0, 1: 1.0}

    @settings(max_examples=60, deadline=None)
    @given(graphs(), st.integers(0, 2 ** 32 - 1))
    def test_round_trip_and_cost(self, g, seed):
        for op in _ops(g, np.random.default_rng(seed)):
            try:
                h = apply(op, g)
            except InvalidDeformation:
                continue  # rounding can collapse a random birth onto an existing label
            assert violations(h) == []
            assert len(h) - len(g) == {Birth: 2, Death: -2, Relabel: 0}[type(op)]
            inv = invert(op, g)
            back = apply(inv, h)
            assert is_isomorphic(back, g, 0.0)[0]
            assert cost(inv, h) == cost(op, g)

    def test_invert_sequence(self):
        script = connect_canonical(PSE2, PSE1)
        end, c = apply_sequence(script, PSE2)
        back, c_back = apply_sequence(invert_sequence(script, PSE2), end)
        assert is_isomorphic(back, PSE2, 0.0)[0]
        assert c_back == pytest.approx(c, abs=1e-15)


class TestDeletable:
    def test_examples(self):
        assert find_deletable_pairs(PSE1) == [Death((1, 2))]
        assert find_deletable_pairs(TWO) == []
        pairs = {d.pair for d in find_deletable_pairs(PSE2)}
        assert {(1, 2), (5, 4)} <= pairs

    def test_nonempty(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            g = random_graph(rng, 2 * int(rng.integers(2, 9)))
            ops = find_deletable_pairs(g)
            assert ops
            for op in ops:
                apply(op, g)


class TestCanonical:
    def test_identity(self):
        script = connect_canonical(TWO, TWO)
        assert len(script) == 1 and apply_sequence(script, TWO)[1] == 0.0

    def test_pse1(self):
        end, total = apply_sequence(connect_canonical(PSE1, TWO), PSE1)
        assert end.labels == [0.0, 1.0] and total == pytest.approx(0.2)

    def test_pse2_naive(self):
        script = connect_canonical(PSE2, TWO)
        assert script.counts() == {"birth": 0, "death": 2, "relabel": 1}
        assert apply_sequence(script, PSE2)[1] == pytest.approx(0.4)

    @settings(max_examples=40, deadline=None)
    @given(graphs(), graphs())
    def test_reaches_target(self, g1, g2):
        end, total = apply_sequence(connect_canonical(g1, g2), g1)
        assert is_isomorphic(end, g2, 0.0)[0]
        assert total >= edit_distance(g1, g2).lower - 1e-12


class TestScriptJson:
    def test_round_trip(self):
        script = Deformation((Death((1, 2)), Relabel({0: 0.1, 3: 0.9}), Birth((0, 3), 0.5, 0.3, (8, 9))))
        assert script_from_dict(script_to_dict(script)) == script

    def test_bad(self):
        with pytest.raises(FormatError):
            script_from_dict({"steps": [{"op": "swap"}]})
        with pytest.raises(FormatError):
            script_from_dict({})
