import numpy as np
import pytest
from hypothesis import given, settings

from helpers import graphs, random_grid_graph
from reebedit.distance import DistanceOptions, brute_force_oracle, edit_distance, plan_cost
from reebedit.edits import apply_sequence, connect_canonical
from reebedit.errors import BudgetExceeded, InvalidGraph
from reebedit.reeb import graph_from_labels, is_isomorphic

PSE1 = graph_from_labels([0.0, 0.6, 0.2, 1.0]), graph_from_labels([0.0, 1.0])
PSE2 = graph_from_labels([0.0, 0.5, 0.1, 1.0, 0.12, 0.52]), graph_from_labels([0.0, 1.0])


class TestExamples:
    def test_identity(self):
        g = PSE2[0]
        est = edit_distance(g, g)
        assert est.lower == 0.0 and est.upper == 0.0

    def test_shift(self):
        est = edit_distance(graph_from_labels([0.0, 1.0]), graph_from_labels([0.1, 1.2]))
        assert est.lower == pytest.approx(0.2) and est.upper == pytest.approx(0.2)

    @pytest.mark.parametrize("pair", [PSE1, PSE2], ids=["pse1", "pse2"])
    def test_worked_examples(self, pair):
        est = edit_distance(*pair)
        assert est.lower == pytest.approx(0.2, abs=1e-9)
        assert est.upper == pytest.approx(0.2, abs=1e-9)
        if est.witness_plan is not None:
            assert plan_cost(est.witness_plan, *pair) == pytest.approx(0.2)

    def test_pse2_needs_plan(self):
        # no canonical script reaches 0.2 here, only the merged-relabel plan
        est = edit_distance(*PSE2)
        assert est.upper_source == "plan"
        assert plan_cost(est.witness_plan, *PSE2) == pytest.approx(0.2)

    def test_pse2_beats_canonical(self):
        _, naive = apply_sequence(connect_canonical(*PSE2), PSE2[0])
        assert edit_distance(*PSE2).upper < naive - 0.1


class TestSandwich:
    @settings(max_examples=40, deadline=None)
    @given(graphs(max_pairs=3), graphs(max_pairs=3))
    def test_witness_replays(self, g1, g2):
        est = edit_distance(g1, g2)
        assert est.lower <= est.upper
        end, total = apply_sequence(est.witness_script, g1)
        assert is_isomorphic(end, g2, 1e-12)[0]
        assert total <= est.upper + 1e-6 * max(1.0, est.upper)
        assert est.eta == pytest.approx(total - est.upper, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(graphs(max_pairs=3), graphs(max_pairs=3))
    def test_symmetry(self, g1, g2):
        assert abs(edit_distance(g1, g2).upper - edit_distance(g2, g1).upper) <= 1e-9

    @settings(max_examples=30, deadline=None)
    @given(graphs(max_pairs=3), graphs(max_pairs=3))
    def test_positive_definite_proxy(self, g1, g2):
        if edit_distance(g1, g2).upper < 1e-9:
            assert is_isomorphic(g1, g2, 1e-6)[0]


class TestOracle:
    def test_equal(self):
        g = graph_from_labels([0.0, 1.0])
        assert brute_force_oracle(g, g, 0.01) == 0.0

    def test_shift(self):
        d = brute_force_oracle(graph_from_labels([0.0, 1.0]), graph_from_labels([0.1, 1.2]), 0.01)
        assert abs(d - 0.2) <= 0.01

    def test_pse1(self):
        assert abs(brute_force_oracle(*PSE1, 0.01) - 0.2) <= 0.02

    def test_birth_before_death_helps(self):
        # the cheapest path needs six vertices on the way
        g1 = graph_from_labels([0.0, 0.6, 0.2, 1.0])
        g2 = graph_from_labels([0.1, 0.3, 0.2, 0.9])
        four = brute_force_oracle(g1, g2, 0.01, max_vertices=4)
        six = brute_force_oracle(g1, g2, 0.01)
        assert six < four
        assert abs(six - edit_distance(g1, g2).upper) <= 0.02

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            brute_force_oracle(PSE2[0], PSE2[1], 0.01)
        with pytest.raises(BudgetExceeded):
            brute_force_oracle(*PSE1, 0.0001)

    def test_off_grid(self):
        with pytest.raises(InvalidGraph):
            brute_force_oracle(graph_from_labels([0.0, 1.0]), graph_from_labels([0.0, 1.005]), 0.01)

    def test_option(self):
        est = edit_distance(*PSE1, DistanceOptions(oracle=True, grid_step=0.02))
        assert est.oracle is not None and abs(est.oracle - 0.2) <= 0.04

    def test_lower_below_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(15):
            g1 = random_grid_graph(rng, int(rng.choice([2, 4])), 0.02, 15)
            g2 = random_grid_graph(rng, int(rng.choice([2, 4])), 0.02, 15)
            assert edit_distance(g1, g2).lower <= brute_force_oracle(g1, g2, 0.02) + 0.02
