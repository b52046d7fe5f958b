import json
import pathlib

import numpy as np
import pytest

from reebedit.circlefn import (TrigPoly, cr_norm, difference, function_from_dict,
                               genericity_report, scale)
from reebedit.edits import Death, Relabel, apply_sequence
from reebedit.errors import PreconditionViolated
from reebedit.experiments import random_simple_morse
from reebedit.homotopy import (EventKind, check_critical_value_stability, detect_events,
                               local_relabel, stability_radius, trace)
from reebedit.reeb import extract, graph_from_labels, is_isomorphic, realize

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
SIN = TrigPoly(0.0, (0.0,), (1.0,))


def fixture(name):
    return function_from_dict(json.loads((FIXTURES / name).read_text()))


class TestEvents:
    def test_constant_shift(self):
        assert detect_events(SIN, TrigPoly(0.3, (0.0,), (1.0,))) == []

    def test_pse1_single_birth_death(self):
        events = detect_events(fixture("pse1_f_trig.json"), fixture("pse1_g_trig.json"))
        assert [e.kind for e in events] == [EventKind.BIRTH_DEATH]
        assert events[0].detail["direction"] == "death"
        assert 0.0 < events[0].lam < 1.0

    def test_swap_single_value_swap(self):
        events = detect_events(fixture("swap_f.json"), fixture("swap_g.json"))
        assert [e.kind for e in events] == [EventKind.VALUE_SWAP]
        assert events[0].lam == pytest.approx(0.5, abs=1e-9)

    @pytest.mark.parametrize("seed", range(8))
    def test_parity(self, seed):
        rng = np.random.default_rng(seed)
        f = random_simple_morse(rng, int(rng.integers(1, 5)))
        g = random_simple_morse(rng, int(rng.integers(1, 5)))
        res = trace(f, g)
        signed = sum((1 if e.detail["direction"] == "death" else -1)
                     for e in res.events if e.kind is EventKind.BIRTH_DEATH)
        assert len(extract(f)) - len(extract(g)) == 2 * signed
        lams = [e.lam for e in res.events]
        assert lams == sorted(lams)


class TestTrace:
    def test_shift(self):
        res = trace(SIN, TrigPoly(0.3, (0.0,), (1.0,)))
        assert len(res.script) == 1 and isinstance(res.script.steps[0], Relabel)
        assert res.script_cost == pytest.approx(0.3, abs=1e-9)
        assert res.c2_bound == pytest.approx(0.3, abs=1e-12)

    def test_identity(self):
        res = trace(SIN, SIN)
        assert len(res.script) == 0 and res.script_cost == 0.0

    def test_pse1(self):
        f, g = fixture("pse1_f_trig.json"), fixture("pse1_g_trig.json")
        res = trace(f, g)
        assert [type(s) for s in res.script] == [Relabel, Death, Relabel]
        assert 0.2 - 1e-6 <= res.script_cost <= res.c2_bound + 1e-6
        end, total = apply_sequence(res.script, extract(f))
        assert is_isomorphic(end, extract(g), 1e-6)[0]
        assert total == pytest.approx(res.script_cost)

    @pytest.mark.parametrize("seed", range(10))
    def test_global_bound(self, seed):
        rng = np.random.default_rng(100 + seed)
        f = random_simple_morse(rng, int(rng.integers(1, 5)))
        g = random_simple_morse(rng, int(rng.integers(1, 5)))
        res = trace(f, g)
        assert res.script_cost <= res.c2_bound + 1e-6
        end, _ = apply_sequence(res.script, extract(f))
        assert is_isomorphic(end, extract(g), 1e-6)[0]

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_noise_fixture_norms(self, n):
        h = fixture(f"noise_{n}.json")
        assert cr_norm(h, 2) == pytest.approx(1.0, abs=1e-9)
        assert cr_norm(h, 0) == pytest.approx(1.0 / n ** 2, abs=1e-12)


class TestStability:
    def test_radius_examples(self):
        assert stability_radius(SIN) == pytest.approx(1.0)
        assert stability_radius(realize(graph_from_labels([0.0, 0.6, 0.2, 1.0]))) == pytest.approx(0.1)
        assert stability_radius(realize(graph_from_labels([0.0, 0.5, 0.25, 0.75]))) == pytest.approx(0.125)

    def test_identity(self):
        rep = check_critical_value_stability(SIN, SIN, 0.1)
        assert rep.all_passed and all(m.distance == 0.0 for m in rep.matches)

    def test_shift(self):
        rep = check_critical_value_stability(SIN, TrigPoly(0.05, (0.0,), (1.0,)), 0.05)
        assert rep.all_passed
        assert [m.distance for m in rep.matches] == pytest.approx([0.05, 0.05])

    def test_preconditions(self):
        with pytest.raises(PreconditionViolated):
            check_critical_value_stability(SIN, TrigPoly(0.2, (0.0,), (1.0,)), 0.1)
        with pytest.raises(PreconditionViolated):
            check_critical_value_stability(SIN, SIN, 2.0)

    @pytest.mark.parametrize("seed", range(20))
    def test_local_single_relabel(self, seed):
        rng = np.random.default_rng(seed)
        while True:
            f = random_simple_morse(rng, int(rng.integers(1, 5)))
            u = random_simple_morse(rng, int(rng.integers(1, 5)))
            eps = stability_radius(f) * rng.uniform(0.01, 1.0)
            g = difference(f, scale(u, eps / cr_norm(u, 2)))
            if genericity_report(g).is_simple:
                break
        script = local_relabel(f, g)
        assert len(script) == 1
        end, total = apply_sequence(script, extract(f))
        assert is_isomorphic(end, extract(g), 1e-9)[0]
        assert total <= cr_norm(difference(f, g), 2) + 1e-9
