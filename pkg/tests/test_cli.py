import json
import pathlib

import pytest

from reebedit.circlefn import TrigPoly, function_to_dict
from reebedit.cli import main
from reebedit.edits import apply_sequence, script_from_dict
from reebedit.reeb import graph_from_dict, graph_from_labels, is_isomorphic

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def sin_file(tmp_path):
    p = tmp_path / "sin.json"
    p.write_text(json.dumps(function_to_dict(TrigPoly(0.0, (0.0,), (1.0,)))))
    return p


class TestReeb:
    def test_extract(self, capsys, sin_file):
        code, out, _ = run(capsys, "reeb", "extract", "--f", sin_file)
        assert code == 0
        g = graph_from_dict(json.loads(out))
        assert len(g) == 2 and sorted(round(x, 12) for x in g.labels) == [-1.0, 1.0]

    def test_extract_dot(self, capsys, sin_file, tmp_path):
        out_file = tmp_path / "g.dot"
        code, _, _ = run(capsys, "reeb", "extract", "--f", sin_file, "--dot", "--out", out_file)
        assert code == 0 and out_file.read_text().startswith("graph reeb {")

    def test_realize_round_trip(self, capsys, tmp_path):
        code, out, _ = run(capsys, "reeb", "realize", "--graph", FIXTURES / "pse1_g1.json")
        assert code == 0
        f_file = tmp_path / "f.json"
        f_file.write_text(out)
        code, out, _ = run(capsys, "reeb", "extract", "--f", f_file)
        assert is_isomorphic(graph_from_dict(json.loads(out)),
                             graph_from_labels([0.0, 0.6, 0.2, 1.0]), 1e-12)[0]


class TestDist:
    def test_edit_pse1(self, capsys):
        code, out, _ = run(capsys, "dist", "edit", "--g1", FIXTURES / "pse1_g1.json",
                           "--g2", FIXTURES / "pse1_g2.json")
        data = json.loads(out)
        assert code == 0
        assert data["lower"] == pytest.approx(0.2) and data["upper"] == pytest.approx(0.2)
        g1 = graph_from_dict(json.loads((FIXTURES / "pse1_g1.json").read_text()))
        end, _ = apply_sequence(script_from_dict(data["script"]), g1)
        assert end.labels == [0.0, 1.0]

    def test_edit_with_oracle(self, capsys):
        code, out, _ = run(capsys, "dist", "edit", "--g1", FIXTURES / "pse1_g1.json",
                           "--g2", FIXTURES / "pse1_g2.json", "--oracle", "--grid-step", "0.02")
        assert code == 0 and abs(json.loads(out)["oracle"] - 0.2) <= 0.04

    def test_pseudo(self, capsys):
        code, out, _ = run(capsys, "dist", "pseudo", "--f", FIXTURES / "pse1_g1.json",
                           "--g", FIXTURES / "pse1_g2.json", "--resolution", "256")
        data = json.loads(out)
        assert code == 0 and data["lower"] == pytest.approx(0.0)
        assert 0.2 - 1e-9 <= data["upper"] <= 0.25
        assert all(len(p) == 2 for p in data["alignment"])

    def test_pseudo_resolution_too_low(self, capsys):
        code, _, err = run(capsys, "dist", "pseudo", "--f", FIXTURES / "pse2_g1.json",
                           "--g", FIXTURES / "pse2_g2.json", "--resolution", "8")
        assert code == 1 and "resolution" in err


class TestTrace:
    def test_trace_swap(self, capsys, tmp_path):
        out_file = tmp_path / "trace.json"
        code, _, _ = run(capsys, "trace", "--f", FIXTURES / "swap_f.json", "--g",
                         FIXTURES / "swap_g.json", "--out", out_file)
        data = json.loads(out_file.read_text())
        assert code == 0
        assert [e["kind"] for e in data["events"]] == ["ValueSwap"]
        assert data["script_cost"] <= data["c2_bound"] + 1e-6


class TestSweep:
    def test_sweep_csv(self, capsys):
        code, out, _ = run(capsys, "sweep", "--seed", 1, "--trials", 2, "--degree-max", 2)
        lines = out.splitlines()
        assert code == 0 and lines[0].startswith("# reebedit-sweep/1") and len(lines) == 4


class TestValidate:
    def test_invalid_graph(self, capsys):
        code, _, err = run(capsys, "validate", "--graph", FIXTURES / "invalid_graph.json")
        assert code == 1 and "local extremality violated at id=3" in err

    def test_valid_graph(self, capsys):
        code, out, _ = run(capsys, "validate", "--graph", FIXTURES / "pse2_g1.json")
        assert code == 0 and "valid" in out

    def test_function(self, capsys, sin_file, tmp_path):
        assert run(capsys, "validate", "--f", sin_file)[0] == 0
        bad = tmp_path / "cos2.json"
        bad.write_text(json.dumps(function_to_dict(TrigPoly(0.0, (0.0, 1.0), (0.0, 0.0)))))
        code, _, err = run(capsys, "validate", "--f", bad)
        assert code == 1 and err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "validate", "--graph", tmp_path / "nope.json")[0] == 2

    def test_malformed_json(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert run(capsys, "validate", "--graph", p)[0] == 2
        p.write_text(json.dumps({"vertices": [{"id": 0}]}))
        assert run(capsys, "validate", "--graph", p)[0] == 2
