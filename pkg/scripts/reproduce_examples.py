"""Recompute the worked examples from the shipped fixtures and print a table."""
import json
import pathlib

from reebedit.circlefn import cr_norm, function_from_dict
from reebedit.distance import DistanceOptions, edit_distance
from reebedit.edits import apply_sequence, connect_canonical
from reebedit.homotopy import trace
from reebedit.pseudodist import persistence_lower, pseudo_lower, pseudo_upper
from reebedit.reeb import graph_from_dict, realize

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    return json.loads((FIXTURES / name).read_text())


def main():
    print(f"{'example':8} {'lower':>8} {'upper':>8} {'canonical':>10} {'oracle':>8} "
          f"{'pseudo_lo':>10} {'pseudo_up':>10}")
    for tag in ("pse1", "pse2"):
        g1, g2 = graph_from_dict(load(f"{tag}_g1.json")), graph_from_dict(load(f"{tag}_g2.json"))
        est = edit_distance(g1, g2, DistanceOptions(oracle=len(g1) <= 4, grid_step=0.01))
        _, naive = apply_sequence(connect_canonical(g1, g2), g1)
        f, g = realize(g1), realize(g2)
        oracle = f"{est.oracle:8.4f}" if est.oracle is not None else f"{'n/a':>8}"
        print(f"{tag:8} {est.lower:8.4f} {est.upper:8.4f} {naive:10.4f} {oracle} "
              f"{max(pseudo_lower(f, g), persistence_lower(f, g)):10.4f} "
              f"{pseudo_upper(f, g, 2048).cost:10.4f}")
    print()
    print(f"{'trace':10} {'events':32} {'script':36} {'cost':>8} {'C2 bound':>9}")
    for tag, (fa, ga) in {"pse1": ("pse1_f_trig", "pse1_g_trig"),
                          "pse2": ("pse2_f_trig", "pse2_g_trig"),
                          "swap": ("swap_f", "swap_g")}.items():
        f, g = function_from_dict(load(fa + ".json")), function_from_dict(load(ga + ".json"))
        res = trace(f, g)
        events = ",".join(e.kind.value for e in res.events) or "-"
        script = ",".join(type(s).__name__ for s in res.script) or "-"
        print(f"{tag:10} {events:32} {script:36} {res.script_cost:8.4f} {res.c2_bound:9.4f}")
    print()
    for n in (1, 2, 3):
        h = function_from_dict(load(f"noise_{n}.json"))
        print(f"noise_{n}: C0 norm {cr_norm(h, 0):.4f}, C2 norm {cr_norm(h, 2):.4f}")


if __name__ == "__main__":
    main()
