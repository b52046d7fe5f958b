"""Write the JSON fixtures shipped in fixtures/.

Graph fixtures are the two worked examples.  Trig fixtures are smooth
realizations whose critical values are solved to match the example labels
exactly: a least-squares Fourier fit of the piecewise linear realization
gives a starting point, and a nonlinear solve moves the critical values onto
the labels.
"""
import json
import pathlib

import numpy as np
from scipy.optimize import least_squares

from reebedit.circlefn import (PiecewiseLinear, TrigPoly, _raw_critical_points, critical_points,
                               function_to_dict, sample)
from reebedit.reeb import extract, graph_from_labels, graph_to_dict, is_isomorphic, realize

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

PSE1 = ((0.0, 0.6, 0.2, 1.0), (0.0, 1.0))
PSE2 = ((0.0, 0.5, 0.1, 1.0, 0.12, 0.52), (0.0, 1.0))


def _coeffs(x, degree):
    return TrigPoly(float(x[0]), tuple(x[1:degree + 1]), tuple(x[degree + 1:]))


def fourier_fit(labels, degree, positions=None, n=4096):
    pl = realize(graph_from_labels(labels))
    if positions is not None:
        pl = PiecewiseLinear(tuple(positions), tuple(labels))
    theta, y = sample(pl, n)
    cols = [np.ones(n)] + [np.cos(k * theta) for k in range(1, degree + 1)] \
        + [np.sin(k * theta) for k in range(1, degree + 1)]
    x, *_ = np.linalg.lstsq(np.stack(cols, axis=1), y, rcond=None)
    return x


def trig_realization(labels, degree, positions=None):
    """A trig polynomial of the given degree whose Reeb graph is graph_from_labels(labels)."""
    target = graph_from_labels(labels)
    k = len(labels)

    def residual(x):
        pts, _ = _raw_critical_points(_coeffs(x, degree))
        if len(pts) != k:
            return np.full(k, 10.0)
        vals = np.array([p.value for p in pts])
        # align the cyclic start with the target's minimum
        start = int(np.argmin(vals))
        vals = np.roll(vals, -start)
        ref = np.roll(np.asarray(labels), -int(np.argmin(labels)))
        return vals - ref

    x0 = fourier_fit(labels, degree, positions)
    sol = least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    f = _coeffs(sol.x, degree)
    ok, _ = is_isomorphic(extract(f), target, 1e-9)
    if not ok:
        raise RuntimeError(f"trig realization of {labels} failed: {extract(f).labels}")
    return f


def dump(name, data):
    OUT.mkdir(exist_ok=True)
    (OUT / name).write_text(json.dumps(data, indent=2) + "\n")
    print("wrote", name)


def main():
    for tag, (g1, g2) in (("pse1", PSE1), ("pse2", PSE2)):
        dump(f"{tag}_g1.json", graph_to_dict(graph_from_labels(g1)))
        dump(f"{tag}_g2.json", graph_to_dict(graph_from_labels(g2)))
    for tag, (g1, g2), degree in (("pse1", PSE1, 3), ("pse2", PSE2, 4)):
        f = trig_realization(g1, degree)
        dump(f"{tag}_f_trig.json", function_to_dict(f))
        # the wiggle-free partner keeps the global extrema where f has them
        pts = critical_points(f)
        lo = min(pts, key=lambda p: p.value).position
        hi = max(pts, key=lambda p: p.value).position
        positions, labels = ((lo, hi), g2) if lo < hi else ((hi, lo), g2[::-1])
        dump(f"{tag}_g_trig.json", function_to_dict(trig_realization(labels, degree, positions)))
    for n in (1, 2, 3):
        # sin(n theta) / n^2: C2 norm 1 for every n, C0 norm 1 / n^2
        coeffs = [0.0] * n
        coeffs[n - 1] = 1.0 / n ** 2
        dump(f"noise_{n}.json", function_to_dict(TrigPoly(0.0, tuple([0.0] * n), tuple(coeffs))))
    # the two maxima trade places halfway along the segment
    dump("swap_f.json", function_to_dict(TrigPoly(0.0, (0.1, 1.0), (0.05, 0.0))))
    dump("swap_g.json", function_to_dict(TrigPoly(0.0, (-0.1, 1.0), (0.05, 0.0))))
    dump("invalid_graph.json", {"vertices": [
        {"id": 0, "label": 0.0, "index": "min"}, {"id": 1, "label": 0.6, "index": "max"},
        {"id": 2, "label": 0.2, "index": "min"}, {"id": 3, "label": 0.1, "index": "max"}]})


if __name__ == "__main__":
    main()
