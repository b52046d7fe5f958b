"""Command line front end.

Exit codes: 0 on success, 1 when the input violates a domain invariant
(the message names it), 2 on I/O or format errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .circlefn import function_from_dict, function_to_dict, genericity_report
from .distance import DistanceOptions, edit_distance
from .edits import script_to_dict
from .errors import FormatError, ReebEditError
from .experiments import RunConfig, rows_to_csv, sweep
from .homotopy import trace
from .pseudodist import pseudo_lower, pseudo_upper
from .reeb import extract, graph_from_dict, graph_to_dict, realize, to_dot, validate


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def _write(text: str, path: Optional[str]):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dump(data, path: Optional[str]):
    _write(json.dumps(data, indent=2) + "\n", path)


def _load_graph(path: str):
    """A graph file, or a function file whose graph is extracted."""
    data = _read_json(path)
    if isinstance(data, dict) and "kind" in data:
        return extract(function_from_dict(data))
    return validate(graph_from_dict(data))


def _load_function(path: str):
    """A function file, or a graph file realized as a piecewise linear function."""
    data = _read_json(path)
    if isinstance(data, dict) and "vertices" in data:
        return realize(graph_from_dict(data))
    return function_from_dict(data)


def cmd_reeb_extract(args):
    graph = extract(_load_function(args.f))
    if args.dot:
        _write(to_dot(graph), args.out)
    else:
        _dump(graph_to_dict(graph), args.out)


def cmd_reeb_realize(args):
    _dump(function_to_dict(realize(_load_graph(args.graph))), args.out)


def cmd_dist_edit(args):
    options = DistanceOptions(oracle=args.oracle, grid_step=args.grid_step)
    est = edit_distance(_load_graph(args.g1), _load_graph(args.g2), options)
    out = {"lower": est.lower, "upper": est.upper, "lower_source": est.lower_source,
           "upper_source": est.upper_source, "eta": est.eta,
           "script": script_to_dict(est.witness_script)}
    if args.oracle:
        out["oracle"] = est.oracle
    _dump(out, args.out)


def cmd_dist_pseudo(args):
    f, g = _load_function(args.f), _load_function(args.g)
    al = pseudo_upper(f, g, args.resolution)
    _dump({"lower": pseudo_lower(f, g), "upper": al.cost, "reversed": al.reversed,
           "resolution": al.resolution, "alignment": [list(p) for p in al.pairs]}, args.out)


def cmd_trace(args):
    f, g = _load_function(args.f), _load_function(args.g)
    res = trace(f, g, coarse_steps=args.steps, seed=args.seed)
    events = [{"lambda": e.lam, "kind": e.kind.value, "detail": e.detail} for e in res.events]
    _dump({"events": events, "script": script_to_dict(res.script),
           "script_cost": res.script_cost, "c2_bound": res.c2_bound}, args.out)


def cmd_sweep(args):
    config = RunConfig(seed=args.seed, trials=args.trials,
                       degree_range=(args.degree_min, args.degree_max),
                       coefficient_scale=args.scale)
    _write(rows_to_csv(sweep(config), config), args.out)


def cmd_validate(args):
    if args.graph:
        validate(graph_from_dict(_read_json(args.graph)))
        print("valid labelled Reeb graph")
    else:
        report = genericity_report(function_from_dict(_read_json(args.f)))
        if not report.is_simple:
            raise ReebEditError("; ".join(report.violations))
        print(f"simple Morse function (smallest critical value gap {report.min_value_gap:.6g})")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reebedit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    reeb = sub.add_parser("reeb", help="labelled Reeb graphs").add_subparsers(dest="action", required=True)
    q = reeb.add_parser("extract", help="graph of a function")
    q.add_argument("--f", required=True)
    q.add_argument("--dot", action="store_true", help="write Graphviz DOT instead of JSON")
    q.add_argument("--out")
    q.set_defaults(func=cmd_reeb_extract)
    q = reeb.add_parser("realize", help="piecewise linear function with a given graph")
    q.add_argument("--graph", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_reeb_realize)

    dist = sub.add_parser("dist", help="distance bounds").add_subparsers(dest="action", required=True)
    q = dist.add_parser("edit", help="editing distance interval with a witness script")
    q.add_argument("--g1", required=True)
    q.add_argument("--g2", required=True)
    q.add_argument("--oracle", action="store_true", help="also run the grid oracle")
    q.add_argument("--grid-step", type=float, default=0.01)
    q.add_argument("--out")
    q.set_defaults(func=cmd_dist_edit)
    q = dist.add_parser("pseudo", help="natural pseudo-distance bounds")
    q.add_argument("--f", required=True)
    q.add_argument("--g", required=True)
    q.add_argument("--resolution", type=int, default=512)
    q.add_argument("--out")
    q.set_defaults(func=cmd_dist_pseudo)

    q = sub.add_parser("trace", help="edit script along the segment from f to g")
    q.add_argument("--f", required=True)
    q.add_argument("--g", required=True)
    q.add_argument("--steps", type=int, default=256)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.set_defaults(func=cmd_trace)

    q = sub.add_parser("sweep", help="random stability sweep to CSV")
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--trials", type=int, required=True)
    q.add_argument("--degree-min", type=int, default=1)
    q.add_argument("--degree-max", type=int, default=4)
    q.add_argument("--scale", type=float, default=1.0)
    q.add_argument("--out")
    q.set_defaults(func=cmd_sweep)

    q = sub.add_parser("validate", help="check a graph or function file")
    grp = q.add_mutually_exclusive_group(required=True)
    grp.add_argument("--graph")
    grp.add_argument("--f")
    q.set_defaults(func=cmd_validate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ReebEditError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
