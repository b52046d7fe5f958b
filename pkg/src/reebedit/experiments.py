"""Seeded random functions and the stability sweep.

A sweep draws pairs of random simple Morse trigonometric polynomials, runs
the homotopy tracer and the distance bounds on each, and records one CSV row
per trial.  Trials are derived from a single seed through
``numpy.random.SeedSequence.spawn``, so a run is reproducible bit for bit
regardless of how many worker processes execute it.
"""
from __future__ import annotations

import concurrent.futures
import io
import os
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .circlefn import TrigPoly, cr_norm, difference, genericity_report
from .distance import edit_distance
from .errors import NonGenericPath, RejectionBudgetExceeded
from .homotopy import EventKind, trace
from .pseudodist import pseudo_lower
from .reeb import extract

SWEEP_FORMAT = "reebedit-sweep/1"
SWEEP_COLUMNS = ("trial", "deg_f", "deg_g", "c0_norm", "c1_norm", "c2_norm", "d_lower",
                 "d_upper", "pseudo_lower", "script_cost", "events", "birth_death",
                 "value_swap", "global_pass", "lower_pass")

DEFAULT_TOLERANCES = {"trace": 1e-6, "lower": 1e-6}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    trials: int = 200
    degree_range: Tuple[int, int] = (1, 4)
    coefficient_scale: float = 1.0
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        lo, hi = self.degree_range
        if lo < 1 or hi < lo:
            raise ValueError("degree_range must satisfy 1 <= min <= max")
        if not self.coefficient_scale > 0:
            raise ValueError("coefficient_scale must be positive")
        if any(not t > 0 for t in self.tolerances.values()):
            raise ValueError("tolerances must be positive")


def _draw(rng: np.random.Generator, degree: int, scale: float) -> TrigPoly:
    c = rng.uniform(-scale, scale, 2 * degree + 1)
    return TrigPoly(float(c[0]), tuple(c[1:degree + 1]), tuple(c[degree + 1:]))


def random_simple_morse(seed, degree: int, scale: float = 1.0, max_draws: int = 1000) -> TrigPoly:
    """Uniform coefficients in [-scale, scale], redrawn until simple Morse.

    ``seed`` is anything ``numpy.random.default_rng`` accepts, including a
    Generator, which is then advanced.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    rng = np.random.default_rng(seed)
    for _ in range(max_draws):
        f = _draw(rng, degree, scale)
        if genericity_report(f).is_simple:
            return f
    raise RejectionBudgetExceeded(f"no simple Morse function in {max_draws} draws")


def random_pair(seed, config: RunConfig, max_draws: int = 100):
    """A random pair (f, g) whose linear path the tracer accepts, with its trace."""
    rng = np.random.default_rng(seed)
    lo, hi = config.degree_range
    for _ in range(max_draws):
        f = random_simple_morse(rng, int(rng.integers(lo, hi + 1)), config.coefficient_scale)
        g = random_simple_morse(rng, int(rng.integers(lo, hi + 1)), config.coefficient_scale)
        try:
            return f, g, trace(f, g, seed=int(rng.integers(2 ** 31)))
        except NonGenericPath:
            continue
    raise RejectionBudgetExceeded(f"no generic pair in {max_draws} draws")


def run_trial(trial: int, seed: np.random.SeedSequence, config: RunConfig) -> dict:
    f, g, tr = random_pair(seed, config)
    diff = difference(f, g)
    norms = [cr_norm(diff, r) for r in (0, 1, 2)]
    est = edit_distance(extract(f), extract(g))
    lower_fg = pseudo_lower(f, g)
    tol_trace, tol_lower = config.tolerances["trace"], config.tolerances["lower"]
    kinds = [e.kind for e in tr.events]
    return {
        "trial": trial, "deg_f": f.degree, "deg_g": g.degree,
        "c0_norm": norms[0], "c1_norm": norms[1], "c2_norm": norms[2],
        "d_lower": est.lower, "d_upper": est.upper, "pseudo_lower": lower_fg,
        "script_cost": tr.script_cost, "events": len(tr.events),
        "birth_death": kinds.count(EventKind.BIRTH_DEATH),
        "value_swap": kinds.count(EventKind.VALUE_SWAP),
        "global_pass": int(tr.script_cost <= norms[2] + tol_trace and est.upper <= norms[2] + tol_trace),
        "lower_pass": int(lower_fg <= est.upper + tol_lower),
    }


def _worker_count() -> int:
    try:
        cap = int(os.environ.get("REEB_EDIT_THREADS", "1"))
    except ValueError:
        cap = 1
    return max(1, min(cap, os.cpu_count() or 1))


def sweep(config: RunConfig) -> List[dict]:
    """One row per trial, in trial order."""
    seeds = np.random.SeedSequence(config.seed).spawn(config.trials)
    workers = _worker_count()
    if workers == 1:
        return [run_trial(k, s, config) for k, s in enumerate(seeds)]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_trial, k, s, config) for k, s in enumerate(seeds)]
        return [fut.result() for fut in futures]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % v


def rows_to_csv(rows: Sequence[dict], config: RunConfig) -> str:
    out = io.StringIO()
    out.write(f"# {SWEEP_FORMAT} seed={config.seed} trials={config.trials} "
              f"degrees={config.degree_range[0]}-{config.degree_range[1]} "
              f"scale={_fmt(config.coefficient_scale)}\n")
    out.write(",".join(SWEEP_COLUMNS) + "\n")
    for row in rows:
        out.write(",".join(_fmt(row[c]) for c in SWEEP_COLUMNS) + "\n")
    return out.getvalue()
