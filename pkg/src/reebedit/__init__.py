"""Editing distance between labelled Reeb graphs of simple Morse functions on the circle."""
from .circlefn import (Config, CriticalPoint, GenericityReport, Index, PiecewiseLinear, TrigPoly,
                       combine, cr_norm, critical_points, evaluate, genericity_report,
                       linear_combination)
from .distance import DistanceEstimate, DistanceOptions, brute_force_oracle, edit_distance
from .edits import (Birth, Death, Deformation, Relabel, apply, apply_sequence, connect_canonical,
                    cost, find_deletable_pairs, invert)
from .errors import *  # noqa: F401,F403
from .homotopy import (EventKind, StratumEvent, TraceResult, check_critical_value_stability,
                       detect_events, stability_radius, trace)
from .pseudodist import persistence_lower, pseudo_lower, pseudo_upper
from .reeb import (LabelledReebGraph, Vertex, canonical_form, extract, graph_from_labels,
                   is_isomorphic, realize, validate)

__version__ = "0.1.0"
