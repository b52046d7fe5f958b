"""Real functions on the circle: evaluation, C^r norms, critical points.

Two representations are supported.  ``TrigPoly`` is a finite Fourier series in
the angle coordinate and is the smooth workhorse; ``PiecewiseLinear`` is a
cyclic list of breakpoints and is used as the canonical realization of a
labelled Reeb graph.  All objects are immutable.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import FormatError, MixedRepresentation, NotSimpleMorse, UnsupportedDerivative

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Config:
    """Numerical knobs shared by the critical point machinery.

    Functions with more than ``grid_size / 8`` oscillations are undersampled
    and critical points may be missed.
    """
    grid_size: int = 4096
    tol_root: float = 1e-12
    tol_value: float = 1e-9
    tol_degenerate: float = 1e-8
    tol_touch: float = 1e-10


DEFAULT_CONFIG = Config()


class Index(enum.IntEnum):
    MIN = 0
    MAX = 1

    def __str__(self):
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "Index":
        try:
            return cls[text.upper()]
        except KeyError:
            raise FormatError(f"unknown critical index {text!r}") from None

    def opposite(self) -> "Index":
        return Index.MAX if self is Index.MIN else Index.MIN


@dataclass(frozen=True)
class TrigPoly:
    """a0 + sum_n (cos[n-1] cos(n theta) + sin[n-1] sin(n theta))."""
    a0: float
    cos: Tuple[float, ...]
    sin: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(s) for s in self.sin))
        if len(self.cos) != len(self.sin) or len(self.cos) < 1:
            raise ValueError("cos and sin coefficient lists must have equal length >= 1")

    @property
    def degree(self) -> int:
        return len(self.cos)

    def derivative_coefficients(self, order: int):
        """Coefficients (a0, cos, sin) of the order-th derivative."""
        a = np.asarray(self.cos)
        b = np.asarray(self.sin)
        n = np.arange(1, self.degree + 1, dtype=float)
        a0 = self.a0
        for _ in range(order):
            a, b = n * b, -n * a
            a0 = 0.0
        return a0, a, b

    def __call__(self, theta, order: int = 0):
        return evaluate(self, theta, order)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Cyclic linear interpolation through (position, value) breakpoints."""
    positions: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        pos = tuple(float(p) for p in self.positions)
        val = tuple(float(v) for v in self.values)
        if len(pos) != len(val):
            raise ValueError("positions and values differ in length")
        if len(pos) < 2:
            raise ValueError("a piecewise linear function needs at least 2 breakpoints")
        if any(p < 0.0 or p >= TWO_PI for p in pos):
            raise ValueError("breakpoint positions must lie in [0, 2pi)")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("breakpoint positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_points(cls, points: Sequence[Tuple[float, float]]) -> "PiecewiseLinear":
        pos, val = zip(*points)
        return cls(pos, val)

    @property
    def points(self):
        return list(zip(self.positions, self.values))

    def slopes(self) -> np.ndarray:
        """Slope of segment i, from breakpoint i to breakpoint i+1 (cyclic)."""
        pos = np.asarray(self.positions)
        val = np.asarray(self.values)
        nxt_pos = np.append(pos[1:], pos[0] + TWO_PI)
        nxt_val = np.append(val[1:], val[0])
        return (nxt_val - val) / (nxt_pos - pos)

    def __call__(self, theta, order: int = 0):
        return evaluate(self, theta, order)


CircleFunction = Union[TrigPoly, PiecewiseLinear]


@dataclass(frozen=True)
class CriticalPoint:
    position: float
    value: float
    index: Index


@dataclass(frozen=True)
class GenericityReport:
    is_morse: bool
    is_simple: bool
    min_value_gap: float
    violations: List[str] = field(default_factory=list)


# ---------------------------------------------------------------- evaluation

def evaluate(f: CircleFunction, theta, order: int = 0):
    """Value or derivative of ``f`` at ``theta`` (scalar or array)."""
    scalar = np.ndim(theta) == 0
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if isinstance(f, TrigPoly):
        a0, a, b = f.derivative_coefficients(order)
        n = np.arange(1, f.degree + 1, dtype=float)
        arg = np.outer(th, n)
        out = a0 + np.cos(arg) @ a + np.sin(arg) @ b
    elif isinstance(f, PiecewiseLinear):
        out = _pl_evaluate(f, th, order)
    else:
        raise TypeError(f"not a circle function: {f!r}")
    return float(out[0]) if scalar else out


def _pl_evaluate(f: PiecewiseLinear, th: np.ndarray, order: int) -> np.ndarray:
    pos = np.asarray(f.positions)
    val = np.asarray(f.values)
    t = np.mod(th, TWO_PI)
    if order == 0:
        xp = np.concatenate([pos - TWO_PI, pos, pos + TWO_PI])
        fp = np.concatenate([val, val, val])
        return np.interp(t, xp, fp)
    if order >= 2:
        raise UnsupportedDerivative("piecewise linear functions have no second derivative")
    # distance to the nearest breakpoint, cyclically
    gap = np.abs(t[:, None] - pos[None, :])
    gap = np.minimum(gap, TWO_PI - gap)
    if np.any(gap.min(axis=1) < 1e-12):
        raise UnsupportedDerivative("derivative requested at a piecewise linear breakpoint")
    seg = np.searchsorted(pos, t, side="right") - 1  # -1 means the wrap segment
    return f.slopes()[seg % len(pos)]


def sample(f: CircleFunction, n: int) -> Tuple[np.ndarray, np.ndarray]:
    theta = np.arange(n) * (TWO_PI / n)
    return theta, evaluate(f, theta)


# ------------------------------------------------------------- arithmetic

def combine(f: CircleFunction, g: CircleFunction, alpha: float, beta: float) -> CircleFunction:
    """Pointwise alpha*f + beta*g."""
    if isinstance(f, TrigPoly) and isinstance(g, TrigPoly):
        deg = max(f.degree, g.degree)
        fc, fs = _pad(f.cos, deg), _pad(f.sin, deg)
        gc, gs = _pad(g.cos, deg), _pad(g.sin, deg)
        return TrigPoly(alpha * f.a0 + beta * g.a0,
                        tuple(alpha * fc + beta * gc),
                        tuple(alpha * fs + beta * gs))
    if isinstance(f, PiecewiseLinear) and isinstance(g, PiecewiseLinear):
        pos = np.union1d(f.positions, g.positions)
        vals = alpha * evaluate(f, pos) + beta * evaluate(g, pos)
        return PiecewiseLinear(tuple(pos), tuple(vals))
    raise MixedRepresentation("cannot combine a trigonometric and a piecewise linear function")


def _pad(coeffs, n):
    out = np.zeros(n)
    out[:len(coeffs)] = coeffs
    return out


def linear_combination(f: CircleFunction, g: CircleFunction, lam: float) -> CircleFunction:
    """The point (1 - lam) f + lam g of the segment from f to g."""
    return combine(f, g, 1.0 - lam, lam)


def difference(f: CircleFunction, g: CircleFunction) -> CircleFunction:
    return combine(f, g, 1.0, -1.0)


def scale(f: CircleFunction, alpha: float) -> CircleFunction:
    if isinstance(f, TrigPoly):
        return TrigPoly(alpha * f.a0, tuple(alpha * c for c in f.cos), tuple(alpha * s for s in f.sin))
    return PiecewiseLinear(f.positions, tuple(alpha * v for v in f.values))


def shift(f: CircleFunction, c: float) -> CircleFunction:
    if isinstance(f, TrigPoly):
        return TrigPoly(f.a0 + c, f.cos, f.sin)
    return PiecewiseLinear(f.positions, tuple(v + c for v in f.values))


# ------------------------------------------------------------------ norms

def _golden_max(fun, lo: np.ndarray, hi: np.ndarray, iters: int = 60) -> np.ndarray:
    """Vectorised golden-section maximisation of ``fun`` on [lo, hi]; returns argmax."""
    ratio = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo.copy(), hi.copy()
    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - ratio * (b - a)
        new_d = a + ratio * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, fun(new_c), fd)
        fd_next = np.where(left, fc, fun(new_d))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    return 0.5 * (a + b)


def _trig_sup_abs(f: TrigPoly, order: int, grid_size: int) -> float:
    n = max(grid_size, 64 * f.degree)
    h = TWO_PI / n
    theta = np.arange(n) * h
    vals = np.abs(evaluate(f, theta, order))
    # refine around the few largest local maxima of the grid samples
    is_peak = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
    peaks = np.flatnonzero(is_peak)
    if peaks.size == 0:
        return float(vals.max())
    peaks = peaks[np.argsort(vals[peaks])[::-1][:8]]
    best = _golden_max(lambda t: np.abs(evaluate(f, t, order)), theta[peaks] - h, theta[peaks] + h)
    return float(max(vals.max(), np.abs(evaluate(f, best, order)).max()))


def sup_abs(f: CircleFunction, order: int = 0, config: Config = DEFAULT_CONFIG) -> float:
    """sup over the circle of |f^(order)|."""
    if isinstance(f, PiecewiseLinear):
        if order == 0:
            return float(np.max(np.abs(f.values)))
        if order == 1:
            return float(np.max(np.abs(f.slopes())))
        raise UnsupportedDerivative("piecewise linear functions have no second derivative")
    return _trig_sup_abs(f, order, config.grid_size)


def cr_norm(f: CircleFunction, r: int, config: Config = DEFAULT_CONFIG) -> float:
    """Max over k <= r of sup |f^(k)| in the angle chart."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if isinstance(f, PiecewiseLinear) and r > 1:
        raise UnsupportedDerivative("C^2 norm is undefined for piecewise linear functions")
    return max(sup_abs(f, k, config) for k in range(r + 1))


def extrema(f: CircleFunction, config: Config = DEFAULT_CONFIG) -> Tuple[float, float]:
    """(min f, max f) over the circle."""
    if isinstance(f, PiecewiseLinear):
        return float(min(f.values)), float(max(f.values))
    n = max(config.grid_size, 64 * f.degree)
    h = TWO_PI / n
    theta = np.arange(n) * h
    vals = evaluate(f, theta)
    i_max, i_min = int(np.argmax(vals)), int(np.argmin(vals))
    t_max = _golden_max(lambda t: evaluate(f, t), np.array([theta[i_max] - h]), np.array([theta[i_max] + h]))
    t_min = _golden_max(lambda t: -evaluate(f, t), np.array([theta[i_min] - h]), np.array([theta[i_min] + h]))
    hi = max(vals[i_max], evaluate(f, t_max)[0])
    lo = min(vals[i_min], evaluate(f, t_min)[0])
    return float(lo), float(hi)


# -------------------------------------------------------- critical points

def _bisect(fun, lo: np.ndarray, hi: np.ndarray, tol: float) -> np.ndarray:
    """Vectorised bisection; fun(lo) and fun(hi) must have opposite signs."""
    flo = fun(lo)
    while True:
        width = hi - lo
        if width.size == 0 or width.max() <= tol:
            break
        mid = 0.5 * (lo + hi)
        fmid = fun(mid)
        same = np.sign(fmid) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fmid, flo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _trig_roots(f: TrigPoly, config: Config):
    """Roots of f' plus positions of non-crossing touches (double roots)."""
    n = max(config.grid_size, 64 * f.degree)
    h = TWO_PI / n
    theta = np.arange(n) * h
    d = evaluate(f, theta, 1)
    deriv = lambda t: evaluate(f, t, 1)  # noqa: E731
    pos = d >= 0.0
    crossing = np.flatnonzero(pos != np.roll(pos, -1))
    roots = list(_bisect(deriv, theta[crossing], theta[crossing] + h, config.tol_root))

    touches = []
    mag = np.abs(d)
    local_min = (mag < np.roll(mag, 1)) & (mag <= np.roll(mag, -1))
    no_cross = (pos == np.roll(pos, 1)) & (pos == np.roll(pos, -1))
    scale_ = max(mag.max(), 1e-300)
    cand = np.flatnonzero(local_min & no_cross & (mag < 1e-2 * scale_))
    if cand.size:
        sgn = np.where(pos[cand], 1.0, -1.0)
        lo, hi = theta[cand] - h, theta[cand] + h
        # minimise sgn * f' over the window
        arg = _golden_max(lambda t: -sgn * evaluate(f, t, 1), lo, hi)
        low = sgn * evaluate(f, arg, 1)
        for k in range(cand.size):
            if low[k] < 0.0:
                # two simple roots inside one grid cell pair
                a = _bisect(deriv, np.array([lo[k]]), np.array([arg[k]]), config.tol_root)
                b = _bisect(deriv, np.array([arg[k]]), np.array([hi[k]]), config.tol_root)
                roots.extend([a[0], b[0]])
            elif low[k] <= config.tol_touch:
                touches.append(float(np.mod(arg[k], TWO_PI)))
    roots = np.sort(np.mod(np.asarray(roots, dtype=float), TWO_PI))
    return roots, touches


def _raw_critical_points(f: CircleFunction, config: Config = DEFAULT_CONFIG):
    """Critical points without the simple-Morse checks.

    Returns (points, violations) where points is a list of CriticalPoint and
    violations lists every Morse defect found.
    """
    violations: List[str] = []
    points: List[CriticalPoint] = []
    if isinstance(f, PiecewiseLinear):
        slopes = f.slopes()
        for i, (p, v) in enumerate(zip(f.positions, f.values)):
            s_in, s_out = slopes[i - 1], slopes[i]
            if s_in == 0.0 or s_out == 0.0:
                violations.append(f"flat segment adjacent to breakpoint {i} (theta={p!r})")
                continue
            if s_in < 0.0 < s_out:
                points.append(CriticalPoint(p, v, Index.MIN))
            elif s_in > 0.0 > s_out:
                points.append(CriticalPoint(p, v, Index.MAX))
        return points, violations

    if not any(f.cos) and not any(f.sin):
        return [], ["constant function: every point is critical"]
    roots, touches = _trig_roots(f, config)
    for t in touches:
        violations.append(f"degenerate critical point (double root of f') near theta={t!r}")
    if roots.size:
        vals = evaluate(f, roots)
        second = evaluate(f, roots, 2)
        for t, v, s in zip(roots, vals, second):
            if abs(s) <= config.tol_degenerate:
                violations.append(f"degenerate critical point at theta={float(t)!r} (|f''|={abs(s):.3g})")
                continue
            points.append(CriticalPoint(float(t), float(v), Index.MIN if s > 0 else Index.MAX))
    return points, violations


def _min_gap(values) -> float:
    vals = np.sort(np.asarray(values, dtype=float))
    if vals.size < 2:
        return float("inf")
    return float(np.min(np.diff(vals)))


def _analyse(f: CircleFunction, config: Config):
    points, violations = _raw_critical_points(f, config)
    violations = list(violations)
    is_morse = not violations
    if is_morse:
        idx = [p.index for p in points]
        if len(idx) < 2 or len(idx) % 2 or any(a == b for a, b in zip(idx, idx[1:] + idx[:1])):
            violations.append("critical points do not alternate between minima and maxima")
            is_morse = False
    gap = _min_gap([p.value for p in points])
    is_simple = is_morse and gap > config.tol_value
    if is_morse and not is_simple:
        violations.append(f"repeated critical value (smallest gap {gap:.3g})")
    return points, GenericityReport(is_morse, is_simple, gap, violations)


def genericity_report(f: CircleFunction, config: Config = DEFAULT_CONFIG) -> GenericityReport:
    return _analyse(f, config)[1]


def critical_points(f: CircleFunction, config: Config = DEFAULT_CONFIG) -> List[CriticalPoint]:
    """Critical points of a simple Morse function, sorted by position."""
    points, report = _analyse(f, config)
    if not report.is_simple:
        raise NotSimpleMorse("; ".join(report.violations))
    return points


# ------------------------------------------------------------------- JSON

def function_to_dict(f: CircleFunction) -> dict:
    if isinstance(f, TrigPoly):
        return {"kind": "trig", "a0": f.a0, "cos": list(f.cos), "sin": list(f.sin)}
    return {"kind": "pl", "points": [[p, v] for p, v in f.points]}


def function_from_dict(data: dict) -> CircleFunction:
    try:
        kind = data["kind"]
        if kind == "trig":
            return TrigPoly(float(data["a0"]), data["cos"], data["sin"])
        if kind == "pl":
            return PiecewiseLinear.from_points([(float(p), float(v)) for p, v in data["points"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed function JSON: {exc}") from exc
    raise FormatError(f"unknown function kind {kind!r}")
