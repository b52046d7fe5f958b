import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reebedit.circlefn import (Index, PiecewiseLinear, TrigPoly, cr_norm, critical_points,
                               evaluate, function_from_dict, function_to_dict, genericity_report,
                               linear_combination, scale)
from reebedit.errors import (FormatError, MixedRepresentation, NotSimpleMorse,
                             UnsupportedDerivative)

coeff = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def trig_polys(draw, max_degree=4):
    n = draw(st.integers(1, max_degree))
    return TrigPoly(draw(coeff), tuple(draw(st.lists(coeff, min_size=n, max_size=n))),
                    tuple(draw(st.lists(coeff, min_size=n, max_size=n))))


def companion_critical_angles(f: TrigPoly):
    """Roots of f' through the companion matrix of z^N f'(z) with z = exp(i theta)."""
    N = f.degree
    a, b = np.asarray(f.cos), np.asarray(f.sin)
    poly = np.zeros(2 * N + 1, dtype=complex)  # poly[j] multiplies z^j
    for n in range(1, N + 1):
        poly[N + n] += n * (b[n - 1] + 1j * a[n - 1]) / 2
        poly[N - n] += n * (b[n - 1] - 1j * a[n - 1]) / 2
    # negligible coefficients would send spurious roots to infinity
    poly[np.abs(poly) < 1e-13 * np.abs(poly).max()] = 0.0
    roots = np.roots(poly[::-1])
    on_circle = roots[np.abs(np.abs(roots) - 1.0) < 1e-7]
    return np.sort(np.mod(np.angle(on_circle), 2 * np.pi))


class TestEvaluate:
    def test_sine_examples(self):
        f = TrigPoly(0.0, (0.0,), (1.0,))
        assert evaluate(f, math.pi / 2) == pytest.approx(1.0, abs=1e-15)
        assert evaluate(f, 0.0, 1) == pytest.approx(1.0, abs=1e-15)

    def test_pl_midpoint(self):
        f = PiecewiseLinear.from_points([(0.0, 0.0), (math.pi, 1.0)])
        assert evaluate(f, math.pi / 2) == pytest.approx(0.5)

    def test_pl_derivative_at_breakpoint_rejected(self):
        f = PiecewiseLinear.from_points([(0.0, 0.0), (math.pi, 1.0)])
        with pytest.raises(UnsupportedDerivative):
            evaluate(f, math.pi, 1)
        with pytest.raises(UnsupportedDerivative):
            evaluate(f, 1.0, 2)

    def test_periodic(self):
        f = TrigPoly(0.2, (0.3, -0.1), (0.5, 0.7))
        th = np.linspace(0, 2 * np.pi, 17)
        assert np.allclose(evaluate(f, th), evaluate(f, th + 2 * np.pi), atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(trig_polys())
    def test_derivatives_match_finite_differences(self, f):
        th = np.random.default_rng(0).uniform(0, 2 * np.pi, 10_000)
        h = 1e-5
        for order in (1, 2):
            fd = (evaluate(f, th + h, order - 1) - evaluate(f, th - h, order - 1)) / (2 * h)
            exact = evaluate(f, th, order)
            assert np.allclose(exact, fd, rtol=1e-6, atol=1e-6 * max(1.0, np.abs(exact).max()))


class TestCriticalPoints:
    def test_sine(self):
        pts = critical_points(TrigPoly(0.0, (0.0,), (1.0,)))
        assert [p.index for p in pts] == [Index.MAX, Index.MIN]
        assert pts[0].position == pytest.approx(math.pi / 2, abs=1e-10)
        assert pts[1].value == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize("c", [0.3, 0.6])
    def test_matches_companion_matrix(self, c):
        # sin + 0.3 sin 2t has only two critical points, sin + 0.6 sin 2t has four
        f = TrigPoly(0.0, (0.0, 0.0), (1.0, c))
        ref = companion_critical_angles(f)
        pos = np.array([p.position for p in critical_points(f)])
        assert len(pos) == len(ref) == (2 if c == 0.3 else 4)
        assert np.allclose(np.sort(pos), ref, atol=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(trig_polys())
    def test_random_against_companion(self, f):
        rep = genericity_report(f)
        if not rep.is_simple:
            return
        ref = companion_critical_angles(f)
        pos = np.sort([p.position for p in critical_points(f)])
        assert len(pos) == len(ref)
        d = np.abs(pos[:, None] - ref[None, :])
        assert np.all(np.minimum(d, 2 * np.pi - d).min(axis=1) < 1e-7)

    @settings(max_examples=60, deadline=None)
    @given(trig_polys())
    def test_alternation_and_balance(self, f):
        if not genericity_report(f).is_simple:
            return
        pts = critical_points(f)
        idx = [p.index for p in pts]
        assert len(pts) % 2 == 0 and len(pts) >= 2
        assert all(a != b for a, b in zip(idx, idx[1:] + idx[:1]))
        assert idx.count(Index.MIN) == idx.count(Index.MAX)
        for p in pts:
            assert abs(evaluate(f, p.position, 1)) < 1e-9
            assert (evaluate(f, p.position, 2) > 0) == (p.index is Index.MIN)

    def test_pl_breakpoints(self):
        f = PiecewiseLinear.from_points([(0, 0.0), (math.pi / 2, 0.6), (math.pi, 0.2), (3 * math.pi / 2, 1.0)])
        assert [p.value for p in critical_points(f)] == [0.0, 0.6, 0.2, 1.0]

    def test_repeated_value_rejected(self):
        with pytest.raises(NotSimpleMorse):
            critical_points(TrigPoly(0.0, (0.0, 1.0), (0.0, 0.0)))


class TestGenericity:
    def test_sine(self):
        rep = genericity_report(TrigPoly(0.0, (0.0,), (1.0,)))
        assert rep.is_morse and rep.is_simple
        assert rep.min_value_gap == pytest.approx(2.0)

    def test_cos2_not_simple(self):
        rep = genericity_report(TrigPoly(0.0, (0.0, 1.0), (0.0, 0.0)))
        assert rep.is_morse and not rep.is_simple

    def test_degenerate_not_morse(self):
        # f' = cos t + c cos 3t has a double root at t = pi/2 exactly when c = 1/3
        # (f'(pi/2) = 0 always; f''(pi/2) = -1 + 3c)
        f = TrigPoly(0.0, (0.0, 0.0, 0.0), (1.0, 0.0, 1.0 / 9.0))
        rep = genericity_report(f)
        assert not rep.is_morse and not rep.is_simple
        assert rep.violations

    def test_constant(self):
        assert not genericity_report(TrigPoly(1.0, (0.0,), (0.0,))).is_morse


class TestNorms:
    def test_examples(self):
        s = TrigPoly(0.0, (0.0,), (1.0,))
        assert cr_norm(s, 0) == pytest.approx(1.0, abs=1e-12)
        assert cr_norm(s, 2) == pytest.approx(1.0, abs=1e-12)
        assert cr_norm(scale(s, 2.0), 2) == pytest.approx(2.0, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(trig_polys(), st.floats(-3, 3))
    def test_nesting_and_homogeneity(self, f, alpha):
        n0, n1, n2 = (cr_norm(f, r) for r in (0, 1, 2))
        assert n0 <= n1 + 1e-12 and n1 <= n2 + 1e-12
        assert cr_norm(scale(f, alpha), 2) == pytest.approx(abs(alpha) * n2, rel=1e-9, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(trig_polys())
    def test_against_dense_sampling(self, f):
        th = np.linspace(0, 2 * np.pi, 200_001)
        dense = max(np.abs(evaluate(f, th, k)).max() for k in range(3))
        assert cr_norm(f, 2) >= dense - 1e-12
        assert cr_norm(f, 2) <= dense + 1e-6

    def test_pl_second_order_rejected(self):
        f = PiecewiseLinear.from_points([(0.0, 0.0), (math.pi, 1.0)])
        assert cr_norm(f, 0) == pytest.approx(1.0)
        with pytest.raises(UnsupportedDerivative):
            cr_norm(f, 2)


class TestLinearCombination:
    def test_endpoints_and_midpoint(self):
        f = TrigPoly(0.0, (0.0,), (1.0,))
        g = TrigPoly(0.0, (0.0,), (3.0,))
        assert linear_combination(f, g, 0.0) == f
        assert linear_combination(f, g, 1.0) == g
        assert linear_combination(f, g, 0.5).sin == (2.0,)

    def test_pl_resampled_to_union(self):
        f = PiecewiseLinear.from_points([(0.0, 0.0), (math.pi, 1.0)])
        g = PiecewiseLinear.from_points([(0.5, 1.0), (4.0, 0.0)])
        h = linear_combination(f, g, 0.25)
        assert len(h.positions) == 4
        th = np.linspace(0, 6, 50)
        assert np.allclose(evaluate(h, th), 0.75 * evaluate(f, th) + 0.25 * evaluate(g, th))

    def test_mixed_rejected(self):
        with pytest.raises(MixedRepresentation):
            linear_combination(TrigPoly(0.0, (1.0,), (0.0,)),
                               PiecewiseLinear.from_points([(0.0, 0.0), (1.0, 1.0)]), 0.5)


class TestJson:
    @settings(max_examples=30, deadline=None)
    @given(trig_polys())
    def test_round_trip(self, f):
        assert function_from_dict(function_to_dict(f)) == f

    def test_bad_kind(self):
        with pytest.raises(FormatError):
            function_from_dict({"kind": "spline"})
