import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcdual import (
    Affine,
    BoxIndicator,
    DimensionError,
    DomainError,
    NoClosedFormError,
    Norm,
    Quadratic,
    SqNorm2,
    ValidationError,
    conjugate_closed,
    conjugate_grid,
    evaluate,
    function_from_dict,
    minimize_unconstrained,
    subgrad,
)
from rcdual.extended import PLUS_INF
from rcdual.functions import GaugeAffine, GridConjugate
from rcdual.gauge import GaugeData

from catalog import cases, search_box
from oracles import brute_conjugate, quadratic_conjugate


# -- evaluation ---------------------------------------------------------------

def test_eval_examples():
    assert evaluate(Quadratic([[2.0]]), [0.0]) == 0.0
    assert evaluate(BoxIndicator([0.0], [0.0]), [0.5]) == PLUS_INF
    assert evaluate(Affine([1.0], -1.0), [2.0]) == 1.0


def test_eval_dimension_mismatch():
    with pytest.raises(DimensionError):
        evaluate(Affine([1.0, 2.0]), [1.0])


def test_constructor_validation():
    with pytest.raises(ValidationError, match="Q not positive definite"):
        Quadratic([[-1.0]])
    with pytest.raises(ValidationError, match="Q not positive definite"):
        Quadratic([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(ValidationError):
        BoxIndicator([1.0], [0.0])
    with pytest.raises(ValidationError):
        Norm(2, 3)
    with pytest.raises(ValidationError):
        SqNorm2(1, 0.0)


# -- subgradients ----------------------------------------------------------------

def test_subgrad_examples():
    assert subgrad(Norm(1, 1), [0.0]).tolist() == [0.0]
    assert subgrad(Quadratic([[2.0]]), [3.0]).tolist() == [6.0]
    assert subgrad(Affine([2.0, -1.0], 5.0), [7.0, -3.0]).tolist() == [2.0, -1.0]


def test_subgrad_kink_selection():
    assert subgrad(Norm(2, "inf"), [0.0, 0.0]).tolist() == [0.0, 0.0]
    assert subgrad(Norm(2, "inf"), [1.0, -1.0]).tolist() == [1.0, 0.0]
    # on a corner of the box the lowest-index face wins
    assert subgrad(BoxIndicator([0.0, 0.0], [1.0, 1.0]), [1.0, 0.0]).tolist() == [1.0, 0.0]
    assert subgrad(BoxIndicator([0.0, 0.0], [1.0, 1.0]), [0.5, 0.5]).tolist() == [0.0, 0.0]


def test_subgrad_outside_domain():
    with pytest.raises(DomainError):
        subgrad(BoxIndicator([0.0], [1.0]), [2.0])


# -- conjugates ----------------------------------------------------------------

def test_conjugate_closed_examples():
    q = Quadratic([[2.0]])
    assert conjugate_closed(q, [2.0]) == 1.0
    assert conjugate_closed(Affine([1.0], -1.0), [1.0]) == 1.0
    assert conjugate_closed(Affine([1.0], -1.0), [0.5]) == PLUS_INF
    assert conjugate_closed(Norm(1, 2), [0.5]) == 0.0
    assert conjugate_closed(Norm(1, 2), [1.5]) == PLUS_INF
    assert conjugate_closed(SqNorm2(2, 0.5), [1.0, 1.0]) == 1.0


def test_quadratic_conjugate_matches_oracle():
    rng = np.random.default_rng(3)
    for _ in range(5):
        A = rng.normal(size=(2, 2))
        Q, c, r = A @ A.T + np.eye(2), rng.normal(size=2), rng.normal()
        y = rng.normal(size=2)
        got = float(conjugate_closed(Quadratic(Q, c, r), y))
        assert got == pytest.approx(quadratic_conjugate(Q, c, r, y), abs=1e-12)
        brute = brute_conjugate(Quadratic(Q, c, r).values, y, [-20, -20], [20, 20], 801)
        assert got == pytest.approx(brute, abs=1e-6)


def test_conjugate_grid_examples():
    r = conjugate_grid(Quadratic([[2.0]]), [2.0], ([-10.0], [10.0]), 100001)
    assert not r.exact and r.value.is_finite
    assert 1.0 - r.lower_bound_gap <= float(r.value) <= 1.0
    r = conjugate_grid(Affine([1.0], 0.0), [1.0], ([-3.0], [7.0]), 1001)
    assert float(r.value) == 0.0
    r = conjugate_grid(Norm(1, 2), [0.5], ([-5.0], [5.0]), 100000)
    assert -r.lower_bound_gap <= float(r.value) <= 0.0


def test_gauge_has_no_closed_conjugate():
    gd = GaugeData("ball", np.eye(2), np.zeros(2), center0=np.zeros(2), radius=1.0)
    g = GaugeAffine(gd, -1.0)
    with pytest.raises(NoClosedFormError):
        conjugate_closed(g, [0.1, 0.1])
    r = conjugate_grid(g, [0.5, 0.0], ([-2.0, -2.0], [2.0, 2.0]), 201)
    # sup <y,x> - |x| + 1 = 1 for |y| <= 1
    assert 1.0 - r.lower_bound_gap <= float(r.value) <= 1.0 + 1e-12


@pytest.mark.parametrize("n", [1, 2])
def test_fenchel_young_and_subgradient_equality(n):
    rng = np.random.default_rng(10 + n)
    for case in cases(n):
        g = case.g
        X = case.sample_x(rng, 2000)
        Y = case.sample_y(rng, 2000)
        gx = g.values(X)
        for x, y, v in zip(X, Y, gx):
            assert v + float(conjugate_closed(g, y)) - x @ y >= -1e-9, case.name
        for x in X[:500]:
            y = subgrad(g, x)
            lhs = float(conjugate_closed(g, y))
            assert abs(lhs - (y @ x - float(evaluate(g, x)))) <= 1e-9, case.name


@pytest.mark.parametrize("n", [1, 2])
def test_grid_never_exceeds_closed(n):
    rng = np.random.default_rng(20 + n)
    lo, hi = search_box(n)
    N = 2001 if n == 1 else 101
    for case in cases(n):
        gc = GridConjugate(case.g, lo, hi, N)
        for y in np.vstack([case.sample_y(rng, 30), rng.normal(size=(30, n))]):
            closed = conjugate_closed(case.g, y)
            if closed.is_finite:
                assert float(gc(y).value) <= float(closed) + 1e-12, case.name


def test_biconjugate_recovers_function():
    # sup_y <y,x> - g*(y) over a y-grid, for x where the maximizing y lies in the grid
    g = Quadratic([[2.0]], [0.5], 0.1)
    ys = np.linspace(-20, 20, 40001)
    gstar = np.array([float(conjugate_closed(g, [y])) for y in ys])
    rng = np.random.default_rng(4)
    xs = rng.uniform(-5, 5, 1000)
    bic = np.max(xs[:, None] * ys[None, :] - gstar[None, :], axis=1)
    h = ys[1] - ys[0]
    # the quadratic conjugate has curvature 1/2, so the gap is at most h^2/8 * 1/2 * 2
    assert np.max(np.abs(bic - g.values(xs[:, None]))) <= h * h
    s = SqNorm2(1, 1.0)
    gstar = np.array([float(conjugate_closed(s, [y])) for y in ys])
    bic = np.max(xs[:, None] * ys[None, :] - gstar[None, :], axis=1)
    assert np.max(np.abs(bic - s.values(xs[:, None]))) <= h * h


# -- minimization ----------------------------------------------------------------

def test_minimize_unconstrained_examples():
    x, v = minimize_unconstrained(Quadratic([[2.0]], [-4.0]), ([-10.0], [10.0]))
    assert x.tolist() == [2.0] and v == -4.0
    x, v = minimize_unconstrained(Norm(3, "inf"), (-np.ones(3), np.ones(3)))
    assert x.tolist() == [0.0, 0.0, 0.0] and v == 0.0
    x, v = minimize_unconstrained(BoxIndicator([1.0], [3.0]), ([0.0], [5.0]))
    assert x.tolist() == [1.0] and v == 0.0


def test_function_dict_round_trip():
    for n in (1, 2):
        for case in cases(n):
            g2 = function_from_dict(case.g.to_dict(), n)
            X = case.sample_x(np.random.default_rng(0), 50)
            assert np.array_equal(g2.values(X), case.g.values(X))


# -- midpoint convexity (property based) --------------------------------------------

_CASES2 = cases(2, seed=7)
_coord = st.floats(-3.0, 3.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(range(len(_CASES2))), st.tuples(_coord, _coord), st.tuples(_coord, _coord))
def test_midpoint_convexity(k, x, y):
    g = _CASES2[k].g
    x, y = np.array(x), np.array(y)
    gx, gy = float(evaluate(g, x)), float(evaluate(g, y))
    gm = float(evaluate(g, 0.5 * (x + y)))
    assert gm <= 0.5 * (gx + gy) + 1e-9
