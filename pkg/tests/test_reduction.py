import numpy as np
import pytest

from rcdual import Quadratic, ReductionNotApplicable, ValidationError
from rcdual.reduction import Ball, Polytope, build_gauge, load_reduction, reduce, verify_reduction

from conftest import PROBLEMS, REDUCTIONS

BOX_A = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
UNIT_BOX = Polytope(BOX_A, [1.0, 1.0, 1.0, 1.0])
I2 = np.eye(2)
F = Quadratic(2 * I2)
BOX = ([-2.0, -2.0], [2.0, 2.0])


def _rp(name):
    return load_reduction((PROBLEMS / f"{name}.json").read_text())


def test_gauge_examples():
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(200, 2))
    g = build_gauge(UNIT_BOX, I2, np.zeros(2))
    assert g.offsets.tolist() == [1.0] * 4
    assert np.allclose(g.values(Z), np.max(np.abs(Z), axis=1), rtol=0, atol=1e-15)
    g = build_gauge(Ball([0.0, 0.0], 2.0), I2, np.zeros(2))
    assert np.allclose(g.values(Z), np.linalg.norm(Z, axis=1) / 2, rtol=0, atol=1e-14)
    with pytest.raises(ReductionNotApplicable):
        build_gauge(UNIT_BOX, I2, np.array([1.0, 0.0]))


def test_polytope_needs_interior():
    with pytest.raises(ValidationError):
        Polytope([[1.0, 0.0], [-1.0, 0.0]], [0.0, 0.0])


def test_off_center_ball_gauge():
    # D = ball((0.5, 0), 1), anchor 0: boundary points have gauge 1
    g = build_gauge(Ball([0.5, 0.0], 1.0), I2, np.zeros(2))
    t = np.linspace(0, 2 * np.pi, 100)
    B = np.c_[0.5 + np.cos(t), np.sin(t)]
    assert np.allclose(g.values(B), 1.0, atol=1e-12)


def test_reduce_examples():
    res = reduce(F, I2, UNIT_BOX, BOX)
    assert res.verdict == "reduced"
    h = res.program.constraints[0].h
    assert float(h.values(res.x_tilde[None])[0]) == -1.0
    assert not res.program.constraints[0].strict
    X = np.random.default_rng(1).normal(size=(100, 2))
    assert np.allclose(h.values(X), np.max(np.abs(X), axis=1) - 1.0)
    shifted = Quadratic(2 * I2, [-6.0, 0.0], 9.0)
    res = reduce(shifted, I2, UNIT_BOX, ([-4.0, -4.0], [4.0, 4.0]))
    assert res.verdict == "x_tilde_solves_Q"
    assert res.x_tilde.tolist() == [3.0, 0.0] and float(res.f_x_tilde) == 0.0


@pytest.mark.parametrize("D", [UNIT_BOX, Ball([0.0, 0.0], 1.0)])
def test_verify_reduction_agrees(D):
    rep = verify_reduction(F, I2, D, BOX, N=201)
    assert rep.agree
    for est in (rep.direct, rep.nonstrict, rep.strict):
        assert float(est.value) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("D", [UNIT_BOX, Ball([0.3, -0.2], 1.4)])
def test_separation_equivalence(D):
    T = np.array([[1.0, 0.5], [-0.2, 1.0]])
    res = reduce(F, T, D, ([-4.0, -4.0], [4.0, 4.0]))
    h = res.program.constraints[0].h
    X = np.random.default_rng(2).uniform(-4, 4, (10**4, 2))
    outside = ~D.in_interior(X @ T.T)
    g = h.values(X) + 1.0
    tie = np.abs(g - 1.0) <= 1e-12
    assert np.array_equal(outside[~tie], (g >= 1.0)[~tie])


@pytest.mark.parametrize("D", [UNIT_BOX, Ball([0.3, -0.2], 1.4)])
def test_gauge_homogeneous_and_subadditive(D):
    g = build_gauge(D, I2, np.zeros(2))
    rng = np.random.default_rng(3)
    Z, W = rng.normal(size=(2000, 2)), rng.normal(size=(2000, 2))
    a = rng.uniform(0, 5, 2000)
    assert np.allclose(g.values(a[:, None] * Z), a * g.values(Z), rtol=1e-12, atol=1e-12)
    assert np.all(g.values(Z + W) <= g.values(Z) + g.values(W) + 1e-12)


def test_reduced_constraint_value_at_anchor():
    for name in REDUCTIONS[:2]:
        rp = _rp(name)
        res = reduce(rp.f, rp.T_lin, rp.D, rp.box, rp.x_tilde)
        assert float(res.program.constraints[0].h.values(res.x_tilde[None])[0]) == -1.0


def test_reduction_rejects_indicator_objective():
    from rcdual import BoxIndicator
    with pytest.raises(ValidationError):
        reduce(BoxIndicator([0.0, 0.0], [1.0, 1.0]), I2, UNIT_BOX, BOX)
