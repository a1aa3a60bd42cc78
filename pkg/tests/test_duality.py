import numpy as np
import pytest

from rcdual import (
    Affine,
    Constraint,
    DomainError,
    EmptyPoolError,
    Program,
    Quadratic,
    SqNorm2,
    ValidationError,
    conjugate_closed,
)
from rcdual.duality import (
    DualConfig,
    DualFunction,
    LambdaVec,
    attach_witness,
    check_RA1,
    dual_search,
    duality_report,
    inner_dual_max,
    lagrangian,
    make_phi,
    phi_from_point,
    phi_membership,
)

from conftest import DUAL_PROGRAMS, load
from oracles import brute_dual_1d, quadratic_conjugate


def _p(h, lo=-5.0, hi=5.0):
    return Program("t", 1, Quadratic([[2.0]]), [Constraint(h, True)], [lo], [hi])


AFF = _p(Affine([1.0], -1.0))
SQ = _p(SqNorm2(1))


def test_phi_from_point_examples():
    phi = phi_from_point(AFF, [2.0])
    assert phi.vectors.tolist() == [[1.0]] and phi.conj_values.tolist() == [1.0]
    assert phi.margins(np.array([[2.0]]))[0, 0] == 1.0
    phi = phi_from_point(SQ, [1.0])
    assert phi.vectors.tolist() == [[2.0]] and phi.conj_values.tolist() == [1.0]
    assert phi.margins(np.array([[1.0]]))[0, 0] == 1.0
    with pytest.raises(DomainError):
        phi_from_point(AFF, [1.0])


def test_phi_membership_examples():
    w = phi_membership(AFF, make_phi(AFF, [[1.0]]), N=1001)
    assert w is not None and w[0] > 1.0
    with pytest.raises(DomainError):
        phi_membership(AFF, make_phi(AFF, [[-1.0]]), N=101)
    w = phi_membership(SQ, make_phi(SQ, [[2.0]]), N=1001)
    assert w is not None and 2 * w[0] > 1.0


def test_lambda_nonnegative():
    with pytest.raises(ValueError):
        LambdaVec([-1.0])


def test_lagrangian_examples():
    phi = make_phi(AFF, [[1.0]])
    assert lagrangian(AFF, phi, [5.0], [0.0]) == 0.0
    assert lagrangian(AFF, phi, [2.0], [3.0]) == -3.0
    assert lagrangian(AFF, phi, [0.0], [2.0]) == 2.0


def test_inner_dual_max_examples():
    value, lam = inner_dual_max(AFF, make_phi(AFF, [[1.0]]))
    assert float(value) == pytest.approx(1.0, abs=1e-12)
    assert lam.weights[0] == pytest.approx(2.0, abs=1e-9)
    r = inner_dual_max(SQ, make_phi(SQ, [[2.0]]))
    assert float(r.value) == pytest.approx(0.25, abs=1e-12)
    assert r.lam.weights[0] == pytest.approx(0.5, abs=1e-9)
    assert r.attained


@pytest.mark.parametrize("y", [0.3, 1.0, 2.0, 3.7])
def test_inner_dual_max_matches_oracle(y):
    phi = make_phi(SQ, [[y]])
    hstar = y * y / 4.0  # conjugate of x^2 at y
    oracle, lam = brute_dual_1d(lambda t: t * hstar - quadratic_conjugate([[2.0]], [0.0], 0.0, [t * y]))
    r = inner_dual_max(SQ, phi)
    assert float(r.value) == pytest.approx(oracle, abs=1e-9)
    assert r.lam.weights[0] == pytest.approx(lam, abs=1e-5)


def test_dual_function_zero_is_minus_fstar0():
    for name in DUAL_PROGRAMS:
        p = load(name)
        x = p.lower + 0.37 * (p.upper - p.lower)
        if not p.feasible_mask(x[None], "strict")[0]:
            continue
        phi = phi_from_point(p, x)
        c = DualFunction(p, phi)
        assert c(np.zeros(p.m)) == -float(conjugate_closed(p.f, np.zeros(p.n)))


def test_check_RA1_examples():
    phi = attach_witness(AFF, make_phi(AFF, [[1.0]]), [2.0])
    cert = check_RA1(AFF, phi)
    assert cert and cert.unit_values.tolist() == [-1.0] and not cert.near_degenerate
    phi = attach_witness(AFF, make_phi(AFF, [[1.0]]), [1.0 + 1e-12])
    cert = check_RA1(AFF, phi)
    assert cert.holds and cert.near_degenerate
    with pytest.raises(ValueError):
        check_RA1(AFF, make_phi(AFF, [[1.0]]))


def test_dual_search_examples():
    ds = dual_search(AFF, N=10001, seed=0)
    assert float(ds.beta_hat) == pytest.approx(1.0, abs=1e-8)
    assert ds.phi_star.vectors.tolist() == [[1.0]]
    assert ds.lambda_star.weights[0] == pytest.approx(2.0, abs=1e-6)
    ds = dual_search(SQ, N=10001, seed=0)
    assert 0.0 <= float(ds.beta_hat) <= 0.25
    with pytest.raises(EmptyPoolError):
        dual_search(_p(Affine([0.0], -1.0)), N=1001)


def test_duality_report_affine_passes():
    rep = duality_report(load("affine1d"), DualConfig(seed=7))
    assert rep.passed
    assert float(rep.beta_hat) == pytest.approx(1.0, abs=1e-8)
    assert float(rep.alpha_bar_hat) == pytest.approx(1.0, abs=1e-6)


def test_duality_report_rejects_mixed():
    with pytest.raises(ValidationError):
        duality_report(load("mixed2d"))


@pytest.mark.parametrize("name", DUAL_PROGRAMS)
def test_duality_report_flags(name):
    rep = duality_report(load(name), DualConfig(seed=1))
    failed = {k: v for k, v in rep.chain_flags.items() if not v["passed"]}
    assert not failed


@pytest.mark.parametrize("name", ["square1d", "disk2d"])
def test_pool_members_have_witnesses_and_floor(name):
    p = load(name)
    ds = dual_search(p, seed=3)
    floor = -float(conjugate_closed(p.f, np.zeros(p.n)))
    for phi, r in zip(ds.pool, ds.inner):
        assert phi.witness is not None
        assert np.all(phi.margins(phi.witness[None]) > 0)
        assert float(r.value) >= floor - 1e-9
        assert check_RA1(p, phi)


def test_report_is_deterministic():
    p = load("disk2d")
    a = duality_report(p, DualConfig(seed=4)).to_dict()
    b = duality_report(p, DualConfig(seed=4)).to_dict()
    assert a == b
