import json

import numpy as np
import pytest

from rcdual import (
    Affine,
    BoxIndicator,
    Constraint,
    Program,
    ProblemFormatError,
    Quadratic,
    SqNorm2,
    ValidationError,
    dump_program,
    feasibility,
    load_program,
    slater_point_search,
)
from rcdual.problem import STRICTLY_FEASIBLE, WEAKLY_FEASIBLE, INFEASIBLE

from conftest import PROGRAMS, load


def _doc(**over):
    d = {
        "name": "t",
        "dimension": 1,
        "objective": {"kind": "quadratic", "Q": [[2.0]], "c": [0.0], "r": 0.0},
        "constraints": [{"kind": "affine", "a": [1.0], "b": -1.0, "strict": True}],
        "box": {"lower": [-5.0], "upper": [5.0]},
    }
    d.update(over)
    return json.dumps(d)


def _prog(h, strict=True, f=None, lo=-5.0, hi=5.0):
    return Program("t", 1, f or Quadratic([[2.0]]), [Constraint(h, strict)], [lo], [hi])


def test_load_program_examples():
    p = load_program(_doc())
    assert (p.n, p.m) == (1, 1) and p.all_strict
    with pytest.raises(ValidationError, match="Q not positive definite"):
        load_program(_doc(objective={"kind": "quadratic", "Q": [[-1.0]]}))
    with pytest.raises(ValidationError, match="T != {} required"):
        load_program(_doc(constraints=[]))


def test_load_program_diagnostics():
    with pytest.raises(ProblemFormatError, match="line 1"):
        load_program("{not json")
    with pytest.raises(ProblemFormatError, match="box"):
        load_program(json.dumps({"dimension": 1, "objective": {"kind": "sq_norm2"}}))
    with pytest.raises(ValidationError, match="constraints\\[0\\]"):
        load_program(_doc(constraints=[{"kind": "box_indicator", "lower": [0], "upper": [1],
                                        "strict": True}]))
    with pytest.raises(ProblemFormatError, match="strict"):
        load_program(_doc(constraints=[{"kind": "affine", "a": [1.0], "b": 0.0}]))


def test_box_must_be_nondegenerate():
    with pytest.raises(ValidationError):
        _prog(Affine([1.0], -1.0), lo=1.0, hi=1.0)


@pytest.mark.parametrize("name", PROGRAMS)
def test_round_trip(name):
    p = load(name)
    text = dump_program(p)
    q = load_program(text)
    assert dump_program(q) == text
    X = np.linspace(p.lower, p.upper, 17)
    assert np.array_equal(q.margins(X), p.margins(X))


def test_feasibility_examples():
    p = _prog(Affine([1.0], -1.0))
    v = feasibility(p, [2.0])
    assert v.cls == STRICTLY_FEASIBLE and v.margins.tolist() == [1.0]
    # boundary fails the strict test but passes once relaxed
    assert feasibility(p, [1.0]).cls == WEAKLY_FEASIBLE
    assert feasibility(p, [0.0]).cls == INFEASIBLE
    q = _prog(Affine([1.0], -1.0), strict=False)
    assert feasibility(q, [1.0]).cls == STRICTLY_FEASIBLE


def test_feasibility_monotone_in_eps():
    p = _prog(Affine([1.0], -1.0))
    rng = np.random.default_rng(0)
    for x in rng.uniform(0.9, 1.1, 500):
        if feasibility(p, [x], 1e-3).cls == STRICTLY_FEASIBLE:
            for e in (0.0, 1e-6, 5e-4):
                assert feasibility(p, [x], e).cls == STRICTLY_FEASIBLE


@pytest.mark.parametrize("name", PROGRAMS)
def test_strict_set_inside_relaxed_set(name):
    p = load(name)
    X = p.lower + (p.upper - p.lower) * np.random.default_rng(1).random((2000, p.n))
    strict = p.feasible_mask(X, "as_posed")
    relaxed = p.with_strictness(False).feasible_mask(X, "as_posed")
    assert np.all(relaxed[strict])


def test_slater_examples():
    x = slater_point_search(_prog(Affine([1.0], -1.0)))
    assert x is not None and float(x[0]) < 1.0
    assert slater_point_search(_prog(SqNorm2(1))) is None
    two = Program("t", 1, Quadratic([[2.0]]),
                  [Constraint(Affine([1.0], -1.0), True), Constraint(Affine([-1.0], -1.0), True)],
                  [-5.0], [5.0])
    x = slater_point_search(two)
    assert x is not None and -1.0 < float(x[0]) < 1.0


@pytest.mark.parametrize("name", PROGRAMS)
def test_slater_output_rechecked(name):
    p = load(name)
    x = slater_point_search(p, seed=3)
    if x is not None:
        assert np.max(p.margins(x[None])) < 0


def test_indicator_constraint_rejected():
    with pytest.raises(ValidationError):
        Constraint(BoxIndicator([0.0], [1.0]), True)
