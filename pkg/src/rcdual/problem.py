"""Reverse convex programs with finitely many constraints.

A :class:`Program` is ``min f(x)`` over a search box subject to
``h_t(x) > 0`` for strict constraints and ``h_t(x) >= 0`` for non-strict
ones.  Problem files are JSON documents::

    {
      "name": "affine1d",
      "dimension": 1,
      "objective": {"kind": "quadratic", "Q": [[2.0]], "c": [0.0], "r": 0.0},
      "constraints": [{"kind": "affine", "a": [1.0], "b": -1.0, "strict": true}],
      "box": {"lower": [-5.0], "upper": [5.0]},
      "reduction": {"T": [[1.0]], "D": {"ball": {"center": [0.0], "radius": 1.0}}},
      "known": {"alpha": 1.0}
    }

``reduction`` and ``known`` are optional; ``known`` carries analytically
derived reference values used by floor checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import grid as _grid
from .errors import DimensionError, ProblemFormatError, RCDualError, ValidationError
from .functions import ConvexFunction, function_from_dict

STRICTLY_FEASIBLE = "strictly_feasible"
WEAKLY_FEASIBLE = "weakly_feasible"
INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class Constraint:
    h: ConvexFunction
    strict: bool = True

    def __post_init__(self):
        if not self.h.real_valued:
            raise ValidationError(
                f"constraint function {self.h.kind} is not real-valued; indicators are not allowed")


@dataclass(frozen=True, eq=False)
class Program:
    name: str
    n: int
    f: ConvexFunction
    constraints: tuple
    lower: np.ndarray
    upper: np.ndarray
    reduction: dict | None = None
    known: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        lower, upper = _grid.as_box(self.lower, self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if not self.constraints:
            raise ValidationError("T != {} required: at least one constraint")
        if lower.size != self.n:
            raise DimensionError(f"box has dimension {lower.size}, program has {self.n}")
        if not np.all(lower < upper):
            raise ValidationError("search box must satisfy lower < upper componentwise")
        if self.f.n != self.n:
            raise DimensionError(f"objective has dimension {self.f.n}, program has {self.n}")
        for t, c in enumerate(self.constraints):
            if c.h.n != self.n:
                raise DimensionError(f"constraint {t} has dimension {c.h.n}, program has {self.n}")

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def box(self):
        return self.lower, self.upper

    @property
    def strict_flags(self) -> np.ndarray:
        return np.array([c.strict for c in self.constraints])

    @property
    def all_strict(self) -> bool:
        return all(c.strict for c in self.constraints)

    def with_strictness(self, strict: bool) -> Program:
        """Copy with every constraint forced strict (``True``) or non-strict."""
        return replace(self, constraints=tuple(Constraint(c.h, strict) for c in self.constraints))

    def margins(self, X) -> np.ndarray:
        """``h_t`` at each row of ``X``; shape ``(k, m)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([c.h.values(X) for c in self.constraints], axis=1)

    def feasible_mask(self, X, mode: str = "as_posed", eps_strict: float = 0.0) -> np.ndarray:
        """Row-wise feasibility.

        ``mode`` is ``"as_posed"`` (use each constraint's flag), ``"strict"``
        (all ``>``) or ``"nonstrict"`` (all ``>=``).  Strict constraints use
        ``h_t > eps_strict``.
        """
        M = self.margins(X)
        if mode == "strict":
            flags = np.ones(self.m, dtype=bool)
        elif mode == "nonstrict":
            flags = np.zeros(self.m, dtype=bool)
        elif mode == "as_posed":
            flags = self.strict_flags
        else:
            raise ValueError(f"unknown feasibility mode {mode!r}")
        ok = np.where(flags, M > eps_strict, M >= 0.0)
        return np.all(ok, axis=1)


@dataclass(frozen=True)
class FeasibilityVerdict:
    cls: str
    margins: np.ndarray


def feasibility(p: Program, x, eps_strict: float = 0.0) -> FeasibilityVerdict:
    """Classify ``x``.

    ``strictly_feasible``: strict margins ``> eps_strict`` and non-strict
    margins ``>= 0``.  ``weakly_feasible``: feasible once every constraint is
    relaxed to ``>=`` but not strictly feasible.  Otherwise ``infeasible``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (p.n,):
        raise DimensionError(f"x has shape {x.shape}, expected ({p.n},)")
    margins = p.margins(x[None])[0]
    strict = p.strict_flags
    if np.all(margins[strict] > eps_strict) and np.all(margins[~strict] >= 0.0):
        cls = STRICTLY_FEASIBLE
    elif np.all(margins >= 0.0):
        cls = WEAKLY_FEASIBLE
    else:
        cls = INFEASIBLE
    return FeasibilityVerdict(cls, margins)


def slater_point_search(p: Program, K: int = 4096, seed: int = 0, rounds: int = 60):
    """Look for ``x~`` with ``h_t(x~) < 0`` for every ``t``.

    Seeded uniform samples in the box (plus the box center and the objective
    minimizer) seed a coordinate descent on ``max_t h_t``.  ``None`` means the
    search failed, not that no such point exists.
    """
    rng = np.random.default_rng(seed)
    lower, upper = p.box
    cands = [0.5 * (lower + upper)]
    try:
        x_f = np.asarray(p.f.minimize(lower, upper), dtype=float)
        if np.all(np.isfinite(x_f)):
            cands.append(x_f)
    except RCDualError:
        pass
    X = np.vstack([np.array(cands), lower + (upper - lower) * rng.random((K, p.n))])

    def worst(Z):
        return np.max(p.margins(Z), axis=1)

    w = worst(X)
    x = X[int(np.argmin(w))].copy()
    wx = float(w.min())
    step = 0.25 * float(np.max(upper - lower))
    for _ in range(rounds):
        if wx < 0:
            break
        moved = False
        for i in range(p.n):
            for sgn in (-1.0, 1.0):
                cand = x.copy()
                cand[i] += sgn * step
                wc = float(worst(cand[None])[0])
                if wc < wx:
                    x, wx, moved = cand, wc, True
        if not moved:
            step *= 0.5
    # re-evaluate rather than trust the search bookkeeping
    if float(np.max(p.margins(x[None])[0])) < 0.0:
        return x
    return None


# ---------------------------------------------------------------------------
# problem files


def _field(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise ProblemFormatError(f"{where}: missing field '{key}'")
    return d[key]


def _parse_function(d, n: int, where: str) -> ConvexFunction:
    try:
        return function_from_dict(d, n)
    except KeyError as e:
        raise ProblemFormatError(f"{where}: missing field {e}") from None
    except (ValidationError, DimensionError) as e:
        raise ValidationError(f"{where}: {e}") from None
    except (TypeError, ValueError) as e:
        raise ProblemFormatError(f"{where}: {e}") from None


def _parse_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ProblemFormatError("problem file must hold a JSON object")
    return doc


def _parse_header(doc: dict):
    name = str(doc.get("name", "unnamed"))
    n = _field(doc, "dimension", "problem")
    if not isinstance(n, int) or n < 1:
        raise ProblemFormatError("problem.dimension: must be a positive integer")
    f = _parse_function(_field(doc, "objective", "problem"), n, "objective")
    box = _field(doc, "box", "problem")
    lower = _field(box, "lower", "box")
    upper = _field(box, "upper", "box")
    return name, n, f, lower, upper


def program_from_dict(doc: dict) -> Program:
    name, n, f, lower, upper = _parse_header(doc)
    raw = doc.get("constraints", [])
    if not isinstance(raw, list):
        raise ProblemFormatError("constraints: must be a list")
    cons = []
    for t, c in enumerate(raw):
        where = f"constraints[{t}]"
        strict = _field(c, "strict", where)
        if not isinstance(strict, bool):
            raise ProblemFormatError(f"{where}.strict: must be true or false")
        spec = {k: v for k, v in c.items() if k != "strict"}
        h = _parse_function(spec, n, where)
        try:
            cons.append(Constraint(h, strict))
        except ValidationError as e:
            raise ValidationError(f"{where}: {e}") from None
    return Program(name, n, f, cons, lower, upper,
                   reduction=doc.get("reduction"), known=dict(doc.get("known", {})))


def load_program(text: str) -> Program:
    """Parse and validate a problem file."""
    return program_from_dict(_parse_json(text))


def program_to_dict(p: Program) -> dict:
    d = {
        "name": p.name,
        "dimension": p.n,
        "objective": p.f.to_dict(),
        "constraints": [dict(c.h.to_dict(), strict=c.strict) for c in p.constraints],
        "box": {"lower": p.lower.tolist(), "upper": p.upper.tolist()},
    }
    if p.reduction is not None:
        d["reduction"] = p.reduction
    if p.known:
        d["known"] = dict(p.known)
    return d


def dump_program(p: Program) -> str:
    return json.dumps(program_to_dict(p), indent=2) + "\n"


def read_program(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return load_program(fh.read())
