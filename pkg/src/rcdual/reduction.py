"""Reduction of ``min f(x) s.t. T x not in int D`` to one reverse convex constraint.

With ``x~`` a minimizer of ``f`` and ``T x~`` interior to ``D``, put
``V = D - T x~``.  Separation gives

    T x not in int D  <=>  gauge_V(T x - T x~) >= 1,

so the problem becomes ``min f`` subject to ``h(x) = gauge_V(Tx - Tx~) - 1 >= 0``
with ``h(x~) = -1``.  Since ``x~`` is then a Slater point, the strict form
``h(x) > 0`` has the same infimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import ReductionNotApplicable, ValidationError
from .extended import EValue
from .functions import ConvexFunction, GaugeAffine, evaluate, minimize_unconstrained
from .gauge import GaugeData
from .primal import Estimate, GridTable, masked_estimate
from .problem import Constraint, Program


@dataclass(frozen=True, eq=False)
class Polytope:
    """``D = {z | A z <= b}``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if A.shape[0] != b.size:
            raise ValidationError("polytope A and b disagree in row count")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if self.interior_point() is None:
            raise ValidationError("polytope has empty interior")

    @property
    def d(self) -> int:
        return self.A.shape[1]

    def interior_point(self):
        """A point with ``A z < b`` (Chebyshev-style LP), or None."""
        k, d = self.A.shape
        # maximize s subject to A z + s <= b, s <= 1
        res = linprog(np.r_[np.zeros(d), -1.0], A_ub=np.c_[self.A, np.ones(k)], b_ub=self.b,
                      bounds=[(None, None)] * d + [(None, 1.0)], method="highs")
        if res.status != 0 or -res.fun <= 0:
            return None
        z = res.x[:d]
        return z if np.all(self.A @ z < self.b) else None

    def in_interior(self, Z) -> np.ndarray:
        return np.all(np.atleast_2d(Z) @ self.A.T < self.b, axis=1)

    def to_dict(self) -> dict:
        return {"polytope": {"A": self.A.tolist(), "b": self.b.tolist()}}


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if not float(self.radius) > 0:
            raise ValidationError("ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def d(self) -> int:
        return self.center.size

    def in_interior(self, Z) -> np.ndarray:
        return np.linalg.norm(np.atleast_2d(Z) - self.center, axis=1) < self.radius

    def to_dict(self) -> dict:
        return {"ball": {"center": self.center.tolist(), "radius": self.radius}}


def body_from_dict(d: dict):
    if "polytope" in d:
        return Polytope(d["polytope"]["A"], d["polytope"]["b"])
    if "ball" in d:
        return Ball(d["ball"]["center"], d["ball"]["radius"])
    raise ValidationError("body needs a 'polytope' or 'ball' entry")


NOT_APPLICABLE = "reduction not applicable; x~ already solves (Q)"


def build_gauge(D, T_lin, x_tilde) -> GaugeData:
    """Gauge data of ``V = D - T x~``; requires ``T x~`` interior to ``D``."""
    T_lin = np.atleast_2d(np.asarray(T_lin, dtype=float))
    x_tilde = np.atleast_1d(np.asarray(x_tilde, dtype=float))
    if T_lin.shape != (D.d, x_tilde.size):
        raise ValidationError(f"T has shape {T_lin.shape}, expected ({D.d}, {x_tilde.size})")
    anchor = T_lin @ x_tilde
    if isinstance(D, Polytope):
        offsets = D.b - D.A @ anchor
        if np.any(offsets <= 0):
            raise ReductionNotApplicable(NOT_APPLICABLE)
        return GaugeData("polytope", T_lin, anchor, rows=D.A, offsets=offsets)
    c0 = D.center - anchor
    if not float(np.linalg.norm(c0)) < D.radius:
        raise ReductionNotApplicable(NOT_APPLICABLE)
    return GaugeData("ball", T_lin, anchor, center0=c0, radius=D.radius)


@dataclass(frozen=True, eq=False)
class ReductionResult:
    verdict: str  # "reduced" | "x_tilde_solves_Q"
    x_tilde: np.ndarray
    f_x_tilde: EValue
    program: Program | None = None
    gauge: GaugeData | None = None

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict, "x_tilde": self.x_tilde.tolist(),
             "f_x_tilde": self.f_x_tilde.to_json()}
        if self.program is not None:
            h = self.program.constraints[0].h
            d["h_at_x_tilde"] = float(h.values(self.x_tilde[None])[0])
            d["gauge"] = self.gauge.to_dict()
        return d


def reduce(f: ConvexFunction, T_lin, D, box, x_tilde=None, name: str = "reduced") -> ReductionResult:
    """Recast the set-constrained problem as a program with one gauge constraint.

    When ``T x~`` is not interior to ``D`` the anchor itself is optimal and
    the verdict ``"x_tilde_solves_Q"`` is returned without a program.
    """
    if not f.real_valued:
        raise ValidationError("reduction needs a real-valued objective")
    lower, upper = box
    if x_tilde is None:
        x_tilde, fx = minimize_unconstrained(f, box)
    else:
        x_tilde = np.atleast_1d(np.asarray(x_tilde, dtype=float))
        fx = evaluate(f, x_tilde)
    try:
        gauge = build_gauge(D, T_lin, x_tilde)
    except ReductionNotApplicable:
        return ReductionResult("x_tilde_solves_Q", x_tilde, fx)
    h = GaugeAffine(gauge, -1.0, anchor_point=x_tilde)
    p = Program(name, f.n, f, [Constraint(h, strict=False)], lower, upper)
    return ReductionResult("reduced", x_tilde, fx, p, gauge)


@dataclass(frozen=True, eq=False)
class ReductionReport:
    result: ReductionResult
    direct: Estimate | None
    nonstrict: Estimate | None
    strict: Estimate | None
    pairwise: dict
    agree: bool

    def to_dict(self) -> dict:
        d = {"reduction": self.result.to_dict(), "agree": self.agree, "pairwise": self.pairwise}
        for k in ("direct", "nonstrict", "strict"):
            est = getattr(self, k)
            d[k] = None if est is None else est.to_dict()
        return d


def _abs_diff(a: EValue, b: EValue) -> float:
    if a == b:
        return 0.0
    return abs(float(a) - float(b))


def verify_reduction(f, T_lin, D, box, N=None, x_tilde=None, tol: float | None = None) -> ReductionReport:
    """Compare the direct, reduced non-strict and reduced strict infima.

    The three estimates share one grid; each pair must agree within the sum of
    their resolution bounds (and within ``tol`` when given).
    """
    res = reduce(f, T_lin, D, box, x_tilde)
    if res.verdict != "reduced":
        return ReductionReport(res, None, None, None, {}, True)
    p = res.program
    T_lin = np.atleast_2d(np.asarray(T_lin, dtype=float))
    table = GridTable(f, p.lower, p.upper, N)

    def outside(X):
        return ~D.in_interior(np.atleast_2d(X) @ T_lin.T)

    direct = masked_estimate(f, table, outside(table.points), lambda x: bool(outside(x)[0]),
                             spec=table.spec(mode="direct"))
    ests = {"direct": direct}
    for mode in ("nonstrict", "strict"):
        mask = p.feasible_mask(table.points, mode)
        feas = (lambda md: lambda x: bool(p.feasible_mask(x[None], md)[0]))(mode)
        ests[mode] = masked_estimate(f, table, mask, feas, spec=table.spec(mode=mode))
    pairwise, agree = {}, True
    names = ["direct", "nonstrict", "strict"]
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = ests[names[i]], ests[names[j]]
            diff = _abs_diff(a.value, b.value)
            bound = a.grid_bound + b.grid_bound
            ok = diff <= bound and (tol is None or diff <= tol)
            agree &= ok
            pairwise[f"{names[i]}~{names[j]}"] = {"abs_diff": diff, "combined_bound": bound, "ok": ok}
    return ReductionReport(res, direct, ests["nonstrict"], ests["strict"], pairwise, agree)


@dataclass(frozen=True, eq=False)
class ReductionProblem:
    name: str
    f: ConvexFunction
    T_lin: np.ndarray
    D: object
    lower: np.ndarray
    upper: np.ndarray
    x_tilde: np.ndarray | None = None
    known: dict | None = None

    @property
    def box(self):
        return self.lower, self.upper


def load_reduction(text: str) -> ReductionProblem:
    """Parse a problem file whose ``reduction`` section describes ``T`` and ``D``.

    The ``constraints`` list is ignored; the constraint is produced by :func:`reduce`.
    """
    from .problem import _field, _parse_header, _parse_json
    from .errors import ProblemFormatError

    doc = _parse_json(text)
    name, n, f, lower, upper = _parse_header(doc)
    red = _field(doc, "reduction", "problem")
    T_lin = np.atleast_2d(np.asarray(_field(red, "T", "reduction"), dtype=float))
    try:
        D = body_from_dict(_field(red, "D", "reduction"))
    except (KeyError, TypeError) as e:
        raise ProblemFormatError(f"reduction.D: missing or malformed field {e}") from None
    if T_lin.shape != (D.d, n):
        raise ValidationError(f"reduction.T has shape {T_lin.shape}, expected ({D.d}, {n})")
    xt = red.get("x_tilde")
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    return ReductionProblem(name, f, T_lin, D, lower, upper,
                            None if xt is None else np.asarray(xt, dtype=float),
                            dict(doc.get("known", {})))
