"""Grid and local-search estimates of primal values.

All estimates are infima over subsets of the search box, hence upper bounds
on the true infimum.  They are returned as :class:`Estimate` objects that keep
the witness, the raw grid value, and a resolution bound next to the number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as _grid
from .errors import DomainError, RCDualError
from .extended import MINUS_INF, PLUS_INF, EValue
from .functions import Affine, ConvexFunction
from .problem import Constraint, Program

UNBOUNDED_BELOW = -1e12
REFINE_ROUNDS = 60


@dataclass(frozen=True, eq=False)
class Estimate:
    value: EValue
    witness: np.ndarray | None
    bound_side: str
    grid_spec: dict
    refined: bool
    grid_value: EValue
    grid_bound: float
    unbounded: bool = False

    def to_dict(self) -> dict:
        return {
            "value": self.value.to_json(),
            "bound_side": self.bound_side,
            "witness": None if self.witness is None else self.witness.tolist(),
            "grid_value": self.grid_value.to_json(),
            "grid_bound": self.grid_bound,
            "refined": self.refined,
            "unbounded": self.unbounded,
            "grid_spec": self.grid_spec,
        }


class GridTable:
    """Objective values on a tensor grid of the search box, plus anchor points.

    Anchors (currently the objective's unconstrained minimizer when it lies in
    the box) are appended after the grid so that objectives with thin domains,
    such as indicators of a point, are still sampled.  The tie-break among
    equal values is lexicographic over the grid, anchors last.
    """

    def __init__(self, f: ConvexFunction, lower, upper, N=None, budget=_grid.DEFAULT_BUDGET):
        lower, upper = _grid.as_box(lower, upper)
        self.n = lower.size
        self.N = N or _grid.default_points_per_axis(self.n)
        self.lower, self.upper = lower, upper
        pts = _grid.make_grid(lower, upper, self.N, budget)
        vals = f.values(pts)
        self.lipschitz = _grid.lipschitz_estimate(vals, self.n, self.N, lower, upper)
        self.spacing = _grid.max_spacing(lower, upper, self.N)
        self.bound = self.lipschitz * self.spacing * _grid.resolution_factor(self.n)
        anchors = []
        try:
            xa = np.asarray(f.minimize(lower, upper), dtype=float)
            if np.all(xa >= lower) and np.all(xa <= upper):
                anchors.append(xa)
        except RCDualError:
            pass
        if anchors:
            A = np.array(anchors)
            pts = np.vstack([pts, A])
            vals = np.concatenate([vals, f.values(A)])
        self.points = pts
        self.fvals = vals

    def argmin(self, mask: np.ndarray):
        """Index of the smallest finite objective value among ``mask``, or None."""
        ok = mask & np.isfinite(self.fvals)
        if not np.any(ok):
            return None
        idx = np.flatnonzero(ok)
        return int(idx[np.argmin(self.fvals[idx])])

    def spec(self, **extra) -> dict:
        d = {"lower": self.lower.tolist(), "upper": self.upper.tolist(), "N": self.N}
        d.update(extra)
        return d


def _directions(n: int) -> np.ndarray:
    """Coordinate axes plus the pairwise diagonals ``(e_i +- e_j) / sqrt(2)``."""
    dirs = list(np.eye(n))
    for i in range(n):
        for j in range(i + 1, n):
            for sgn in (1.0, -1.0):
                d = np.zeros(n)
                d[i], d[j] = 1.0, sgn
                dirs.append(d / np.sqrt(2.0))
    return np.array(dirs)


def coordinate_refine(fun, feasible, x0, lower, upper, rounds=REFINE_ROUNDS) -> np.ndarray:
    """Pattern search with halving steps.

    The directions are the coordinate axes and the pairwise diagonals, so the
    search can slide along constraint boundaries that are not axis aligned.
    A move is accepted only if it stays in the box, stays feasible and lowers
    ``fun``.  Each round sweeps every direction both ways, then halves the step.
    """
    x = np.array(x0, dtype=float)
    fx = fun(x)
    step = 0.5 * float(np.max(upper - lower))
    dirs = _directions(x.size)
    for _ in range(rounds):
        for d in dirs:
            for sgn in (-1.0, 1.0):
                for _ in range(64):
                    cand = x + sgn * step * d
                    if np.any(cand < lower) or np.any(cand > upper):
                        break
                    fc = fun(cand)
                    if fc < fx and feasible(cand):
                        x, fx = cand, fc
                    else:
                        break
        step *= 0.5
    return x


def _point_fun(f: ConvexFunction):
    return lambda x: float(f.values(x[None])[0])


def _program_feasible(p: Program, mode: str, eps_strict: float):
    return lambda x: bool(p.feasible_mask(x[None], mode, eps_strict)[0])


def refine_local(p: Program, x0, mode: str = "as_posed", eps_strict: float = 0.0) -> np.ndarray:
    """Feasibility-preserving local descent from ``x0``; ``f`` never increases."""
    x0 = np.asarray(x0, dtype=float)
    feasible = _program_feasible(p, mode, eps_strict)
    if not feasible(x0) or not np.isfinite(_point_fun(p.f)(x0)):
        raise DomainError(f"refine_local needs a feasible start, got {x0}")
    return coordinate_refine(_point_fun(p.f), feasible, x0, p.lower, p.upper)


def masked_estimate(f: ConvexFunction, table: GridTable, mask: np.ndarray, feasible,
                    refine: bool = True, spec: dict | None = None) -> Estimate:
    """Minimum of ``f`` over the grid points selected by ``mask``, optionally refined.

    ``feasible`` is a point predicate used by the refinement and to re-check
    the witness.
    """
    spec = spec or table.spec()
    i = table.argmin(mask)
    if i is None:
        return Estimate(PLUS_INF, None, "upper", spec, False, PLUS_INF, table.bound)
    x = table.points[i].copy()
    gval = float(table.fvals[i])
    if gval < UNBOUNDED_BELOW:
        return Estimate(MINUS_INF, x, "upper", spec, False, MINUS_INF, table.bound, unbounded=True)
    value = gval
    if refine:
        x = coordinate_refine(_point_fun(f), feasible, x, table.lower, table.upper)
        value = float(f.values(x[None])[0])
    if not feasible(x):
        raise RuntimeError("witness failed its feasibility re-check")
    if value < UNBOUNDED_BELOW:
        return Estimate(MINUS_INF, x, "upper", spec, refine, EValue.of(gval), table.bound, unbounded=True)
    return Estimate(EValue.of(value), x, "upper", spec, refine, EValue.of(gval), table.bound)


def primal_grid(p: Program, N=None, eps_strict: float = 0.0, mode: str = "as_posed",
                table: GridTable | None = None) -> Estimate:
    """Grid minimum of ``f`` over feasible grid points (no refinement)."""
    return primal_estimate(p, N, eps_strict, mode, table=table, refine=False)


def primal_estimate(p: Program, N=None, eps_strict: float = 0.0, mode: str = "as_posed",
                    table: GridTable | None = None, refine: bool = True) -> Estimate:
    """Grid search followed by :func:`refine_local` from the best grid point."""
    table = table or GridTable(p.f, p.lower, p.upper, N)
    mask = p.feasible_mask(table.points, mode, eps_strict)
    spec = table.spec(eps_strict=eps_strict, mode=mode)
    return masked_estimate(p.f, table, mask, _program_feasible(p, mode, eps_strict), refine, spec)


def linearized_program(p: Program, phi, strict: bool) -> Program:
    """Half-space program ``<y_t, x> > (>=) h_t*(y_t)`` for a dual point ``phi``."""
    conj = np.asarray(phi.conj_values, dtype=float)
    if not np.all(np.isfinite(conj)):
        raise DomainError("phi outside dom h*: not a useful Phi candidate")
    cons = [Constraint(Affine(y, -c), strict) for y, c in zip(phi.vectors, conj)]
    return Program(f"{p.name}/linearized", p.n, p.f, cons, p.lower, p.upper)


def j_value(p: Program, phi, strict: bool, N=None, table: GridTable | None = None,
            refine: bool = True) -> Estimate:
    """Estimate ``j(phi)`` (``strict=True``) or the relaxed ``j-bar(phi)``."""
    lin = linearized_program(p, phi, strict)
    return primal_estimate(lin, N, 0.0, "strict" if strict else "nonstrict", table=table, refine=refine)
