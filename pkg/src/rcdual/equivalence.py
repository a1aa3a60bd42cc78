"""When do the strict and non-strict programs share their optimal value?

Two routes are checked numerically.  The eta route looks, for a schedule of
tolerances, for strictly feasible points within eta of the non-strict
infimum.  The segment route starts from a non-strict feasible ``x-bar`` and a
point ``x~`` with every ``h_t(x~) < 0`` and walks ``x_s = x-bar + s (x-bar - x~)``
for small ``s > 0``; convexity of each ``h_t`` forces ``h_t(x_s) > 0`` on the
active constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError
from .functions import BoxIndicator, ConvexFunction, Scaled, Shifted
from .primal import Estimate, GridTable, primal_estimate
from .problem import Program, slater_point_search

EQUAL = "equal_within_tol"
GAP = "gap_detected"
INCONCLUSIVE = "inconclusive"

ETA_SCHEDULE = (1.0, 0.1, 0.01)
HALVINGS = 60


def _strictly_feasible(p: Program, x) -> bool:
    return bool(p.feasible_mask(np.asarray(x, dtype=float)[None], "strict")[0])


def _fval(f: ConvexFunction, x) -> float:
    return float(f.values(np.asarray(x, dtype=float)[None])[0])


def strictify(p: Program, x_bar, x_tilde, delta_budget: float = 1e-6):
    """Move a non-strict feasible point into the strict feasible set.

    Scans ``s = 2^-60, 2^-59, ..., 2^-1`` (smallest first, staying near
    ``x_bar``) and returns the first ``x_s`` that is strictly feasible with
    ``f(x_s) <= f(x_bar) + delta_budget``; ``None`` if every step fails.
    """
    x_bar = np.atleast_1d(np.asarray(x_bar, dtype=float))
    x_tilde = np.atleast_1d(np.asarray(x_tilde, dtype=float))
    if not np.all(p.margins(x_tilde[None])[0] < 0):
        raise DomainError("x_tilde is not a Slater point: need h_t(x_tilde) < 0 for all t")
    if not p.feasible_mask(x_bar[None], "nonstrict")[0]:
        raise DomainError("x_bar must be feasible for the non-strict program")
    if _strictly_feasible(p, x_bar):
        return x_bar
    cap = _fval(p.f, x_bar) + delta_budget
    d = x_bar - x_tilde
    for k in range(HALVINGS, 0, -1):
        xs = x_bar + math.ldexp(1.0, -k) * d
        if _strictly_feasible(p, xs) and _fval(p.f, xs) <= cap:
            return xs
    return None


def eta_witness(p: Program, eta: float, inf_nonstrict: float | None = None, N=None,
                table: GridTable | None = None, slater=None, x_bar=None):
    """A strictly feasible ``x`` with ``f(x) < inf_nonstrict + eta``, or ``None``.

    Tries the segment construction from ``x_bar`` (when a Slater point is
    known) and then the refined strict grid minimum.
    """
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    table = table or GridTable(p.f, p.lower, p.upper, N)
    if inf_nonstrict is None or x_bar is None:
        ns = primal_estimate(p, mode="nonstrict", table=table)
        inf_nonstrict = float(ns.value) if inf_nonstrict is None else inf_nonstrict
        x_bar = ns.witness if x_bar is None else x_bar
    if not math.isfinite(inf_nonstrict):
        raise ValueError("eta_witness needs a finite non-strict infimum estimate")
    target = inf_nonstrict + eta
    cands = []
    if slater is not None and x_bar is not None:
        xs = strictify(p, x_bar, slater, 0.5 * eta)
        if xs is not None:
            cands.append(xs)
    st = primal_estimate(p, mode="strict", table=table)
    if st.witness is not None:
        cands.append(st.witness)
    for x in cands:
        if _strictly_feasible(p, x) and _fval(p.f, x) < target:
            return np.asarray(x, dtype=float)
    return None


def contains_indicator(g: ConvexFunction) -> bool:
    if isinstance(g, BoxIndicator):
        return True
    if isinstance(g, (Scaled, Shifted)):
        return contains_indicator(g.inner)
    return False


@dataclass(frozen=True)
class EquivConfig:
    N: int | None = None
    seed: int = 0
    slater_samples: int = 4096
    delta_budget: float = 1e-6
    abs_tol: float = 1e-9

    def to_dict(self) -> dict:
        return {"N": self.N, "seed": self.seed, "slater_samples": self.slater_samples,
                "delta_budget": self.delta_budget, "abs_tol": self.abs_tol}


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    inf_strict: Estimate
    inf_nonstrict: Estimate
    delta_hat: float
    bounds: float
    slater: np.ndarray | None
    eta_trace: list
    verdict: str
    hypotheses: dict
    strictified: np.ndarray | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "inf_strict": self.inf_strict.to_dict(),
            "inf_nonstrict": self.inf_nonstrict.to_dict(),
            "delta_hat": _json_float(self.delta_hat),
            "combined_bound": self.bounds,
            "slater": None if self.slater is None else self.slater.tolist(),
            "eta_trace": [{"eta": e, "witness": None if w is None else w.tolist()}
                          for e, w in self.eta_trace],
            "strictified": None if self.strictified is None else self.strictified.tolist(),
            "verdict": self.verdict,
            "hypotheses": self.hypotheses,
            "notes": self.notes,
        }


def _json_float(v: float):
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    if math.isnan(v):
        return None
    return v


def equivalence_check(p: Program, config: EquivConfig = EquivConfig()) -> EquivalenceReport:
    """Estimate both infima, search a Slater point and eta-witnesses, and decide.

    ``gap_detected`` requires the estimated difference to exceed the summed
    grid bounds; ``equal_within_tol`` requires agreement and a witness for
    every eta in the schedule (evidence for the all-eta condition, not proof).
    """
    table = GridTable(p.f, p.lower, p.upper, config.N)
    strict = primal_estimate(p, mode="strict", table=table)
    nonstrict = primal_estimate(p, mode="nonstrict", table=table)
    if nonstrict.unbounded:
        raise ValidationError("hypothesis inf(P>=) > -inf violated: non-strict program unbounded")
    slater = slater_point_search(p, K=config.slater_samples, seed=config.seed)
    hyp = {
        "finite_T": True,
        "f_usc_on_segments": not contains_indicator(p.f),
        "h_lsc_on_segments": True,
        "slater_point": slater is not None,
    }
    notes = []
    ns_val = float(nonstrict.value)
    bounds = strict.grid_bound + nonstrict.grid_bound + config.abs_tol
    if strict.value == nonstrict.value:
        delta = 0.0
    elif math.isfinite(ns_val):
        delta = float(strict.value) - ns_val
    else:
        delta = math.nan

    trace = []
    strictified = None
    if math.isfinite(ns_val):
        scale = max(1.0, abs(ns_val))
        for e in ETA_SCHEDULE:
            eta = e * scale
            w = eta_witness(p, eta, ns_val, table=table, slater=slater, x_bar=nonstrict.witness)
            trace.append((eta, w))
        if slater is not None and nonstrict.witness is not None:
            strictified = strictify(p, nonstrict.witness, slater, config.delta_budget)

    if math.isnan(delta):
        verdict = INCONCLUSIVE
        notes.append("no feasible point found for the non-strict program")
    elif delta > bounds:
        verdict = GAP
        if not hyp["slater_point"]:
            notes.append("no Slater point found: search for x~ with h_t(x~) < 0 for all t failed")
        if not hyp["f_usc_on_segments"]:
            notes.append("objective contains an indicator: not upper semicontinuous on line segments")
        if all(hyp.values()):
            notes.append("gap detected although every checked hypothesis holds")
    elif all(w is not None for _, w in trace):
        verdict = EQUAL
        notes.append("eta-witnesses found for every eta in the schedule (evidence, not proof)")
    else:
        verdict = INCONCLUSIVE
        notes.append("estimates agree but some eta-witness search failed")
    if slater is None:
        notes.append("Slater search inconclusive: none found within budget")
    return EquivalenceReport(strict, nonstrict, delta, bounds, slater, trace, verdict, hyp,
                             strictified, notes)
