"""Conjugate dual of a reverse convex program with finitely many strict constraints.

For a dual point ``phi = (y_1, ..., y_m)`` with ``h_t*(y_t)`` finite, the
Lagrangian is

    H(phi; x, lam) = sum_t lam_t (h_t*(y_t) - <y_t, x>),

and minimizing ``f + H`` over ``x`` leaves the concave dual function

    c_phi(lam) = sum_t lam_t h_t*(y_t) - f*(sum_t lam_t y_t),  lam >= 0.

The dual value is ``inf`` over members ``phi`` of the set Phi (those admitting
``x`` in dom f with ``<y_t, x> > h_t*(y_t)`` for all t) of ``sup_lam c_phi``.
Here Phi is sampled: subgradients lifted from strictly feasible grid points,
plus seeded Gaussian perturbations that keep a membership witness.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _sp_minimize

from .errors import DomainError, EmptyPoolError, NoClosedFormError, ValidationError
from .extended import PLUS_INF, EValue
from .functions import GridConjugate, conjugate_closed, subgrad
from .primal import Estimate, GridTable, j_value, primal_estimate
from .problem import Program

log = logging.getLogger(__name__)

LAMBDA_DIVERGE = 1e6
ATTAIN_TOL = 1e-8
NEAR_DEGENERATE = 1e-9
SUPERGRAD_ITERS = 10**4
SUPERGRAD_STEP = 1.0
SUPERGRAD_RTOL = 1e-10
GOLDEN_XTOL = 1e-13

BETA_BAR_NOTE = ("beta-bar (regularized dual value) is not computed; it equals alpha-bar, "
                 "whose estimate is reported in its place")


@dataclass(frozen=True, eq=False)
class PhiPoint:
    """One dual vector per constraint, with cached conjugate values.

    ``conj_gaps`` is zero for closed-form conjugates and the grid resolution
    bound otherwise; ``conj_values + conj_gaps`` is then an upper bound on the
    true conjugate and is what membership tests compare against.
    """

    vectors: np.ndarray
    conj_values: np.ndarray
    conj_gaps: np.ndarray
    witness: np.ndarray | None = None
    origin: str = "lift"

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def conj_upper(self) -> np.ndarray:
        return self.conj_values + self.conj_gaps

    def margins(self, X) -> np.ndarray:
        """``<y_t, x> - h_t*(y_t)`` (upper conjugate) for each row of ``X``."""
        return np.atleast_2d(X) @ self.vectors.T - self.conj_upper

    def key(self) -> bytes:
        return self.vectors.tobytes()

    def to_dict(self) -> dict:
        return {
            "vectors": self.vectors.tolist(),
            "conj_values": [EValue.of(c).to_json() for c in self.conj_values],
            "conj_gaps": self.conj_gaps.tolist(),
            "witness": None if self.witness is None else self.witness.tolist(),
            "origin": self.origin,
        }


@dataclass(frozen=True)
class LambdaVec:
    weights: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError(f"multipliers must be finite and nonnegative, got {w}")
        object.__setattr__(self, "weights", w)

    def to_list(self) -> list:
        return self.weights.tolist()


def _conjugate_with_gap(p: Program, t: int, y: np.ndarray, grid_N=None):
    h = p.constraints[t].h
    try:
        return float(conjugate_closed(h, y)), 0.0
    except NoClosedFormError:
        res = GridConjugate(h, p.lower, p.upper, grid_N or _default_conj_N(p.n))(y)
        return float(res.value), res.lower_bound_gap


def _default_conj_N(n: int) -> int:
    return {1: 20001, 2: 401}.get(n, 41)


def make_phi(p: Program, vectors, witness=None, origin: str = "lift") -> PhiPoint:
    """Build a :class:`PhiPoint`, evaluating every ``h_t*(y_t)``.

    A supplied witness is re-checked: it must lie in dom f and give every
    margin strictly positive.
    """
    Y = np.atleast_2d(np.asarray(vectors, dtype=float))
    if Y.shape != (p.m, p.n):
        raise ValueError(f"phi needs shape ({p.m}, {p.n}), got {Y.shape}")
    pairs = [_conjugate_with_gap(p, t, Y[t]) for t in range(p.m)]
    phi = PhiPoint(Y, np.array([c for c, _ in pairs]), np.array([g for _, g in pairs]),
                   None, origin)
    if witness is not None:
        phi = attach_witness(p, phi, witness)
    return phi


def attach_witness(p: Program, phi: PhiPoint, x) -> PhiPoint:
    x = np.asarray(x, dtype=float)
    if not np.isfinite(p.f.values(x[None])[0]):
        raise DomainError("membership witness is outside dom f")
    if not np.all(phi.margins(x)[0] > 0):
        raise DomainError("membership witness does not satisfy <y_t, x> > h_t*(y_t)")
    return PhiPoint(phi.vectors, phi.conj_values, phi.conj_gaps, x.copy(), phi.origin)


def phi_from_point(p: Program, x) -> PhiPoint:
    """Lift a strictly feasible point to a member of Phi.

    ``y_t`` is the catalog subgradient of ``h_t`` at ``x``; Fenchel equality
    gives ``<y_t, x> - h_t*(y_t) = h_t(x) > 0``, so ``x`` is its own witness.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not p.feasible_mask(x[None], "strict")[0]:
        raise DomainError(f"phi_from_point needs a strictly feasible point, got {x}")
    Y = np.array([subgrad(c.h, x) for c in p.constraints])
    return make_phi(p, Y, witness=x, origin="lift")


def _membership_candidates(p: Program, table: GridTable | None, N, seed, samples):
    table = table or GridTable(p.f, p.lower, p.upper, N)
    rng = np.random.default_rng(seed)
    extra = p.lower + (p.upper - p.lower) * rng.random((samples, p.n))
    X = np.vstack([table.points, extra])
    F = np.concatenate([table.fvals, p.f.values(extra)])
    return X, np.isfinite(F)


def _best_witness(phi: PhiPoint, X, in_dom):
    worst = np.min(phi.margins(X), axis=1)
    worst = np.where(in_dom, worst, -np.inf)
    i = int(np.argmax(worst))
    return X[i].copy() if worst[i] > 0 else None


def phi_membership(p: Program, phi: PhiPoint, N=None, seed: int = 0, samples: int = 256,
                   table: GridTable | None = None):
    """Search the grid and seeded samples for a membership witness.

    Returns the candidate with the largest smallest margin, or ``None``
    (inconclusive) when no candidate has all margins positive.
    """
    if not np.all(np.isfinite(phi.conj_values)):
        raise DomainError("phi outside dom h*")
    X, in_dom = _membership_candidates(p, table, N, seed, samples)
    return _best_witness(phi, X, in_dom)


def lagrangian(p: Program, phi: PhiPoint, x, lam) -> float:
    """``H(phi; x, lam) = sum_t lam_t (h_t*(y_t) - <y_t, x>)``."""
    w = lam.weights if isinstance(lam, LambdaVec) else np.asarray(lam, dtype=float)
    if not np.any(w):
        return 0.0
    x = np.asarray(x, dtype=float)
    return float(w @ (phi.conj_values - phi.vectors @ x))


# ---------------------------------------------------------------------------
# inner maximization over lambda


class DualFunction:
    """``c(lam) = lam . h*(y) - f*(lam Y)``; ``-inf`` where ``f*`` is infinite."""

    def __init__(self, p: Program, phi: PhiPoint):
        if not np.all(np.isfinite(phi.conj_values)):
            raise DomainError("phi outside dom h*")
        if not p.f.has_closed_conjugate:
            raise NoClosedFormError("the dual needs a closed-form conjugate of the objective")
        self.f = p.f
        self.Y = phi.vectors
        self.c = phi.conj_values

    def __call__(self, lam) -> float:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        fs = conjugate_closed(self.f, lam @ self.Y)
        if not fs.is_finite:
            return -math.inf
        return float(lam @ self.c) - fs.value

    def supergrad(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        x = self.f.conj_argmax(lam @ self.Y)
        return self.c - self.Y @ x


def projected_residual(lam: np.ndarray, g: np.ndarray) -> float:
    """Norm of the supergradient projected onto the tangent cone of ``lam >= 0``."""
    r = np.where(lam > 0, g, np.maximum(g, 0.0))
    return float(np.linalg.norm(r))


@dataclass(frozen=True)
class InnerMax:
    value: EValue
    lam: LambdaVec
    residual: float
    attained: bool
    diverged: bool = False

    def __iter__(self):
        # allow ``value, lam = inner_dual_max(...)``
        return iter((self.value, self.lam))

    def to_dict(self) -> dict:
        return {"value": self.value.to_json(), "lambda": self.lam.to_list(),
                "residual": self.residual, "attained": self.attained, "diverged": self.diverged}


def golden_max(fun, lo: float, hi: float, xtol: float = GOLDEN_XTOL):
    """Golden-section search for the maximum of a unimodal ``fun`` on ``[lo, hi]``.

    The endpoints are compared against the interior result so that boundary
    maxima are returned exactly.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fun(x1), fun(x2)
    while b - a > xtol * max(1.0, abs(b)):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fun(x1)
    best = [(f1, x1), (f2, x2), (fun(lo), lo), (fun(hi), hi)]
    fx, x = max(best, key=lambda t: t[0])
    return x, fx


def _maximize_1d(c: DualFunction):
    v = lambda s: c(np.array([s]))
    start = 0.0
    v0 = v(0.0)
    if v0 == -math.inf:
        probes = [10.0**k for k in range(-6, 7)]
        finite = [s for s in probes if v(s) > -math.inf]
        if not finite:
            raise DomainError("dual inner problem has empty domain")
        start = finite[0]
        v0 = v(start)
    # expanding bracket: [left, right] contains the maximizer once c stops rising
    left, mid, vmid = start, start, v0
    right = start + max(1.0, start)
    while True:
        vr = v(right)
        if vr == -math.inf:
            # domain edge between mid and right; keep the last finite point
            a, b = mid, right
            for _ in range(200):
                m_ = 0.5 * (a + b)
                if m_ in (a, b):
                    break
                if v(m_) > -math.inf:
                    a = m_
                else:
                    b = m_
            right = a
            break
        if vr <= vmid:
            break
        if right > LAMBDA_DIVERGE:
            return right, math.inf, True
        left, mid, vmid = mid, right, vr
        right = 2.0 * right
    lam, val = golden_max(v, left, right)
    lam, val = _sharpen_1d(c, v, lam, val, left, right)
    return lam, val, False


def _sharpen_1d(c: DualFunction, v, lam, val, left, right):
    """Bisect on the sign of the supergradient near the golden-section result.

    Value comparisons stall once ``c`` is flat to machine precision (about
    ``sqrt(eps)`` in ``lam``); the supergradient is monotone for a concave
    function and keeps resolving the maximizer past that point.
    """
    w = 1e-6 * max(1.0, abs(lam))
    a, b = max(left, lam - w), min(right, lam + w)
    g = lambda s: float(c.supergrad(np.array([s]))[0])
    if not (v(a) > -math.inf and v(b) > -math.inf) or g(a) < 0 or g(b) > 0:
        return lam, val
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if g(mid) > 0:
            a = mid
        else:
            b = mid
    best = max([(val, lam), (v(a), a), (v(b), b)], key=lambda t: (t[0], -abs(g(t[1]))))
    return best[1], best[0]


def _maximize_supergrad(c: DualFunction, m: int, polish: bool):
    lam = np.zeros(m)
    val = c(lam)
    if val == -math.inf:
        lam = np.ones(m)
        val = c(lam)
        if val == -math.inf:
            raise DomainError("dual inner problem has empty domain")
    best_lam, best_val = lam.copy(), val
    for k in range(SUPERGRAD_ITERS):
        g = c.supergrad(lam)
        step = SUPERGRAD_STEP / (1.0 + k)
        for _ in range(60):
            new = np.maximum(0.0, lam + step * g)
            vn = c(new)
            if vn > -math.inf:
                break
            step *= 0.5
        else:
            break
        if np.max(new) > LAMBDA_DIVERGE and vn > val:
            return new, math.inf, True
        if vn > best_val:
            best_lam, best_val = new.copy(), vn
        done = np.linalg.norm(new - lam) <= SUPERGRAD_RTOL * max(1.0, float(np.linalg.norm(lam)))
        lam, val = new, vn
        if done:
            break
    if polish:
        res = _sp_minimize(lambda z: -c(z), best_lam, jac=lambda z: -c.supergrad(z),
                           method="L-BFGS-B", bounds=[(0.0, None)] * m,
                           options={"ftol": 1e-15, "gtol": 1e-13, "maxiter": 2000})
        z = np.maximum(res.x, 0.0)
        vz = c(z)
        if vz > best_val:
            best_lam, best_val = z, vz
    return best_lam, best_val, False


def inner_dual_max(p: Program, phi: PhiPoint) -> InnerMax:
    """Maximize the concave dual function of ``phi`` over ``lam >= 0``.

    One constraint: expanding bracket plus golden section.  Several:
    projected supergradient ascent with steps ``1/(1+k)``, polished by
    L-BFGS-B when ``f*`` is finite everywhere.  A multiplier escaping beyond
    ``1e6`` while the dual keeps rising is reported as ``+inf``.
    """
    c = DualFunction(p, phi)
    if phi.m == 1:
        lam, val, diverged = _maximize_1d(c)
        lam = np.array([lam])
    else:
        lam, val, diverged = _maximize_supergrad(c, phi.m, p.f.conjugate_finite_everywhere)
    lam = np.maximum(lam, 0.0)
    if diverged:
        return InnerMax(PLUS_INF, LambdaVec(lam), math.inf, False, True)
    residual = projected_residual(lam, c.supergrad(lam))
    return InnerMax(EValue.of(val), LambdaVec(lam), residual, residual <= ATTAIN_TOL)


@dataclass(frozen=True)
class RA1Certificate:
    """Unit-multiplier Lagrangian values at the witness; all negative means RA1 holds."""

    holds: bool
    unit_values: np.ndarray
    near_degenerate: bool

    def __bool__(self):
        return self.holds


def check_RA1(p: Program, phi: PhiPoint) -> RA1Certificate:
    """Certify the regularity condition for a member of Phi.

    A nonzero ``lam >= 0`` with ``H(phi; x, lam) >= 0`` for all ``x`` is
    impossible because ``H(phi; witness, e_t) < 0`` for each unit vector and
    ``H`` is linear in ``lam``.
    """
    if phi.witness is None:
        raise ValueError("check_RA1 needs a phi with a membership witness")
    vals = phi.conj_upper - phi.vectors @ phi.witness
    return RA1Certificate(bool(np.all(vals < 0)), vals, bool(np.max(vals) > -NEAR_DEGENERATE))


# ---------------------------------------------------------------------------
# outer search over Phi


def build_phi_pool(p: Program, table: GridTable, seed: int = 0, n_lift: int = 32,
                   n_perturb: int = 8, samples: int = 256) -> list:
    """Subgradient lifts of the best strictly feasible grid points plus perturbations.

    Each lifted ``y_t`` is perturbed ``n_perturb`` times with Gaussian noise
    of scale ``0.1 |y_t| + 0.01``; a perturbation is kept when every
    conjugate stays finite and a membership witness is found.  Duplicates
    are dropped, keeping first occurrence.
    """
    rng = np.random.default_rng(seed)
    mask = p.feasible_mask(table.points, "strict") & np.isfinite(table.fvals)
    idx = np.flatnonzero(mask)
    idx = idx[np.argsort(table.fvals[idx], kind="stable")][:n_lift]
    X, in_dom = _membership_candidates(p, table, None, seed, samples)
    pool, seen = [], set()

    def add(phi):
        k = phi.key()
        if k not in seen:
            seen.add(k)
            pool.append(phi)

    for i in idx:
        base = phi_from_point(p, table.points[i])
        add(base)
        sigma = 0.1 * np.linalg.norm(base.vectors, axis=1) + 0.01
        noise = rng.standard_normal((n_perturb,) + base.vectors.shape)
        for z in noise:
            Y = base.vectors + sigma[:, None] * z
            cand = make_phi(p, Y, origin="perturbation")
            if not np.all(np.isfinite(cand.conj_values)):
                continue
            w = _best_witness(cand, X, in_dom)
            if w is not None:
                add(attach_witness(p, cand, w))
    return pool


@dataclass(frozen=True, eq=False)
class DualSearch:
    beta_hat: EValue
    phi_star: PhiPoint
    lambda_star: LambdaVec
    pool: list
    inner: list
    star_index: int


def dual_search(p: Program, N=None, seed: int = 0, table: GridTable | None = None,
                n_lift: int = 32, n_perturb: int = 8) -> DualSearch:
    """Minimum of the inner dual maximum over a sampled pool of Phi members.

    The pool is a subset of Phi, so the result bounds the dual value from
    above.
    """
    table = table or GridTable(p.f, p.lower, p.upper, N)
    pool = build_phi_pool(p, table, seed, n_lift, n_perturb)
    if not pool:
        raise EmptyPoolError("no Phi member found; the program may be strictly infeasible "
                             "(the strict feasible set is empty iff Phi is empty)")
    inner = [inner_dual_max(p, phi) for phi in pool]
    k = min(range(len(pool)), key=lambda i: (float(inner[i].value), i))
    return DualSearch(inner[k].value, pool[k], inner[k].lam, pool, inner, k)


# ---------------------------------------------------------------------------
# full report


@dataclass(frozen=True)
class DualConfig:
    N: int | None = None
    seed: int = 0
    tol: float = 1e-4
    eps_levels: tuple = (0.0, 1e-9)
    n_lift: int = 32
    n_perturb: int = 8
    floor_tol: float = 1e-6
    refine_top: int = 4

    def to_dict(self) -> dict:
        return {"N": self.N, "seed": self.seed, "tol": self.tol, "eps_levels": list(self.eps_levels),
                "n_lift": self.n_lift, "n_perturb": self.n_perturb, "floor_tol": self.floor_tol,
                "refine_top": self.refine_top}


def _flag(passed: bool, **detail) -> dict:
    return {"passed": bool(passed), "detail": detail}


@dataclass(frozen=True, eq=False)
class DualityReport:
    alpha_hat: Estimate
    alpha_geq_hat: Estimate
    alpha_eps: dict
    alpha_bar_hat: EValue
    beta_hat: EValue
    phi_star: PhiPoint
    lambda_star: LambdaVec
    inner_star: InnerMax
    pool_summary: list
    chain_flags: dict
    notes: list
    config: DualConfig

    @property
    def passed(self) -> bool:
        return all(f["passed"] for f in self.chain_flags.values())

    def to_dict(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat.to_dict(),
            "alpha_geq_hat": self.alpha_geq_hat.to_dict(),
            "alpha_eps_sweep": {k: v.to_dict() for k, v in self.alpha_eps.items()},
            "alpha_bar_hat": self.alpha_bar_hat.to_json(),
            "beta_bar": BETA_BAR_NOTE,
            "beta_hat": self.beta_hat.to_json(),
            "phi_star": self.phi_star.to_dict(),
            "lambda_star": self.lambda_star.to_list(),
            "inner_star": self.inner_star.to_dict(),
            "pool_size": len(self.pool_summary),
            "pool": self.pool_summary,
            "chain_flags": self.chain_flags,
            "notes": self.notes,
        }


def duality_report(p: Program, config: DualConfig = DualConfig()) -> DualityReport:
    """Primal, regularized-primal and dual estimates with the chain checks.

    Only all-strict programs are accepted, and the objective needs a
    closed-form conjugate.
    """
    if not p.all_strict:
        raise ValidationError("duality report needs all constraints strict; "
                              "use the equivalence analysis for mixed programs")
    if not p.f.has_closed_conjugate:
        raise ValidationError("duality report needs a closed-form conjugate of the objective")
    table = GridTable(p.f, p.lower, p.upper, config.N)
    alpha = primal_estimate(p, eps_strict=0.0, mode="strict", table=table)
    alpha_geq = primal_estimate(p, eps_strict=0.0, mode="nonstrict", table=table)
    alpha_eps = {repr(float(e)): primal_estimate(p, eps_strict=float(e), mode="strict", table=table)
                 for e in config.eps_levels}

    ds = dual_search(p, seed=config.seed, table=table, n_lift=config.n_lift,
                     n_perturb=config.n_perturb)
    pool, inner = ds.pool, ds.inner

    # linearized values on the shared grid: j with '>', j-bar with '>='
    finite_f = np.isfinite(table.fvals)
    jbar_grid, j_grid = [], []
    for phi in pool:
        lin = np.min(table.points @ phi.vectors.T - phi.conj_values, axis=1)
        jb = table.fvals[(lin >= 0) & finite_f]
        jj = table.fvals[(lin > 0) & finite_f]
        jbar_grid.append(float(jb.min()) if jb.size else math.inf)
        j_grid.append(float(jj.min()) if jj.size else math.inf)
    alpha_bar = min(jbar_grid)
    order = sorted(range(len(pool)), key=lambda i: (jbar_grid[i], i))[:config.refine_top]
    for i in order:
        if math.isfinite(jbar_grid[i]):
            est = j_value(p, pool[i], strict=False, table=table)
            alpha_bar = min(alpha_bar, float(est.value))

    f_star0 = float(conjugate_closed(p.f, np.zeros(p.n)))
    floor0 = -f_star0
    inner_vals = np.array([float(r.value) for r in inner])
    ra1 = [check_RA1(p, phi) for phi in pool]

    flags = {}
    worst0 = float(np.min(inner_vals - floor0))
    flags["weak_duality_floor_lambda0"] = _flag(worst0 >= -1e-9, min_excess=worst0, floor=floor0)
    alpha_known = p.known.get("alpha")
    if alpha_known is not None:
        alpha_known = float(EValue.from_json(alpha_known))
        worst = float(np.min(inner_vals - alpha_known))
        flags["weak_duality_floor_known_alpha"] = _flag(
            worst >= -config.floor_tol, min_excess=worst, alpha_known=alpha_known,
            tol=config.floor_tol)
    viol = [i for i in range(len(pool)) if jbar_grid[i] > j_grid[i]]
    flags["jbar_le_j"] = _flag(not viol, violations=[(i, jbar_grid[i], j_grid[i]) for i in viol])

    lifts = [i for i, phi in enumerate(pool) if phi.origin == "lift"]
    sand = []
    lemma_err = 0.0
    for i in lifts:
        x = pool[i].witness
        fx = float(p.f.values(x[None])[0])
        if j_grid[i] > fx:
            sand.append((i, j_grid[i], fx))
        h = p.margins(x[None])[0]
        lin = pool[i].vectors @ x - pool[i].conj_values
        lemma_err = max(lemma_err, float(np.max(np.abs(lin - h))))
    flags["sandwich_j_le_f_witness"] = _flag(not sand, violations=sand)
    flags["feasibility_lemma_margins"] = _flag(lemma_err <= 1e-9, max_abs_error=lemma_err)
    flags["ra1"] = _flag(all(ra1), failures=[i for i, r in enumerate(ra1) if not r],
                         near_degenerate=[i for i, r in enumerate(ra1) if r.near_degenerate])
    a_grid = float(alpha.grid_value)
    flags["alpha_bar_le_alpha_grid"] = _flag(alpha_bar <= a_grid, alpha_bar_hat=alpha_bar,
                                             alpha_grid=a_grid)
    star = inner[ds.star_index]
    if ds.beta_hat.is_finite:
        flags["dual_attainment"] = _flag(star.attained, residual=star.residual, tol=ATTAIN_TOL)
    a_val, b_val = float(alpha.value), float(ds.beta_hat)
    gap = abs(a_val - b_val) if math.isfinite(a_val) and math.isfinite(b_val) else math.inf
    flags["corollary_equality"] = _flag(gap <= config.tol, alpha_hat=a_val, beta_hat=b_val,
                                        abs_gap=gap, tol=config.tol)
    if alpha_known is not None:
        err = abs(a_val - alpha_known)
        flags["alpha_matches_known"] = _flag(err <= config.tol, alpha_hat=a_val,
                                             alpha_known=alpha_known, abs_error=err)

    notes = [BETA_BAR_NOTE]
    if not alpha.value.is_finite and alpha.value.tag == "plus_infinity":
        notes.append("alpha estimate is +inf: trivial equality case of the value chain")
    if ds.beta_hat.tag == "minus_infinity":
        notes.append("beta estimate is -inf: trivial equality case of the value chain")
    vals = {k: float(v.value) for k, v in alpha_eps.items()}
    if len(set(vals.values())) > 1:
        notes.append(f"strict-boundary sensitivity across eps levels: {vals}")

    summary = []
    for i, phi in enumerate(pool):
        summary.append({
            "index": i, "origin": phi.origin,
            "vectors": phi.vectors.tolist(),
            "conj_values": phi.conj_values.tolist(),
            "inner": inner[i].to_dict(),
            "jbar_grid": EValue.of(jbar_grid[i]).to_json(),
            "j_grid": EValue.of(j_grid[i]).to_json(),
            "ra1": bool(ra1[i]),
        })
    return DualityReport(alpha, alpha_geq, alpha_eps, EValue.of(alpha_bar), ds.beta_hat,
                         ds.phi_star, ds.lambda_star, star, summary, flags, notes, config)
