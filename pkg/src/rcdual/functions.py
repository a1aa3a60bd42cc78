"""Catalog of convex functions on R^n.

Every member evaluates exactly (vectorized over rows), selects one
subgradient deterministically, and, where a closed form exists, evaluates its
Fenchel conjugate ``g*(y) = sup_x <y, x> - g(x)``.  Members without a closed
form are handled by :func:`conjugate_grid`, which returns a lower bound plus an
explicit resolution gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, lu_factor, lu_solve

from . import grid as _grid
from .errors import DimensionError, DomainError, NoClosedFormError, ValidationError
from .extended import PLUS_INF, EValue
from .gauge import GaugeData

# relative tolerance for membership in the single-point / unit-ball domains of
# affine and norm conjugates; subgradients computed through scaling wrappers
# are only reproduced up to rounding
_DOM_RTOL = 1e-12


def _vec(x, n: int, name: str = "x") -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (n,):
        raise DimensionError(f"{name} has shape {x.shape}, expected ({n},)")
    return x


def _rows(X, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, n) if n > 1 else X[:, None]
    if X.ndim != 2 or X.shape[1] != n:
        raise DimensionError(f"points have shape {X.shape}, expected (k, {n})")
    return X


class ConvexFunction:
    """Base class for catalog members.

    Subclasses implement :meth:`values`, :meth:`subgrad` and :meth:`to_dict`,
    and optionally :meth:`conjugate`, :meth:`conj_argmax` and :meth:`minimize`.
    """

    kind = "abstract"
    n: int

    # -- evaluation ---------------------------------------------------------
    def values(self, X: np.ndarray) -> np.ndarray:
        """Values at the rows of ``X``; ``+inf`` outside the domain."""
        raise NotImplementedError

    def __call__(self, x) -> EValue:
        return evaluate(self, x)

    @property
    def real_valued(self) -> bool:
        return True

    @property
    def has_closed_conjugate(self) -> bool:
        return True

    @property
    def conjugate_finite_everywhere(self) -> bool:
        """True when ``g*`` is finite on all of R^n (smooth dual steps allowed)."""
        return False

    # -- first-order oracles -------------------------------------------------
    def subgrad(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def conjugate(self, y: np.ndarray) -> EValue:
        raise NoClosedFormError(
            f"{self.kind} has no closed-form conjugate; use conjugate_grid")

    def conj_argmax(self, y: np.ndarray) -> np.ndarray:
        """A maximizer ``x`` of ``<y, x> - g(x)``, i.e. an element of ``dg*(y)``.

        Only called where ``g*(y)`` is finite.
        """
        raise NoClosedFormError(f"{self.kind} has no conjugate maximizer oracle")

    def minimize(self, lower, upper) -> np.ndarray:
        """Unconstrained minimizer; the default searches the box numerically."""
        return grid_minimize(self, lower, upper)

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


class Affine(ConvexFunction):
    """``g(x) = <a, x> + b``."""

    kind = "affine"

    def __init__(self, a, b=0.0):
        self.a = np.atleast_1d(np.asarray(a, dtype=float))
        self.b = float(b)
        self.n = self.a.size

    def values(self, X):
        return _rows(X, self.n) @ self.a + self.b

    def subgrad(self, x):
        return self.a.copy()

    def conjugate(self, y):
        # indicator of {a}, shifted by -b
        tol = _DOM_RTOL * max(1.0, float(np.max(np.abs(self.a))))
        if np.max(np.abs(y - self.a)) <= tol:
            return EValue.of(-self.b)
        return PLUS_INF

    def conj_argmax(self, y):
        return np.zeros(self.n)

    def minimize(self, lower, upper):
        # unbounded below unless a == 0; report the minimizing box corner
        lower, upper = _grid.as_box(lower, upper)
        return np.where(self.a < 0, upper, lower)

    def to_dict(self):
        return {"kind": "affine", "a": self.a.tolist(), "b": self.b}


class Quadratic(ConvexFunction):
    """``g(x) = 1/2 x'Qx + c'x + r`` with ``Q`` symmetric positive definite."""

    kind = "quadratic"

    def __init__(self, Q, c=None, r=0.0):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        n = Q.shape[0]
        if Q.shape != (n, n):
            raise ValidationError(f"Q must be square, got shape {Q.shape}")
        if not np.allclose(Q, Q.T, rtol=0, atol=1e-12):
            raise ValidationError("Q not symmetric")
        try:
            cho_factor(Q)
        except np.linalg.LinAlgError:
            raise ValidationError("Q not positive definite") from None
        self.Q = Q
        # LU solves are exact on diagonal Q with power-of-two entries, which
        # keeps textbook instances free of rounding noise
        self._lu = lu_factor(Q)
        self.c = np.zeros(n) if c is None else _vec(c, n, "c")
        self.r = float(r)
        self.n = n

    @property
    def conjugate_finite_everywhere(self):
        return True

    def values(self, X):
        X = _rows(X, self.n)
        return 0.5 * np.einsum("ij,ij->i", X @ self.Q, X) + X @ self.c + self.r

    def subgrad(self, x):
        return self.Q @ x + self.c

    def conj_argmax(self, y):
        return lu_solve(self._lu, y - self.c)

    def conjugate(self, y):
        w = y - self.c
        return EValue.of(0.5 * float(w @ lu_solve(self._lu, w)) - self.r)

    def minimize(self, lower, upper):
        return -lu_solve(self._lu, self.c)

    def to_dict(self):
        return {"kind": "quadratic", "Q": self.Q.tolist(), "c": self.c.tolist(), "r": self.r}


class SqNorm2(ConvexFunction):
    """``g(x) = s |x|_2^2``."""

    kind = "sq_norm2"

    def __init__(self, n: int, scale=1.0):
        if not scale > 0:
            raise ValidationError("sq_norm2 scale must be positive")
        self.n = int(n)
        self.scale = float(scale)

    @property
    def conjugate_finite_everywhere(self):
        return True

    def values(self, X):
        X = _rows(X, self.n)
        return self.scale * np.einsum("ij,ij->i", X, X)

    def subgrad(self, x):
        return 2.0 * self.scale * x

    def conjugate(self, y):
        return EValue.of(float(y @ y) / (4.0 * self.scale))

    def conj_argmax(self, y):
        return y / (2.0 * self.scale)

    def minimize(self, lower, upper):
        return np.zeros(self.n)

    def to_dict(self):
        return {"kind": "sq_norm2", "scale": self.scale}


class Norm(ConvexFunction):
    """``g(x) = |x|_p`` for ``p`` in ``{1, 2, inf}``."""

    kind = "norm"
    _DUAL = {1: math.inf, 2: 2, math.inf: 1}

    def __init__(self, n: int, p=2):
        p = math.inf if p in ("inf", math.inf) else int(p)
        if p not in self._DUAL:
            raise ValidationError(f"norm order must be 1, 2 or inf, got {p}")
        self.n = int(n)
        self.p = p

    def values(self, X):
        return np.linalg.norm(_rows(X, self.n), ord=self.p, axis=1)

    def subgrad(self, x):
        if not np.any(x):
            return np.zeros(self.n)
        if self.p == 2:
            return x / np.linalg.norm(x)
        if self.p == 1:
            return np.sign(x)
        i = int(np.argmax(np.abs(x)))
        y = np.zeros(self.n)
        y[i] = np.sign(x[i])
        return y

    def conjugate(self, y):
        # indicator of the dual-norm unit ball
        if np.linalg.norm(y, ord=self._DUAL[self.p]) <= 1.0 + _DOM_RTOL:
            return EValue.of(0.0)
        return PLUS_INF

    def conj_argmax(self, y):
        return np.zeros(self.n)

    def minimize(self, lower, upper):
        return np.zeros(self.n)

    def to_dict(self):
        return {"kind": "norm", "p": "inf" if self.p == math.inf else self.p}


class BoxIndicator(ConvexFunction):
    """Indicator of ``[l, u]``: 0 inside, ``+inf`` outside."""

    kind = "box_indicator"

    def __init__(self, lower, upper):
        self.lower = np.atleast_1d(np.asarray(lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if self.lower.shape != self.upper.shape:
            raise DimensionError("box_indicator bounds differ in length")
        if np.any(self.lower > self.upper):
            raise ValidationError("box_indicator needs lower <= upper")
        self.n = self.lower.size

    @property
    def real_valued(self):
        return False

    @property
    def conjugate_finite_everywhere(self):
        return True

    def values(self, X):
        X = _rows(X, self.n)
        inside = np.all((X >= self.lower) & (X <= self.upper), axis=1)
        return np.where(inside, 0.0, np.inf)

    def subgrad(self, x):
        y = np.zeros(self.n)
        for i in range(self.n):
            if x[i] == self.lower[i]:
                y[i] = -1.0
                return y
            if x[i] == self.upper[i]:
                y[i] = 1.0
                return y
        return y

    def conjugate(self, y):
        return EValue.of(float(np.sum(np.maximum(self.lower * y, self.upper * y))))

    def conj_argmax(self, y):
        return np.where(y > 0, self.upper, self.lower)

    def minimize(self, lower, upper):
        return self.lower.copy()

    def to_dict(self):
        return {"kind": "box_indicator", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


class GaugeAffine(ConvexFunction):
    """``h(x) = gauge_V(T x - anchor) + const`` (set-constraint reduction)."""

    kind = "gauge_affine"

    def __init__(self, gauge: GaugeData, const=-1.0, anchor_point=None):
        self.gauge = gauge
        self.const = float(const)
        self.n = gauge.n
        self.anchor_point = None if anchor_point is None else _vec(anchor_point, self.n)

    @property
    def has_closed_conjugate(self):
        return False

    def values(self, X):
        Z = _rows(X, self.n) @ self.gauge.T_lin.T - self.gauge.anchor
        return self.gauge.values(Z) + self.const

    def subgrad(self, x):
        z = self.gauge.T_lin @ x - self.gauge.anchor
        return self.gauge.T_lin.T @ self.gauge.subgrad(z)

    def minimize(self, lower, upper):
        if self.anchor_point is not None:
            return self.anchor_point.copy()
        x, *_ = np.linalg.lstsq(self.gauge.T_lin, self.gauge.anchor, rcond=None)
        return x

    def to_dict(self):
        d = {"kind": "gauge_affine", "gauge": self.gauge.to_dict(), "const": self.const}
        if self.anchor_point is not None:
            d["anchor_point"] = self.anchor_point.tolist()
        return d


class Scaled(ConvexFunction):
    """``s * g`` with ``s > 0``."""

    kind = "scaled"

    def __init__(self, scale, inner: ConvexFunction):
        if not scale > 0:
            raise ValidationError("scaling factor must be positive")
        self.scale = float(scale)
        self.inner = inner
        self.n = inner.n

    real_valued = property(lambda self: self.inner.real_valued)
    has_closed_conjugate = property(lambda self: self.inner.has_closed_conjugate)
    conjugate_finite_everywhere = property(lambda self: self.inner.conjugate_finite_everywhere)

    def values(self, X):
        return self.scale * self.inner.values(X)

    def subgrad(self, x):
        return self.scale * self.inner.subgrad(x)

    def conjugate(self, y):
        return self.inner.conjugate(y / self.scale).scale(self.scale)

    def conj_argmax(self, y):
        return self.inner.conj_argmax(y / self.scale)

    def minimize(self, lower, upper):
        return self.inner.minimize(lower, upper)

    def to_dict(self):
        return {"kind": "scaled", "scale": self.scale, "inner": self.inner.to_dict()}


class Shifted(ConvexFunction):
    """``g + b``."""

    kind = "shifted"

    def __init__(self, shift, inner: ConvexFunction):
        self.shift = float(shift)
        self.inner = inner
        self.n = inner.n

    real_valued = property(lambda self: self.inner.real_valued)
    has_closed_conjugate = property(lambda self: self.inner.has_closed_conjugate)
    conjugate_finite_everywhere = property(lambda self: self.inner.conjugate_finite_everywhere)

    def values(self, X):
        return self.inner.values(X) + self.shift

    def subgrad(self, x):
        return self.inner.subgrad(x)

    def conjugate(self, y):
        return self.inner.conjugate(y) - self.shift

    def conj_argmax(self, y):
        return self.inner.conj_argmax(y)

    def minimize(self, lower, upper):
        return self.inner.minimize(lower, upper)

    def to_dict(self):
        return {"kind": "shifted", "shift": self.shift, "inner": self.inner.to_dict()}


# ---------------------------------------------------------------------------
# module-level operations


def evaluate(g: ConvexFunction, x) -> EValue:
    """Exact extended-real value of ``g`` at ``x``."""
    x = _vec(x, g.n)
    return EValue.of(g.values(x[None, :])[0])


def subgrad(g: ConvexFunction, x) -> np.ndarray:
    """Deterministic element of the subdifferential of ``g`` at ``x``.

    Raises :class:`DomainError` when ``x`` is outside ``dom g``.
    """
    x = _vec(x, g.n)
    if not evaluate(g, x).is_finite:
        raise DomainError(f"{x} is outside dom {g.kind}")
    return np.asarray(g.subgrad(x), dtype=float)


def conjugate_closed(g: ConvexFunction, y) -> EValue:
    """Closed-form ``g*(y)``; raises :class:`NoClosedFormError` if unavailable."""
    y = _vec(y, g.n, "y")
    if not g.has_closed_conjugate:
        raise NoClosedFormError(f"{g.kind} has no closed-form conjugate; use conjugate_grid")
    return g.conjugate(y)


@dataclass(frozen=True)
class ConjugateResult:
    value: EValue
    exact: bool
    lower_bound_gap: float


class GridConjugate:
    """Tabulates ``g`` on a grid once and answers ``g*(y)`` queries from it.

    The grid value never exceeds the true conjugate.  The reported gap
    ``(|y| + L) * h * max(1, sqrt(n)/2)`` (``sqrt(n)`` for indicators), with ``h`` the widest grid spacing and
    ``L`` a sampled Lipschitz constant of ``g``, bounds the shortfall whenever
    the supremum is attained inside the box.
    """

    def __init__(self, g: ConvexFunction, lower, upper, N: int, budget=_grid.DEFAULT_BUDGET):
        lower, upper = _grid.as_box(lower, upper)
        if lower.size != g.n:
            raise DimensionError("box dimension does not match the function")
        self.g = g
        self.points = _grid.make_grid(lower, upper, N, budget)
        vals = g.values(self.points)
        self.lipschitz = _grid.lipschitz_estimate(vals, g.n, N, lower, upper)
        keep = np.isfinite(vals)
        if not np.any(keep):
            raise DomainError("dom g does not meet the grid")
        self.points = self.points[keep]
        self.vals = vals[keep]
        # inside dom g the nearest admissible grid point may be a full spacing
        # away per axis when dom g ends between grid lines
        factor = _grid.resolution_factor(g.n) if g.real_valued else math.sqrt(g.n)
        self.resolution = _grid.max_spacing(lower, upper, N) * factor

    def __call__(self, y) -> ConjugateResult:
        y = _vec(y, self.g.n, "y")
        scores = self.points @ y - self.vals
        value = float(scores[int(np.argmax(scores))])
        gap = (float(np.linalg.norm(y)) + self.lipschitz) * self.resolution
        return ConjugateResult(EValue.of(value), False, gap)


def conjugate_grid(g: ConvexFunction, y, box, N: int, budget=_grid.DEFAULT_BUDGET) -> ConjugateResult:
    """Brute-force lower bound on ``g*(y)`` over a tensor grid of ``box``."""
    lower, upper = box
    return GridConjugate(g, lower, upper, N, budget)(y)


def grid_minimize(g: ConvexFunction, lower, upper, N=None, rounds=60) -> np.ndarray:
    """Grid search followed by coordinate descent with halving steps."""
    lower, upper = _grid.as_box(lower, upper)
    N = N or _grid.default_points_per_axis(g.n)
    pts = _grid.make_grid(lower, upper, N)
    vals = g.values(pts)
    if not np.any(np.isfinite(vals)):
        raise DomainError("dom g does not meet the search box")
    x = pts[int(np.argmin(vals))].copy()
    fx = float(vals.min())
    step = _grid.max_spacing(lower, upper, N)
    for _ in range(rounds):
        moved = False
        for i in range(g.n):
            for sgn in (-1.0, 1.0):
                cand = x.copy()
                cand[i] = min(max(cand[i] + sgn * step, lower[i]), upper[i])
                fc = float(g.values(cand[None])[0])
                if fc < fx:
                    x, fx, moved = cand, fc, True
        if not moved:
            step *= 0.5
    return x


def minimize_unconstrained(g: ConvexFunction, box) -> tuple[np.ndarray, EValue]:
    """Minimizer of ``g`` and its value.

    Closed forms: quadratics ``-Q^{-1}c``, norms and ``sq_norm2`` the origin,
    box indicators the lower corner, affine functions the minimizing corner
    of ``box``.  Anything else is searched on ``box``.
    """
    lower, upper = box
    x = np.asarray(g.minimize(lower, upper), dtype=float)
    return x, evaluate(g, x)


# ---------------------------------------------------------------------------
# (de)serialization


def function_from_dict(d: dict, n: int) -> ConvexFunction:
    """Build a catalog member from its problem-file description."""
    try:
        kind = d["kind"]
    except (KeyError, TypeError):
        raise ValidationError("function description needs a 'kind' field") from None
    if kind == "affine":
        g = Affine(d["a"], d.get("b", 0.0))
    elif kind == "quadratic":
        g = Quadratic(d["Q"], d.get("c"), d.get("r", 0.0))
    elif kind == "sq_norm2":
        g = SqNorm2(n, d.get("scale", 1.0))
    elif kind == "norm":
        g = Norm(n, d.get("p", 2))
    elif kind == "box_indicator":
        g = BoxIndicator(d["lower"], d["upper"])
    elif kind == "gauge_affine":
        g = GaugeAffine(GaugeData.from_dict(d["gauge"]), d.get("const", -1.0), d.get("anchor_point"))
    elif kind == "scaled":
        g = Scaled(d["scale"], function_from_dict(d["inner"], n))
    elif kind == "shifted":
        g = Shifted(d["shift"], function_from_dict(d["inner"], n))
    else:
        raise ValidationError(f"unknown function kind {kind!r}")
    if g.n != n:
        raise DimensionError(f"{kind} has dimension {g.n}, program has {n}")
    return g
