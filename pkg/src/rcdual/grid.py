"""Tensor grids over axis-aligned boxes.

Points are enumerated in C order (last axis fastest), so ``np.argmin`` over a
flattened grid breaks ties toward the lexicographically smallest index.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BudgetExceeded, DimensionError

DEFAULT_BUDGET = 10**7


def as_box(lower, upper):
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    if lower.shape != upper.shape or lower.ndim != 1:
        raise DimensionError("box bounds must be 1-D arrays of equal length")
    return lower, upper


def default_points_per_axis(n: int) -> int:
    """Per-axis resolution used when the caller does not pick one."""
    return {1: 100001, 2: 401, 3: 61}.get(n, max(2, int(round(2e5 ** (1.0 / n)))))


def check_budget(n: int, N: int, budget: int = DEFAULT_BUDGET) -> int:
    if N < 2:
        raise ValueError(f"need at least 2 points per axis, got {N}")
    total = N**n
    if total > budget:
        raise BudgetExceeded(f"grid of {N}^{n} = {total} points exceeds budget {budget}")
    return total


def make_grid(lower, upper, N: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Return the ``(N**n, n)`` array of grid points of ``[lower, upper]``."""
    lower, upper = as_box(lower, upper)
    n = lower.size
    check_budget(n, N, budget)
    axes = [np.linspace(lo, hi, N) for lo, hi in zip(lower, upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def max_spacing(lower, upper, N: int) -> float:
    lower, upper = as_box(lower, upper)
    return float(np.max(upper - lower)) / (N - 1)


def lipschitz_estimate(values: np.ndarray, n: int, N: int, lower, upper) -> float:
    """Sampled Lipschitz constant of a function tabulated on a grid.

    Takes the largest axial difference quotient between neighbouring grid
    points where both values are finite, scaled by ``sqrt(n)`` to pass from
    the max-coordinate to the Euclidean norm.
    """
    lower, upper = as_box(lower, upper)
    vals = np.asarray(values, dtype=float).reshape((N,) * n)
    steps = (upper - lower) / (N - 1)
    best = 0.0
    for axis in range(n):
        with np.errstate(invalid="ignore"):
            d = np.diff(vals, axis=axis)
        ok = np.isfinite(d)
        if np.any(ok):
            best = max(best, float(np.max(np.abs(d[ok]))) / steps[axis])
    return best * math.sqrt(n)


def resolution_factor(n: int) -> float:
    # nearest grid point lies within sqrt(n)/2 spacings (Euclidean)
    return max(1.0, math.sqrt(n) / 2.0)
