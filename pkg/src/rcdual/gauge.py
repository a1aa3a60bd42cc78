"""Minkowski gauges of polytopes and balls containing the origin in their interior."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class GaugeData:
    """Gauge of ``V = D - anchor`` composed with ``x -> T x``.

    For a polytope ``D = {z | A z <= b}`` the shifted set is
    ``V = {z | a_i . z <= b'_i}`` with ``b'_i = b_i - a_i . anchor > 0`` and
    the gauge is ``max(0, max_i a_i . z / b'_i)``.  For a ball the shifted set
    is ``{z | |z - c0| <= r}`` with ``c0 = center - anchor`` and ``|c0| < r``.

    The gauge of ``V`` equals the support function of the polar ``V^0``, so
    ``max{<u, z> | u in V^0}`` is evaluated without building the polar.
    """

    shape: str  # "polytope" | "ball"
    T_lin: np.ndarray
    anchor: np.ndarray
    rows: np.ndarray | None = None
    offsets: np.ndarray | None = None
    center0: np.ndarray | None = None
    radius: float | None = None
    _scaled_rows: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "T_lin", np.atleast_2d(np.asarray(self.T_lin, dtype=float)))
        object.__setattr__(self, "anchor", np.atleast_1d(np.asarray(self.anchor, dtype=float)))
        if self.shape == "polytope":
            rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
            offsets = np.atleast_1d(np.asarray(self.offsets, dtype=float))
            if np.any(offsets <= 0):
                raise ValueError("all shifted offsets must be positive")
            object.__setattr__(self, "rows", rows)
            object.__setattr__(self, "offsets", offsets)
            object.__setattr__(self, "_scaled_rows", rows / offsets[:, None])
        elif self.shape == "ball":
            c0 = np.atleast_1d(np.asarray(self.center0, dtype=float))
            r = float(self.radius)
            if not r > 0 or not float(c0 @ c0) < r * r:
                raise ValueError("origin must lie in the interior of the shifted ball")
            object.__setattr__(self, "center0", c0)
            object.__setattr__(self, "radius", r)
        else:
            raise ValueError(f"unknown gauge shape {self.shape!r}")

    @property
    def d(self) -> int:
        return self.T_lin.shape[0]

    @property
    def n(self) -> int:
        return self.T_lin.shape[1]

    def values(self, Z: np.ndarray) -> np.ndarray:
        """Gauge of ``V`` at each row of ``Z``."""
        Z = np.atleast_2d(Z)
        if self.shape == "polytope":
            return np.maximum(0.0, np.max(Z @ self._scaled_rows.T, axis=1))
        # Positive root rho of |z/rho - c0| = r, i.e.
        #   (r^2 - |c0|^2) rho^2 + 2 <z, c0> rho - |z|^2 = 0.
        # The constant term is <= 0 and the leading one > 0, so exactly one
        # root is nonnegative.
        k = self.radius**2 - float(self.center0 @ self.center0)
        zc = Z @ self.center0
        zz = np.einsum("ij,ij->i", Z, Z)
        return (-zc + np.sqrt(zc * zc + k * zz)) / k

    def subgrad(self, z: np.ndarray) -> np.ndarray:
        """One subgradient of the gauge at ``z`` (zero vector at the origin)."""
        z = np.asarray(z, dtype=float)
        if self.shape == "polytope":
            scores = self._scaled_rows @ z
            i = int(np.argmax(scores))
            if scores[i] <= 0.0:
                return np.zeros_like(z)
            return self._scaled_rows[i].copy()
        if not np.any(z):
            return np.zeros_like(z)
        k = self.radius**2 - float(self.center0 @ self.center0)
        rho = float(self.values(z[None])[0])
        # implicit differentiation of F(rho, z) = k rho^2 + 2 rho <z,c0> - |z|^2
        return (z - rho * self.center0) / (k * rho + float(z @ self.center0))

    def to_dict(self) -> dict:
        d = {"shape": self.shape, "T": self.T_lin.tolist(), "anchor": self.anchor.tolist()}
        if self.shape == "polytope":
            d.update(rows=self.rows.tolist(), offsets=self.offsets.tolist())
        else:
            d.update(center0=self.center0.tolist(), radius=self.radius)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> GaugeData:
        if d["shape"] == "polytope":
            return cls("polytope", d["T"], d["anchor"], rows=d["rows"], offsets=d["offsets"])
        return cls("ball", d["T"], d["anchor"], center0=d["center0"], radius=d["radius"])
