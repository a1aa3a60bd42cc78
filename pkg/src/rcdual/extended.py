"""Extended real numbers ``R u {-inf, +inf}``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

from .errors import ExtendedRealError

FINITE = "finite"
PLUS = "plus_infinity"
MINUS = "minus_infinity"


@total_ordering
@dataclass(frozen=True)
class EValue:
    """A point of the extended real line.

    ``value`` is meaningful only when ``tag == "finite"``; infinite values
    always carry ``value == 0.0`` so that equality is structural.
    """

    tag: str
    value: float = 0.0

    def __post_init__(self):
        if self.tag not in (FINITE, PLUS, MINUS):
            raise ValueError(f"unknown tag {self.tag!r}")
        if self.tag == FINITE and not math.isfinite(self.value):
            raise ValueError("finite EValue needs a finite value; use EValue.of")

    @classmethod
    def of(cls, v) -> EValue:
        if isinstance(v, EValue):
            return v
        v = float(v)
        if math.isnan(v):
            raise ExtendedRealError("NaN is not an extended real")
        if v == math.inf:
            return PLUS_INF
        if v == -math.inf:
            return MINUS_INF
        return cls(FINITE, v)

    @property
    def is_finite(self) -> bool:
        return self.tag == FINITE

    def __float__(self) -> float:
        if self.tag == PLUS:
            return math.inf
        if self.tag == MINUS:
            return -math.inf
        return self.value

    def __add__(self, other) -> EValue:
        other = EValue.of(other)
        tags = {self.tag, other.tag}
        if tags == {PLUS, MINUS}:
            raise ExtendedRealError("+inf + -inf is undefined")
        if PLUS in tags:
            return PLUS_INF
        if MINUS in tags:
            return MINUS_INF
        return EValue.of(self.value + other.value)

    __radd__ = __add__

    def __neg__(self) -> EValue:
        if self.tag == PLUS:
            return MINUS_INF
        if self.tag == MINUS:
            return PLUS_INF
        return EValue(FINITE, -self.value)

    def __sub__(self, other) -> EValue:
        return self + (-EValue.of(other))

    def __rsub__(self, other) -> EValue:
        return EValue.of(other) + (-self)

    def scale(self, s: float) -> EValue:
        """Multiply by ``s > 0``."""
        if not s > 0:
            raise ExtendedRealError(f"scale factor must be positive, got {s}")
        if not self.is_finite:
            return self
        return EValue.of(s * self.value)

    def __eq__(self, other):
        if isinstance(other, (int, float, EValue)):
            try:
                return float(self) == float(EValue.of(other))
            except ExtendedRealError:
                return False
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, (int, float, EValue)):
            return float(self) < float(EValue.of(other))
        return NotImplemented

    def __hash__(self):
        return hash(float(self))

    def to_json(self):
        if self.tag == PLUS:
            return "+inf"
        if self.tag == MINUS:
            return "-inf"
        return self.value

    @classmethod
    def from_json(cls, v) -> EValue:
        if v == "+inf":
            return PLUS_INF
        if v == "-inf":
            return MINUS_INF
        return cls.of(v)

    def __repr__(self):
        if self.tag == FINITE:
            return f"EValue({self.value!r})"
        return "EValue(+inf)" if self.tag == PLUS else "EValue(-inf)"


PLUS_INF = EValue(PLUS)
MINUS_INF = EValue(MINUS)
