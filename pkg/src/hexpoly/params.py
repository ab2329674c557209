"""Parameter coordinate systems for the hexagonal polygon model.

Three systems are in play:

* polygon weights ``(alpha, beta, gamma)`` with half-edge weights
  ``eps_s = sqrt(param)``,
* dimer (Fisher triangle) weights ``A = eps_b eps_c``, ``B = eps_a eps_c``,
  ``C = eps_a eps_b``,
* 1-2 model weights ``(a, b, c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class HalfEdgeWeights:
    """Signed half-edge weights ``eps_a, eps_b, eps_c`` (all nonzero)."""

    eps_a: float
    eps_b: float
    eps_c: float

    def __post_init__(self):
        if self.eps_a == 0 or self.eps_b == 0 or self.eps_c == 0:
            raise ValueError("half-edge weights must be nonzero")

    def of(self, kind: str) -> float:
        return {"a": self.eps_a, "b": self.eps_b, "c": self.eps_c}[kind]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.eps_a, self.eps_b, self.eps_c)


@dataclass(frozen=True)
class PolygonParams:
    """Edge weights ``alpha = eps_a**2`` etc. of the polygon model."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.gamma > 0):
            raise ValueError(
                f"polygon parameters must be positive, got "
                f"({self.alpha}, {self.beta}, {self.gamma})"
            )

    @classmethod
    def from_eps(cls, eps_a: float, eps_b: float, eps_c: float) -> "PolygonParams":
        return cls(eps_a * eps_a, eps_b * eps_b, eps_c * eps_c)

    @property
    def eps(self) -> HalfEdgeWeights:
        """Positive square roots of the edge weights."""
        return HalfEdgeWeights(
            math.sqrt(self.alpha), math.sqrt(self.beta), math.sqrt(self.gamma)
        )

    def of(self, kind: str) -> float:
        return {"a": self.alpha, "b": self.beta, "c": self.gamma}[kind]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class DimerWeights:
    """Weights of the vertical, NE and NW edges of a Fisher triangle."""

    A: float
    B: float
    C: float

    def __post_init__(self):
        if self.A == 0 or self.B == 0 or self.C == 0:
            raise ValueError("dimer weights must be nonzero")

    @classmethod
    def from_polygon(cls, params: PolygonParams) -> "DimerWeights":
        e = params.eps
        return cls(e.eps_b * e.eps_c, e.eps_a * e.eps_c, e.eps_a * e.eps_b)

    def of(self, kind: str) -> float:
        # triangle edge kinds: 'v' vertical, 'ne', 'nw'
        return {"v": self.A, "ne": self.B, "nw": self.C}[kind]


@dataclass(frozen=True)
class OneTwoParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0:
            raise ValueError("1-2 model parameters must be nonnegative")
        if self.a == 0 and self.b == 0 and self.c == 0:
            raise ValueError("1-2 model parameters must not all vanish")

    def dimer_weights(self) -> tuple[float, float, float]:
        """The signed triple ``(A, B, C)`` of the 1-2 to polygon map."""
        s = self.a + self.b + self.c
        return (
            (self.a - self.b - self.c) / s,
            (self.b - self.a - self.c) / s,
            (self.c - self.a - self.b) / s,
        )
