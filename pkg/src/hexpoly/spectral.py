"""Spectral curve, criticality indicators and phase classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .params import OneTwoParams, PolygonParams

INF = math.inf


@dataclass(frozen=True)
class LaurentPoly2:
    """``sum coeff[j+1][k+1] z^j w^k`` for ``j, k`` in ``{-1, 0, 1}``."""

    coeff: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        c = np.asarray(self.coeff, dtype=float)
        if c.shape != (3, 3):
            raise ValueError("LaurentPoly2 needs a 3x3 coefficient table")
        object.__setattr__(self, "coeff", tuple(map(tuple, c.tolist())))

    def __getitem__(self, jk: tuple[int, int]) -> float:
        j, k = jk
        return self.coeff[j + 1][k + 1]

    def is_reciprocal(self, tol: float = 0.0) -> bool:
        return all(
            abs(self[j, k] - self[-j, -k]) <= tol for j in (-1, 0, 1) for k in (-1, 0, 1)
        )

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        out = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        for j in (-1, 0, 1):
            for k in (-1, 0, 1):
                c = self[j, k]
                if c:
                    out = out + c * z**j * w**k
        return out if out.ndim else complex(out)

    def on_torus(self, theta, phi) -> np.ndarray:
        """Real values ``P(e^{i theta}, e^{i phi})`` (``P`` is reciprocal)."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        out = self[0, 0] + 0 * (theta + phi)
        out = out + 2 * self[0, 1] * np.cos(phi)
        out = out + 2 * self[1, 0] * np.cos(theta)
        out = out + 2 * self[-1, 1] * np.cos(phi - theta)
        out = out + 2 * self[1, 1] * np.cos(theta + phi)
        return out


def char_poly_closed(A: float, B: float, C: float) -> LaurentPoly2:
    """Characteristic polynomial ``det K1(z, w)`` of the Fisher dimer model."""
    c0 = 1 + A**4 + B**4 + C**4
    cw = A * A * C * C - B * B
    cz = A * A * B * B - C * C
    cx = B * B * C * C - A * A  # coefficient of w/z and z/w
    coeff = [[0.0] * 3 for _ in range(3)]
    coeff[1][1] = c0
    coeff[1][2] = coeff[1][0] = cw
    coeff[2][1] = coeff[0][1] = cz
    coeff[0][2] = coeff[2][0] = cx
    return LaurentPoly2(tuple(map(tuple, coeff)))


def char_poly_polygon(alpha: float, beta: float, gamma: float) -> LaurentPoly2:
    """Same polynomial written directly in the polygon weights."""
    ab, bg, ga = alpha * beta, beta * gamma, gamma * alpha
    coeff = [[0.0] * 3 for _ in range(3)]
    coeff[1][1] = 1 + bg * bg + ga * ga + ab * ab
    coeff[1][2] = coeff[1][0] = ga * (beta * beta - 1)
    coeff[2][1] = coeff[0][1] = ab * (gamma * gamma - 1)
    coeff[0][2] = coeff[2][0] = bg * (alpha * alpha - 1)
    return LaurentPoly2(tuple(map(tuple, coeff)))


@dataclass(frozen=True)
class CriticalityIndicators:
    U: float
    V: float
    S: float
    T: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.U, self.V, self.S, self.T)

    @property
    def min_abs(self) -> float:
        return min(abs(x) for x in self.as_tuple())

    @property
    def product(self) -> float:
        return self.U * self.V * self.S * self.T


def uvst(alpha: float, beta: float, gamma: float) -> CriticalityIndicators:
    ab, bg, ga = alpha * beta, beta * gamma, gamma * alpha
    return CriticalityIndicators(
        U=ab + bg + ga - 1,
        V=-ab + bg + ga + 1,
        S=ab - bg + ga + 1,
        T=ab + bg - ga + 1,
    )


# P(theta, nu) at the four real torus points, as squares of the indicators.
REAL_POINT_FACTOR = {(1, 1): "U", (-1, -1): "S", (-1, 1): "T", (1, -1): "V"}


@dataclass(frozen=True)
class PhaseBoundaries:
    gamma1: float
    gamma2: float  # math.inf when alpha == beta


def phase_boundaries(alpha: float, beta: float) -> PhaseBoundaries:
    _positive(alpha, beta)
    g1 = abs(1 - alpha * beta) / (alpha + beta)
    g2 = INF if alpha == beta else abs(1 + alpha * beta) / abs(alpha - beta)
    return PhaseBoundaries(g1, g2)


class Phase(str, Enum):
    SUPERCRITICAL = "supercritical"
    SUBCRITICAL_R1 = "subcritical_R1"
    SUBCRITICAL_R2 = "subcritical_R2"
    SUBCRITICAL_R3 = "subcritical_R3"
    SUBCRITICAL_R4 = "subcritical_R4"
    CRITICAL = "critical"


@dataclass(frozen=True)
class PhaseVerdict:
    phase: Phase
    zero_factor: str | None = None  # 'U', 'V', 'S' or 'T' when critical

    @property
    def critical(self) -> bool:
        return self.phase is Phase.CRITICAL

    @property
    def subcritical(self) -> bool:
        return self.phase.value.startswith("subcritical")


DEFAULT_TOL = 1e-9


def classify(alpha: float, beta: float, gamma: float, tol: float = DEFAULT_TOL) -> PhaseVerdict:
    _positive(alpha, beta, gamma)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    ind = uvst(alpha, beta, gamma)
    scale = 1 + alpha * beta + beta * gamma + gamma * alpha
    vals = dict(zip("UVST", ind.as_tuple()))
    name = min(vals, key=lambda k: abs(vals[k]))
    if abs(vals[name]) <= tol * scale:
        return PhaseVerdict(Phase.CRITICAL, name)
    b = phase_boundaries(alpha, beta)
    if b.gamma1 < gamma < b.gamma2:
        return PhaseVerdict(Phase.SUPERCRITICAL)
    if gamma < b.gamma1:
        return PhaseVerdict(Phase.SUBCRITICAL_R1 if alpha * beta < 1 else Phase.SUBCRITICAL_R2)
    return PhaseVerdict(Phase.SUBCRITICAL_R3 if alpha < beta else Phase.SUBCRITICAL_R4)


def symmetry_orbit(alpha: float, beta: float, gamma: float) -> list[tuple[float, float, float]]:
    """The four images under inverting an even number of the weights."""
    _positive(alpha, beta, gamma)
    return [
        (alpha, beta, gamma),
        (alpha, 1 / beta, 1 / gamma),
        (1 / alpha, beta, 1 / gamma),
        (1 / alpha, 1 / beta, gamma),
    ]


# ---------------------------------------------------------------------------
# 1-2 model and Ising links
# ---------------------------------------------------------------------------


class OneTwoCase(str, Enum):
    IMAGINARY_ALL_SMALL = "a(i)"  # a^2 < b^2 + c^2
    IMAGINARY_UNIT = "a(ii)"  # a^2 = b^2 + c^2
    IMAGINARY_LARGE = "a(iii)"  # a^2 > b^2 + c^2
    BOUNDARY = "b"  # a = b + c
    REAL = "c"  # a > b + c


@dataclass(frozen=True)
class OneTwoImage:
    A: float
    B: float
    C: float
    alpha2: float  # signed eps_a^2; inf/0 on the a = b + c boundary
    beta2: float
    gamma2: float
    case: OneTwoCase
    order: tuple[int, int, int]  # input positions sorted so that a >= b >= c

    @property
    def real(self) -> bool:
        return self.case is OneTwoCase.REAL

    def polygon(self) -> PolygonParams:
        """Polygon weights, available only when all three squares are positive."""
        return PolygonParams(self.alpha2, self.beta2, self.gamma2)


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return INF if num != 0 else math.nan
    return num / den


def from_one_two(a: float, b: float, c: float, rel_tol: float = 1e-12) -> OneTwoImage:
    params = OneTwoParams(a, b, c)
    A, B, C = params.dimer_weights()
    vals = (a, b, c)
    order = tuple(sorted(range(3), key=lambda i: -vals[i]))
    hi, mid, lo = (vals[i] for i in order)
    scale = hi + mid + lo
    if abs(hi - (mid + lo)) <= rel_tol * scale:
        case = OneTwoCase.BOUNDARY
    elif hi > mid + lo:
        case = OneTwoCase.REAL
    else:
        d = hi * hi - (mid * mid + lo * lo)
        if abs(d) <= rel_tol * scale * scale:
            case = OneTwoCase.IMAGINARY_UNIT
        elif d < 0:
            case = OneTwoCase.IMAGINARY_ALL_SMALL
        else:
            case = OneTwoCase.IMAGINARY_LARGE
    sq = [_ratio(B * C, A), _ratio(A * C, B), _ratio(A * B, C)]
    if case is OneTwoCase.BOUNDARY:
        # the largest parameter's square diverges and the other two vanish
        sq = [0.0, 0.0, 0.0]
        sq[order[0]] = INF
    return OneTwoImage(A, B, C, sq[0], sq[1], sq[2], case, order)  # type: ignore[arg-type]


@dataclass(frozen=True)
class IsingCouplings:
    J_a: float
    J_b: float
    J_c: float
    indicator: float  # t_a t_b + t_b t_c + t_c t_a - 1 with t_s = tanh J_s


def ising_couplings(alpha: float, beta: float, gamma: float) -> IsingCouplings:
    """Couplings with ``tanh J_s = eps_s`` in the high-temperature range."""
    for name, x in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if not 0 < x < 1:
            raise ValueError(
                f"{name}={x} is outside (0, 1): no high-temperature Ising couplings"
            )
    ta, tb, tc = (math.sqrt(x) for x in (alpha, beta, gamma))
    return IsingCouplings(
        math.atanh(ta), math.atanh(tb), math.atanh(tc), indicator=ta * tb + tb * tc + tc * ta - 1
    )


# ---------------------------------------------------------------------------
# Torus scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusMin:
    value: float
    z: complex
    w: complex


def torus_min(P: LaurentPoly2, grid: int) -> TorusMin:
    """Minimum of ``P`` over a ``grid x grid`` uniform lattice on the unit torus.

    The lattice contains ``(1, 1)``; for even ``grid`` it contains all four
    points ``(+-1, +-1)``.
    """
    if grid < 4:
        raise ValueError("grid must be at least 4")
    t = 2 * np.pi * np.arange(grid) / grid
    vals = P.on_torus(t[:, None], t[None, :])
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    # snap exact lattice points so that (1, 1) is reported exactly
    z = complex(np.round(np.cos(t[i]), 15), np.round(np.sin(t[i]), 15))
    w = complex(np.round(np.cos(t[j]), 15), np.round(np.sin(t[j]), 15))
    return TorusMin(float(vals[i, j]), z, w)


def _positive(*xs: float) -> None:
    for x in xs:
        if not x > 0:
            raise ValueError(f"parameters must be positive, got {x}")
