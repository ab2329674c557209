"""Infinite-volume limits: Fourier entries of the inverse Kasteleyn matrix,
the path perturbation, the limiting squared order parameter and its decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kasteleyn import assemble_K1_aug
from .lattice import AUG_LABELS, PATH_LABELS, CorrelationPath
from .params import HalfEdgeWeights, PolygonParams
from .spectral import char_poly_polygon, classify, uvst

DEFAULT_GRID = 256
DEFAULT_MAX_SEP = 12
DEFAULT_RULE = "de"
SINGULAR_P = 1e-13  # relative floor for P on a quadrature node

# per period, edges of E_ell as (tail label, head label, kind)
PERIOD_EDGES = (("b3", "b4", "b"), ("a2", "a1", "a"), ("a4", "a3", "a"), ("b1", "b2", "b"))
_PATH_IDX = np.array([AUG_LABELS.index(lab) for lab in PATH_LABELS])


class CriticalParameters(ValueError):
    """The spectral curve meets (or nearly meets) the unit torus."""


def _as_params(params) -> PolygonParams:
    if isinstance(params, PolygonParams):
        return params
    return PolygonParams(*params)


def _label_index(v) -> int:
    return AUG_LABELS.index(v) if isinstance(v, str) else int(v)


# ---------------------------------------------------------------------------
# Quadrature on the unit torus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusRule:
    """Periodic rule ``mean f = sum_j weights[j] f(e^{i theta[j]})`` on one axis.

    ``uniform`` is the plain trapezoid rule.  ``graded`` substitutes
    ``theta = t - sin(2t)/2`` first, clustering nodes cubically around 0 and
    pi.  ``de`` is a tanh-sinh rule on the period starting at ``center``;
    its nodes cluster doubly exponentially at ``center``, which is where the
    spectral curve comes closest to the torus.
    """

    grid: int
    kind: str
    center: float
    theta: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(1j * self.theta)


DE_HALF_WIDTH = 3.0


def torus_rule(grid: int, kind: str = DEFAULT_RULE, center: float = 0.0) -> TorusRule:
    if grid < 4 or grid & (grid - 1):
        raise ValueError("grid must be a power of two >= 4")
    if kind == "de":
        h = 2 * DE_HALF_WIDTH / grid
        u = -DE_HALF_WIDTH + h * (np.arange(grid) + 0.5)
        s = 0.5 * np.pi * np.sinh(u)
        theta = center + np.pi + np.pi * np.tanh(s)
        wts = 0.25 * np.pi * np.cosh(u) / np.cosh(s) ** 2 * h
        return TorusRule(grid, kind, center, theta, wts)
    t = 2 * np.pi * np.arange(grid) / grid
    if kind == "uniform":
        theta, dtheta = t, np.ones(grid)
    elif kind == "graded":
        theta, dtheta = t - 0.5 * np.sin(2 * t), 1 - np.cos(2 * t)
    else:
        raise ValueError(f"unknown quadrature rule {kind!r}")
    return TorusRule(grid, kind, center, theta, dtheta / grid)


# real torus point (theta, phi) where each indicator's square is P's value
_FACTOR_POINT = {"U": (0.0, 0.0), "V": (0.0, np.pi), "S": (np.pi, np.pi), "T": (np.pi, 0.0)}


def torus_rules(p: PolygonParams, grid: int, kind: str = DEFAULT_RULE) -> tuple[TorusRule, TorusRule]:
    """Rules for the ``z`` and ``w`` axes, centred at the nearest-critical real point."""
    vals = dict(zip("UVST", uvst(*p.as_tuple()).as_tuple()))
    cz, cw = _FACTOR_POINT[min(vals, key=lambda k: abs(vals[k]))]
    return torus_rule(grid, kind, cz), torus_rule(grid, kind, cw)


def _check_offcritical(p: PolygonParams, rz: TorusRule, rw: TorusRule) -> None:
    verdict = classify(*p.as_tuple())
    if verdict.critical:
        raise CriticalParameters(f"critical parameters ({verdict.zero_factor} = 0)")
    poly = char_poly_polygon(*p.as_tuple())
    vals = poly.on_torus(rz.theta[:, None], rw.theta[None, :])
    if vals.min() <= SINGULAR_P * poly[0, 0]:
        raise CriticalParameters("P vanishes on a quadrature node")


def _kinv_rows(eps: HalfEdgeWeights, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``K1(z_i, w_j)^{-1}`` for all pairs, shape ``(len(z), len(w), 12, 12)``."""
    k = assemble_K1_aug(eps, z[:, None], w[None, :])
    return np.linalg.inv(k)


# ---------------------------------------------------------------------------
# Fourier table
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FourierKinvTable:
    """Limits ``G(dp, dq) = lim K_n^{-1}[(X, u), (X + (dp, dq), v)]``.

    Built from ``G(d) = mean_{z,w} z^{-dp} w^{-dq} K1(z, w)^{-1}``.  Rows of
    ``K1^{-1}`` are integrated over ``w`` once per requested ``dq`` and kept,
    so any ``dp`` can be read off afterwards.
    """

    params: PolygonParams
    grid: int
    rule: TorusRule = field(repr=False)  # z axis
    wrule: TorusRule = field(repr=False)
    _partial: dict = field(repr=False)  # dq -> (grid, 12, 12) w-integrated rows

    @classmethod
    def build(cls, params, grid: int = DEFAULT_GRID, dqs=(0,), rule: str = DEFAULT_RULE, chunk: int = 64):
        p = _as_params(params)
        rz, rw = torus_rules(p, grid, rule)
        _check_offcritical(p, rz, rw)
        dqs = tuple(sorted(set(int(d) for d in dqs)))
        wfac = {d: rw.weights * rw.nodes ** (-d) for d in dqs}
        partial = {d: np.empty((grid, 12, 12), dtype=complex) for d in dqs}
        for lo in range(0, grid, chunk):
            inv = _kinv_rows(p.eps, rz.nodes[lo : lo + chunk], rw.nodes)
            for d in dqs:
                partial[d][lo : lo + chunk] = np.einsum("k,jkuv->juv", wfac[d], inv)
        return cls(p, grid, rz, rw, partial)

    @property
    def dqs(self) -> tuple[int, ...]:
        return tuple(self._partial)

    def block(self, dp: int, dq: int = 0) -> np.ndarray:
        """12x12 matrix ``G(dp, dq)`` indexed by augmented labels."""
        if dq not in self._partial:
            raise KeyError(f"dq={dq} not tabulated (have {self.dqs})")
        fac = self.rule.weights * self.rule.nodes ** (-dp)
        return np.einsum("j,juv->uv", fac, self._partial[dq])

    def blocks(self, dps, dq: int = 0) -> np.ndarray:
        dps = np.asarray(list(dps))
        fac = self.rule.weights[None, :] * self.rule.nodes[None, :] ** (-dps[:, None])
        return np.einsum("mj,juv->muv", fac, self._partial[dq])

    def __getitem__(self, key) -> complex:
        """Entry in the ``(dp, dq, vs, vr)`` form of :func:`fourier_kinv`."""
        dp, dq, vs, vr = key
        return complex(-self.block(-dp, -dq)[_label_index(vs), _label_index(vr)])


def fourier_kinv(params, dp: int, dq: int, vs, vr, grid: int = DEFAULT_GRID, rule: str = DEFAULT_RULE) -> complex:
    """``-mean_{z,w} z^{dp} w^{dq} K1(z, w)^{-1}[vs, vr]`` over the unit torus.

    By antisymmetry this is the limit of ``K_n^{-1}[(X, vr), (X + (dp, dq), vs)]``.
    """
    p = _as_params(params)
    rz, rw = torus_rules(p, grid, rule)
    _check_offcritical(p, rz, rw)
    i, j = _label_index(vs), _label_index(vr)
    wfac = rw.weights * rw.nodes**dq
    total = 0j
    for lo in range(0, grid, 64):
        z = rz.nodes[lo : lo + 64]
        inv = _kinv_rows(p.eps, z, rw.nodes)[:, :, i, j]
        total += np.sum((rz.weights[lo : lo + 64] * z**dp)[:, None] * wfac[None, :] * inv)
    return -total


# ---------------------------------------------------------------------------
# Path perturbation and the limiting order parameter
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathPerturbation:
    """``X_ell`` on ``V_ell`` (8 vertices per period, ``PATH_LABELS`` order).

    ``X[t, h] = lambda_s`` and ``X[h, t] = -lambda_s`` with
    ``lambda_s = eps_s - 1/eps_s`` for each path edge ``t -> h``.
    """

    periods: int
    X: np.ndarray = field(repr=False)
    vertex_eps: np.ndarray = field(repr=False)  # eps of the path edge at each vertex
    det_X: float
    lambda_a: float
    lambda_b: float

    def blocks(self) -> list[tuple[str, float]]:
        """Per-period 2x2 block values with rows taken in descending label order.

        In that order the a-blocks read ``+lambda_a`` and the b-blocks
        ``-lambda_b``.
        """
        out = []
        for tail, head, kind in PERIOD_EDGES:
            hi, lo = sorted((tail, head), reverse=True)
            i, j = PATH_LABELS.index(hi), PATH_LABELS.index(lo)
            out.append((kind, float(self.X[i, j])))
        return out


def build_X(path, eps) -> PathPerturbation:
    """Path perturbation for a :class:`CorrelationPath` or a number of periods."""
    k = path.periods if isinstance(path, CorrelationPath) else int(path)
    if k < 1:
        raise ValueError("path needs at least one period")
    if isinstance(eps, PolygonParams):
        eps = eps.eps
    elif not isinstance(eps, HalfEdgeWeights):
        eps = HalfEdgeWeights(*eps)
    lam = {s: eps.of(s) - 1 / eps.of(s) for s in "ab"}
    x1 = np.zeros((8, 8))
    e1 = np.zeros(8)
    for tail, head, kind in PERIOD_EDGES:
        i, j = PATH_LABELS.index(tail), PATH_LABELS.index(head)
        x1[i, j], x1[j, i] = lam[kind], -lam[kind]
        e1[i] = e1[j] = eps.of(kind)
    X = np.kron(np.eye(k), x1)
    det_X = (lam["a"] ** 4 * lam["b"] ** 4) ** k
    return PathPerturbation(k, X, np.tile(e1, k), det_X, lam["a"], lam["b"])


def path_kinv(table: FourierKinvTable, periods: int) -> np.ndarray:
    """``K_ell^{-1}``: the limiting inverse restricted to ``V_ell``."""
    blocks = table.blocks(range(-(periods - 1), periods))[:, _PATH_IDX][:, :, _PATH_IDX]
    g = np.empty((8 * periods, 8 * periods), dtype=complex)
    for j in range(periods):
        for k in range(periods):
            g[8 * j : 8 * j + 8, 8 * k : 8 * k + 8] = blocks[k - j + periods - 1]
    return g


def _m2_from(table: FourierKinvTable, periods: int) -> float:
    pert = build_X(periods, table.params)
    g = path_kinv(table, periods)
    if np.max(np.abs(g.imag)) > 1e-8 * max(1.0, np.max(np.abs(g.real))):
        raise ArithmeticError("limiting inverse is not real; quadrature unresolved")
    mat = (np.eye(8 * periods) + pert.X @ g.real) / pert.vertex_eps[:, None]
    sign, logdet = np.linalg.slogdet(mat)
    return float(sign * math.exp(logdet)) if sign else 0.0


def m_inf_squared(params, sep, grid: int = DEFAULT_GRID, table: FourierKinvTable | None = None, rule: str = DEFAULT_RULE) -> float:
    """``lim_n M_n(e, f)^2`` for NW edges ``sep`` periods apart on a common diagonal.

    Evaluates ``det(I + X_ell K_ell^{-1}) * prod eps_g^{-2}`` over ``E_ell``.
    ``sep`` may also be a :class:`CorrelationPath`.
    """
    k = sep.periods if isinstance(sep, CorrelationPath) else int(sep)
    if table is None:
        table = FourierKinvTable.build(params, grid, rule=rule)
    return _m2_from(table, k)


@dataclass(frozen=True)
class LambdaEstimate:
    value: float
    table: tuple[tuple[int, float, float], ...]  # (sep, m2, delta_rel)
    converged: bool
    phase: str


def lambda_estimate(params, max_sep: int = DEFAULT_MAX_SEP, grid: int = DEFAULT_GRID, rule: str = DEFAULT_RULE) -> LambdaEstimate:
    """``m_inf_squared`` at separations ``1..max_sep``; the last value estimates Lambda."""
    p = _as_params(params)
    verdict = classify(*p.as_tuple())
    if verdict.critical:
        raise CriticalParameters(f"critical parameters ({verdict.zero_factor} = 0)")
    tab = FourierKinvTable.build(p, grid, rule=rule)
    rows = []
    prev = None
    for k in range(1, max_sep + 1):
        m2 = _m2_from(tab, k)
        delta = math.nan if prev is None else abs(m2 - prev) / abs(m2) if m2 else math.inf
        rows.append((k, m2, delta))
        prev = m2
    last_m2, last_delta = rows[-1][1], rows[-1][2]
    if verdict.subcritical:
        converged = abs(last_m2) < 1e-8
    else:
        converged = last_delta < 1e-6
    return LambdaEstimate(last_m2, tuple(rows), bool(converged), verdict.phase.value)


# ---------------------------------------------------------------------------
# Toeplitz symbol
# ---------------------------------------------------------------------------


def _symbol_parts(params):
    p = _as_params(params)
    pert = build_X(1, p)
    return p, pert.X / pert.vertex_eps[:, None], np.diag(1 / pert.vertex_eps)


def toeplitz_symbol(params, zeta, grid: int = DEFAULT_GRID, rule: str = DEFAULT_RULE) -> np.ndarray:
    """8x8 symbol ``psi(zeta) = D^{-1} + D^{-1} X_1 mean_w K1^{-1}(zeta, w)`` on ``V_ell``.

    ``D`` is the diagonal of path weights, so ``D^{-1} X_1`` has entries
    ``+-lambda_g`` with ``lambda_g = 1 - eps_g^{-2}``.  ``zeta`` may be an
    array, giving shape ``zeta.shape + (8, 8)``.
    """
    p, lam, dinv = _symbol_parts(params)
    rz, r = torus_rules(p, grid, rule)
    _check_offcritical(p, rz, r)
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(np.abs(zeta) - 1) > 1e-12):
        raise ValueError("zeta must lie on the unit circle")
    flat = zeta.reshape(-1)
    inv = _kinv_rows(p.eps, flat, r.nodes)[:, :, _PATH_IDX][:, :, :, _PATH_IDX]
    avg = np.einsum("k,jkuv->juv", r.weights, inv)
    psi = dinv[None] + lam[None] @ avg
    return psi.reshape(zeta.shape + (8, 8))


def toeplitz_coefficients(params, max_index: int, grid: int = DEFAULT_GRID) -> np.ndarray:
    """Fourier coefficients ``psi_m`` for ``|m| <= max_index`` (uniform FFT in zeta)."""
    p = _as_params(params)
    zeta = np.exp(2j * np.pi * np.arange(grid) / grid)
    psi = toeplitz_symbol(p, zeta, grid)
    coef = np.fft.fft(psi, axis=0) / grid  # coef[m] = mean zeta^{-m} psi
    return np.stack([coef[m % grid] for m in range(-max_index, max_index + 1)])


def toeplitz_determinant(params, periods: int, grid: int = DEFAULT_GRID) -> float:
    """``det T_k(psi)`` with blocks ``T[j, k] = psi_{k - j}``.

    With the ``PATH_LABELS`` ordering this reproduces :func:`m_inf_squared`.
    """
    coef = toeplitz_coefficients(params, periods - 1, grid)
    mid = periods - 1
    t = np.empty((8 * periods, 8 * periods), dtype=complex)
    for j in range(periods):
        for k in range(periods):
            t[8 * j : 8 * j + 8, 8 * k : 8 * k + 8] = coef[mid + k - j]
    sign, logdet = np.linalg.slogdet(t)
    return float((sign * np.exp(logdet)).real)


def min_indicator(params) -> float:
    return uvst(*_as_params(params).as_tuple()).min_abs
