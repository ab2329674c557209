"""Kasteleyn matrices of the Fisher and augmented Fisher graphs.

Partition functions and the two-edge order parameter come out of the usual
four-Pfaffian combination over the boundary signs ``(theta, nu)``.
"""

from __future__ import annotations

import math
import os
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .lattice import (
    AUG_LABELS,
    AUG_TEMPLATE,
    FISHER_LABELS,
    FISHER_TEMPLATE,
    AugFisherGraph,
    CorrelationPath,
    FisherGraph,
    OrientationError,
    _crossing,
    _DimerGraph,
    build_aug_fisher,
    build_fisher,
    build_hex_torus,
    build_path,
    nw_pair,
    verify_clockwise_odd,
)
from .params import DimerWeights, HalfEdgeWeights, PolygonParams
from .skewlinalg import slog_pfaffian

SECTORS = ((1, 1), (-1, 1), (1, -1), (-1, -1))

# Signs multiplying Pf K(theta, nu) for the sectors in SECTORS order, keyed by
# n mod 2.  Frozen after calibration against brute-force enumeration for
# n = 1..4 with the domain-major, label-minor vertex order used here; with this
# order both parities give the same pattern.
SIGN_PATTERN = {
    0: (-1, 1, 1, 1),
    1: (-1, 1, 1, 1),
}

SINGULAR_RTOL = 1e-13


def sign_pattern(n: int) -> tuple[int, int, int, int]:
    return SIGN_PATTERN[n % 2]


def threads() -> int:
    try:
        return max(1, int(os.environ.get("HEXPOLY_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Fundamental-domain symbols
# ---------------------------------------------------------------------------


def _symbol_terms(labels, template, weight_of):
    """Coefficient matrices of ``z^dp w^dq`` in the Kasteleyn symbol."""
    size = len(labels)
    terms: dict[tuple[int, int], np.ndarray] = {}
    for t in template:
        i, j = labels.index(t.tail), labels.index(t.head)
        wt = weight_of(t)
        dp, dq = t.disp
        terms.setdefault((dp, dq), np.zeros((size, size)))[i, j] += wt
        terms.setdefault((-dp, -dq), np.zeros((size, size)))[j, i] -= wt
    return terms


def _eval_symbol(terms, z, w) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    shape = np.broadcast(z, w).shape
    size = next(iter(terms.values())).shape[0]
    out = np.zeros(shape + (size, size), dtype=complex)
    for (dp, dq), mat in terms.items():
        phase = z**dp * w**dq
        out += phase[..., None, None] * mat
    return out


def fisher_symbol_terms(weights: DimerWeights):
    return _symbol_terms(
        FISHER_LABELS, FISHER_TEMPLATE, lambda t: weights.of(t.kind) if t.triangular else 1.0
    )


def aug_symbol_terms(eps: HalfEdgeWeights):
    def weight(t):
        return 1.0 / eps.of(t.kind) if t.part in ("left", "right") else 1.0

    return _symbol_terms(AUG_LABELS, AUG_TEMPLATE, weight)


def assemble_K1(A: float, B: float, C: float, z: complex, w: complex) -> np.ndarray:
    """6x6 modified Kasteleyn matrix of one Fisher domain (rows labelled 1..6)."""
    if z == 0 or w == 0:
        raise ValueError("z and w must be nonzero")
    return _eval_symbol(fisher_symbol_terms(DimerWeights(A, B, C)), z, w)


def assemble_K1_aug(eps, z, w) -> np.ndarray:
    """12x12 augmented-domain symbol; ``z``, ``w`` may be arrays (batched)."""
    if isinstance(eps, PolygonParams):
        eps = eps.eps
    elif not isinstance(eps, HalfEdgeWeights):
        eps = HalfEdgeWeights(*eps)
    return _eval_symbol(aug_symbol_terms(eps), z, w)


# ---------------------------------------------------------------------------
# Torus assemblies
# ---------------------------------------------------------------------------

_audit_cache: "weakref.WeakKeyDictionary[_DimerGraph, bool]" = weakref.WeakKeyDictionary()


def _audited(g: _DimerGraph) -> bool:
    ok = _audit_cache.get(g)
    if ok is None:
        ok = verify_clockwise_odd(g)[0]
        _audit_cache[g] = ok
    return ok


@dataclass(frozen=True, eq=False)
class KasteleynAssembly:
    matrix: np.ndarray = field(repr=False)
    graph: _DimerGraph = field(repr=False)
    z: complex
    w: complex
    weights: np.ndarray = field(repr=False)  # per-edge weight used

    @property
    def n(self) -> int:
        return self.graph.n

    def vertex_index(self, p: int, q: int, label: str) -> int:
        return self.graph.vertex_index(p, q, label)


def _edge_weights(g: _DimerGraph, weights) -> np.ndarray:
    if isinstance(g, AugFisherGraph):
        return np.array([e.weight for e in g.edges])
    if weights is None:
        raise ValueError("Fisher graph assembly needs DimerWeights")
    if isinstance(weights, PolygonParams):
        weights = DimerWeights.from_polygon(weights)
    return np.array([weights.of(e.kind) if e.part == "triangle" else 1.0 for e in g.edges])


def assemble_Kn(g: _DimerGraph, weights=None, z=1, w=1, seam=(0, 0), edge_weights=None) -> KasteleynAssembly:
    """Modified Kasteleyn matrix of the whole torus graph.

    Edges crossing the ``p`` seam pick up ``z^{+-1}``, those crossing the ``q``
    seam ``w^{+-1}``, according to the direction of travel.
    """
    if not _audited(g):
        raise OrientationError("graph orientation is not clockwise odd")
    if z == 0 or w == 0:
        raise ValueError("z and w must be nonzero")
    wts = _edge_weights(g, weights) if edge_weights is None else np.asarray(edge_weights, dtype=float)
    n = g.n
    real = all(np.isrealobj(x) or np.imag(x) == 0 for x in (z, w))
    dtype = float if real else complex
    zz = np.real(z) if real else complex(z)
    ww = np.real(w) if real else complex(w)
    k = np.zeros((g.num_vertices, g.num_vertices), dtype=dtype)
    for e, wt in zip(g.edges, wts):
        wx, wy = _crossing(e.p, e.q, e.disp[0], e.disp[1], n, seam)
        phase = zz**wx * ww**wy
        k[e.tail, e.head] += wt * phase
        k[e.head, e.tail] -= wt / phase
    return KasteleynAssembly(k, g, z, w, wts)


class PathError(ValueError):
    pass


def modify_for_path(k: KasteleynAssembly, path: CorrelationPath, eps=None) -> KasteleynAssembly:
    """Swap ``1/eps_s`` for ``eps_s`` on the left/right thirds along ``path``."""
    g = k.graph
    if not isinstance(g, AugFisherGraph):
        raise PathError("path modification needs an augmented Fisher assembly")
    if not path.aug_edges:
        raise PathError("empty path")
    eps = g.eps if eps is None else eps
    lookup = {(e.tail, e.head): e.id for e in g.edges}
    wts = k.weights.copy()
    mat = k.matrix.copy()
    for tail, head, kind in path.aug_edges:
        eid = lookup.get((tail, head))
        if eid is None:
            raise PathError(f"path edge {tail}->{head} not found in assembly")
        s = eps.of(kind)
        ratio = s * s  # 1/s -> s
        mat[tail, head] *= ratio
        mat[head, tail] *= ratio
        wts[eid] *= ratio
    return KasteleynAssembly(mat, g, k.z, k.w, wts)


# ---------------------------------------------------------------------------
# Pfaffian combinations
# ---------------------------------------------------------------------------


def _slog_pfaffians(mats) -> list[tuple[float, float]]:
    mats = list(mats)
    nthreads = min(threads(), len(mats))
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as pool:
            return list(pool.map(slog_pfaffian, mats))
    return [slog_pfaffian(m) for m in mats]


def _combine(slogs, pattern) -> tuple[float, float]:
    """Signed log of ``sum_i pattern_i * Pf_i``."""
    logs = [l for s, l in slogs if s != 0]
    if not logs:
        return 0.0, -math.inf
    top = max(logs)
    total = sum(p * s * math.exp(l - top) for p, (s, l) in zip(pattern, slogs) if s != 0)
    if total == 0:
        return 0.0, -math.inf
    return math.copysign(1.0, total), top + math.log(abs(total))


def _sector_assemblies(g: _DimerGraph, weights=None, seam=(0, 0)) -> list[KasteleynAssembly]:
    return [assemble_Kn(g, weights, th, nu, seam) for th, nu in SECTORS]


def log_dimer_Z(g: _DimerGraph, weights=None, seam=(0, 0)) -> float:
    """``log Z`` of the dimer model on ``g`` from the four-Pfaffian combination."""
    slogs = _slog_pfaffians(k.matrix for k in _sector_assemblies(g, weights, seam))
    sign, logabs = _combine(slogs, sign_pattern(g.n))
    if sign <= 0:
        raise ArithmeticError("Pfaffian combination is not positive")
    return logabs - math.log(2.0)


def log_partition_Z(n: int, params: PolygonParams, seam=(0, 0)) -> float:
    """``log Z_n(P)`` via the augmented Fisher graph and the weight-restoration factor."""
    af = build_aug_fisher(build_fisher(build_hex_torus(n)), params)
    eps = af.eps
    restore = 2 * n * n * math.log(abs(eps.eps_a * eps.eps_b * eps.eps_c))
    return log_dimer_Z(af, seam=seam) + restore


def partition_Z(n: int, params: PolygonParams) -> float:
    """Polygon partition function ``Z_n(P)`` (may overflow to ``inf`` for large tori)."""
    try:
        return math.exp(log_partition_Z(n, params))
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class CorrelationResult:
    value: float  # nan when flagged as critical
    prefactor: float
    numerator: tuple[tuple[float, float], ...]  # slog Pf K'(theta, nu)
    denominator: tuple[tuple[float, float], ...]  # slog Pf K(theta, nu)
    critical: bool = False
    pattern: tuple[int, int, int, int] = SIGN_PATTERN[0]

    @property
    def squared(self) -> float:
        return self.value * self.value

    def scaled_pfaffians(self) -> tuple[float, ...]:
        """``Pf K'(theta, nu) / (2 Z_n(AD))`` in sector order (always finite)."""
        _, log_two_z = _combine(self.denominator, self.pattern)
        return tuple(sg * math.exp(l - log_two_z) if sg else 0.0 for sg, l in self.numerator)


def _is_singular(slogs) -> bool:
    logs = [l for _, l in slogs]
    top = max(logs)
    return any(s == 0 or l < top + math.log(SINGULAR_RTOL) for s, l in slogs)


def correlation_from_graph(af: AugFisherGraph, path: CorrelationPath, base_slogs=None) -> CorrelationResult:
    n = af.n
    pattern = sign_pattern(n)
    eps = af.eps
    base = _sector_assemblies(af)
    if base_slogs is None:
        base_slogs = _slog_pfaffians(k.matrix for k in base)
    mod_slogs = _slog_pfaffians(modify_for_path(k, path).matrix for k in base)
    prefactor = 1.0
    for kind in path.kinds():
        prefactor /= eps.of(kind)
    critical = _is_singular(base_slogs)
    if critical:
        value = math.nan
    else:
        sn, ln = _combine(mod_slogs, pattern)
        sd, ld = _combine(base_slogs, pattern)
        value = prefactor * sn * sd * math.exp(ln - ld) if sn else 0.0
    return CorrelationResult(value, prefactor, tuple(mod_slogs), tuple(base_slogs), critical, pattern)


def correlation_M(n: int, e: int, f: int, params: PolygonParams) -> CorrelationResult:
    """Two-edge order parameter ``M_n(e, f)`` for NW edges ``e``, ``f``."""
    if n < 2:
        raise ValueError("correlations need n >= 2")
    lat = build_hex_torus(n)
    af = build_aug_fisher(build_fisher(lat), params)
    return correlation_from_graph(af, build_path(lat, e, f))


def correlation_sweep(n: int, params: PolygonParams, seps, p0: int = 0, q0: int = 0) -> list[CorrelationResult]:
    """``M_n`` for several separations, sharing the four denominator Pfaffians."""
    lat = build_hex_torus(n)
    af = build_aug_fisher(build_fisher(lat), params)
    base_slogs = _slog_pfaffians(k.matrix for k in _sector_assemblies(af))
    out = []
    for sep in seps:
        e, f = nw_pair(lat, sep, p0, q0)
        out.append(correlation_from_graph(af, build_path(lat, e, f), base_slogs))
    return out
