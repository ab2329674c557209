"""Toroidal hexagonal lattice, Fisher graph and augmented Fisher graph.

Coordinates
-----------
A fundamental domain ``(p, q)`` holds one black and one white vertex of the
hexagonal lattice.  The black vertex sits at ``p*T_P + q*T_Q`` and its white
partner one unit to the right.  Edges are indexed ``(p, q, kind)``:

* ``a`` (horizontal): ``B(p, q) - W(p, q)``
* ``b`` (NW):         ``B(p, q) - W(p-1, q)``
* ``c`` (NE):         ``B(p, q) - W(p, q-1)``

Shifting by one domain in ``p`` (``q``) is the torus translation that the
phase ``z`` (``w``) tracks in the Kasteleyn symbol.  The homology cycles sit
on the seams ``p = n-1 | 0`` and ``q = n-1 | 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .params import HalfEdgeWeights, PolygonParams

SQ3 = math.sqrt(3.0)
T_P = np.array([1.5, -SQ3 / 2])
T_Q = np.array([1.5, SQ3 / 2])
WHITE_OFFSET = np.array([1.0, 0.0])

# unit vectors from the black vertex along its a, b, c edges
_B_DIR = {"a": np.array([1.0, 0.0]), "b": np.array([-0.5, SQ3 / 2]), "c": np.array([-0.5, -SQ3 / 2])}
_W_DIR = {k: -v for k, v in _B_DIR.items()}

# position of the white endpoint's domain relative to the black one
_EDGE_OFFSET = {"a": (0, 0), "b": (-1, 0), "c": (0, -1)}

_TRI_RADIUS = 0.2
_SPLIT_NEAR = 0.4


class EdgeKind(str, Enum):
    A = "a"  # horizontal
    B = "b"  # north-west
    C = "c"  # north-east


class LatticeError(ValueError):
    pass


class OrientationError(RuntimeError):
    """Raised when a graph fails the clockwise-odd audit."""


@dataclass(frozen=True)
class HexVertex:
    p: int
    q: int
    color: str  # "black" | "white"


@dataclass(frozen=True)
class HexEdge:
    id: int
    p: int
    q: int
    kind: EdgeKind
    black: int  # vertex index
    white: int
    crossing: str


@dataclass(frozen=True)
class TorusHexLattice:
    n: int
    vertices: tuple[HexVertex, ...]
    edges: tuple[HexEdge, ...]

    def vertex_index(self, p: int, q: int, color: str) -> int:
        n = self.n
        return 2 * ((p % n) * n + q % n) + (0 if color == "black" else 1)

    def edge_id(self, p: int, q: int, kind: str | EdgeKind) -> int:
        n = self.n
        return 3 * ((p % n) * n + q % n) + "abc".index(EdgeKind(kind).value)

    def edge(self, p: int, q: int, kind: str | EdgeKind) -> HexEdge:
        return self.edges[self.edge_id(p, q, kind)]

    def degree(self) -> np.ndarray:
        deg = np.zeros(len(self.vertices), dtype=int)
        for e in self.edges:
            deg[e.black] += 1
            deg[e.white] += 1
        return deg

    def midpoint(self, e: HexEdge) -> np.ndarray:
        """Midpoint of ``e`` in the unwrapped plane, measured from domain ``(e.p, e.q)``."""
        base = e.p * T_P + e.q * T_Q
        return base + 0.5 * _B_DIR[e.kind.value]

    def to_text(self, params: PolygonParams | None = None) -> str:
        lines = []
        for e in self.edges:
            wt = 1.0 if params is None else params.of(e.kind.value)
            lines.append(f"{e.id} {e.black} {e.white} {e.kind.value} {wt!r} none {e.crossing}")
        return "\n".join(lines) + "\n"


def _crossing(p: int, q: int, dp: int, dq: int, n: int, seam: tuple[int, int] = (0, 0)) -> tuple[int, int]:
    """Signed number of times the step ``(p,q) -> (p+dp,q+dq)`` crosses each seam."""
    pp = (p - seam[0]) % n + dp
    qq = (q - seam[1]) % n + dq
    return pp // n, qq // n


def _crossing_tag(wx: int, wy: int) -> str:
    if wx and wy:
        raise LatticeError("edge crosses both homology cycles")
    if wx:
        return "gx+" if wx > 0 else "gx-"
    if wy:
        return "gy+" if wy > 0 else "gy-"
    return "none"


def build_hex_torus(n: int) -> TorusHexLattice:
    """Hexagonal lattice on the ``n x n`` torus: ``2n^2`` vertices, ``3n^2`` edges."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise LatticeError(f"torus side must be a positive integer, got {n!r}")
    n = int(n)
    vertices = []
    for p in range(n):
        for q in range(n):
            vertices.append(HexVertex(p, q, "black"))
            vertices.append(HexVertex(p, q, "white"))
    edges = []
    for p in range(n):
        for q in range(n):
            for kind in "abc":
                dp, dq = _EDGE_OFFSET[kind]
                # edges are recorded from the white end towards the black end
                wx, wy = _crossing(p + dp, q + dq, -dp, -dq, n)
                edges.append(
                    HexEdge(
                        id=len(edges),
                        p=p,
                        q=q,
                        kind=EdgeKind(kind),
                        black=2 * (p * n + q),
                        white=2 * (((p + dp) % n) * n + (q + dq) % n) + 1,
                        crossing=_crossing_tag(wx, wy),
                    )
                )
    return TorusHexLattice(n, tuple(vertices), tuple(edges))


# ---------------------------------------------------------------------------
# Oriented dimer graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeTemplate:
    tail: str
    head: str
    disp: tuple[int, int]  # domain of head minus domain of tail
    kind: str  # 'v', 'ne', 'nw' (triangular) or 'a', 'b', 'c'
    part: str  # 'triangle', 'full', 'left', 'middle', 'right'

    @property
    def triangular(self) -> bool:
        return self.part == "triangle"


@dataclass(frozen=True)
class GraphEdge:
    id: int
    tail: int
    head: int
    p: int  # domain of the tail
    q: int
    disp: tuple[int, int]
    kind: str
    part: str
    weight: float
    crossing: str


def _fisher_positions() -> dict[str, np.ndarray]:
    w = WHITE_OFFSET
    r = _TRI_RADIUS
    return {
        "1": r * _B_DIR["a"],
        "2": r * _B_DIR["b"],
        "3": r * _B_DIR["c"],
        "4": w + r * _W_DIR["a"],
        "5": w + r * _W_DIR["b"],
        "6": w + r * _W_DIR["c"],
    }


FISHER_LABELS = ("1", "2", "3", "4", "5", "6")

# Orientation table for one fundamental domain of F_n.  Labels: 1, 2, 3 are
# the a-, b-, c-ends of the black triangle, 4, 5, 6 those of the white one.
FISHER_TEMPLATE = (
    EdgeTemplate("1", "3", (0, 0), "ne", "triangle"),
    EdgeTemplate("3", "2", (0, 0), "v", "triangle"),
    EdgeTemplate("2", "1", (0, 0), "nw", "triangle"),
    EdgeTemplate("4", "6", (0, 0), "ne", "triangle"),
    EdgeTemplate("6", "5", (0, 0), "v", "triangle"),
    EdgeTemplate("5", "4", (0, 0), "nw", "triangle"),
    EdgeTemplate("4", "1", (0, 0), "a", "full"),
    EdgeTemplate("5", "2", (1, 0), "b", "full"),
    EdgeTemplate("6", "3", (0, 1), "c", "full"),
)

AUG_LABELS = ("a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4", "c1", "c2", "c3", "c4")

# a1, b4, c4 are the black triangle; a4, b1, c1 the white one.  Each split
# non-triangular edge runs white -> black as right, middle, left thirds; the
# b- and c-middles are the only edges leaving the domain.
AUG_TEMPLATE = (
    EdgeTemplate("a1", "c4", (0, 0), "ne", "triangle"),
    EdgeTemplate("c4", "b4", (0, 0), "v", "triangle"),
    EdgeTemplate("b4", "a1", (0, 0), "nw", "triangle"),
    EdgeTemplate("a4", "c1", (0, 0), "ne", "triangle"),
    EdgeTemplate("c1", "b1", (0, 0), "v", "triangle"),
    EdgeTemplate("b1", "a4", (0, 0), "nw", "triangle"),
    EdgeTemplate("a4", "a3", (0, 0), "a", "right"),
    EdgeTemplate("a3", "a2", (0, 0), "a", "middle"),
    EdgeTemplate("a2", "a1", (0, 0), "a", "left"),
    EdgeTemplate("b1", "b2", (0, 0), "b", "right"),
    EdgeTemplate("b2", "b3", (1, 0), "b", "middle"),
    EdgeTemplate("b3", "b4", (0, 0), "b", "left"),
    EdgeTemplate("c1", "c2", (0, 0), "c", "right"),
    EdgeTemplate("c2", "c3", (0, 1), "c", "middle"),
    EdgeTemplate("c3", "c4", (0, 0), "c", "left"),
)


def _aug_positions() -> dict[str, np.ndarray]:
    w = WHITE_OFFSET
    r, s = _TRI_RADIUS, _SPLIT_NEAR
    pos = {
        "a1": r * _B_DIR["a"],
        "a2": s * _B_DIR["a"],
        "a3": w + s * _W_DIR["a"],
        "a4": w + r * _W_DIR["a"],
    }
    for kind in "bc":
        pos[f"{kind}1"] = w + r * _W_DIR[kind]
        pos[f"{kind}2"] = w + s * _W_DIR[kind]
        pos[f"{kind}3"] = s * _B_DIR[kind]
        pos[f"{kind}4"] = r * _B_DIR[kind]
    return pos


@dataclass(frozen=True)
class HomologyCycles:
    """Edges of a dimer graph crossed by the two seam cycles."""

    gamma_x: tuple[int, ...]
    gamma_y: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class _DimerGraph:
    base: object
    n: int
    labels: tuple[str, ...]
    positions: dict = field(repr=False)
    edges: tuple[GraphEdge, ...] = field(repr=False)

    @property
    def domain_size(self) -> int:
        return len(self.labels)

    @property
    def num_vertices(self) -> int:
        return self.domain_size * self.n * self.n

    def vertex_index(self, p: int, q: int, label: str) -> int:
        n = self.n
        return ((p % n) * n + q % n) * self.domain_size + self.labels.index(label)

    def vertex_label(self, idx: int) -> tuple[int, int, str]:
        dom, lab = divmod(idx, self.domain_size)
        p, q = divmod(dom, self.n)
        return p, q, self.labels[lab]

    def position(self, idx: int) -> np.ndarray:
        p, q, lab = self.vertex_label(idx)
        return self.positions[lab] + p * T_P + q * T_Q

    def edge_vector(self, e: GraphEdge) -> np.ndarray:
        """Geometric displacement tail -> head in the universal cover."""
        _, _, lt = self.vertex_label(e.tail)
        _, _, lh = self.vertex_label(e.head)
        return (self.positions[lh] + e.disp[0] * T_P + e.disp[1] * T_Q) - self.positions[lt]

    def degree(self) -> np.ndarray:
        deg = np.zeros(self.num_vertices, dtype=int)
        for e in self.edges:
            deg[e.tail] += 1
            deg[e.head] += 1
        return deg

    def homology(self) -> HomologyCycles:
        gx = tuple(e.id for e in self.edges if e.crossing.startswith("gx"))
        gy = tuple(e.id for e in self.edges if e.crossing.startswith("gy"))
        return HomologyCycles(gx, gy)

    def flipped(self, edge_id: int):
        """Copy with the orientation of one edge reversed (fault injection)."""
        edges = list(self.edges)
        e = edges[edge_id]
        dp, dq = e.disp
        hp, hq = (e.p + dp) % self.n, (e.q + dq) % self.n
        wx, wy = _crossing(hp, hq, -dp, -dq, self.n)
        edges[edge_id] = replace(
            e, tail=e.head, head=e.tail, p=hp, q=hq, disp=(-dp, -dq), crossing=_crossing_tag(wx, wy)
        )
        return replace(self, edges=tuple(edges))

    def to_text(self) -> str:
        lines = [
            f"{e.id} {e.tail} {e.head} {e.kind}:{e.part} {e.weight!r} tail->head {e.crossing}"
            for e in self.edges
        ]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class FisherGraph(_DimerGraph):
    """Fisher graph F_n; edge weights are attached at assembly time."""


@dataclass(frozen=True, eq=False)
class AugFisherGraph(_DimerGraph):
    """Augmented Fisher graph AF_n with its half-edge weights attached."""

    eps: HalfEdgeWeights = HalfEdgeWeights(1.0, 1.0, 1.0)


def _instantiate(n: int, labels: Sequence[str], template: Iterable[EdgeTemplate], weight_of) -> tuple[GraphEdge, ...]:
    size = len(labels)
    edges = []
    for p in range(n):
        for q in range(n):
            dom = (p * n + q) * size
            for t in template:
                dp, dq = t.disp
                hp, hq = (p + dp) % n, (q + dq) % n
                wx, wy = _crossing(p, q, dp, dq, n)
                edges.append(
                    GraphEdge(
                        id=len(edges),
                        tail=dom + labels.index(t.tail),
                        head=(hp * n + hq) * size + labels.index(t.head),
                        p=p,
                        q=q,
                        disp=(dp, dq),
                        kind=t.kind,
                        part=t.part,
                        weight=weight_of(t),
                        crossing=_crossing_tag(wx, wy),
                    )
                )
    return tuple(edges)


def build_fisher(lat: TorusHexLattice) -> FisherGraph:
    """Replace every vertex of ``lat`` by a Fisher triangle (``6n^2`` vertices)."""
    edges = _instantiate(lat.n, FISHER_LABELS, FISHER_TEMPLATE, lambda t: 1.0)
    return FisherGraph(lat, lat.n, FISHER_LABELS, _fisher_positions(), edges)


def _as_eps(eps) -> HalfEdgeWeights:
    if isinstance(eps, HalfEdgeWeights):
        return eps
    if isinstance(eps, PolygonParams):
        return eps.eps
    return HalfEdgeWeights(*eps)


def build_aug_fisher(fg: FisherGraph, eps) -> AugFisherGraph:
    """Split every non-triangular edge of ``fg`` into thirds.

    Left and right thirds carry ``1/eps_s``; middle thirds and triangle edges
    carry 1.
    """
    eps = _as_eps(eps)

    def weight(t: EdgeTemplate) -> float:
        if t.part in ("left", "right"):
            return 1.0 / eps.of(t.kind)
        return 1.0

    edges = _instantiate(fg.n, AUG_LABELS, AUG_TEMPLATE, weight)
    return AugFisherGraph(fg, fg.n, AUG_LABELS, _aug_positions(), edges, eps)


# ---------------------------------------------------------------------------
# Faces and the clockwise-odd audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Face:
    edges: tuple[int, ...]
    forward: tuple[bool, ...]  # traversal agrees with the edge orientation

    @property
    def clockwise_count(self) -> int:
        return sum(self.forward)


def faces(g: _DimerGraph) -> list[Face]:
    """All faces of the torus embedding of ``g``, each traversed clockwise."""
    m = len(g.edges)
    vec = np.array([g.edge_vector(e) for e in g.edges])
    origin = np.empty(2 * m, dtype=int)
    dvec = np.empty((2 * m, 2))
    for e in g.edges:
        origin[2 * e.id], origin[2 * e.id + 1] = e.tail, e.head
        dvec[2 * e.id], dvec[2 * e.id + 1] = vec[e.id], -vec[e.id]
    angle = np.arctan2(dvec[:, 1], dvec[:, 0])

    # half-edges around each vertex in counter-clockwise order
    around: dict[int, list[int]] = {}
    for h in np.lexsort((angle, origin)):
        around.setdefault(int(origin[h]), []).append(int(h))
    ccw_pos = {}
    for v, hs in around.items():
        for i, h in enumerate(hs):
            ccw_pos[h] = (v, i)

    def nxt(h: int) -> int:
        # keep the face on the right of h: counter-clockwise neighbour of twin(h)
        v, i = ccw_pos[h ^ 1]
        hs = around[v]
        return hs[(i + 1) % len(hs)]

    seen = np.zeros(2 * m, dtype=bool)
    out = []
    for h0 in range(2 * m):
        if seen[h0]:
            continue
        cycle = []
        h = h0
        while not seen[h]:
            seen[h] = True
            cycle.append(h)
            h = nxt(h)
        pts = np.cumsum(dvec[cycle], axis=0)
        x, y = pts[:, 0], pts[:, 1]
        area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        if area > 0:
            raise LatticeError("face tracing produced a counter-clockwise cycle")
        out.append(Face(tuple(h >> 1 for h in cycle), tuple(h % 2 == 0 for h in cycle)))
    return out


def verify_clockwise_odd(g: _DimerGraph) -> tuple[bool, list[Face]]:
    """Check that every face has an odd number of clockwise-oriented edges.

    Returns the verdict and the list of offending faces.
    """
    bad = [f for f in faces(g) if f.clockwise_count % 2 == 0]
    return not bad, bad


# ---------------------------------------------------------------------------
# Correlation path
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationPath:
    """Staircase path of horizontal and NW half-edges between two NW edges.

    ``half_edges`` lists ``(hex edge id, 'black'|'white')`` pairs from the
    midpoint of ``e`` to the midpoint of ``f``.  ``aug_edges`` lists the
    matching left/right thirds of the augmented Fisher graph as
    ``(tail, head, kind)`` vertex indices, and ``vertices`` their endpoints in
    the order ``b3 b4 a1 a2 a3 a4 b1 b2`` per domain along the path.
    """

    n: int
    e: int
    f: int
    periods: int
    half_edges: tuple[tuple[int, str], ...]
    aug_edges: tuple[tuple[int, int, str], ...]
    vertices: tuple[int, ...]
    domains: tuple[tuple[int, int], ...]

    @property
    def separation(self) -> float:
        """Euclidean distance between the midpoints of ``e`` and ``f``."""
        return self.periods * float(np.linalg.norm(T_P))

    def kinds(self) -> list[str]:
        return [k for _, _, k in self.aug_edges]


PATH_LABELS = ("b3", "b4", "a1", "a2", "a3", "a4", "b1", "b2")


def build_path(lat: TorusHexLattice, e: int, f: int) -> CorrelationPath:
    """Canonical path from NW edge ``e`` to NW edge ``f`` on the same diagonal.

    The path leaves ``e`` towards its black end, crosses the horizontal edge,
    and enters the next NW edge from its white end, repeating until ``f``.
    """
    if e == f:
        raise LatticeError("path endpoints must be distinct edges")
    ee, ff = lat.edges[e], lat.edges[f]
    if ee.kind is not EdgeKind.B or ff.kind is not EdgeKind.B:
        raise LatticeError("correlation edges must be NW (b-type) edges")
    if ee.q != ff.q:
        raise LatticeError("only NW edges on a common diagonal (equal q) are supported")
    n = lat.n
    k = (ff.p - ee.p) % n
    half: list[tuple[int, str]] = []
    aug: list[tuple[int, int, str]] = []
    verts: list[int] = []
    doms = []
    q = ee.q
    size = len(AUG_LABELS)
    for j in range(k):
        p = (ee.p + j) % n
        doms.append((p, q))
        half += [
            (lat.edge_id(p, q, "b"), "black"),
            (lat.edge_id(p, q, "a"), "black"),
            (lat.edge_id(p, q, "a"), "white"),
            (lat.edge_id(p + 1, q, "b"), "white"),
        ]
        idx = {lab: (p * n + q) * size + AUG_LABELS.index(lab) for lab in PATH_LABELS}
        aug += [
            (idx["b3"], idx["b4"], "b"),
            (idx["a2"], idx["a1"], "a"),
            (idx["a4"], idx["a3"], "a"),
            (idx["b1"], idx["b2"], "b"),
        ]
        verts += [idx[lab] for lab in PATH_LABELS]
    return CorrelationPath(n, e, f, k, tuple(half), tuple(aug), tuple(verts), tuple(doms))


def nw_pair(lat: TorusHexLattice, sep: int, p: int = 0, q: int = 0) -> tuple[int, int]:
    """Edge ids of two NW edges ``sep`` domains apart along the path direction."""
    if not 1 <= sep < lat.n:
        raise LatticeError(f"separation must lie in [1, {lat.n - 1}] for n={lat.n}")
    return lat.edge_id(p, q, "b"), lat.edge_id(p + sep, q, "b")
