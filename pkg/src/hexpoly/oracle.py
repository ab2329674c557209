"""Brute-force ground truth on small tori.

Everything here enumerates configurations directly and shares no code with
the Pfaffian route, so the two can be checked against each other.
"""

from __future__ import annotations

from collections import deque
from itertools import product

import numpy as np

from .lattice import CorrelationPath, FisherGraph, TorusHexLattice
from .params import HalfEdgeWeights, OneTwoParams, PolygonParams

MAX_POLYGON_N = 4  # 2**17 even subgraphs
MAX_DIMER_N = 2
MAX_SPIN_N = 2


class EnumerationTooLarge(ValueError):
    pass


def _require(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise EnumerationTooLarge(f"{what} enumeration supports n <= {limit}, got n={n}")


def _half_edge_weights(params) -> HalfEdgeWeights:
    if isinstance(params, HalfEdgeWeights):
        return params
    return params.eps


def is_even(lat: TorusHexLattice, bits) -> bool:
    deg = np.zeros(len(lat.vertices), dtype=int)
    for e, b in zip(lat.edges, bits):
        if b:
            deg[e.black] += 1
            deg[e.white] += 1
    return bool(np.all(deg % 2 == 0))


def cycle_space_basis(lat: TorusHexLattice) -> list[np.ndarray]:
    """Fundamental cycles of a BFS spanning tree, as 0/1 edge vectors."""
    nv, ne = len(lat.vertices), len(lat.edges)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    for e in lat.edges:
        adj[e.black].append((e.white, e.id))
        adj[e.white].append((e.black, e.id))
    parent_edge = [-1] * nv
    parent = [-1] * nv
    seen = [False] * nv
    seen[0] = True
    queue = deque([0])
    tree = set()
    while queue:
        u = queue.popleft()
        for v, eid in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v], parent_edge[v] = u, eid
                tree.add(eid)
                queue.append(v)

    def root_path(v: int) -> np.ndarray:
        bits = np.zeros(ne, dtype=np.uint8)
        while parent[v] != -1:
            bits[parent_edge[v]] ^= 1
            v = parent[v]
        return bits

    basis = []
    for e in lat.edges:
        if e.id in tree:
            continue
        bits = root_path(e.black) ^ root_path(e.white)
        bits[e.id] ^= 1
        basis.append(bits)
    return basis


def even_subgraphs(lat: TorusHexLattice) -> np.ndarray:
    """All even subgraphs of ``lat`` as rows of a 0/1 matrix."""
    _require(lat.n, MAX_POLYGON_N, "polygon")
    basis = np.array(cycle_space_basis(lat), dtype=np.int64)
    m = len(basis)
    coeffs = (np.arange(2**m)[:, None] >> np.arange(m)) & 1
    return ((coeffs @ basis) % 2).astype(np.uint8)


def _type_counts(lat: TorusHexLattice, configs: np.ndarray) -> np.ndarray:
    onehot = np.zeros((len(lat.edges), 3), dtype=np.int64)
    for e in lat.edges:
        onehot[e.id, "abc".index(e.kind.value)] = 1
    return configs.astype(np.int64) @ onehot


def brute_Z(lat: TorusHexLattice, params) -> float:
    """Sum over even subgraphs of ``alpha^|a| beta^|b| gamma^|c|``."""
    eps = _half_edge_weights(params)
    counts = _type_counts(lat, even_subgraphs(lat))
    sq = np.array([x * x for x in eps.as_tuple()])
    return float(np.sum(np.prod(sq[None, :] ** counts, axis=1)))


def _path_mask(lat: TorusHexLattice, path: CorrelationPath) -> np.ndarray:
    mask = np.zeros(2 * len(lat.edges), dtype=np.uint8)
    for eid, end in path.half_edges:
        mask[2 * eid + (0 if end == "black" else 1)] ^= 1
    return mask


def brute_Z_ef(lat: TorusHexLattice, path: CorrelationPath, params) -> float:
    """Defect partition function: even configs shifted by the path, half-edge weights."""
    return brute_Z_mask(lat, _path_mask(lat, path), params)


def brute_Z_mask(lat: TorusHexLattice, mask: np.ndarray, params) -> float:
    """Sum of half-edge weights of ``pi + mask`` over even ``pi``.

    ``mask`` has one bit per half-edge, index ``2 * edge_id + (0 black, 1 white)``.
    """
    eps = _half_edge_weights(params)
    configs = even_subgraphs(lat)
    halves = np.repeat(configs, 2, axis=1) ^ np.asarray(mask, dtype=np.uint8)[None, :]
    kinds = np.repeat(["abc".index(e.kind.value) for e in lat.edges], 2)
    onehot = np.eye(3, dtype=np.int64)[kinds]
    counts = halves.astype(np.int64) @ onehot
    base = np.array(eps.as_tuple())
    return float(np.sum(np.prod(base[None, :] ** counts, axis=1)))


def path_mask(lat: TorusHexLattice, path: CorrelationPath) -> np.ndarray:
    return _path_mask(lat, path)


def brute_M(lat: TorusHexLattice, path: CorrelationPath, params) -> float:
    """Order parameter ``Z_{e<->f} / Z`` with the denominator in half-edge form."""
    return brute_Z_ef(lat, path, params) / brute_Z(lat, params)


def perfect_matchings(fg: FisherGraph, removed=()) -> list[tuple[int, ...]]:
    """All perfect matchings of ``fg`` (edge-id tuples) by backtracking."""
    _require(fg.n, MAX_DIMER_N, "perfect-matching")
    nv = fg.num_vertices
    alive = np.ones(nv, dtype=bool)
    alive[list(removed)] = False
    if alive.sum() % 2:
        return []
    incident: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    for e in fg.edges:
        if e.tail != e.head:
            incident[e.tail].append((e.head, e.id))
            incident[e.head].append((e.tail, e.id))
    matched = ~alive
    out: list[tuple[int, ...]] = []
    chosen: list[int] = []

    def search():
        free = np.flatnonzero(~matched)
        if len(free) == 0:
            out.append(tuple(chosen))
            return
        u = free[0]
        matched[u] = True
        for v, eid in incident[u]:
            if not matched[v]:
                matched[v] = True
                chosen.append(eid)
                search()
                chosen.pop()
                matched[v] = False
        matched[u] = False

    search()
    return out


def brute_dimer_Z(fg: FisherGraph, A: float, B: float, C: float, removed=()) -> float:
    """Weighted perfect-matching count of the Fisher graph."""
    tri = {"v": A, "ne": B, "nw": C}
    weight = [tri.get(e.kind, 1.0) if e.part == "triangle" else 1.0 for e in fg.edges]
    return float(sum(np.prod([weight[i] for i in m]) for m in perfect_matchings(fg, removed)))


def brute_one_two_corr(lat: TorusHexLattice, a: float, b: float, c: float, e: int, f: int) -> float:
    """Two-edge spin correlation of the 1-2 model by summing all edge spins."""
    _require(lat.n, MAX_SPIN_N, "spin")
    A, B, C = OneTwoParams(a, b, c).dimer_weights()
    ne = len(lat.edges)
    spins = np.array(list(product((1, -1), repeat=ne)), dtype=np.int8)
    at = np.zeros((len(lat.vertices), 3), dtype=int)
    for edge in lat.edges:
        k = "abc".index(edge.kind.value)
        at[edge.black, k] = edge.id
        at[edge.white, k] = edge.id
    sa, sb, sc = (spins[:, at[:, k]].astype(float) for k in range(3))
    weight = np.prod(1 + A * sb * sc + B * sa * sc + C * sa * sb, axis=1)
    return float(np.sum(spins[:, e] * spins[:, f] * weight) / np.sum(weight))
