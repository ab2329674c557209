import numpy as np
import pytest

from hexpoly.lattice import (
    AUG_LABELS,
    EdgeKind,
    LatticeError,
    build_aug_fisher,
    build_fisher,
    build_hex_torus,
    build_path,
    faces,
    nw_pair,
    verify_clockwise_odd,
)
from hexpoly.params import HalfEdgeWeights


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_counts(n):
    lat = build_hex_torus(n)
    fg = build_fisher(lat)
    af = build_aug_fisher(fg, (1.0, 1.0, 1.0))
    assert len(lat.vertices) == 2 * n * n
    assert len(lat.edges) == 3 * n * n
    assert fg.num_vertices == 6 * n * n
    assert af.num_vertices == 12 * n * n
    assert len(fg.edges) == 9 * n * n
    assert len(af.edges) == 15 * n * n


def test_smallest_torus():
    lat = build_hex_torus(1)
    assert len(lat.vertices) == 2 and len(lat.edges) == 3
    assert {e.kind for e in lat.edges} == set(EdgeKind)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hex_lattice_regular_bipartite(n):
    lat = build_hex_torus(n)
    assert np.all(lat.degree() == 3)
    for e in lat.edges:
        assert lat.vertices[e.black].color == "black"
        assert lat.vertices[e.white].color == "white"
    for v in range(len(lat.vertices)):
        kinds = sorted(e.kind.value for e in lat.edges if v in (e.black, e.white))
        assert kinds == ["a", "b", "c"]


def test_n4_is_diamond_on_torus():
    # every translate by a domain step is an automorphism
    lat = build_hex_torus(4)
    for e in lat.edges:
        shifted = lat.edge(e.p + 1, e.q + 3, e.kind)
        assert shifted.kind is e.kind
        assert lat.vertices[shifted.black].p == (e.p + 1) % 4


def test_zero_side_rejected():
    with pytest.raises(LatticeError):
        build_hex_torus(0)


def test_indexing_deterministic():
    a, b = build_hex_torus(3), build_hex_torus(3)
    assert a.to_text() == b.to_text()
    fa, fb = build_fisher(a), build_fisher(b)
    assert fa.to_text() == fb.to_text()
    assert a.edge_id(1, 2, "b") == 3 * (1 * 3 + 2) + 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fisher_degrees_and_orientation(n):
    fg = build_fisher(build_hex_torus(n))
    assert np.all(fg.degree() == 3)
    ok, bad = verify_clockwise_odd(fg)
    assert ok and bad == []


@pytest.mark.parametrize("n", [1, 2, 3])
def test_aug_fisher_orientation(n):
    af = build_aug_fisher(build_fisher(build_hex_torus(n)), (0.5, 2.0, 1.3))
    ok, bad = verify_clockwise_odd(af)
    assert ok
    assert sorted(set(af.degree())) == [2, 3]
    sizes = sorted({len(f.edges) for f in faces(af)})
    assert sizes == [3, 24]


def test_flipped_edge_detected():
    fg = build_fisher(build_hex_torus(2))
    ok, bad = verify_clockwise_odd(fg.flipped(4))
    assert not ok
    assert all(4 in f.edges for f in bad)
    assert 1 <= len(bad) <= 2


def test_aug_weights():
    lat = build_hex_torus(2)
    unit = build_aug_fisher(build_fisher(lat), HalfEdgeWeights(1.0, 1.0, 1.0))
    assert all(e.weight == 1.0 for e in unit.edges)
    af = build_aug_fisher(build_fisher(lat), HalfEdgeWeights(1.0, 2.0, 1.0))
    for e in af.edges:
        if e.kind == "b" and e.part in ("left", "right"):
            assert e.weight == 0.5
        else:
            assert e.weight == 1.0


def test_aug_zero_eps_rejected():
    with pytest.raises(ValueError):
        build_aug_fisher(build_fisher(build_hex_torus(1)), (0.0, 1.0, 1.0))


def test_aug_labels_order():
    af = build_aug_fisher(build_fisher(build_hex_torus(1)), (1.0, 1.0, 1.0))
    assert af.labels == AUG_LABELS
    assert [af.vertex_label(i)[2] for i in range(12)] == list(AUG_LABELS)


def test_homology_cycles_disjoint():
    af = build_aug_fisher(build_fisher(build_hex_torus(3)), (1.0, 1.0, 1.0))
    h = af.homology()
    assert h.gamma_x and h.gamma_y
    assert not set(h.gamma_x) & set(h.gamma_y)
    # one crossing per column or row of domains, through middle thirds only
    assert len(h.gamma_x) == 3 and len(h.gamma_y) == 3
    assert all(af.edges[i].part == "middle" for i in h.gamma_x + h.gamma_y)


def test_adjacent_path_one_period():
    lat = build_hex_torus(3)
    e, f = nw_pair(lat, 1)
    path = build_path(lat, e, f)
    assert len(path.half_edges) == 4
    assert path.separation == pytest.approx(np.sqrt(3))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_path_structure(k):
    lat = build_hex_torus(6)
    af = build_aug_fisher(build_fisher(lat), (1.0, 1.0, 1.0))
    e, f = nw_pair(lat, k, p=2, q=4)
    path = build_path(lat, e, f)
    assert len(path.half_edges) == 4 * k
    kinds = [lat.edges[i].kind for i, _ in path.half_edges]
    assert EdgeKind.C not in kinds
    # NW, horizontal, horizontal, NW per period
    assert kinds[:4] == [EdgeKind.B, EdgeKind.A, EdgeKind.A, EdgeKind.B]
    lookup = {(g.tail, g.head): g for g in af.edges}
    for tail, head, kind in path.aug_edges:
        g = lookup[(tail, head)]
        assert g.crossing == "none"
        assert g.part in ("left", "right")
        assert g.kind == kind
    # consecutive half-edges share an endpoint of the hex lattice
    ends = [lat.edges[i].black if side == "black" else lat.edges[i].white for i, side in path.half_edges]
    for j in range(0, len(ends) - 1, 2):
        assert ends[j] == ends[j + 1]


def test_path_errors():
    lat = build_hex_torus(3)
    e = lat.edge_id(0, 0, "b")
    with pytest.raises(LatticeError):
        build_path(lat, e, e)
    with pytest.raises(LatticeError):
        build_path(lat, e, lat.edge_id(1, 0, "a"))
    with pytest.raises(LatticeError):
        build_path(lat, e, lat.edge_id(1, 1, "b"))


def test_text_export_format():
    af = build_aug_fisher(build_fisher(build_hex_torus(1)), (1.0, 2.0, 1.0))
    lines = af.to_text().splitlines()
    assert len(lines) == 15
    assert lines[0].split()[5] == "tail->head"
