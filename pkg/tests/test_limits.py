import numpy as np
import pytest

from hexpoly import limits
from hexpoly.kasteleyn import SECTORS, assemble_Kn, correlation_sweep
from hexpoly.lattice import AUG_LABELS, build_aug_fisher, build_fisher, build_hex_torus
from hexpoly.limits import (
    CriticalParameters,
    FourierKinvTable,
    build_X,
    fourier_kinv,
    lambda_estimate,
    m_inf_squared,
    toeplitz_determinant,
    toeplitz_symbol,
    torus_rule,
)
from hexpoly.params import PolygonParams
from hexpoly.skewlinalg import inverse_complex

P0 = PolygonParams(0.7, 1.3, 0.9)
C3 = 3**-0.5


@pytest.fixture(scope="module")
def table():
    return FourierKinvTable.build(P0, 256, dqs=(0, 1, -1))


@pytest.mark.parametrize("kind", ["uniform", "graded", "de"])
def test_rules_integrate_trig_polys(kind):
    r = torus_rule(128, kind, center=np.pi / 3)
    assert r.weights.sum() == pytest.approx(1, abs=1e-13)
    for m in (1, 2, 5):
        assert abs(np.sum(r.weights * r.nodes**m)) < 1e-10


def test_rule_validation():
    with pytest.raises(ValueError):
        torus_rule(100)
    with pytest.raises(ValueError):
        torus_rule(64, "simpson")


def test_build_X_unit_eps():
    pert = build_X(3, PolygonParams(1, 1, 2.5))
    assert pert.X.shape == (24, 24)
    assert not pert.X.any()
    assert pert.det_X == 0


def test_build_X_blocks():
    pert = build_X(1, (2.0, 3.0, 1.0))
    assert pert.lambda_a == 1.5 and pert.lambda_b == pytest.approx(8 / 3)
    vals = {kind: v for kind, v in pert.blocks()}
    assert vals["a"] == pytest.approx(3 / 2) and vals["b"] == pytest.approx(-8 / 3)
    assert pert.det_X == pytest.approx((3 / 2) ** 4 * (8 / 3) ** 4)
    assert np.linalg.det(pert.X) == pytest.approx(pert.det_X, rel=1e-12)
    assert np.array_equal(pert.X, -pert.X.T)


def test_build_X_from_polygon_weights():
    pert = build_X(2, PolygonParams(4.0, 9.0, 1.0))
    assert pert.det_X == pytest.approx(((3 / 2) ** 4 * (8 / 3) ** 4) ** 2)
    with pytest.raises(ValueError):
        build_X(0, (2.0, 3.0, 1.0))


def test_fourier_kinv_two_routes(table):
    for dp, dq, vs, vr in [(0, 0, "a1", "b2"), (-2, 1, "b3", "b3"), (3, -1, "a4", "a1")]:
        direct = fourier_kinv(P0, dp, dq, vs, vr, grid=256)
        assert table[dp, dq, vs, vr] == pytest.approx(direct, abs=1e-13)
        # antisymmetry of K^{-1} relates the two index orders
        i, j = AUG_LABELS.index(vr), AUG_LABELS.index(vs)
        assert table.block(dp, dq)[i, j] == pytest.approx(direct, abs=1e-13)


def test_fourier_kinv_approximates_finite_inverse():
    lat_p = PolygonParams(0.7, 1.3, 0.9)
    keys = [(0, 0, "a1", "b2"), (1, 0, "a2", "a3"), (2, 1, "b1", "c2")]
    limit = {k: fourier_kinv(lat_p, *k) for k in keys}
    errs = {}
    for n in (4, 8, 16):
        af = build_aug_fisher(build_fisher(build_hex_torus(n)), lat_p)
        x = n // 2 - 1
        # the largest torus only gets the two diagonal sectors, to save time
        for sector in SECTORS if n < 16 else SECTORS[::3]:
            inv = inverse_complex(assemble_Kn(af, z=sector[0], w=sector[1]).matrix)
            for dp, dq, vs, vr in keys:
                i = af.vertex_index(x, x, vr)
                j = af.vertex_index(x + dp, x + dq, vs)
                err = abs(inv[i, j] - limit[dp, dq, vs, vr])
                errs[n] = max(errs.get(n, 0.0), err)
    assert errs[16] < errs[8] < errs[4]
    assert errs[16] < 1e-8


def test_unit_eps_limit_is_one():
    assert m_inf_squared(PolygonParams(1, 1, 0.6), 3) == pytest.approx(1, abs=1e-12)


def test_m_inf_from_path_object():
    from hexpoly.lattice import build_path, nw_pair

    lat = build_hex_torus(8)
    path = build_path(lat, *nw_pair(lat, 2))
    assert m_inf_squared(P0, path) == pytest.approx(m_inf_squared(P0, 2), rel=1e-12)


def test_finite_n_approaches_limit(table):
    target = limits._m2_from(table, 1)
    gaps = [abs(correlation_sweep(n, P0, [1])[0].squared - target) for n in (4, 8, 16)]
    assert gaps[2] < gaps[1] < gaps[0]
    assert gaps[2] < 1e-6


@pytest.mark.parametrize("p", [PolygonParams(0.3, 0.5, 0.4), PolygonParams(2.0, 0.7, 1.1), P0])
def test_m_inf_nonnegative(p):
    tab = FourierKinvTable.build(p, 128)
    for k in (1, 3, 6):
        assert limits._m2_from(tab, k) >= -1e-12


def test_subcritical_decay():
    est = lambda_estimate(PolygonParams(0.2, 0.2, 0.2))
    m2 = [row[1] for row in est.table]
    assert all(b < a for a, b in zip(m2, m2[1:]))
    assert est.converged and abs(est.value) < 1e-8
    assert est.phase == "subcritical_R1"


def test_supercritical_plateau():
    est = lambda_estimate(PolygonParams(3 / 7, 3 / 7, 25 / 21))
    assert est.converged and est.value > 0.5
    assert est.table[-1][2] < 1e-6


def test_lambda_symmetry():
    a = lambda_estimate(P0).value
    b = lambda_estimate(PolygonParams(0.7, 1 / 1.3, 1 / 0.9)).value
    c = lambda_estimate(PolygonParams(1 / 0.7, 1.3, 1 / 0.9)).value
    assert a > 0.9
    assert b == pytest.approx(a, abs=1e-6) and c == pytest.approx(a, abs=1e-6)


def test_grid_doubling_stable():
    lo = FourierKinvTable.build(P0, 256).blocks(range(-4, 5))
    hi = FourierKinvTable.build(P0, 512).blocks(range(-4, 5))
    assert np.max(np.abs(hi - lo)) < 1e-10


def test_critical_refused():
    with pytest.raises(CriticalParameters):
        fourier_kinv(PolygonParams(C3, C3, C3), 0, 0, "a1", "a2")
    with pytest.raises(CriticalParameters):
        lambda_estimate(PolygonParams(C3, C3, C3))
    with pytest.raises(CriticalParameters):
        toeplitz_symbol(PolygonParams(C3, C3, C3), 1.0)


def test_toeplitz_symbol_unit_eps():
    psi = toeplitz_symbol(PolygonParams(1, 1, 0.6), np.exp(1j * np.linspace(0, 6, 5)))
    assert psi.shape == (5, 8, 8)
    assert np.allclose(psi, np.eye(8), atol=1e-15)


def test_toeplitz_symbol_grid_stable():
    z = np.exp(1j * np.array([0.1, 1.7, 3.0]))
    a = toeplitz_symbol(P0, z, 256)
    b = toeplitz_symbol(P0, z, 512)
    assert np.max(np.abs(a - b)) < 1e-10
    with pytest.raises(ValueError):
        toeplitz_symbol(P0, 0.5)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_toeplitz_determinant_matches_limit(table, k):
    assert toeplitz_determinant(P0, k) == pytest.approx(limits._m2_from(table, k), rel=1e-10)
