import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexpoly.skewlinalg import (
    SingularMatrixError,
    SkewMatrixError,
    det_complex,
    inverse_complex,
    pfaffian,
    slog_pfaffian,
)


def _skew(rng, d):
    a = rng.standard_normal((d, d))
    return a - a.T


def test_2x2():
    assert pfaffian([[0, 5], [-5, 0]]) == pytest.approx(5, rel=1e-15)


def test_4x4_expansion():
    rng = np.random.default_rng(0)
    m = _skew(rng, 4)
    expected = m[0, 1] * m[2, 3] - m[0, 2] * m[1, 3] + m[0, 3] * m[1, 2]
    assert pfaffian(m) == pytest.approx(expected, rel=1e-13)


def test_pf_squared_is_det():
    rng = np.random.default_rng(1)
    for _ in range(100):
        m = _skew(rng, 2 * int(rng.integers(1, 31)))
        s, l = slog_pfaffian(m)
        ds, dl = np.linalg.slogdet(m)
        assert ds > 0
        assert abs(np.expm1(2 * l - dl)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_permutation_covariance(half, seed):
    rng = np.random.default_rng(seed)
    d = 2 * half
    m = _skew(rng, d)
    perm = rng.permutation(d)
    p = np.eye(d)[perm]
    sign = np.linalg.det(p)
    assert pfaffian(p @ m @ p.T) == pytest.approx(sign * pfaffian(m), rel=1e-9, abs=1e-12)


def test_zero_pivot_gives_zero():
    assert pfaffian(np.zeros((4, 4))) == 0.0
    assert slog_pfaffian(np.zeros((2, 2))) == (0.0, -np.inf)


def test_sparse_banded_matches_dense_reference():
    rng = np.random.default_rng(3)
    d = 40
    m = np.triu(rng.standard_normal((d, d)), 1) * (np.abs(np.subtract.outer(range(d), range(d))) <= 3)
    m = m - m.T
    assert pfaffian(m) ** 2 == pytest.approx(np.linalg.det(m), rel=1e-10)


def test_errors():
    with pytest.raises(SkewMatrixError):
        pfaffian(np.zeros((3, 3)))
    with pytest.raises(SkewMatrixError):
        pfaffian(np.ones((2, 2)))
    with pytest.raises(SkewMatrixError):
        pfaffian(np.zeros((2, 3)))


def test_det_examples():
    assert det_complex(np.eye(5)) == 1
    assert det_complex(np.diag([2, 3j])) == pytest.approx(6j)
    assert det_complex(np.zeros((3, 3))) == 0


def test_det_inverse_agree():
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
        if np.linalg.cond(m) > 1e6:
            continue
        assert det_complex(m) * det_complex(inverse_complex(m)) == pytest.approx(1, rel=1e-10)


def test_inverse_examples():
    assert np.allclose(inverse_complex(np.eye(3)), np.eye(3))
    c = 2.5
    inv = inverse_complex([[0, -c], [c, 0]])
    assert np.allclose(inv, [[0, 1 / c], [-1 / c, 0]])


def test_inverse_residual_unit_phases():
    rng = np.random.default_rng(5)
    for _ in range(20):
        m = np.exp(2j * np.pi * rng.random((12, 12)))
        assert np.max(np.abs(m @ inverse_complex(m) - np.eye(12))) <= 1e-9


def test_singular_rejected():
    with pytest.raises(SingularMatrixError):
        inverse_complex(np.ones((3, 3)))
