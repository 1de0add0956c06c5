import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dofsim.matkit import (
    LinAlgError,
    complex_normal,
    eig_hermitian,
    hermitian,
    logdet_posdef,
    null_space_basis,
    orth_complement,
    range_basis,
)

seeds = st.integers(0, 2**32 - 1)


def rand_hermitian_pd(rng, n, shift=1.0):
    a = complex_normal(rng, (n, n))
    return a @ hermitian(a) + shift * np.eye(n)


def test_complex_normal_moments():
    z = complex_normal(np.random.default_rng(0), (200_000,), 3.0)
    assert abs(np.mean(np.abs(z) ** 2) - 3.0) < 0.03
    assert abs(np.var(z.real) - 1.5) < 0.03
    assert abs(np.mean(z.real * z.imag)) < 0.02


def test_orth_complement_examples():
    np.testing.assert_allclose(orth_complement([1, 0]), [0, 1], atol=1e-15)
    w = orth_complement(np.array([1, 1]) / np.sqrt(2))
    np.testing.assert_allclose(w, np.array([1, -1]) / np.sqrt(2), atol=1e-15)


def test_orth_complement_rejects_zero():
    with pytest.raises(LinAlgError, match="degenerate"):
        orth_complement([0, 0])


@given(seeds, st.floats(1e-6, 1e6))
def test_orth_complement_is_unit_and_orthogonal(seed, scale):
    v = scale * complex_normal(np.random.default_rng(seed), (5, 2))
    w = orth_complement(v)
    np.testing.assert_allclose(np.linalg.norm(w, axis=-1), 1.0, rtol=1e-12)
    inner = np.abs(np.sum(np.conj(v) * w, axis=-1)) / np.linalg.norm(v, axis=-1)
    assert np.all(inner < 1e-12)


def test_null_space_examples():
    q = null_space_basis(np.array([[1.0, 0.0]]), 1)
    np.testing.assert_allclose(q[:, 0], [0, 1], atol=1e-15)
    with pytest.raises(LinAlgError):
        null_space_basis(np.eye(2), 1)


@given(seeds, st.integers(1, 3), st.integers(0, 3))
def test_null_and_range_bases(seed, n, extra):
    m = 2 * n + extra
    a = complex_normal(np.random.default_rng(seed), (n, m))
    q = range_basis(a)
    qp = null_space_basis(a, m - n)
    np.testing.assert_allclose(hermitian(q) @ q, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(hermitian(qp) @ qp, np.eye(m - n), atol=1e-12)
    assert np.linalg.norm(a @ qp) < 1e-12 * np.linalg.norm(a)
    np.testing.assert_allclose(hermitian(q) @ qp, 0, atol=1e-12)
    # A Q is invertible: its smallest singular value equals A's
    sv = np.linalg.svd(a @ q, compute_uv=False)
    np.testing.assert_allclose(np.sort(sv), np.sort(np.linalg.svd(a, compute_uv=False)), rtol=1e-10)


def test_range_basis_rank_deficient():
    with pytest.raises(LinAlgError):
        range_basis(np.array([[1, 1, 0, 0], [2, 2, 0, 0]], dtype=complex))


def test_bases_work_on_stacks():
    a = complex_normal(np.random.default_rng(3), (7, 2, 4))
    q = null_space_basis(a, 2)
    assert q.shape == (7, 4, 2)
    assert np.max(np.abs(a @ q)) < 1e-12


@given(seeds, st.integers(1, 6))
def test_logdet_matches_slogdet(seed, n):
    a = rand_hermitian_pd(np.random.default_rng(seed), n)
    sign, ref = np.linalg.slogdet(a)
    assert sign.real > 0
    assert logdet_posdef(a) == pytest.approx(ref, rel=1e-12, abs=1e-12)
    assert logdet_posdef(a, bits=True) == pytest.approx(ref / np.log(2), rel=1e-12, abs=1e-12)


def test_logdet_errors():
    with pytest.raises(LinAlgError, match="positive definite"):
        logdet_posdef(np.diag([1.0, -1.0]))
    with pytest.raises(LinAlgError, match="Hermitian"):
        logdet_posdef(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_logdet_identity_is_zero():
    assert logdet_posdef(np.eye(4)) == 0.0


@given(seeds, st.integers(2, 8))
def test_eig_hermitian_matches_numpy(seed, n):
    rng = np.random.default_rng(seed)
    a = complex_normal(rng, (n, n))
    a = a + hermitian(a)
    w = eig_hermitian(a)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-10 * np.abs(w).max())
    w2, v = eig_hermitian(a, vectors=True)
    np.testing.assert_allclose(w2, w, atol=1e-10 * np.abs(w).max())
    np.testing.assert_allclose(a @ v, v * w2, atol=1e-9 * np.abs(w).max())
    np.testing.assert_allclose(hermitian(v) @ v, np.eye(n), atol=1e-10)


def test_eig_hermitian_examples():
    np.testing.assert_allclose(eig_hermitian(np.diag([1.0, 3.0, 2.0])), [3, 2, 1])
    np.testing.assert_allclose(eig_hermitian(np.array([[2, 1j], [-1j, 2]])), [3, 1])
    with pytest.raises(LinAlgError):
        eig_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))
