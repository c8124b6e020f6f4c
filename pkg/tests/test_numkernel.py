"""Tests for the tolerance policy and the dense linear algebra kernel."""

import numpy as np
import pytest

from crossed_z2.exceptions import NotHermitianError
from crossed_z2.numkernel import (
    TolerancePolicy,
    adjoint,
    herm_spectral,
    hs_inner,
    hs_orthonormalize,
    matrix_unit,
    nullspace,
    numerical_rank,
    random_hermitian,
    random_unitary,
    seeded_rng,
    span_intersection,
)


def test_tolerance_policy_threshold(tol):
    assert tol.is_zero(1e-11)
    assert not tol.is_zero(1e-9)
    assert tol.is_zero(1e-7, scale=100.0)
    assert tol.threshold(2.0) == pytest.approx(1e-10 + 2e-8)


@pytest.mark.parametrize("field", ["abs_tol", "rel_tol"])
def test_tolerance_policy_rejects_nonpositive(field):
    with pytest.raises(ValueError):
        TolerancePolicy(**{field: 0.0})


def test_tolerance_policy_from_settings(monkeypatch):
    monkeypatch.setenv("CROSSED_Z2_ABS_TOL", "1e-12")
    policy = TolerancePolicy.from_settings()
    assert policy.abs_tol == 1e-12
    assert policy.rel_tol == 1e-8


def test_adjoint_is_an_involution(rng):
    m = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    np.testing.assert_array_equal(adjoint(adjoint(m)), m)


def test_hs_orthonormalize_identity(tol):
    (basis,) = hs_orthonormalize([np.eye(2)], tol)
    np.testing.assert_allclose(basis, np.eye(2) / np.sqrt(2), atol=1e-12)


def test_hs_orthonormalize_drops_duplicates(tol):
    e11 = matrix_unit(2, 0, 0)
    basis = hs_orthonormalize([e11, e11], tol)
    assert len(basis) == 1
    np.testing.assert_allclose(basis[0], e11, atol=1e-12)


def test_hs_orthonormalize_keeps_matrix_units(tol):
    e11, e12 = matrix_unit(2, 0, 0), matrix_unit(2, 0, 1)
    basis = hs_orthonormalize([e11, e12], tol)
    np.testing.assert_allclose(basis, [e11, e12], atol=1e-12)


def test_hs_orthonormalize_empty(tol):
    assert hs_orthonormalize([], tol) == []


def test_hs_orthonormalize_gram_and_span(tol, rng):
    vectors = [rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(4)]
    vectors.append(vectors[0] + 2 * vectors[1])
    basis = hs_orthonormalize(vectors, tol)
    assert len(basis) == 4
    gram = np.array([[hs_inner(x, y) for y in basis] for x in basis])
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-10)
    for v in vectors:
        projected = sum(hs_inner(b, v) * b for b in basis)
        np.testing.assert_allclose(projected, v, atol=1e-9)


def test_nullspace_of_zero(tol):
    assert len(nullspace(np.zeros((2, 2)), tol)) == 2


def test_nullspace_of_identity(tol):
    assert nullspace(np.eye(2), tol) == []


def test_nullspace_of_rank_one(tol):
    m = np.array([[1.0, 1.0], [1.0, 1.0]])
    (v,) = nullspace(m, tol)
    assert v.shape == (2, 1)
    np.testing.assert_allclose(m @ v, 0, atol=1e-12)
    expected = np.array([1.0, -1.0]) / np.sqrt(2)
    assert abs(np.vdot(expected, v.ravel())) == pytest.approx(1.0)


def test_nullspace_residual_bound(tol, rng):
    m = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    sigma_max = np.linalg.norm(m, 2)
    for v in nullspace(m, tol):
        assert np.linalg.norm(m @ v) <= tol.threshold(sigma_max) * np.linalg.norm(v)


def test_herm_spectral_diagonal(tol):
    parts = herm_spectral(np.diag([1.0, -1.0]), tol)
    assert [p.eigenvalue for p in parts] == pytest.approx([1.0, -1.0])
    np.testing.assert_allclose(parts[0].projection, matrix_unit(2, 0, 0), atol=1e-12)
    np.testing.assert_allclose(parts[1].projection, matrix_unit(2, 1, 1), atol=1e-12)


def test_herm_spectral_identity(tol):
    (part,) = herm_spectral(np.eye(2), tol)
    assert part.eigenvalue == pytest.approx(1.0)
    np.testing.assert_allclose(part.projection, np.eye(2), atol=1e-12)


def test_herm_spectral_flip(tol):
    plus, minus = herm_spectral(np.array([[0.0, 1.0], [1.0, 0.0]]), tol)
    assert plus.eigenvalue == pytest.approx(1.0)
    assert minus.eigenvalue == pytest.approx(-1.0)
    np.testing.assert_allclose(plus.projection, np.array([[1, 1], [1, 1]]) / 2, atol=1e-12)
    np.testing.assert_allclose(minus.projection, np.array([[1, -1], [-1, 1]]) / 2, atol=1e-12)


def test_herm_spectral_rejects_non_hermitian(tol):
    with pytest.raises(NotHermitianError, match="not hermitian"):
        herm_spectral(np.array([[0.0, 1.0], [0.0, 0.0]]), tol)


def test_herm_spectral_reconstruction(tol, rng):
    h = random_hermitian(5, rng)
    parts = herm_spectral(h, tol)
    np.testing.assert_allclose(sum(p.eigenvalue * p.projection for p in parts), h, atol=1e-9)
    np.testing.assert_allclose(sum(p.projection for p in parts), np.eye(5), atol=1e-9)
    for i, p in enumerate(parts):
        for j, q in enumerate(parts):
            np.testing.assert_allclose(p.projection @ q.projection, p.projection if i == j else 0, atol=1e-9)


def test_herm_spectral_clusters_degenerate_eigenvalues(tol, rng):
    u = random_unitary(4, rng)
    h = u @ np.diag([2.0, 2.0, -1.0, -1.0]) @ adjoint(u)
    parts = herm_spectral(h, tol)
    assert len(parts) == 2
    assert [round(np.trace(p.projection).real) for p in parts] == [2, 2]


def test_random_unitary_is_unitary_and_seeded():
    u = random_unitary(4, seeded_rng(5))
    np.testing.assert_allclose(u @ adjoint(u), np.eye(4), atol=1e-12)
    np.testing.assert_array_equal(u, random_unitary(4, seeded_rng(5)))


def test_numerical_rank_ignores_tiny_singular_values(tol):
    m = np.diag([1.0, 1e-14, 0.0])
    assert numerical_rank(m, tol) == 1


def test_span_intersection(tol):
    a = np.array([[1, 0, 0], [0, 1, 0]], dtype=complex)
    b = np.array([[0, 1, 0], [0, 0, 1]], dtype=complex)
    (row,) = span_intersection(a, b, tol)
    assert abs(row[1]) == pytest.approx(1.0)
