"""Dense complex linear algebra with a single tolerance policy.

Every approximate comparison in the package goes through
``TolerancePolicy.is_zero``: a value ``x`` is numerically zero relative to a
scale ``s`` iff ``|x| <= abs_tol + rel_tol * s``.
"""

import logging
from typing import NamedTuple, TypeAlias

import numpy as np
import scipy.linalg as la
from pydantic import BaseModel, ConfigDict, Field, validate_call
from scipy.stats import unitary_group

from crossed_z2.config import get_settings
from crossed_z2.constants import DEFAULT_ABS_TOL, DEFAULT_REL_TOL
from crossed_z2.exceptions import InvalidInputError, NotHermitianError

logger = logging.getLogger(__name__)

CMatrix: TypeAlias = np.ndarray


class TolerancePolicy(BaseModel):
    """Absolute and relative tolerance shared by all numeric checks."""

    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default=DEFAULT_ABS_TOL, gt=0)
    rel_tol: float = Field(default=DEFAULT_REL_TOL, gt=0)

    @classmethod
    def from_settings(cls) -> "TolerancePolicy":
        """Policy built from the environment-aware settings."""
        settings = get_settings()
        return cls(abs_tol=settings.abs_tol, rel_tol=settings.rel_tol)

    def threshold(self, scale: float = 0.0) -> float:
        """Largest magnitude still considered zero at the given scale."""
        return self.abs_tol + self.rel_tol * abs(scale)

    def is_zero(self, value: float, scale: float = 0.0) -> bool:
        """Whether ``|value|`` is numerically zero relative to ``scale``."""
        return bool(abs(value) <= self.threshold(scale))


def resolve_tolerance(tol: TolerancePolicy | None) -> TolerancePolicy:
    """Return ``tol`` or the settings-derived default."""
    return tol if tol is not None else TolerancePolicy.from_settings()


class SpectralComponent(NamedTuple):
    """One eigenvalue cluster of a self-adjoint matrix."""

    eigenvalue: float
    projection: CMatrix


def as_cmatrix(matrix: np.ndarray | list) -> CMatrix:
    """Coerce to a 2-D complex128 array."""
    values = np.asarray(matrix, dtype=np.complex128)
    if values.ndim != 2:
        raise InvalidInputError(f"Expected a 2-D matrix, got shape {values.shape}")
    return values


def adjoint(matrix: CMatrix) -> CMatrix:
    """Conjugate transpose."""
    return np.conj(matrix).T


def hs_inner(x: CMatrix, y: CMatrix) -> complex:
    """Hilbert-Schmidt inner product ``trace(x* y)``."""
    return complex(np.vdot(x, y))


def hs_norm(x: CMatrix) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(x))


def matrix_unit(size: int, i: int, j: int) -> CMatrix:
    """Matrix unit ``E_ij`` of the given size."""
    unit = np.zeros((size, size), dtype=np.complex128)
    unit[i, j] = 1.0
    return unit


def orthonormal_rows(rows: np.ndarray, tol: TolerancePolicy) -> np.ndarray:
    """Orthonormalize the rows of a 2-D array, dropping dependent rows.

    Modified Gram-Schmidt with one re-orthogonalization pass. A row is dropped
    when what survives projection is zero relative to the row's own norm.

    Args:
        rows: Array of shape ``(n, m)``.
        tol: Tolerance policy.

    Returns:
        Array of shape ``(r, m)`` with orthonormal rows, ``r <= n``.
    """
    rows = np.asarray(rows, dtype=np.complex128)
    width = rows.shape[1]
    basis = np.empty((0, width), dtype=np.complex128)
    for row in rows:
        scale = np.linalg.norm(row)
        residual = row.copy()
        for _ in range(2):
            residual -= basis.T @ (basis.conj() @ residual)
        norm = np.linalg.norm(residual)
        if tol.is_zero(norm, scale):
            continue
        basis = np.vstack([basis, residual / norm])
    return basis


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def hs_orthonormalize(
    vectors: list[np.ndarray], tol: TolerancePolicy | None = None
) -> list[CMatrix]:
    """Hilbert-Schmidt orthonormal basis of the span of equally shaped matrices.

    Args:
        vectors: Matrices of one common shape.
        tol: Tolerance policy, defaults to the configured one.

    Returns:
        Orthonormal matrices spanning the same space; empty for empty input.

    Raises:
        InvalidInputError: If the shapes differ.
    """
    if not vectors:
        return []
    shape = np.shape(vectors[0])
    if any(np.shape(v) != shape for v in vectors):
        raise InvalidInputError("hs_orthonormalize needs matrices of a common shape")
    flat = np.stack([np.asarray(v, dtype=np.complex128).ravel() for v in vectors])
    return list(orthonormal_rows(flat, resolve_tolerance(tol)).reshape(-1, *shape))


def singular_values(matrix: np.ndarray, *, full: bool = False) -> tuple:
    """SVD through scipy, falling back to the slower driver on failure."""
    try:
        return la.svd(matrix, full_matrices=full, check_finite=False)
    except np.linalg.LinAlgError:
        logger.debug("gesdd failed on %s matrix, retrying with gesvd", matrix.shape)
        return la.svd(
            matrix, full_matrices=full, check_finite=False, lapack_driver="gesvd"
        )


def _rank_from_singular_values(values: np.ndarray, tol: TolerancePolicy) -> int:
    if values.size == 0:
        return 0
    largest = float(values[0])
    return sum(1 for s in values if not tol.is_zero(float(s), largest))


def nullspace_rows(matrix: np.ndarray, tol: TolerancePolicy) -> np.ndarray:
    """Orthonormal null vectors of ``matrix``, one per row."""
    rows, cols = matrix.shape
    if rows == 0 or cols == 0:
        return np.eye(cols, dtype=np.complex128)
    _, values, vh = singular_values(matrix, full=rows < cols)
    rank = _rank_from_singular_values(values, tol)
    return np.conj(vh[rank:])


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def nullspace(matrix: np.ndarray, tol: TolerancePolicy | None = None) -> list[CMatrix]:
    """Orthonormal basis of the numerical null space, as column vectors.

    The rank is the number of singular values that are not zero relative to
    the largest singular value.

    Args:
        matrix: Any 2-D array.
        tol: Tolerance policy, defaults to the configured one.

    Returns:
        Column vectors of shape ``(cols, 1)``.
    """
    null = nullspace_rows(as_cmatrix(matrix), resolve_tolerance(tol))
    return [row.reshape(-1, 1) for row in null]


def numerical_rank(matrix: np.ndarray, tol: TolerancePolicy) -> int:
    """Rank decided against the largest singular value."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.size == 0:
        return 0
    return _rank_from_singular_values(singular_values(matrix)[1], tol)


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def herm_spectral(
    matrix: np.ndarray, tol: TolerancePolicy | None = None
) -> list[SpectralComponent]:
    """Spectral decomposition of a self-adjoint matrix with clustered eigenvalues.

    Sorted eigenvalues are merged greedily while the gap to the previous one is
    zero relative to the spectral norm.

    Args:
        matrix: Numerically self-adjoint square matrix.
        tol: Tolerance policy, defaults to the configured one.

    Returns:
        ``(eigenvalue, projection)`` pairs by descending eigenvalue. The
        eigenvalue of a cluster is the mean of its members.

    Raises:
        NotHermitianError: If ``matrix`` is not self-adjoint within tolerance.
    """
    tol = resolve_tolerance(tol)
    matrix = as_cmatrix(matrix)
    if matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(f"herm_spectral needs a square matrix, got {matrix.shape}")
    if not tol.is_zero(hs_norm(matrix - adjoint(matrix)), hs_norm(matrix)):
        raise NotHermitianError
    values, vectors = la.eigh((matrix + adjoint(matrix)) / 2, check_finite=False)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    clusters: list[list[int]] = []
    for i, value in enumerate(values):
        if clusters and tol.is_zero(value - values[clusters[-1][-1]], scale):
            clusters[-1].append(i)
        else:
            clusters.append([i])
    components = [
        SpectralComponent(
            float(np.mean(values[idx])),
            vectors[:, idx] @ adjoint(vectors[:, idx]),
        )
        for idx in clusters
    ]
    return sorted(components, key=lambda c: -c.eigenvalue)


def range_basis(projection: CMatrix) -> CMatrix:
    """Orthonormal columns spanning the range of an orthogonal projection."""
    values, vectors = la.eigh((projection + adjoint(projection)) / 2)
    return vectors[:, values > 0.5]


def polar_unitary(matrix: CMatrix) -> CMatrix:
    """Unitary factor ``u`` of the polar decomposition ``matrix = u p``."""
    u, _ = la.polar(matrix, side="right")
    return u


def is_scalar(matrix: CMatrix, tol: TolerancePolicy) -> bool:
    """Whether a square matrix is a multiple of the identity."""
    size = matrix.shape[0]
    mean = np.trace(matrix) / size
    return tol.is_zero(hs_norm(matrix - mean * np.eye(size)), hs_norm(matrix))


def span_intersection(
    rows_a: np.ndarray, rows_b: np.ndarray, tol: TolerancePolicy
) -> np.ndarray:
    """Orthonormal rows spanning the intersection of two row spans.

    Null vectors ``(c, d)`` of ``[A^T | -B^T]`` give the common elements
    ``c^T A``.
    """
    if rows_a.shape[0] == 0 or rows_b.shape[0] == 0:
        return np.empty((0, rows_a.shape[1]), dtype=np.complex128)
    system = np.hstack([rows_a.T, -rows_b.T])
    null = nullspace_rows(system, tol)
    common = null[:, : rows_a.shape[0]] @ rows_a
    return orthonormal_rows(common, tol)


def random_unitary(size: int, rng: np.random.Generator) -> CMatrix:
    """Haar-random unitary."""
    if size == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(size, random_state=rng)


def random_hermitian(size: int, rng: np.random.Generator) -> CMatrix:
    """Self-adjoint matrix with Gaussian entries."""
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return (g + adjoint(g)) / 2


def random_complex(shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    """Complex array with independent standard Gaussian parts."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def seeded_rng(seed: int | None) -> np.random.Generator:
    """Generator from ``seed``, or from the configured seed when None."""
    return np.random.default_rng(get_settings().seed if seed is None else seed)
