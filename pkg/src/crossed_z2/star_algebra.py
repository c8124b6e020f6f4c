"""Finite-dimensional *-algebras of matrices and their representations.

Algebras are stored as Hilbert-Schmidt orthonormal spans of ``d x d``
matrices; homomorphisms are stored by the images of the source basis. Every
randomized step (commutant sampling, central elements) draws from a
``numpy.random.Generator`` seeded explicitly.
"""

import functools
import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg as la
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
    validate_call,
)

from crossed_z2.exceptions import InvalidInputError, NumericalToleranceError
from crossed_z2.funcs import rounded_key
from crossed_z2.numkernel import (
    CMatrix,
    TolerancePolicy,
    adjoint,
    as_cmatrix,
    herm_spectral,
    hs_norm,
    matrix_unit,
    nullspace_rows,
    numerical_rank,
    orthonormal_rows,
    polar_unitary,
    random_complex,
    range_basis,
    resolve_tolerance,
    seeded_rng,
    span_intersection,
)

logger = logging.getLogger(__name__)

# random combinations of the basis tried before solving the full system
_PROBES = 3


def _frozen_stack(value: np.ndarray) -> np.ndarray:
    stack = np.array(value, dtype=np.complex128)
    stack.setflags(write=False)
    return stack


class StarAlgebra(BaseModel):
    """Unital *-closed span of ``d x d`` matrices with an orthonormal basis."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    ambient_dim: int = Field(gt=0)
    basis: np.ndarray
    name: str = "A"

    @field_validator("basis", mode="before")
    @classmethod
    def _coerce_basis(cls, value: np.ndarray | list) -> np.ndarray:
        return _frozen_stack(value)

    @model_validator(mode="after")
    def _check_shape(self) -> "StarAlgebra":
        d = self.ambient_dim
        if self.basis.ndim != 3 or self.basis.shape[1:] != (d, d):
            raise InvalidInputError(
                f"basis of {self.name} must have shape (k, {d}, {d}), got {self.basis.shape}"
            )
        return self

    @property
    def dim(self) -> int:
        """Dimension of the algebra as a vector space."""
        return self.basis.shape[0]

    @property
    def flat(self) -> np.ndarray:
        """Basis as rows of length ``d**2``."""
        return self.basis.reshape(self.dim, -1)

    def identity(self) -> CMatrix:
        """Identity of the ambient matrix algebra, which is the unit of the algebra."""
        return np.eye(self.ambient_dim, dtype=np.complex128)

    def coordinates(self, x: CMatrix) -> np.ndarray:
        """Coordinates of the orthogonal projection of ``x`` onto the span."""
        return self.flat.conj() @ np.asarray(x, dtype=np.complex128).ravel()

    def element(self, coords: np.ndarray) -> CMatrix:
        """Matrix with the given coordinates."""
        return np.tensordot(np.asarray(coords), self.basis, axes=1)

    def project(self, x: CMatrix) -> CMatrix:
        """Orthogonal projection onto the span."""
        return self.element(self.coordinates(x))

    def contains(self, x: CMatrix, tol: TolerancePolicy | None = None) -> bool:
        """Whether ``x`` lies in the span within tolerance."""
        tol = resolve_tolerance(tol)
        return tol.is_zero(hs_norm(x - self.project(x)), hs_norm(x))

    def random_element(
        self, rng: np.random.Generator, *, self_adjoint: bool = False
    ) -> CMatrix:
        """Random element with Gaussian coordinates."""
        x = self.element(random_complex((self.dim,), rng))
        return (x + adjoint(x)) / 2 if self_adjoint else x


class StarHom(BaseModel):
    """Unital *-homomorphism given by the images of the source basis.

    A representation is a StarHom whose target is the full matrix algebra on
    its carrier space.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    source: StarAlgebra
    target: StarAlgebra
    images: np.ndarray
    name: str = "pi"

    @field_validator("images", mode="before")
    @classmethod
    def _coerce_images(cls, value: np.ndarray | list) -> np.ndarray:
        return _frozen_stack(value)

    @model_validator(mode="after")
    def _check_shape(self) -> "StarHom":
        d = self.target.ambient_dim
        if self.images.shape != (self.source.dim, d, d):
            raise InvalidInputError(
                f"{self.name} needs {self.source.dim} images of shape ({d}, {d}), "
                f"got {self.images.shape}"
            )
        return self

    @property
    def carrier_dim(self) -> int:
        """Size of the target matrices."""
        return self.target.ambient_dim

    def __call__(self, x: CMatrix) -> CMatrix:
        """Linear extension evaluated on a source element."""
        return np.tensordot(self.source.coordinates(x), self.images, axes=1)


class IrrepClass(NamedTuple):
    """One unitary-equivalence class inside a decomposition."""

    irrep: StarHom
    multiplicity: int


class IrrepDecomposition(BaseModel):
    """Irreducible classes of a representation with their multiplicities."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    classes: list[IrrepClass]
    block_dims: list[int]

    @property
    def multiplicities(self) -> list[int]:
        """Multiplicity of each class, in class order."""
        return [c.multiplicity for c in self.classes]


class Equivalence(NamedTuple):
    """Outcome of a unitary equivalence test."""

    equivalent: bool
    witness: CMatrix | None


@functools.cache
def full_matrix_algebra(size: int) -> StarAlgebra:
    """All ``size x size`` matrices, with the matrix units as basis."""
    basis = [matrix_unit(size, i, j) for i in range(size) for j in range(size)]
    return StarAlgebra(ambient_dim=size, basis=basis, name=f"M{size}")


def diagonal_algebra(size: int) -> StarAlgebra:
    """Diagonal matrices, basis ``E_kk`` in order of ``k``."""
    basis = [matrix_unit(size, k, k) for k in range(size)]
    return StarAlgebra(ambient_dim=size, basis=basis, name=f"C^{size}")


@validate_call
def block_algebra(
    block_sizes: list[int], multiplicities: list[int] | None = None, name: str = "A"
) -> StarAlgebra:
    """Direct sum of full matrix blocks, block ``i`` repeated ``m_i`` times.

    Args:
        block_sizes: Sizes ``k_i`` of the simple summands.
        multiplicities: How often each block is repeated on the diagonal,
            all ones by default.
        name: Label of the algebra.

    Returns:
        The algebra of ``diag(x_1 (x) 1_{m_1}, x_2 (x) 1_{m_2}, ...)``.
    """
    multiplicities = multiplicities or [1] * len(block_sizes)
    if len(multiplicities) != len(block_sizes) or min(block_sizes + multiplicities) < 1:
        raise InvalidInputError("block sizes and multiplicities must be positive and aligned")
    d = sum(k * m for k, m in zip(block_sizes, multiplicities, strict=True))
    basis = []
    offset = 0
    for k, m in zip(block_sizes, multiplicities, strict=True):
        for i in range(k):
            for j in range(k):
                b = np.zeros((d, d), dtype=np.complex128)
                b[offset : offset + k * m, offset : offset + k * m] = np.kron(
                    np.eye(m), matrix_unit(k, i, j)
                )
                basis.append(b / np.sqrt(m))
        offset += k * m
    return StarAlgebra(ambient_dim=d, basis=basis, name=name)


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def generate(
    ambient_dim: int,
    generators: list[np.ndarray],
    tol: TolerancePolicy | None = None,
    name: str = "A",
) -> StarAlgebra:
    """Smallest unital *-algebra containing the generators.

    Starts from the span of the identity, the generators and their adjoints and
    right-multiplies by those letters until the dimension stops growing.

    Args:
        ambient_dim: Size ``d`` of the matrices.
        generators: ``d x d`` matrices.
        tol: Tolerance policy, defaults to the configured one.
        name: Label of the algebra.

    Returns:
        The generated StarAlgebra.

    Raises:
        InvalidInputError: If a generator has the wrong shape.
        NumericalToleranceError: If the dimension does not stabilize within
            ``d**2 + 1`` rounds.
    """
    tol = resolve_tolerance(tol)
    d = ambient_dim
    letters = []
    for i, g in enumerate(generators):
        g = as_cmatrix(g)
        if g.shape != (d, d):
            raise InvalidInputError(f"generator {i} has shape {g.shape}, expected ({d}, {d})")
        letters += [g, adjoint(g)]
    flat = orthonormal_rows(
        np.stack([np.eye(d, dtype=np.complex128).ravel()] + [x.ravel() for x in letters]),
        tol,
    )
    for _ in range(d * d + 1):
        current = flat.reshape(-1, d, d)
        products = [(b @ x).ravel() for b in current for x in letters]
        grown = orthonormal_rows(np.vstack([flat, *products]) if products else flat, tol)
        if grown.shape[0] == flat.shape[0]:
            return StarAlgebra(ambient_dim=d, basis=grown.reshape(-1, d, d), name=name)
        flat = grown
    raise NumericalToleranceError(
        f"closure of {len(generators)} generators in M{d} did not stabilize"
    )


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def check_star_algebra(alg: StarAlgebra, tol: TolerancePolicy | None = None) -> None:
    """Verify orthonormality, unit, adjoint closure and product closure.

    Raises:
        InvalidInputError: Naming the first failed condition.
    """
    tol = resolve_tolerance(tol)
    gram = alg.flat.conj() @ alg.flat.T
    if not tol.is_zero(hs_norm(gram - np.eye(alg.dim)), alg.dim):
        raise InvalidInputError(f"basis of {alg.name} is not orthonormal")
    if not alg.contains(alg.identity(), tol):
        raise InvalidInputError(f"{alg.name} does not contain the identity")
    for i, b in enumerate(alg.basis):
        if not alg.contains(adjoint(b), tol):
            raise InvalidInputError(f"{alg.name} is not closed under adjoint at basis {i}")
        for j, c in enumerate(alg.basis):
            if not alg.contains(b @ c, tol):
                raise InvalidInputError(
                    f"{alg.name} is not closed under products at basis pair ({i}, {j})"
                )


def representation(
    source: StarAlgebra, images: np.ndarray | list, name: str = "pi"
) -> StarHom:
    """StarHom into the full matrix algebra on the carrier of ``images``."""
    images = np.asarray(images, dtype=np.complex128)
    size = images.shape[-1] if images.size else 1
    return StarHom(source=source, target=full_matrix_algebra(size), images=images, name=name)


def identity_representation(alg: StarAlgebra) -> StarHom:
    """Inclusion of the algebra into its ambient matrix algebra."""
    return representation(alg, alg.basis, name=f"id_{alg.name}")


def compose(outer: StarHom, inner: StarHom, name: str | None = None) -> StarHom:
    """``outer`` after ``inner``."""
    images = [outer(x) for x in inner.images]
    return StarHom(
        source=inner.source,
        target=outer.target,
        images=images,
        name=name or f"{outer.name}.{inner.name}",
    )


def restrict(hom: StarHom, subalgebra: StarAlgebra) -> StarHom:
    """Restriction of ``hom`` to a subalgebra of its source."""
    return StarHom(
        source=subalgebra,
        target=hom.target,
        images=[hom(b) for b in subalgebra.basis],
        name=f"{hom.name}|{subalgebra.name}",
    )


def conjugate_rep(rep: StarHom, unitary: CMatrix) -> StarHom:
    """Representation ``a -> u rep(a) u*``."""
    return representation(
        rep.source, [unitary @ x @ adjoint(unitary) for x in rep.images], name=f"Ad.{rep.name}"
    )


def direct_sum(*reps: StarHom) -> StarHom:
    """Block-diagonal direct sum of representations of one source."""
    source = reps[0].source
    images = [la.block_diag(*(r.images[i] for r in reps)) for i in range(source.dim)]
    return representation(source, images, name="+".join(r.name for r in reps))


def image_algebra(rep: StarHom, tol: TolerancePolicy | None = None) -> StarAlgebra:
    """Span of the images, itself a unital *-algebra."""
    tol = resolve_tolerance(tol)
    d = rep.carrier_dim
    flat = orthonormal_rows(rep.images.reshape(rep.source.dim, -1), tol)
    return StarAlgebra(ambient_dim=d, basis=flat.reshape(-1, d, d), name=f"{rep.name}(A)")


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def check_star_hom(
    hom: StarHom, tol: TolerancePolicy | None = None, *, check_target: bool = True
) -> None:
    """Verify that ``hom`` is a unital *-homomorphism.

    Args:
        hom: Map to check.
        tol: Tolerance policy, defaults to the configured one.
        check_target: Also require the images to lie in the target algebra.

    Raises:
        InvalidInputError: Naming the failed condition and the basis indices.
    """
    tol = resolve_tolerance(tol)
    source = hom.source
    unit = hom(source.identity())
    if not tol.is_zero(hs_norm(unit - hom.target.identity()), hs_norm(unit)):
        raise InvalidInputError(f"{hom.name} is not unital")
    for i, (b, image) in enumerate(zip(source.basis, hom.images, strict=True)):
        if check_target and not hom.target.contains(image, tol):
            raise InvalidInputError(f"{hom.name}: image of basis {i} lies outside the target")
        star = hom(adjoint(b))
        if not tol.is_zero(hs_norm(star - adjoint(image)), hs_norm(image)):
            raise InvalidInputError(f"{hom.name} does not preserve the adjoint at basis {i}")
        products = b @ source.basis
        coords = products.reshape(source.dim, -1) @ source.flat.conj().T
        mapped = np.tensordot(coords, hom.images, axes=1)
        expected = image @ hom.images
        for j in range(source.dim):
            scale = hs_norm(image) * hs_norm(hom.images[j])
            if not tol.is_zero(hs_norm(mapped[j] - expected[j]), scale):
                raise InvalidInputError(
                    f"{hom.name} is not multiplicative at basis pair ({i}, {j})"
                )


def _solve_intertwiners(
    left: np.ndarray, right: np.ndarray, tol: TolerancePolicy, rng: np.random.Generator
) -> np.ndarray:
    """Orthonormal basis of ``{T : T left[i] = right[i] T}``, shape ``(m, D2, D1)``.

    A few random combinations of the equations are solved first; the candidate
    solutions are then checked against every equation and the full system is
    solved only when that check fails.
    """
    d1, d2 = left.shape[-1], right.shape[-1]

    def system(lefts: np.ndarray, rights: np.ndarray) -> np.ndarray:
        # row-major vec: vec(T L) = (I (x) L^T) vec(T), vec(R T) = (R (x) I) vec(T)
        blocks = [
            np.kron(np.eye(d2), lm.T) - np.kron(rm, np.eye(d1))
            for lm, rm in zip(lefts, rights, strict=True)
        ]
        return np.vstack(blocks)

    def solves_all(rows: np.ndarray) -> bool:
        for t in rows.reshape(-1, d2, d1):
            for lm, rm in zip(left, right, strict=True):
                scale = hs_norm(lm) + hs_norm(rm)
                if not tol.is_zero(hs_norm(t @ lm - rm @ t), scale):
                    return False
        return True

    if left.shape[0] > _PROBES:
        mix = random_complex((_PROBES, left.shape[0]), rng)
        rows = nullspace_rows(
            system(np.tensordot(mix, left, axes=1), np.tensordot(mix, right, axes=1)), tol
        )
        if solves_all(rows):
            return rows.reshape(-1, d2, d1)
        logger.debug("probe solution failed verification, solving the full system")
    return nullspace_rows(system(left, right), tol).reshape(-1, d2, d1)


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def commutant(
    alg: StarAlgebra, tol: TolerancePolicy | None = None, seed: int | None = None
) -> StarAlgebra:
    """All ambient matrices commuting with the algebra.

    Args:
        alg: The algebra.
        tol: Tolerance policy, defaults to the configured one.
        seed: Seed for the sampled equations.

    Returns:
        The commutant as a StarAlgebra on the same ambient space.
    """
    tol = resolve_tolerance(tol)
    rows = _solve_intertwiners(alg.basis, alg.basis, tol, seeded_rng(seed))
    d = alg.ambient_dim
    return StarAlgebra(
        ambient_dim=d,
        basis=orthonormal_rows(rows.reshape(-1, d * d), tol).reshape(-1, d, d),
        name=f"{alg.name}'",
    )


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def center(
    alg: StarAlgebra, tol: TolerancePolicy | None = None, seed: int | None = None
) -> StarAlgebra:
    """Intersection of the algebra with its commutant."""
    tol = resolve_tolerance(tol)
    d = alg.ambient_dim
    common = span_intersection(alg.flat, commutant(alg, tol, seed).flat, tol)
    return StarAlgebra(ambient_dim=d, basis=common.reshape(-1, d, d), name=f"Z({alg.name})")


def _compressed_dim(alg: StarAlgebra, projection: CMatrix, tol: TolerancePolicy) -> int:
    corners = np.stack([projection @ b @ projection for b in alg.basis])
    return numerical_rank(corners.reshape(alg.dim, -1), tol)


def _projection_key(projection: CMatrix) -> tuple[float, ...]:
    return tuple(-x for x in rounded_key(np.diag(projection).real, 6))


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def minimal_projections(
    alg: StarAlgebra, tol: TolerancePolicy | None = None, seed: int | None = None
) -> list[CMatrix]:
    """Orthogonal minimal projections of the algebra summing to the identity.

    A projection ``p`` is split by the spectral projections of ``p h p`` for a
    random self-adjoint ``h`` in the algebra until ``p A p`` is one-dimensional.

    Raises:
        NumericalToleranceError: If more than ``dim(alg)`` rounds fail to split
            a non-minimal projection.
    """
    tol = resolve_tolerance(tol)
    rng = seeded_rng(seed)
    pending = [alg.identity()]
    done = []
    failures = 0
    while pending:
        p = pending.pop()
        if _compressed_dim(alg, p, tol) == 1:
            done.append(p)
            continue
        v = range_basis(p)
        h = alg.random_element(rng, self_adjoint=True)
        parts = herm_spectral(adjoint(v) @ h @ v, tol)
        if len(parts) == 1:
            failures += 1
            if failures > alg.dim:
                raise NumericalToleranceError(
                    f"projection refinement in {alg.name} failed after {failures} rounds"
                )
            pending.append(p)
            continue
        pending.extend(v @ q @ adjoint(v) for _, q in parts)
    logger.debug("%s: %d minimal projections", alg.name, len(done))
    return sorted(done, key=_projection_key)


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def minimal_central_projections(
    alg: StarAlgebra, tol: TolerancePolicy | None = None, seed: int | None = None
) -> list[CMatrix]:
    """Minimal central projections, one per Wedderburn block.

    These are the minimal projections of the commutative center.
    """
    tol = resolve_tolerance(tol)
    return minimal_projections(center(alg, tol, seed), tol, seed)


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def intertwiners(
    rep1: StarHom,
    rep2: StarHom,
    tol: TolerancePolicy | None = None,
    seed: int | None = None,
) -> list[CMatrix]:
    """Basis of ``{T : T rep1(b) = rep2(b) T for every basis b}``.

    Raises:
        InvalidInputError: If the sources differ in dimension.
    """
    if rep1.source.dim != rep2.source.dim:
        raise InvalidInputError("intertwiners need representations of one source algebra")
    tol = resolve_tolerance(tol)
    return list(_solve_intertwiners(rep1.images, rep2.images, tol, seeded_rng(seed)))


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def is_irreducible(
    rep: StarHom, tol: TolerancePolicy | None = None, seed: int | None = None
) -> bool:
    """Whether the commutant of the image consists of scalars."""
    tol = resolve_tolerance(tol)
    return commutant(image_algebra(rep, tol), tol, seed).dim == 1


def _subrepresentation(rep: StarHom, projection: CMatrix, index: int) -> StarHom:
    v = range_basis(projection)
    return representation(
        rep.source, [adjoint(v) @ x @ v for x in rep.images], name=f"{rep.name}[{index}]"
    )


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def decompose_rep(
    rep: StarHom, tol: TolerancePolicy | None = None, seed: int | None = None
) -> IrrepDecomposition:
    """Split a representation into irreducible classes with multiplicities.

    The carrier is cut along minimal projections of the commutant of the
    image. Pieces are grouped greedily by descending carrier dimension, ties
    broken by their rounded matrix data; the multiplicity of a class is the
    dimension of its intertwiner space into ``rep``.

    Raises:
        NumericalToleranceError: If the multiplicities do not add up to the
            carrier dimension.
    """
    tol = resolve_tolerance(tol)
    comm = commutant(image_algebra(rep, tol), tol, seed)
    pieces = [
        _subrepresentation(rep, p, i)
        for i, p in enumerate(minimal_projections(comm, tol, seed))
    ]
    pieces.sort(key=lambda r: (-r.carrier_dim, rounded_key(r.images, 6)))
    classes: list[StarHom] = []
    for piece in pieces:
        if not any(
            c.carrier_dim == piece.carrier_dim and intertwiners(c, piece, tol, seed)
            for c in classes
        ):
            classes.append(piece)
    result = [
        IrrepClass(irrep, len(intertwiners(irrep, rep, tol, seed))) for irrep in classes
    ]
    total = sum(c.multiplicity * c.irrep.carrier_dim for c in result)
    if total != rep.carrier_dim:
        raise NumericalToleranceError(
            f"decomposition of {rep.name} accounts for {total} of {rep.carrier_dim} dimensions"
        )
    return IrrepDecomposition(
        classes=result, block_dims=[c.irrep.carrier_dim for c in result]
    )


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def unitarily_equivalent(
    rep1: StarHom,
    rep2: StarHom,
    tol: TolerancePolicy | None = None,
    seed: int | None = None,
) -> Equivalence:
    """Decide unitary equivalence and return a witness unitary.

    A generic element of the intertwiner space is invertible exactly when the
    two representations carry the same classes with the same multiplicities;
    its polar part is then a unitary ``u`` with ``u rep1 u* = rep2``.

    Returns:
        ``(True, u)`` or ``(False, None)``.
    """
    tol = resolve_tolerance(tol)
    if rep1.carrier_dim != rep2.carrier_dim:
        return Equivalence(equivalent=False, witness=None)
    space = intertwiners(rep1, rep2, tol, seed)
    if not space:
        return Equivalence(equivalent=False, witness=None)
    weights = random_complex((len(space),), seeded_rng(seed))
    u = polar_unitary(np.tensordot(weights, np.stack(space), axes=1))
    for x, y in zip(rep1.images, rep2.images, strict=True):
        if not tol.is_zero(hs_norm(u @ x @ adjoint(u) - y), hs_norm(y)):
            return Equivalence(equivalent=False, witness=None)
    return Equivalence(equivalent=True, witness=u)
