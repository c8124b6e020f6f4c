"""Order-two automorphisms, the fixed/odd grading and the doubled-matrix crossed product.

The crossed product of ``A`` (acting on ``C^d``) by an order-two automorphism
``sigma`` is realized on ``C^d + C^d`` as the span of

    embed(a) = diag(a, sigma(a))   and   embed(b) @ W,   W = [[0, I], [I, 0]].
"""

import logging
from typing import Literal, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field, validate_call

from crossed_z2.exceptions import InvalidInputError, NumericalToleranceError
from crossed_z2.numkernel import (
    CMatrix,
    TolerancePolicy,
    adjoint,
    as_cmatrix,
    hs_norm,
    is_scalar,
    numerical_rank,
    orthonormal_rows,
    polar_unitary,
    random_complex,
    resolve_tolerance,
    seeded_rng,
)
from crossed_z2.star_algebra import (
    StarAlgebra,
    StarHom,
    check_star_hom,
    compose,
    intertwiners,
    is_irreducible,
    representation,
    unitarily_equivalent,
)

logger = logging.getLogger(__name__)


class OrderTwoAutomorphism(BaseModel):
    """A *-automorphism ``sigma`` of an algebra with ``sigma**2 = id``."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    algebra: StarAlgebra
    action: StarHom

    def __call__(self, x: CMatrix) -> CMatrix:
        """Apply the automorphism."""
        return self.action(x)


class Grading(BaseModel):
    """Bases of the fixed-point algebra ``A_1`` and of the odd part ``A_-1``."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    ambient_dim: int
    fixed_basis: np.ndarray
    odd_basis: np.ndarray

    @property
    def dims(self) -> tuple[int, int]:
        """``(dim A_1, dim A_-1)``."""
        return self.fixed_basis.shape[0], self.odd_basis.shape[0]

    def fixed_algebra(self, name: str = "A1") -> StarAlgebra:
        """The fixed-point algebra as a StarAlgebra."""
        return StarAlgebra(ambient_dim=self.ambient_dim, basis=self.fixed_basis, name=name)


class CrossedProduct(BaseModel):
    """The crossed product algebra with its symmetry ``W`` and the embedding of the base."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    algebra: StarAlgebra
    base: StarAlgebra
    sigma: OrderTwoAutomorphism
    embed: StarHom
    symmetry: np.ndarray

    @property
    def base_dim(self) -> int:
        """Ambient size ``d`` of the base algebra."""
        return self.base.ambient_dim

    def element(self, a: CMatrix, b: CMatrix) -> CMatrix:
        """``embed(a) + embed(b) W``."""
        return self.embed(a) + self.embed(b) @ self.symmetry

    def split(self, x: CMatrix) -> tuple[CMatrix, CMatrix]:
        """Recover ``(a, b)`` with ``x = embed(a) + embed(b) W``."""
        d = self.base_dim
        return x[:d, :d], x[:d, d:]


class InductionCriteria(NamedTuple):
    """The three irreducibility criteria for an induced representation."""

    bullet1: bool
    bullet2: bool
    bullet3: bool | Literal["not evaluated"]

    @property
    def consistent(self) -> bool:
        """Bullets 1 and 2 agree, and bullet 3 agrees whenever it was evaluated."""
        return self.bullet1 == self.bullet2 and self.bullet3 in {self.bullet1, "not evaluated"}


class FaithfulnessReport(BaseModel):
    """Injectivity of a representation and of its induced representation."""

    pi_faithful: bool
    induced_faithful: bool

    @computed_field
    @property
    def implication_holds(self) -> bool:
        """Faithful ``pi`` implies faithful induced representation."""
        return self.induced_faithful or not self.pi_faithful


class StructureReport(BaseModel):
    """Structural checks on a crossed product."""

    dim: int
    base_dim: int
    symmetry_residual: float
    covariance_residual: float
    decomposition_rank: int
    passed: bool


def _closure_words(
    alg: StarAlgebra,
    generators: list[np.ndarray],
    images: list[np.ndarray],
    tol: TolerancePolicy,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Words in the generators with their candidate images, spanning the algebra.

    Every product of a spanning word with a letter is kept, including the
    dependent ones, so the caller can check the images for consistency.
    """
    identity = alg.identity()
    letters = [(g, s) for g, s in zip(generators, images, strict=True)]
    letters += [(adjoint(g), adjoint(s)) for g, s in letters]
    words = [identity, *(g for g, _ in letters)]
    targets = [identity, *(s for _, s in letters)]
    spanning = [(identity, identity)]
    rows = orthonormal_rows(identity.reshape(1, -1), tol)
    frontier = list(zip(words[1:], targets[1:], strict=True))
    for _ in range(alg.dim + 1):
        grown = []
        for w, s in frontier:
            extended = orthonormal_rows(np.vstack([rows, w.reshape(1, -1)]), tol)
            if extended.shape[0] > rows.shape[0]:
                rows = extended
                spanning.append((w, s))
                grown.append((w, s))
        if rows.shape[0] >= alg.dim or not grown:
            break
        frontier = [(w @ g, s @ t) for w, s in grown for g, t in letters]
        words += [w for w, _ in frontier]
        targets += [s for _, s in frontier]
    # one more layer of products checks multiplicativity on the generators
    for w, s in spanning:
        for g, t in letters:
            words.append(w @ g)
            targets.append(s @ t)
    return words, targets


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def make_automorphism(
    alg: StarAlgebra,
    generator_images: list[np.ndarray],
    generators: list[np.ndarray] | None = None,
    tol: TolerancePolicy | None = None,
) -> OrderTwoAutomorphism:
    """Build and validate an order-two automorphism from generator images.

    Args:
        alg: The algebra.
        generator_images: ``sigma(g)`` for each generator ``g``.
        generators: Generators of ``alg``; the basis when omitted.
        tol: Tolerance policy, defaults to the configured one.

    Returns:
        The validated automorphism.

    Raises:
        InvalidInputError: If the images do not extend to a well-defined map,
            the map is not a unital *-homomorphism into ``alg``, or its square is
            not the identity.
    """
    tol = resolve_tolerance(tol)
    gens = list(alg.basis) if generators is None else [as_cmatrix(g) for g in generators]
    imgs = [as_cmatrix(s) for s in generator_images]
    d = alg.ambient_dim
    if len(gens) != len(imgs):
        raise InvalidInputError(f"{len(imgs)} images given for {len(gens)} generators")
    for i, (g, s) in enumerate(zip(gens, imgs, strict=True)):
        if g.shape != (d, d) or s.shape != (d, d):
            raise InvalidInputError(f"generator {i} or its image is not {d}x{d}")
    words, targets = _closure_words(alg, gens, imgs, tol)
    coords = np.stack([alg.coordinates(w) for w in words])
    if numerical_rank(coords, tol) < alg.dim:
        raise InvalidInputError(f"the generators do not generate {alg.name}")
    flat_targets = np.stack([t.ravel() for t in targets])
    solution, *_ = np.linalg.lstsq(coords, flat_targets, rcond=None)
    residual = hs_norm(coords @ solution - flat_targets)
    if not tol.is_zero(residual, hs_norm(flat_targets)):
        raise InvalidInputError(
            "generator images do not extend to a well-defined multiplicative map"
        )
    action = StarHom(source=alg, target=alg, images=solution.reshape(alg.dim, d, d), name="sigma")
    check_star_hom(action, tol)
    for i, b in enumerate(alg.basis):
        twice = action(action.images[i])
        if not tol.is_zero(hs_norm(twice - b), 1.0):
            raise InvalidInputError(
                f"sigma o sigma differs from the identity at basis {i}: "
                "not an order-two automorphism"
            )
    return OrderTwoAutomorphism(algebra=alg, action=action)


def inner_automorphism(
    alg: StarAlgebra, unitary: CMatrix, tol: TolerancePolicy | None = None
) -> OrderTwoAutomorphism:
    """``Ad(u)`` restricted to ``alg``; ``u**2`` must act trivially."""
    images = [unitary @ b @ adjoint(unitary) for b in alg.basis]
    return make_automorphism(alg, images, tol=tol)


def identity_automorphism(alg: StarAlgebra) -> OrderTwoAutomorphism:
    """The trivial automorphism."""
    return OrderTwoAutomorphism(
        algebra=alg, action=StarHom(source=alg, target=alg, images=alg.basis, name="id")
    )


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def grading(
    sigma: OrderTwoAutomorphism, tol: TolerancePolicy | None = None
) -> Grading:
    """Split the algebra into fixed and odd parts.

    ``A_1`` is spanned by ``(a + sigma(a)) / 2`` and ``A_-1`` by
    ``(a - sigma(a)) / 2`` over the basis.
    """
    tol = resolve_tolerance(tol)
    alg = sigma.algebra
    d = alg.ambient_dim
    images = sigma.action.images
    fixed = orthonormal_rows(((alg.basis + images) / 2).reshape(alg.dim, -1), tol)
    odd = orthonormal_rows(((alg.basis - images) / 2).reshape(alg.dim, -1), tol)
    if fixed.shape[0] + odd.shape[0] != alg.dim:
        raise NumericalToleranceError(
            f"grading dims {fixed.shape[0]} + {odd.shape[0]} differ from {alg.dim}"
        )
    return Grading(
        ambient_dim=d, fixed_basis=fixed.reshape(-1, d, d), odd_basis=odd.reshape(-1, d, d)
    )


def grading_residual(sigma: OrderTwoAutomorphism, graded: Grading) -> float:
    """Largest failure of ``a = even(a) + odd(a)`` with the parts in their spans."""
    d = graded.ambient_dim
    fixed = StarAlgebra(ambient_dim=d, basis=graded.fixed_basis, name="A1")
    worst = 0.0
    for a in sigma.algebra.basis:
        even, odd = (a + sigma(a)) / 2, (a - sigma(a)) / 2
        odd_part = np.tensordot(
            graded.odd_basis.reshape(graded.odd_basis.shape[0], -1).conj() @ odd.ravel(),
            graded.odd_basis,
            axes=1,
        )
        worst = max(
            worst,
            hs_norm(a - even - odd),
            hs_norm(even - fixed.project(even)),
            hs_norm(odd - odd_part),
        )
    return worst


def _flip(d: int) -> np.ndarray:
    flip = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    flip[:d, d:] = np.eye(d)
    flip[d:, :d] = np.eye(d)
    return flip


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def crossed_product(
    sigma: OrderTwoAutomorphism, tol: TolerancePolicy | None = None
) -> CrossedProduct:
    """Doubled-matrix model of the crossed product by ``sigma``.

    Raises:
        NumericalToleranceError: If the structural checks fail.
    """
    tol = resolve_tolerance(tol)
    base = sigma.algebra
    d = base.ambient_dim
    flip = _flip(d)
    embedded = np.zeros((base.dim, 2 * d, 2 * d), dtype=np.complex128)
    embedded[:, :d, :d] = base.basis
    embedded[:, d:, d:] = sigma.action.images
    spanning = np.concatenate([embedded, embedded @ flip])
    rows = orthonormal_rows(spanning.reshape(2 * base.dim, -1), tol)
    algebra = StarAlgebra(
        ambient_dim=2 * d, basis=rows.reshape(-1, 2 * d, 2 * d), name=f"{base.name}xZ2"
    )
    embed = StarHom(source=base, target=algebra, images=embedded, name="psi")
    result = CrossedProduct(
        algebra=algebra, base=base, sigma=sigma, embed=embed, symmetry=flip
    )
    report = structure_report(result, tol)
    if not report.passed:
        raise NumericalToleranceError(f"crossed product failed its structural checks: {report}")
    return result


def structure_report(
    crossed: CrossedProduct, tol: TolerancePolicy | None = None
) -> StructureReport:
    """Dimension, symmetry, covariance and unique-decomposition checks."""
    tol = resolve_tolerance(tol)
    w = crossed.symmetry
    size = w.shape[0]
    base = crossed.base
    symmetry_residual = max(
        hs_norm(w @ w - np.eye(size)), hs_norm(w - adjoint(w))
    )
    covariance_residual = max(
        hs_norm(w @ crossed.embed.images[i] @ w - crossed.embed(crossed.sigma.action.images[i]))
        for i in range(base.dim)
    )
    pairs = np.concatenate([crossed.embed.images, crossed.embed.images @ w])
    decomposition_rank = numerical_rank(pairs.reshape(2 * base.dim, -1), tol)
    passed = (
        crossed.algebra.dim == 2 * base.dim
        and tol.is_zero(symmetry_residual, size)
        and tol.is_zero(covariance_residual, base.dim)
        and decomposition_rank == 2 * base.dim
    )
    return StructureReport(
        dim=crossed.algebra.dim,
        base_dim=base.dim,
        symmetry_residual=symmetry_residual,
        covariance_residual=covariance_residual,
        decomposition_rank=decomposition_rank,
        passed=passed,
    )


def twist(pi: StarHom, sigma: OrderTwoAutomorphism) -> StarHom:
    """``pi o sigma``."""
    return compose(pi, sigma.action, name=f"{pi.name}.sigma")


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def induce(
    pi: StarHom,
    sigma: OrderTwoAutomorphism,
    crossed: CrossedProduct | None = None,
    tol: TolerancePolicy | None = None,
) -> StarHom:
    """Induced representation on the doubled carrier.

    ``a -> pi(a) + pi(sigma(a))`` block-diagonally and ``W -> [[0, I], [I, 0]]``.

    Args:
        pi: Representation of the base algebra.
        sigma: The automorphism.
        crossed: Crossed product to express the result on; built when omitted.
        tol: Tolerance policy, defaults to the configured one.

    Returns:
        Representation of ``crossed.algebra``.

    Raises:
        NumericalToleranceError: If the covariance relation fails.
    """
    tol = resolve_tolerance(tol)
    crossed = crossed or crossed_product(sigma, tol)
    size = pi.carrier_dim
    flip = _flip(size)

    def induced(a: CMatrix) -> CMatrix:
        out = np.zeros((2 * size, 2 * size), dtype=np.complex128)
        out[:size, :size] = pi(a)
        out[size:, size:] = pi(sigma(a))
        return out

    images = []
    for x in crossed.algebra.basis:
        a, b = crossed.split(x)
        images.append(induced(a) + induced(b) @ flip)
    result = representation(crossed.algebra, images, name=f"ind({pi.name})")
    for i, a in enumerate(crossed.base.basis):
        lhs = flip @ induced(a) @ flip
        if not tol.is_zero(hs_norm(lhs - result(crossed.embed(sigma(a)))), hs_norm(lhs)):
            raise NumericalToleranceError(f"induced representation breaks covariance at basis {i}")
    return result


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def order_two_intertwiner(
    pi: StarHom,
    sigma: OrderTwoAutomorphism,
    tol: TolerancePolicy | None = None,
    seed: int | None = None,
) -> CMatrix | None:
    """Unitary ``u`` with ``u**2 = 1`` and ``u pi u* = pi o sigma``, for irreducible ``pi``.

    The polar part ``v`` of an intertwiner satisfies ``v**2 = exp(2 i pi theta)``
    by irreducibility; ``u = exp(-i pi theta) v`` is then of order two.

    Returns:
        ``u``, or None when ``pi`` and ``pi o sigma`` are inequivalent.

    Raises:
        NumericalToleranceError: If ``v**2`` is not scalar or ``u**2`` is not the
            identity.
    """
    tol = resolve_tolerance(tol)
    space = intertwiners(pi, twist(pi, sigma), tol, seed)
    if not space:
        return None
    weights = random_complex((len(space),), seeded_rng(seed))
    v = polar_unitary(np.tensordot(weights, np.stack(space), axes=1))
    square = v @ v
    if not is_scalar(square, tol):
        raise NumericalToleranceError("square of the intertwining unitary is not scalar")
    theta = np.angle(np.trace(square) / square.shape[0]) / (2 * np.pi)
    u = np.exp(-1j * np.pi * theta) * v
    if not tol.is_zero(hs_norm(u @ u - np.eye(u.shape[0])), u.shape[0]):
        raise NumericalToleranceError("phase-corrected intertwiner is not of order two")
    return u


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def induction_criteria(
    pi: StarHom,
    sigma: OrderTwoAutomorphism,
    crossed: CrossedProduct | None = None,
    tol: TolerancePolicy | None = None,
    seed: int | None = None,
) -> InductionCriteria:
    """Evaluate the three irreducibility criteria for ``induce(pi)``.

    Bullet 1: the induced representation is irreducible. Bullet 2: ``pi`` is
    irreducible and inequivalent to ``pi o sigma``. Bullet 3: no order-two
    unitary intertwines ``pi`` and ``pi o sigma``; it is only evaluated for
    irreducible ``pi`` and reported as ``"not evaluated"`` otherwise.
    """
    tol = resolve_tolerance(tol)
    bullet1 = is_irreducible(induce(pi, sigma, crossed, tol), tol, seed)
    pi_irreducible = is_irreducible(pi, tol, seed)
    if not pi_irreducible:
        return InductionCriteria(bullet1=bullet1, bullet2=False, bullet3="not evaluated")
    equivalent = unitarily_equivalent(pi, twist(pi, sigma), tol, seed).equivalent
    u = order_two_intertwiner(pi, sigma, tol, seed)
    return InductionCriteria(bullet1=bullet1, bullet2=not equivalent, bullet3=u is None)


def is_faithful(rep: StarHom, tol: TolerancePolicy | None = None) -> bool:
    """Whether the representation is injective on the source."""
    tol = resolve_tolerance(tol)
    return numerical_rank(rep.images.reshape(rep.source.dim, -1), tol) == rep.source.dim


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def faithfulness_check(
    pi: StarHom,
    sigma: OrderTwoAutomorphism,
    crossed: CrossedProduct | None = None,
    tol: TolerancePolicy | None = None,
) -> FaithfulnessReport:
    """Injectivity of ``pi`` and of its induced representation."""
    tol = resolve_tolerance(tol)
    induced = induce(pi, sigma, crossed, tol)
    report = FaithfulnessReport(
        pi_faithful=is_faithful(pi, tol), induced_faithful=is_faithful(induced, tol)
    )
    if not report.implication_holds:
        logger.warning("faithful %s induced a non-faithful representation", pi.name)
    return report
