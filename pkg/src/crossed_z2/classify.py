"""Classification of irreducible representations of a crossed product.

For an irreducible representation ``pi`` of the crossed product, ``pi(W)`` is
either a scalar ``+-1`` (Type1) or has spectrum ``{-1, 1}`` (Type2). In the
second case the compression of ``pi`` to the two eigenspaces gives corner
maps ``alpha, delta`` on the fixed-point algebra; the representation splits
over the base (Type2Split) when they are inequivalent and is induced from a
representation ``phi`` of the base (Type2Induced) when they are equivalent.
"""

import enum
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, validate_call

from crossed_z2.crossed import (
    CrossedProduct,
    OrderTwoAutomorphism,
    grading,
    induce,
    order_two_intertwiner,
    twist,
)
from crossed_z2.exceptions import (
    InvalidInputError,
    NumericalToleranceError,
    PropertyViolationError,
)
from crossed_z2.numkernel import (
    CMatrix,
    TolerancePolicy,
    adjoint,
    herm_spectral,
    hs_norm,
    is_scalar,
    range_basis,
    resolve_tolerance,
)
from crossed_z2.star_algebra import (
    StarAlgebra,
    StarHom,
    check_star_hom,
    commutant,
    compose,
    decompose_rep,
    generate,
    is_irreducible,
    representation,
    restrict,
    unitarily_equivalent,
)

logger = logging.getLogger(__name__)


class ClassKind(enum.StrEnum):
    """The three possible kinds of an irreducible representation."""

    TYPE1 = "Type1"
    TYPE2_SPLIT = "Type2Split"
    TYPE2_INDUCED = "Type2Induced"


class CornerData(BaseModel):
    """Corner maps of ``pi`` restricted to the base, relative to the eigenspaces of ``pi(W)``.

    ``alpha`` and ``delta`` are representations of the fixed-point algebra on
    the ``+1`` and ``-1`` eigenspaces. ``alpha_map[i]``, ``beta_map[i]`` and
    ``gamma_map[i]`` are the corners of the ``i``-th base basis element.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    base: StarAlgebra
    alpha: StarHom
    delta: StarHom
    alpha_map: np.ndarray
    beta_map: np.ndarray
    gamma_map: np.ndarray
    plus_basis: np.ndarray
    minus_basis: np.ndarray
    eigenprojections: tuple[np.ndarray, np.ndarray]

    def beta(self, a: CMatrix) -> CMatrix:
        """Corner ``H_-1 -> H_1`` of ``pi(a)``."""
        return np.tensordot(self.base.coordinates(a), self.beta_map, axes=1)

    def gamma(self, a: CMatrix) -> CMatrix:
        """Corner ``H_1 -> H_-1`` of ``pi(a)``."""
        return np.tensordot(self.base.coordinates(a), self.gamma_map, axes=1)


class Classification(BaseModel):
    """Kind of one irreducible representation with the data that proves it."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: ClassKind
    sign: int | None = None
    corners: CornerData | None = None
    inducing_rep: StarHom | None = None
    link: complex | None = None
    eta: complex | None = None


class SplittingCheck(BaseModel):
    """Both sides of the splitting criterion for an irreducible base representation."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    lhs: bool
    rhs: bool
    witness: np.ndarray | None = None

    @property
    def agrees(self) -> bool:
        """The two sides coincide."""
        return self.lhs == self.rhs


class ZExtension(BaseModel):
    """Representation of the crossed product by Z obtained by rescaling ``W``."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    base_rep: StarHom
    lam: complex
    wz_image: np.ndarray
    irreducible: bool


def _base_rep(pi: StarHom, crossed: CrossedProduct) -> StarHom:
    return compose(pi, crossed.embed, name=f"{pi.name}|A")


def _check_vanishes(
    maps: dict[str, np.ndarray], tol: TolerancePolicy, scale: float
) -> None:
    for label, values in maps.items():
        if values.size and not tol.is_zero(hs_norm(values), scale):
            raise NumericalToleranceError(f"corner {label} does not vanish where it must")


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def corner_maps(
    pi: StarHom,
    crossed: CrossedProduct,
    tol: TolerancePolicy | None = None,
    seed: int | None = None,
) -> CornerData:
    """Corner maps of ``pi`` on the base relative to the eigenspaces of ``pi(W)``.

    Args:
        pi: Representation of ``crossed.algebra`` with ``pi(W)`` non-scalar.
        crossed: The crossed product.
        tol: Tolerance policy, defaults to the configured one.
        seed: Seed for the irreducibility checks.

    Returns:
        The corner data; ``alpha`` and ``delta`` vanish on the odd part, ``beta``
        and ``gamma`` on the fixed-point algebra.

    Raises:
        InvalidInputError: If ``pi(W)`` is scalar.
        NumericalToleranceError: If the spectrum is not ``{-1, 1}`` or a
            vanishing condition fails.
    """
    tol = resolve_tolerance(tol)
    w = pi(crossed.symmetry)
    parts = herm_spectral(w, tol)
    if len(parts) == 1:
        raise InvalidInputError("no corner decomposition in Type 1")
    values = [c.eigenvalue for c in parts]
    expected = (1.0, -1.0)
    if len(parts) != 2 or not all(
        tol.is_zero(x - s, 1.0) for x, s in zip(values, expected, strict=True)
    ):
        raise NumericalToleranceError(f"spectrum of pi(W) is {values}, expected {{-1, 1}}")
    (_, plus), (_, minus) = parts
    v1, vm = range_basis(plus), range_basis(minus)
    graded = grading(crossed.sigma, tol)
    fixed = graded.fixed_algebra()
    pi_base = _base_rep(pi, crossed)

    def corners_of(elements: np.ndarray, left: CMatrix, right: CMatrix) -> np.ndarray:
        return np.stack([adjoint(left) @ pi_base(b) @ right for b in elements])

    alpha = representation(fixed, corners_of(fixed.basis, v1, v1), "alpha")
    delta = representation(fixed, corners_of(fixed.basis, vm, vm), "delta")
    odd = graded.odd_basis
    if len(odd):
        _check_vanishes(
            {
                "alpha on A_-1": corners_of(odd, v1, v1),
                "delta on A_-1": corners_of(odd, vm, vm),
            },
            tol,
            float(len(odd)),
        )
    _check_vanishes(
        {
            "beta on A_1": corners_of(fixed.basis, v1, vm),
            "gamma on A_1": corners_of(fixed.basis, vm, v1),
        },
        tol,
        float(fixed.dim),
    )
    for corner in (alpha, delta):
        check_star_hom(corner, tol)
        if not is_irreducible(corner, tol, seed):
            raise NumericalToleranceError(f"corner {corner.name} is reducible")
    return CornerData(
        base=crossed.base,
        alpha=alpha,
        delta=delta,
        alpha_map=corners_of(crossed.base.basis, v1, v1),
        beta_map=corners_of(crossed.base.basis, v1, vm),
        gamma_map=corners_of(crossed.base.basis, vm, v1),
        plus_basis=v1,
        minus_basis=vm,
        eigenprojections=(plus, minus),
    )


def _recover_inducing_rep(
    corners: CornerData,
    witness: CMatrix,
    crossed: CrossedProduct,
    tol: TolerancePolicy,
) -> tuple[StarHom, complex, complex]:
    """Representation ``phi = alpha + eta beta'`` of the base with ``pi = ind(phi)``.

    With ``w alpha w* = delta``, ``beta' = beta w`` and ``gamma' = w* gamma``
    are linked on the odd part by a unimodular scalar ``gamma' = lam beta'``;
    ``eta`` is its principal square root.
    """
    odd = grading(crossed.sigma, tol).odd_basis
    betas = [corners.beta(o) @ witness for o in odd]
    gammas = [adjoint(witness) @ corners.gamma(o) for o in odd]
    weight = sum(np.vdot(b, b).real for b in betas)
    if tol.is_zero(weight, 1.0):
        raise NumericalToleranceError("off-diagonal corners vanish on the odd part")
    lam = complex(sum(np.vdot(b, g) for b, g in zip(betas, gammas, strict=True)) / weight)
    residual = sum(hs_norm(g - lam * b) for b, g in zip(betas, gammas, strict=True))
    if not tol.is_zero(residual, len(odd)) or not tol.is_zero(abs(lam) - 1.0, 1.0):
        raise NumericalToleranceError(
            f"corners are not linked by a unimodular scalar (lambda={lam})"
        )
    eta = complex(np.sqrt(lam))
    # beta vanishes on A_1
    images = corners.alpha_map + eta * corners.beta_map @ witness
    phi = representation(crossed.base, images, name="phi")
    try:
        check_star_hom(phi, tol, check_target=False)
    except InvalidInputError as e:
        raise NumericalToleranceError(f"recovered inducing representation is invalid: {e}") from e
    return phi, lam, eta


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def classify(
    pi: StarHom,
    crossed: CrossedProduct,
    tol: TolerancePolicy | None = None,
    seed: int | None = None,
) -> Classification:
    """Classify an irreducible representation of the crossed product.

    Args:
        pi: Irreducible representation of ``crossed.algebra``.
        crossed: The crossed product.
        tol: Tolerance policy, defaults to the configured one.
        seed: Seed for the randomized algebra routines.

    Returns:
        Type1 with the sign of ``pi(W)``, Type2Split with its corners, or
        Type2Induced with its corners and the recovered inducing representation.

    Raises:
        InvalidInputError: If ``pi`` is reducible.
    """
    tol = resolve_tolerance(tol)
    if not is_irreducible(pi, tol, seed):
        raise InvalidInputError("classification requires an irreducible input")
    w = pi(crossed.symmetry)
    if is_scalar(w, tol):
        sign = 1 if np.trace(w).real > 0 else -1
        return Classification(kind=ClassKind.TYPE1, sign=sign)
    corners = corner_maps(pi, crossed, tol, seed)
    equivalence = unitarily_equivalent(corners.alpha, corners.delta, tol, seed)
    if not equivalence.equivalent:
        return Classification(kind=ClassKind.TYPE2_SPLIT, corners=corners)
    phi, lam, eta = _recover_inducing_rep(corners, equivalence.witness, crossed, tol)
    return Classification(
        kind=ClassKind.TYPE2_INDUCED, corners=corners, inducing_rep=phi, link=lam, eta=eta
    )


def reinduction_matches(
    pi: StarHom,
    classification: Classification,
    crossed: CrossedProduct,
    tol: TolerancePolicy | None = None,
    seed: int | None = None,
) -> bool:
    """Whether inducing the recovered ``phi`` gives back ``pi`` up to equivalence."""
    if classification.inducing_rep is None:
        return False
    induced = induce(classification.inducing_rep, crossed.sigma, crossed, tol)
    return unitarily_equivalent(induced, pi, tol, seed).equivalent


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def splitting_check(
    pi: StarHom,
    sigma: OrderTwoAutomorphism,
    tol: TolerancePolicy | None = None,
    seed: int | None = None,
) -> SplittingCheck:
    """Compare both sides of the splitting criterion for an irreducible ``pi`` of the base.

    The left side asks for a non-scalar unitary ``u`` with ``u**2 = 1`` and
    ``u pi u* = pi o sigma``; the right side asks that ``pi`` restricted to the
    fixed-point algebra is a sum of two inequivalent irreducibles, each once.
    Scalar ``u`` are excluded since ``sigma = id``, ``u = 1`` would otherwise
    satisfy the left side for every ``pi``.

    Raises:
        InvalidInputError: If ``pi`` is reducible.
    """
    tol = resolve_tolerance(tol)
    if not is_irreducible(pi, tol, seed):
        raise InvalidInputError("the splitting criterion needs an irreducible representation")
    u = order_two_intertwiner(pi, sigma, tol, seed)
    lhs = u is not None and not is_scalar(u, tol)
    fixed = grading(sigma, tol).fixed_algebra()
    decomposition = decompose_rep(restrict(pi, fixed), tol, seed)
    rhs = len(decomposition.classes) == 2 and decomposition.multiplicities == [1, 1]
    result = SplittingCheck(lhs=lhs, rhs=rhs, witness=u if lhs else None)
    if not result.agrees:
        logger.warning("splitting criterion disagrees for %s: lhs=%s rhs=%s", pi.name, lhs, rhs)
    return result


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def extend_to_z(
    pi2: StarHom,
    crossed: CrossedProduct,
    lam: complex,
    tol: TolerancePolicy | None = None,
    seed: int | None = None,
) -> ZExtension:
    """Extend a representation of the crossed product by Z/2 to one by Z.

    The generator of Z acts by ``lam * pi2(W)``.

    Raises:
        InvalidInputError: If ``|lam| != 1``.
        NumericalToleranceError: If covariance or ``wz**2 = lam**2`` fails.
        PropertyViolationError: If the extension is irreducible while ``pi2`` is
            not, or the other way round.
    """
    tol = resolve_tolerance(tol)
    if not tol.is_zero(abs(lam) - 1.0, 1.0):
        raise InvalidInputError(f"lambda must have modulus 1, got |lambda| = {abs(lam)}")
    wz = lam * pi2(crossed.symmetry)
    size = wz.shape[0]
    for i, a in enumerate(crossed.base.basis):
        lhs = wz @ pi2(crossed.embed(a)) @ adjoint(wz)
        rhs = pi2(crossed.embed(crossed.sigma(a)))
        if not tol.is_zero(hs_norm(lhs - rhs), hs_norm(rhs)):
            raise NumericalToleranceError(f"Z-extension breaks covariance at basis {i}")
    if not tol.is_zero(hs_norm(wz @ wz - lam**2 * np.eye(size)), size):
        raise NumericalToleranceError("Z-extension generator does not square to lambda**2")
    generators = [*(pi2(crossed.embed(a)) for a in crossed.base.basis), wz]
    generated = generate(size, generators, tol, name="pi(AxZ)")
    irreducible = commutant(generated, tol, seed).dim == 1
    if irreducible != is_irreducible(pi2, tol, seed):
        raise PropertyViolationError(
            f"Z-extension irreducible={irreducible} disagrees with {pi2.name}"
        )
    return ZExtension(base_rep=pi2, wz_image=wz, irreducible=irreducible, lam=lam)

