"""Built-in example algebras: the inner M2 example and discretized circles.

Circle models replace functions on the circle by functions on the ``n``-th
roots of unity ``w_k = exp(2 i pi k / n)``, ``k = 0..n-1``, stored as the
diagonal algebra on ``C^n``. Points are always reported by their index ``k``.
"""

import logging
from typing import Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, validate_call

from crossed_z2.classify import Classification, ClassKind, classify
from crossed_z2.crossed import (
    CrossedProduct,
    OrderTwoAutomorphism,
    induce,
    inner_automorphism,
    make_automorphism,
    twist,
)
from crossed_z2.exceptions import InvalidInputError, NumericalToleranceError, PropertyViolationError
from crossed_z2.numkernel import TolerancePolicy, hs_norm, matrix_unit, resolve_tolerance
from crossed_z2.star_algebra import (
    StarAlgebra,
    StarHom,
    decompose_rep,
    diagonal_algebra,
    full_matrix_algebra,
    identity_representation,
    representation,
)

logger = logging.getLogger(__name__)

ModelName = Literal["m2", "circle-flip", "circle-conj"]


class CircleModel(BaseModel):
    """Functions on the ``n``-th roots of unity with an order-two point map."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(ge=2)
    point_map: Literal["flip", "conj"]
    algebra: StarAlgebra
    sigma: OrderTwoAutomorphism
    z_element: np.ndarray

    def image_point(self, k: int) -> int:
        """Index of the image of ``w_k`` under the point map."""
        return _point_image(self.point_map, self.n, k)

    def fixed_points(self) -> list[int]:
        """Indices fixed by the point map."""
        return [k for k in range(self.n) if self.image_point(k) == k]

    def orbits(self) -> list[tuple[int, int]]:
        """Two-point orbits ``(k, image)`` with ``k`` the smaller index."""
        return [(k, self.image_point(k)) for k in range(self.n) if k < self.image_point(k)]


class Census(BaseModel):
    """Tally of the irreducible classes of a crossed product by kind."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    type1_count: int
    type2split_count: int
    type2induced_count: int
    class_dims: list[int]
    irreps: list[StarHom]
    classifications: list[Classification]
    records: list[dict]

    @property
    def counts(self) -> tuple[int, int, int]:
        """``(Type1, Type2Split, Type2Induced)``."""
        return self.type1_count, self.type2split_count, self.type2induced_count

    @property
    def class_count(self) -> int:
        """Number of irreducible classes."""
        return len(self.class_dims)

    def to_frame(self) -> pd.DataFrame:
        """One row per class."""
        return pd.DataFrame(self.records)


def _point_image(point_map: str, n: int, k: int) -> int:
    if point_map == "flip":
        return (k + n // 2) % n
    return (-k) % n


@validate_call
def build_m2_demo() -> tuple[StarAlgebra, OrderTwoAutomorphism]:
    """``M2`` with ``sigma = Ad diag(1, -1)``."""
    alg = full_matrix_algebra(2)
    return alg, inner_automorphism(alg, np.diag([1.0, -1.0]).astype(np.complex128))


@validate_call
def build_circle(
    n: int, point_map: Literal["flip", "conj"], tol: TolerancePolicy | None = None
) -> CircleModel:
    """Discretized circle with ``w -> -w`` (flip) or ``w -> conj(w)`` (conj).

    Args:
        n: Number of roots of unity, at least 2.
        point_map: ``"flip"`` or ``"conj"``.
        tol: Tolerance policy, defaults to the configured one.

    Returns:
        The validated model.

    Raises:
        InvalidInputError: If ``n < 2`` or the flip is asked for odd ``n``.
    """
    tol = resolve_tolerance(tol)
    if n < 2:
        raise InvalidInputError(f"circle models need n >= 2, got {n}")
    if point_map == "flip" and n % 2:
        raise InvalidInputError("flip undefined: -1 is not an n-th root of unity for odd n")
    alg = diagonal_algebra(n)
    points = [_point_image(point_map, n, k) for k in range(n)]
    images = [matrix_unit(n, p, p) for p in points]
    sigma = make_automorphism(alg, images, tol=tol)
    z = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    expected = -z if point_map == "flip" else np.conj(z)
    if not tol.is_zero(hs_norm(sigma(z) - expected), hs_norm(z)):
        raise NumericalToleranceError(f"sigma does not act on z as the {point_map} map")
    model = CircleModel(n=n, point_map=point_map, algebra=alg, sigma=sigma, z_element=z)
    logger.debug("circle model n=%d %s: fixed points %s", n, point_map, model.fixed_points())
    return model


@validate_call
def build_model(
    name: ModelName, n: int = 8, tol: TolerancePolicy | None = None
) -> tuple[StarAlgebra, OrderTwoAutomorphism]:
    """Algebra and automorphism of a gallery model addressed by name."""
    if name == "m2":
        return build_m2_demo()
    model = build_circle(n, "flip" if name == "circle-flip" else "conj", tol)
    return model.algebra, model.sigma


def evaluation(model: CircleModel, k: int) -> StarHom:
    """Character ``f -> f(w_k)`` of the circle algebra.

    Raises:
        InvalidInputError: If ``k`` is not a point index.
    """
    if not 0 <= k < model.n:
        raise InvalidInputError(f"point index {k} outside 0..{model.n - 1}")
    images = [np.array([[b[k, k]]]) for b in model.algebra.basis]
    return representation(model.algebra, images, name=f"ev{k}")


def evaluation_point(phi: StarHom, tol: TolerancePolicy | None = None) -> int:
    """Index ``k`` of a point-evaluation character of a diagonal algebra.

    Raises:
        InvalidInputError: If ``phi`` is not a point evaluation.
    """
    tol = resolve_tolerance(tol)
    if phi.carrier_dim != 1:
        raise InvalidInputError(f"{phi.name} is not a character")
    d = phi.source.ambient_dim
    values = np.array([phi(matrix_unit(d, k, k))[0, 0] for k in range(d)])
    hits = [k for k, v in enumerate(values) if tol.is_zero(v - 1.0, 1.0)]
    rest = [v for k, v in enumerate(values) if k not in hits]
    if len(hits) != 1 or not all(tol.is_zero(v, 1.0) for v in rest):
        raise InvalidInputError(f"{phi.name} is not a point evaluation")
    return hits[0]


def regular_representation(
    model: CircleModel, crossed: CrossedProduct | None = None, tol: TolerancePolicy | None = None
) -> StarHom:
    """Crossed product acting on functions on the roots of unity times Z/2."""
    return induce(identity_representation(model.algebra), model.sigma, crossed, tol)


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def census(
    crossed: CrossedProduct, tol: TolerancePolicy | None = None, seed: int | None = None
) -> Census:
    """Classify every irreducible class of the crossed product.

    The classes are those of the identity representation of the
    crossed-product algebra.

    Raises:
        PropertyViolationError: If the squared class dimensions do not add up
            to the dimension of the algebra.
    """
    tol = resolve_tolerance(tol)
    decomposition = decompose_rep(identity_representation(crossed.algebra), tol, seed)
    classifications = []
    records = []
    for i, c in enumerate(decomposition.classes):
        result = classify(c.irrep, crossed, tol, seed)
        classifications.append(result)
        records.append(
            {
                "index": i,
                "kind": str(result.kind),
                "dim": c.irrep.carrier_dim,
                "multiplicity": c.multiplicity,
                "sign": result.sign,
            }
        )
    dims = [c.irrep.carrier_dim for c in decomposition.classes]
    total = sum(x * x for x in dims)
    if total != crossed.algebra.dim:
        raise PropertyViolationError(
            f"class dimensions square-sum to {total}, algebra has dimension {crossed.algebra.dim}"
        )
    kinds = [r.kind for r in classifications]
    logger.debug("census of %s: %d classes", crossed.algebra.name, len(dims))
    return Census(
        type1_count=kinds.count(ClassKind.TYPE1),
        type2split_count=kinds.count(ClassKind.TYPE2_SPLIT),
        type2induced_count=kinds.count(ClassKind.TYPE2_INDUCED),
        class_dims=dims,
        irreps=[c.irrep for c in decomposition.classes],
        classifications=classifications,
        records=records,
    )


def induced_points(
    model: CircleModel, result: Census, tol: TolerancePolicy | None = None
) -> list[tuple[int, int]]:
    """Points ``(k, k')`` of the recovered ``phi`` and ``phi o sigma`` of each induced class.

    Raises:
        PropertyViolationError: If ``phi o sigma`` is not the evaluation at the
            image point or coincides with ``phi``.
    """
    points = []
    for c in result.classifications:
        if c.kind != ClassKind.TYPE2_INDUCED:
            continue
        k = evaluation_point(c.inducing_rep, tol)
        k_twisted = evaluation_point(twist(c.inducing_rep, model.sigma), tol)
        if k_twisted != model.image_point(k) or k_twisted == k:
            raise PropertyViolationError(
                f"induced class at point {k} twists to {k_twisted}, expected {model.image_point(k)}"
            )
        points.append((k, k_twisted))
    return points

