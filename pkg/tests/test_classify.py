import numpy as np
import pytest

from crossed_z2.classify import (
    ClassKind,
    classify,
    corner_maps,
    extend_to_z,
    reinduction_matches,
    splitting_check,
)
from crossed_z2.crossed import (
    crossed_product,
    grading,
    identity_automorphism,
    inner_automorphism,
)
from crossed_z2.exceptions import InvalidInputError
from crossed_z2.models import build_circle, census, evaluation
from crossed_z2.numkernel import adjoint, hs_norm, random_unitary
from crossed_z2.oracles import random_instance
from crossed_z2.star_algebra import (
    block_algebra,
    compose,
    direct_sum,
    full_matrix_algebra,
    identity_representation,
    unitarily_equivalent,
)


@pytest.fixture
def m2_census(m2_crossed, tol):
    return census(m2_crossed, tol, seed=0)


@pytest.fixture
def conj8(tol):
    model = build_circle(8, "conj", tol)
    return model, crossed_product(model.sigma, tol)


def test_m2_classes_split(m2_census):
    assert [c.kind for c in m2_census.classifications] == [ClassKind.TYPE2_SPLIT] * 2


def test_m2_split_corners_are_inequivalent_characters(m2_census, tol):
    for c in m2_census.classifications:
        alpha, delta = c.corners.alpha, c.corners.delta
        assert (alpha.carrier_dim, delta.carrier_dim) == (1, 1)
        assert not unitarily_equivalent(alpha, delta, tol).equivalent


def test_m2_classes_restrict_to_the_identity(m2_census, m2_demo, m2_crossed, tol):
    alg, _ = m2_demo
    for irrep in m2_census.irreps:
        restricted = compose(irrep, m2_crossed.embed)
        assert unitarily_equivalent(restricted, identity_representation(alg), tol, seed=0).equivalent


def test_corner_maps_vanish_where_required(m2_census, m2_crossed, tol):
    graded = grading(m2_crossed.sigma, tol)
    for c in m2_census.classifications:
        corners = c.corners
        for a in graded.fixed_basis:
            assert hs_norm(corners.beta(a)) < 1e-8
            assert hs_norm(corners.gamma(a)) < 1e-8


def test_conj_signs_of_type1_classes(conj8, tol):
    _, crossed = conj8
    result = census(crossed, tol, seed=0)
    signs = sorted(c.sign for c in result.classifications if c.kind == ClassKind.TYPE1)
    assert signs == [-1, -1, 1, 1]
    assert result.counts == (4, 0, 3)


def test_type1_exactly_when_odd_part_vanishes(conj8, tol):
    model, crossed = conj8
    odd = grading(model.sigma, tol).odd_basis
    result = census(crossed, tol, seed=0)
    for irrep, c in zip(result.irreps, result.classifications, strict=True):
        vanishes = all(hs_norm(irrep(crossed.embed(o))) < 1e-8 for o in odd)
        assert vanishes == (c.kind == ClassKind.TYPE1)


def test_flip_classes_are_induced_and_reinduce(flip4, tol):
    crossed = crossed_product(flip4.sigma, tol)
    result = census(crossed, tol, seed=0)
    assert result.counts == (0, 0, 2)
    for irrep, c in zip(result.irreps, result.classifications, strict=True):
        assert c.inducing_rep.carrier_dim == 1
        assert abs(abs(c.link) - 1.0) < 1e-8
        assert reinduction_matches(irrep, c, crossed, tol, seed=0)


def test_reinduction_without_inducing_rep(m2_census, m2_crossed, tol):
    irrep, c = m2_census.irreps[0], m2_census.classifications[0]
    assert not reinduction_matches(irrep, c, m2_crossed, tol)


def test_corner_maps_reject_type1(conj8, tol):
    _, crossed = conj8
    result = census(crossed, tol, seed=0)
    irrep = next(
        i for i, c in zip(result.irreps, result.classifications, strict=True)
        if c.kind == ClassKind.TYPE1
    )
    with pytest.raises(InvalidInputError, match="no corner decomposition in Type 1"):
        corner_maps(irrep, crossed, tol)


def test_classify_rejects_reducible(m2_crossed, tol):
    with pytest.raises(InvalidInputError, match="irreducible input"):
        classify(identity_representation(m2_crossed.algebra), m2_crossed, tol)


def test_splitting_check_on_m2(m2_demo, tol):
    alg, sigma = m2_demo
    result = splitting_check(identity_representation(alg), sigma, tol, seed=0)
    assert (result.lhs, result.rhs) == (True, True)
    assert result.witness is not None


def test_splitting_check_with_trivial_automorphism(tol):
    alg = full_matrix_algebra(2)
    result = splitting_check(identity_representation(alg), identity_automorphism(alg), tol)
    assert (result.lhs, result.rhs) == (False, False)
    assert result.agrees


def test_splitting_check_on_flip_point(flip4, tol):
    result = splitting_check(evaluation(flip4, 1), flip4.sigma, tol)
    assert (result.lhs, result.rhs) == (False, False)


def test_splitting_check_rejects_reducible(flip4, tol):
    with pytest.raises(InvalidInputError):
        splitting_check(identity_representation(flip4.algebra), flip4.sigma, tol)


@pytest.mark.parametrize(
    "lam",
    [1.0, 1j, np.exp(2j * np.pi * 0.3)],
    ids=["one", "i", "generic"],
)
def test_extend_to_z(m2_census, m2_crossed, tol, lam):
    irrep = m2_census.irreps[0]
    extension = extend_to_z(irrep, m2_crossed, lam, tol, seed=0)
    np.testing.assert_allclose(extension.wz_image @ extension.wz_image, lam**2 * np.eye(2), atol=1e-9)
    assert extension.irreducible


def test_extend_to_z_rejects_non_unimodular(m2_census, m2_crossed, tol):
    with pytest.raises(InvalidInputError, match="modulus 1"):
        extend_to_z(m2_census.irreps[0], m2_crossed, 2.0, tol)


def test_extend_to_z_of_reducible_rep_is_reducible(m2_census, m2_crossed, tol):
    irrep = m2_census.irreps[0]
    extension = extend_to_z(direct_sum(irrep, irrep), m2_crossed, 1j, tol, seed=0)
    assert not extension.irreducible


def test_extend_to_z_of_identity_rep(m2_crossed, tol):
    pi2 = identity_representation(m2_crossed.algebra)
    extension = extend_to_z(pi2, m2_crossed, -1.0, tol, seed=0)
    assert not extension.irreducible


def test_twisted_block_swap_has_one_induced_class(rng, tol):
    alg = block_algebra([2, 2])
    v = random_unitary(2, rng)
    zero = np.zeros((2, 2), dtype=np.complex128)
    swap = np.block([[zero, v], [adjoint(v), zero]])
    crossed = crossed_product(inner_automorphism(alg, swap, tol), tol)
    result = census(crossed, tol, seed=0)
    assert result.counts == (0, 0, 1)
    assert result.class_dims == [4]
    irrep, c = result.irreps[0], result.classifications[0]
    assert c.inducing_rep.carrier_dim == 2
    assert reinduction_matches(irrep, c, crossed, tol, seed=0)


def test_inner_reflection_on_m3_splits(tol):
    alg = full_matrix_algebra(3)
    sigma = inner_automorphism(alg, np.diag([1.0, 1.0, -1.0]).astype(np.complex128), tol)
    result = census(crossed_product(sigma, tol), tol, seed=0)
    assert result.counts == (0, 2, 0)
    assert result.class_dims == [3, 3]


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(12))
def test_census_of_random_instances_accounts_for_every_class(seed, tol):
    instance = random_instance(np.random.default_rng([seed, 0]), tol=tol)
    crossed = crossed_product(instance.sigma, tol)
    result = census(crossed, tol, seed=seed)
    assert sum(d * d for d in result.class_dims) == crossed.algebra.dim
    assert sum(result.counts) == result.class_count
    for d, c in zip(result.class_dims, result.classifications, strict=True):
        if c.kind == ClassKind.TYPE2_INDUCED:
            assert d == 2 * c.inducing_rep.carrier_dim
