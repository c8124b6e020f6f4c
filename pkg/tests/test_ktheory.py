import numpy as np
import pytest
import scipy.linalg as la

from crossed_z2.exceptions import InvalidInputError
from crossed_z2.ktheory import (
    FgAbelianGroup,
    IntMatrix,
    PushoutInputs,
    _normalize_diagonal,
    case_study,
    cokernel,
    k0,
    k0_map,
    k1,
    load_case_fixtures,
    pushout_k,
    smith_normal_form,
    subgroup_invariants,
)
from crossed_z2.numkernel import matrix_unit
from crossed_z2.star_algebra import (
    StarHom,
    block_algebra,
    compose,
    diagonal_algebra,
    full_matrix_algebra,
    generate,
    identity_representation,
    representation,
)
from tests.conftest import gcd_of_entries, rational_rank

Z = FgAbelianGroup(free_rank=1)
ZERO = FgAbelianGroup()


def free(rank):
    return FgAbelianGroup(free_rank=rank)


@pytest.mark.parametrize(
    ("rows", "expected"),
    [
        ([[2, 0], [0, 3]], [1, 6]),
        ([[1, 0], [0, 1]], [1, 1]),
        ([[2, 4], [6, 8]], [2, 4]),
        ([[0, 0], [0, 5]], [5, 0]),
        ([[4, 6, 0], [6, 9, 0]], [1, 0]),
    ],
)
def test_smith_normal_form_diagonal(rows, expected):
    form = smith_normal_form(IntMatrix.from_rows(rows))
    assert form.d.diagonal() == expected
    assert form.u @ IntMatrix.from_rows(rows) @ form.v == form.d


def test_smith_normal_form_of_empty_matrix():
    form = smith_normal_form(IntMatrix.from_rows([], 3))
    assert (form.d.rows, form.d.cols) == (0, 3)
    assert form.rank == 0


@pytest.mark.parametrize(
    ("diagonal", "expected"),
    [
        ([2, 3], [1, 6]),
        ([-4, 6], [2, 12]),
        ([0, 5], [5, 0]),
        ([6, 4, 9], [1, 6, 36]),
    ],
)
def test_normalize_diagonal_restores_the_divisibility_chain(diagonal, expected):
    size = len(diagonal)
    rows = [[diagonal[i] if i == j else 0 for j in range(size)] for i in range(size)]
    d = [list(r) for r in rows]
    u = [[int(i == j) for j in range(size)] for i in range(size)]
    v = [[int(i == j) for j in range(size)] for i in range(size)]
    _normalize_diagonal(d, u, v)
    assert [d[i][i] for i in range(size)] == expected
    assert IntMatrix.from_rows(u) @ IntMatrix.from_rows(rows) @ IntMatrix.from_rows(v) == IntMatrix.from_rows(d)


def test_smith_normal_form_of_huge_entries():
    big = 10**40
    form = smith_normal_form(IntMatrix.from_rows([[big, 0], [0, big * 6]]))
    assert form.invariants == [big, 6 * big]


@pytest.mark.slow
def test_smith_normal_form_random_suite():
    rng = np.random.default_rng(42)
    for _ in range(500):
        rows, cols = (int(x) for x in rng.integers(1, 7, size=2))
        entries = rng.integers(-20, 21, size=(rows, cols)).tolist()
        matrix = IntMatrix.from_rows(entries)
        form = smith_normal_form(matrix)
        assert form.u @ matrix @ form.v == form.d
        assert abs(form.u.to_sympy().det()) == 1
        assert abs(form.v.to_sympy().det()) == 1
        invariants = form.invariants
        assert all(b % a == 0 for a, b in zip(invariants, invariants[1:], strict=False))
        assert form.rank == rational_rank(matrix)
        if invariants:
            assert invariants[0] == gcd_of_entries(matrix)


def test_int_matrix_rejects_ragged_entries():
    with pytest.raises(ValueError):
        IntMatrix(rows=2, cols=2, entries=((1, 2), (3,)))


def test_int_matrix_product_shape_mismatch():
    with pytest.raises(InvalidInputError):
        IntMatrix.identity(2) @ IntMatrix.identity(3)


def test_int_matrix_strings():
    assert IntMatrix.from_rows([[1, -2]]).to_strings() == [["1", "-2"]]


@pytest.mark.parametrize(
    ("rows", "target_rank", "expected"),
    [
        ([[0], [0]], 2, free(2)),
        ([[2]], 1, FgAbelianGroup(invariant_factors=(2,))),
        ([[1], [-1]], 2, Z),
        ([[2, 0], [0, 4], [0, 0]], 3, FgAbelianGroup(free_rank=1, invariant_factors=(2, 4))),
    ],
)
def test_cokernel(rows, target_rank, expected):
    assert cokernel(IntMatrix.from_rows(rows), target_rank) == expected


def test_cokernel_rejects_row_mismatch():
    with pytest.raises(InvalidInputError):
        cokernel(IntMatrix.from_rows([[1]]), 2)


@pytest.mark.parametrize(
    ("factors", "valid"),
    [((2, 4), True), ((2, 3), False), ((1,), False), ((), True)],
)
def test_invariant_factor_chain(factors, valid):
    if valid:
        FgAbelianGroup(invariant_factors=factors)
    else:
        with pytest.raises(ValueError):
            FgAbelianGroup(invariant_factors=factors)


def test_group_rendering():
    assert str(ZERO) == "0"
    assert str(FgAbelianGroup(free_rank=2, invariant_factors=(2,))) == "Z^2 + Z/2"
    assert FgAbelianGroup(free_rank=1, invariant_factors=(3,)).summary() == {
        "free_rank": "1",
        "invariant_factors": ["3"],
        "group": "Z + Z/3",
    }


@pytest.mark.parametrize(
    ("generators", "rank", "divisors"),
    [
        ([[1, 0, 1, 0], [1, 1, 1, 1], [1, 0, 0, 1]], 3, (1, 1, 1)),
        ([[2, 0]], 1, (2,)),
        ([], 0, ()),
    ],
)
def test_subgroup_invariants(generators, rank, divisors):
    result = subgroup_invariants(generators)
    assert (result.rank, result.divisors) == (rank, divisors)


def test_subgroup_invariants_reject_ragged_vectors():
    with pytest.raises(InvalidInputError):
        subgroup_invariants([[1, 0], [1]])


def test_pushout_beta():
    row = IntMatrix.from_rows([[1, 1]])
    assert pushout_k(Z, Z, free(2), row, row) == Z
    empty = IntMatrix.from_rows([[]])
    assert pushout_k(Z, Z, ZERO, empty, empty) == free(2)


def test_pushout_alpha():
    i = IntMatrix.from_rows([[1, -1], [0, 0], [0, 1]])
    assert pushout_k(free(3), free(3), free(2), i, i) == free(4)
    empty = IntMatrix.from_rows([], 0)
    assert pushout_k(ZERO, ZERO, ZERO, empty, empty) == ZERO


def test_pushout_keeps_torsion():
    two = FgAbelianGroup(invariant_factors=(2,))
    result = pushout_k(two, ZERO, ZERO, IntMatrix.from_rows([[]]), IntMatrix.from_rows([], 0))
    assert result == two


def test_pushout_rank_accounting():
    i1 = IntMatrix.from_rows([[1, 0], [0, 2]])
    i2 = IntMatrix.from_rows([[3, 1]])
    result = pushout_k(free(2), free(1), free(2), i1, i2)
    combined = IntMatrix.from_rows([[1, 0], [0, 2], [-3, -1]])
    assert result.free_rank == 2 + 1 - rational_rank(combined)


def test_pushout_rejects_bad_shapes():
    with pytest.raises(InvalidInputError, match="i1 has shape"):
        pushout_k(Z, Z, free(2), IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[1, 1]]))


def test_pushout_inputs_accept_alias():
    inputs = PushoutInputs.model_validate(
        {
            "g1": {"free_rank": 1},
            "g2": {"free_rank": 1},
            "gG": {"free_rank": 2},
            "i1": [[1, 1]],
            "i2": [[1, 1]],
        }
    )
    assert inputs.compute() == Z


def test_k1_is_trivial():
    assert k1(full_matrix_algebra(3)).is_trivial


def test_k0_examples(tol, m2_crossed):
    assert k0(full_matrix_algebra(2), tol).group == Z
    assert k0(diagonal_algebra(4), tol).group == free(4)
    result = k0(m2_crossed.algebra, tol, seed=0)
    assert result.group == free(2)
    assert [b.block_size for b in result.blocks] == [2, 2]
    assert list(result.to_frame().columns) == ["index", "block_size", "multiplicity", "generator"]


def test_k0_records_multiplicity(tol):
    result = k0(block_algebra([2, 1], [1, 3]), tol)
    assert [(b.block_size, b.multiplicity) for b in result.blocks] == [(2, 1), (1, 3)]


def test_k0_map_of_scalars_into_m2(tol):
    scalars = generate(2, [], tol)
    assert k0_map(identity_representation(scalars), tol).entries == ((2,),)


def test_k0_map_of_diagonal_embedding(tol):
    assert k0_map(identity_representation(diagonal_algebra(2)), tol).entries == ((1, 1),)


def test_k0_map_of_symmetry_span(m2_crossed, tol):
    span = generate(4, [m2_crossed.symmetry], tol, name="C*(W)")
    phi = StarHom(source=span, target=m2_crossed.algebra, images=span.basis, name="inclusion")
    assert k0_map(phi, tol, seed=0).entries == ((1, 1), (1, 1))


def test_k0_map_of_embedding(m2_crossed, tol):
    assert k0_map(m2_crossed.embed, tol, seed=0).entries == ((1,), (1,))


def test_k0_map_of_isomorphism_is_a_permutation(tol):
    alg = diagonal_algebra(2)
    swap = StarHom(source=alg, target=alg, images=[matrix_unit(2, 1, 1), matrix_unit(2, 0, 0)])
    assert k0_map(swap, tol).entries == ((0, 1), (1, 0))


def test_k0_map_rejects_non_unital(tol):
    alg = diagonal_algebra(2)
    corner = representation(alg, [matrix_unit(2, 0, 0), np.zeros((2, 2))])
    with pytest.raises(InvalidInputError, match="not unital"):
        k0_map(corner, tol)


def _block_parts(x, sizes):
    parts, offset = [], 0
    for k in sizes:
        parts.append(x[offset : offset + k, offset : offset + k])
        offset += k
    return parts


def _block_embedding(source, source_sizes, target, multiplicities, name):
    """Unital map sending block ``i`` ``m[j][i]`` times into target block ``j``."""
    images = []
    for x in source.basis:
        parts = _block_parts(x, source_sizes)
        pieces = [
            np.kron(np.eye(m), parts[i])
            for row in multiplicities
            for i, m in enumerate(row)
            if m
        ]
        images.append(la.block_diag(*pieces))
    return StarHom(source=source, target=target, images=images, name=name)


def _random_multiplicities(rng, rows, cols, high):
    while True:
        m = rng.integers(0, high + 1, size=(rows, cols))
        if all(r.any() for r in m):
            return [[int(x) for x in r] for r in m]


def _composable_pair(rng):
    """Random unital ``A -> B -> C`` between block algebras, ``C`` at most 8x8."""
    while True:
        a_sizes = [int(s) for s in rng.integers(1, 3, size=int(rng.integers(1, 3)))]
        m = _random_multiplicities(rng, int(rng.integers(1, 3)), len(a_sizes), 2)
        b_sizes = [sum(k * a for k, a in zip(row, a_sizes, strict=True)) for row in m]
        n = _random_multiplicities(rng, int(rng.integers(1, 3)), len(b_sizes), 1)
        c_sizes = [sum(k * b for k, b in zip(row, b_sizes, strict=True)) for row in n]
        if sum(b_sizes) <= 6 and sum(c_sizes) <= 8:
            break
    a = block_algebra(a_sizes, name="A")
    b = block_algebra(b_sizes, name="B")
    c = block_algebra(c_sizes, name="C")
    return _block_embedding(a, a_sizes, b, m, "phi"), _block_embedding(b, b_sizes, c, n, "psi"), m


def test_k0_map_of_block_embedding_recovers_multiplicities(tol):
    a = block_algebra([1, 2], name="A")
    b = block_algebra([5], name="B")
    phi = _block_embedding(a, [1, 2], b, [[1, 2]], "phi")
    matrix = k0_map(phi, tol, seed=0)
    # classes of A are ordered by descending size
    assert matrix.entries == ((2, 1),)


@pytest.mark.slow
def test_k0_map_functoriality(tol):
    rng = np.random.default_rng(42)
    for _ in range(50):
        phi, psi, m = _composable_pair(rng)
        first = k0_map(phi, tol, seed=0)
        assert sorted(x for row in first.entries for x in row) == sorted(x for row in m for x in row)
        product = k0_map(psi, tol, seed=0) @ first
        assert k0_map(compose(psi, phi), tol, seed=0) == product


def test_case_study_beta():
    report = case_study("beta")
    assert report.matches
    assert report.k0 == Z
    assert report.k1 == free(2)
    assert report.anchor


def test_case_study_alpha():
    report = case_study("alpha")
    assert report.matches
    assert report.k0 == free(4)
    assert report.k1 == ZERO
    assert (report.side_check.rank, report.side_check.divisors) == (3, (1, 1, 1))


def test_case_study_unknown_case():
    with pytest.raises(InvalidInputError, match="unknown case"):
        case_study("gamma")


def test_load_case_fixtures_rejects_missing_file(tmp_path):
    with pytest.raises(InvalidInputError):
        load_case_fixtures(str(tmp_path / "missing.json"))


def test_load_case_fixtures_rejects_wrong_format(tmp_path):
    path = tmp_path / "fixtures.json"
    path.write_text('{"format": 2, "cases": {}}')
    with pytest.raises(InvalidInputError):
        load_case_fixtures(str(path))
