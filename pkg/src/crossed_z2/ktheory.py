"""Exact-integer K-theory: Smith normal form, abelian groups and K0 of matrix algebras.

Integers are Python ints and integer matrices are ``sympy.Matrix`` objects
underneath, so no arithmetic can overflow.
"""

import json
import logging
from typing import Any, Literal

import pandas as pd
import sympy
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator, validate_call
from sympy import ZZ
from sympy.core.intfunc import igcdex
from sympy.matrices.normalforms import smith_normal_decomp

from crossed_z2.constants import case_fixtures_path
from crossed_z2.exceptions import InvalidInputError, NumericalToleranceError
from crossed_z2.funcs import int_strings
from crossed_z2.numkernel import TolerancePolicy, hs_norm, resolve_tolerance
from crossed_z2.star_algebra import (
    StarAlgebra,
    StarHom,
    compose,
    decompose_rep,
    identity_representation,
    intertwiners,
)

logger = logging.getLogger(__name__)


class IntMatrix(BaseModel):
    """Integer matrix with arbitrary-precision entries."""

    model_config = ConfigDict(frozen=True)

    rows: int = Field(ge=0)
    cols: int = Field(ge=0)
    entries: tuple[tuple[int, ...], ...]

    @model_validator(mode="after")
    def _check_shape(self) -> "IntMatrix":
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entries do not form a {self.rows}x{self.cols} matrix")
        return self

    @classmethod
    def from_rows(cls, rows: list[list[int]], cols: int | None = None) -> "IntMatrix":
        """Build from a list of rows; ``cols`` is needed when there are no rows."""
        width = len(rows[0]) if rows else (cols or 0)
        return cls(rows=len(rows), cols=width, entries=tuple(tuple(r) for r in rows))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        """Zero matrix."""
        return cls(rows=rows, cols=cols, entries=tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, size: int) -> "IntMatrix":
        """Identity matrix."""
        return cls.from_rows([[int(i == j) for j in range(size)] for i in range(size)], size)

    @classmethod
    def from_sympy(cls, matrix: sympy.Matrix) -> "IntMatrix":
        """Convert a sympy matrix with integer entries."""
        return cls(
            rows=matrix.rows,
            cols=matrix.cols,
            entries=tuple(tuple(int(matrix[i, j]) for j in range(matrix.cols)) for i in range(matrix.rows)),
        )

    def to_sympy(self) -> sympy.Matrix:
        """Convert to a sympy matrix."""
        return sympy.Matrix(self.rows, self.cols, [x for row in self.entries for x in row])

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise InvalidInputError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        return IntMatrix.from_rows(
            [
                [sum(a * b for a, b in zip(row, col, strict=True)) for col in zip(*other.entries, strict=True)]
                if other.rows
                else [0] * other.cols
                for row in self.entries
            ],
            other.cols,
        )

    def diagonal(self) -> list[int]:
        """Main diagonal."""
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]

    def to_strings(self) -> list[list[str]]:
        """Entries as decimal strings."""
        return int_strings([list(row) for row in self.entries])


class SmithForm(BaseModel):
    """``U M V = D`` with ``U, V`` unimodular and ``D`` in Smith normal form."""

    model_config = ConfigDict(frozen=True)

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    @property
    def invariants(self) -> list[int]:
        """Nonzero diagonal entries of ``D``."""
        return [x for x in self.d.diagonal() if x]

    @property
    def rank(self) -> int:
        """Rank of ``M``."""
        return len(self.invariants)


class FgAbelianGroup(BaseModel):
    """``Z^free_rank + Z/d_1 + ... + Z/d_k`` with ``d_1 | d_2 | ... | d_k`` and ``d_i >= 2``."""

    model_config = ConfigDict(frozen=True)

    free_rank: int = Field(default=0, ge=0)
    invariant_factors: tuple[int, ...] = ()

    @model_validator(mode="after")
    def _check_chain(self) -> "FgAbelianGroup":
        factors = self.invariant_factors
        if any(f < 2 for f in factors):
            raise ValueError(f"invariant factors must be at least 2, got {factors}")
        if any(b % a for a, b in zip(factors, factors[1:], strict=False)):
            raise ValueError(f"invariant factors must divide each other, got {factors}")
        return self

    @property
    def generator_count(self) -> int:
        """Generators of the standard presentation."""
        return self.free_rank + len(self.invariant_factors)

    @property
    def is_trivial(self) -> bool:
        """Whether the group is 0."""
        return self.generator_count == 0

    def relation_matrix(self) -> IntMatrix:
        """Relations of the standard presentation, torsion generators first."""
        n = self.generator_count
        rows = [[0] * len(self.invariant_factors) for _ in range(n)]
        for i, f in enumerate(self.invariant_factors):
            rows[i][i] = f
        return IntMatrix.from_rows(rows, len(self.invariant_factors))

    def summary(self) -> dict[str, Any]:
        """JSON-ready view with integers as decimal strings."""
        return {
            "free_rank": str(self.free_rank),
            "invariant_factors": int_strings(list(self.invariant_factors)),
            "group": str(self),
        }

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{f}" for f in self.invariant_factors]
        return " + ".join(parts) or "0"


def _elementary(size: int) -> list[list[int]]:
    return [[int(i == j) for j in range(size)] for i in range(size)]


def _normalize_diagonal(
    d: list[list[int]], u: list[list[int]], v: list[list[int]]
) -> None:
    """Make the diagonal nonnegative, zeros last and divisibility-chained, in place.

    Keeps ``U M V = D``: row operations act on ``D`` and ``U``, column
    operations on ``D`` and ``V``.
    """
    n = min(len(d), len(d[0]) if d else 0)
    for i in range(n):
        if d[i][i] < 0:
            d[i] = [-x for x in d[i]]
            u[i] = [-x for x in u[i]]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = d[i][i], d[j][j]
            if a == 0 and b != 0:
                d[i], d[j] = d[j], d[i]
                u[i], u[j] = u[j], u[i]
                for row in d:
                    row[i], row[j] = row[j], row[i]
                for row in v:
                    row[i], row[j] = row[j], row[i]
                continue
            if a == 0 or b % a == 0:
                continue
            # diag(a, b) -> diag(g, ab/g) through [[x, y], [-b/g, a/g]] and [[1, -yb/g], [1, xa/g]]
            x, y, g = igcdex(a, b)
            x, y, g = int(x), int(y), int(g)
            ui, uj = u[i], u[j]
            u[i] = [x * p + y * q for p, q in zip(ui, uj, strict=True)]
            u[j] = [(-b // g) * p + (a // g) * q for p, q in zip(ui, uj, strict=True)]
            for row in v:
                vi, vj = row[i], row[j]
                row[i] = vi + vj
                row[j] = (-y * b // g) * vi + (x * a // g) * vj
            d[i][i], d[j][j] = g, a * b // g


def _verify_smith(m: sympy.Matrix, form: SmithForm) -> None:
    u, d, v = form.u.to_sympy(), form.d.to_sympy(), form.v.to_sympy()
    if u * m * v != d:
        raise NumericalToleranceError("Smith normal form check U M V = D failed")
    for name, x in (("U", u), ("V", v)):
        if x.rows and abs(x.det()) != 1:
            raise NumericalToleranceError(f"Smith normal form factor {name} is not unimodular")
    diag = form.d.diagonal()
    off = [
        d[i, j] for i in range(d.rows) for j in range(d.cols) if i != j and d[i, j] != 0
    ]
    nonzero = [x for x in diag if x]
    if off or any(x < 0 for x in diag) or diag[: len(nonzero)] != nonzero:
        raise NumericalToleranceError(f"Smith normal form diagonal is malformed: {diag}")
    if any(b % a for a, b in zip(nonzero, nonzero[1:], strict=False)):
        raise NumericalToleranceError(f"Smith normal form breaks the divisibility chain: {diag}")


@validate_call
def smith_normal_form(matrix: IntMatrix) -> SmithForm:
    """Smith normal form ``U M V = D`` with unimodular ``U`` and ``V``.

    Raises:
        NumericalToleranceError: If the verification of the decomposition fails.
    """
    if matrix.rows == 0 or matrix.cols == 0:
        return SmithForm(
            u=IntMatrix.identity(matrix.rows),
            d=IntMatrix.zeros(matrix.rows, matrix.cols),
            v=IntMatrix.identity(matrix.cols),
        )
    m = matrix.to_sympy()
    d, u, v = smith_normal_decomp(m, domain=ZZ)
    d_rows = [[int(d[i, j]) for j in range(d.cols)] for i in range(d.rows)]
    u_rows = [[int(u[i, j]) for j in range(u.cols)] for i in range(u.rows)]
    v_rows = [[int(v[i, j]) for j in range(v.cols)] for i in range(v.rows)]
    _normalize_diagonal(d_rows, u_rows, v_rows)
    form = SmithForm(
        u=IntMatrix.from_rows(u_rows),
        d=IntMatrix.from_rows(d_rows),
        v=IntMatrix.from_rows(v_rows),
    )
    _verify_smith(m, form)
    return form


@validate_call
def cokernel(matrix: IntMatrix, target_rank: int) -> FgAbelianGroup:
    """``Z^n / image(M)`` for an ``n``-row matrix ``M``.

    Raises:
        InvalidInputError: If ``M`` does not have ``target_rank`` rows.
    """
    if matrix.rows != target_rank:
        raise InvalidInputError(f"matrix has {matrix.rows} rows, expected {target_rank}")
    form = smith_normal_form(matrix)
    return FgAbelianGroup(
        free_rank=target_rank - form.rank,
        invariant_factors=tuple(x for x in form.invariants if x > 1),
    )


class SubgroupInvariants(BaseModel):
    """Rank and elementary divisors of a subgroup of ``Z^n``."""

    rank: int
    divisors: tuple[int, ...]


@validate_call
def subgroup_invariants(generators: list[list[int]]) -> SubgroupInvariants:
    """Rank and embedding divisors of the subgroup generated by integer vectors.

    Raises:
        InvalidInputError: If the vectors have different lengths.
    """
    if not generators:
        return SubgroupInvariants(rank=0, divisors=())
    n = len(generators[0])
    if any(len(g) != n for g in generators):
        raise InvalidInputError("generators must share one length")
    columns = IntMatrix.from_rows([list(col) for col in zip(*generators, strict=True)], len(generators))
    form = smith_normal_form(columns)
    return SubgroupInvariants(rank=form.rank, divisors=tuple(form.invariants))


@validate_call
def pushout_k(
    g1: FgAbelianGroup,
    g2: FgAbelianGroup,
    g_common: FgAbelianGroup,
    i1: IntMatrix,
    i2: IntMatrix,
) -> FgAbelianGroup:
    """Cokernel of ``x -> (i1 x, -i2 x)`` from ``g_common`` into ``g1 + g2``.

    Torsion in ``g1`` or ``g2`` enters through their relation matrices, so the
    result is ``Z^(n1 + n2) / (image of the combined map + relations)``.

    Raises:
        InvalidInputError: If a matrix shape does not match the generator counts.
    """
    n1, n2, n = g1.generator_count, g2.generator_count, g_common.generator_count
    for name, mat, rows in (("i1", i1, n1), ("i2", i2, n2)):
        if (mat.rows, mat.cols) != (rows, n):
            raise InvalidInputError(
                f"{name} has shape {mat.rows}x{mat.cols}, expected {rows}x{n}"
            )
    r1, r2 = g1.relation_matrix(), g2.relation_matrix()
    columns = [
        [*i1.entries[k], *r1.entries[k], *[0] * r2.cols] for k in range(n1)
    ] + [
        [*(-x for x in i2.entries[k]), *[0] * r1.cols, *r2.entries[k]] for k in range(n2)
    ]
    combined = IntMatrix.from_rows(columns, n + r1.cols + r2.cols)
    return cokernel(combined, n1 + n2)


def k1(alg: StarAlgebra) -> FgAbelianGroup:
    """K1 of a finite-dimensional algebra, always trivial."""
    del alg
    return FgAbelianGroup()


class BlockDescription(BaseModel):
    """One Wedderburn block and the K0 generator attached to it."""

    index: int
    block_size: int
    multiplicity: int
    generator: str


class K0Result(BaseModel):
    """K0 of a finite-dimensional algebra with its generators."""

    group: FgAbelianGroup
    blocks: list[BlockDescription]

    def to_frame(self) -> pd.DataFrame:
        """One row per block."""
        return pd.DataFrame([b.model_dump() for b in self.blocks])


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def k0(
    alg: StarAlgebra, tol: TolerancePolicy | None = None, seed: int | None = None
) -> K0Result:
    """K0 of a finite-dimensional algebra: free on its Wedderburn blocks.

    Each generator is the class of a minimal projection of its block, which
    has ambient rank equal to the multiplicity of the block.
    """
    decomposition = decompose_rep(identity_representation(alg), tol, seed)
    blocks = [
        BlockDescription(
            index=i,
            block_size=c.irrep.carrier_dim,
            multiplicity=c.multiplicity,
            generator=f"[minimal projection of block {i} (M{c.irrep.carrier_dim}), ambient rank {c.multiplicity}]",
        )
        for i, c in enumerate(decomposition.classes)
    ]
    return K0Result(group=FgAbelianGroup(free_rank=len(blocks)), blocks=blocks)


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def k0_map(
    phi: StarHom, tol: TolerancePolicy | None = None, seed: int | None = None
) -> IntMatrix:
    """Multiplicity matrix of the map induced on K0 by a unital homomorphism.

    Entry ``(j, i)`` is the multiplicity of the ``i``-th irreducible class of the
    source in the ``j``-th irreducible class of the target composed with ``phi``.
    Classes are ordered as ``k0`` orders the blocks.

    Raises:
        InvalidInputError: If ``phi`` is not unital.
    """
    tol = resolve_tolerance(tol)
    unit = phi(phi.source.identity())
    if not tol.is_zero(hs_norm(unit - phi.target.identity()), hs_norm(unit)):
        raise InvalidInputError(f"{phi.name} is not unital")
    source_irreps = [
        c.irrep for c in decompose_rep(identity_representation(phi.source), tol, seed).classes
    ]
    target_irreps = [
        c.irrep for c in decompose_rep(identity_representation(phi.target), tol, seed).classes
    ]
    rows = [
        [len(intertwiners(s, compose(t, phi), tol, seed)) for s in source_irreps]
        for t in target_irreps
    ]
    return IntMatrix.from_rows(rows, len(source_irreps))


class PushoutInputs(BaseModel):
    """Inputs of one pushout computation."""

    g1: FgAbelianGroup
    g2: FgAbelianGroup
    g_common: FgAbelianGroup = Field(alias="gG")
    i1: list[list[int]]
    i2: list[list[int]]

    def matrices(self) -> tuple[IntMatrix, IntMatrix]:
        """``i1`` and ``i2`` as IntMatrix, sized from the generator counts."""
        n = self.g_common.generator_count
        return IntMatrix.from_rows(self.i1, n), IntMatrix.from_rows(self.i2, n)

    def compute(self) -> FgAbelianGroup:
        """Run ``pushout_k``."""
        i1, i2 = self.matrices()
        return pushout_k(self.g1, self.g2, self.g_common, i1, i2)


class CaseFixture(BaseModel):
    """K-theory data of one circle crossed product case."""

    case_id: Literal["alpha", "beta"]
    anchor: str
    k0_inputs: PushoutInputs
    k1_inputs: PushoutInputs
    expected_k0: FgAbelianGroup
    expected_k1: FgAbelianGroup
    generator_notes: list[str]
    reading_notes: list[str] = Field(default_factory=list)
    side_check: list[list[int]] | None = None
    expected_side_check: SubgroupInvariants | None = None


class CaseFixtureFile(BaseModel):
    """Versioned fixture file."""

    format: Literal[1]
    cases: dict[str, CaseFixture]


class CaseStudyReport(BaseModel):
    """Computed K-groups of a case next to the expected ones."""

    case_id: str
    anchor: str
    k0: FgAbelianGroup
    k1: FgAbelianGroup
    expected_k0: FgAbelianGroup
    expected_k1: FgAbelianGroup
    side_check: SubgroupInvariants | None = None
    expected_side_check: SubgroupInvariants | None = None
    notes: list[str]

    @property
    def matches(self) -> bool:
        """Every computed value equals its expected value."""
        return (
            self.k0 == self.expected_k0
            and self.k1 == self.expected_k1
            and self.side_check == self.expected_side_check
        )


def load_case_fixtures(path: str | None = None) -> CaseFixtureFile:
    """Read and validate the fixture file.

    Raises:
        InvalidInputError: If the file is missing or malformed.
    """
    target = case_fixtures_path if path is None else path
    try:
        with open(target) as f:
            data = json.load(f)
        return CaseFixtureFile.model_validate(data)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise InvalidInputError(f"cannot load case fixtures from {target}: {e}") from e


@validate_call
def case_study(case_id: str, path: str | None = None) -> CaseStudyReport:
    """Compute K0 and K1 of a fixture case through the pushout and compare.

    Args:
        case_id: ``"alpha"`` or ``"beta"``.
        path: Fixture file, the packaged one by default.

    Raises:
        InvalidInputError: If the case is unknown.
    """
    fixtures = load_case_fixtures(path)
    if case_id not in fixtures.cases:
        raise InvalidInputError(f"unknown case {case_id!r}, expected one of {sorted(fixtures.cases)}")
    case = fixtures.cases[case_id]
    side = None if case.side_check is None else subgroup_invariants(case.side_check)
    report = CaseStudyReport(
        case_id=case.case_id,
        anchor=case.anchor,
        k0=case.k0_inputs.compute(),
        k1=case.k1_inputs.compute(),
        expected_k0=case.expected_k0,
        expected_k1=case.expected_k1,
        side_check=side,
        expected_side_check=case.expected_side_check,
        notes=case.generator_notes + case.reading_notes,
    )
    if not report.matches:
        logger.warning("case %s: computed K-groups differ from the expected ones", case_id)
    return report
