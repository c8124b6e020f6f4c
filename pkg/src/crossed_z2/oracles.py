"""Brute-force checks and the randomized campaign for induced representations.

``dependence_check`` tests whether ``B T A = A T B`` for all ``T`` forces ``A``
and ``B`` to be linearly dependent; ``phase_check`` tests whether
``A T A* = B T B*`` for all ``T`` forces ``B = exp(2 i pi theta) A``. Both
decide the hypothesis exhaustively on the matrix units ``E_ij``.
"""

import logging
import time
from typing import Any, Literal

import numpy as np
import pandas as pd
import scipy.linalg as la
from pydantic import BaseModel, ConfigDict, Field, validate_call

from crossed_z2.crossed import (
    OrderTwoAutomorphism,
    crossed_product,
    faithfulness_check,
    grading,
    grading_residual,
    identity_automorphism,
    induce,
    induction_criteria,
    make_automorphism,
    structure_report,
)
from crossed_z2.exceptions import CrossedZ2Error, InvalidInputError
from crossed_z2.funcs import encode_matrix, rounded_record
from crossed_z2.numkernel import (
    CMatrix,
    TolerancePolicy,
    adjoint,
    as_cmatrix,
    hs_inner,
    hs_norm,
    matrix_unit,
    numerical_rank,
    random_complex,
    random_unitary,
    resolve_tolerance,
    seeded_rng,
)
from crossed_z2.star_algebra import (
    StarAlgebra,
    StarHom,
    conjugate_rep,
    representation,
    unitarily_equivalent,
)

logger = logging.getLogger(__name__)


class OracleVerdict(BaseModel):
    """Outcome of a brute-force check of one ``(A, B)`` pair.

    When the hypothesis holds, ``dependence_coefficient`` carries the scalar of
    the conclusion; when it fails, ``witness`` is the first violating matrix
    unit in row-major order.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    hypothesis_holds: bool
    conclusion_holds: bool
    dependence_coefficient: complex | None = None
    theta: float | None = None
    relation: str | None = None
    residual: float | None = None
    witness: np.ndarray | None = None
    witness_index: tuple[int, int] | None = None
    cross_check_agrees: bool | None = None

    def summary(self) -> dict[str, Any]:
        """JSON-ready view."""
        return {
            "hypothesis_holds": self.hypothesis_holds,
            "conclusion_holds": self.conclusion_holds,
            "dependence_coefficient": None
            if self.dependence_coefficient is None
            else [self.dependence_coefficient.real, self.dependence_coefficient.imag],
            "theta": self.theta,
            "relation": self.relation,
            "residual": self.residual,
            "witness": None if self.witness is None else encode_matrix(self.witness),
            "cross_check_agrees": self.cross_check_agrees,
        }


def _square_pair(a: np.ndarray, b: np.ndarray) -> tuple[CMatrix, CMatrix]:
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"need square matrices of one size, got {a.shape} and {b.shape}")
    return a, b


def _linearly_dependent(a: CMatrix, b: CMatrix, tol: TolerancePolicy) -> bool:
    return numerical_rank(np.stack([a.ravel(), b.ravel()]), tol) <= 1


def _cross_check(
    predicate_holds: bool,
    residual_for: Any,
    size: int,
    samples: int,
    seed: int | None,
    tol: TolerancePolicy,
    scale: float,
) -> bool | None:
    """Compare the matrix-unit verdict with random ``T`` samples."""
    if samples == 0:
        return None
    rng = seeded_rng(seed)
    sampled_holds = True
    for _ in range(samples):
        t = random_complex((size, size), rng)
        if not tol.is_zero(hs_norm(residual_for(t)), scale * hs_norm(t)):
            sampled_holds = False
            break
    # a failing sample refutes the hypothesis, passing samples only support it
    return sampled_holds == predicate_holds


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def dependence_check(
    a: np.ndarray,
    b: np.ndarray,
    tol: TolerancePolicy | None = None,
    samples: int = 0,
    seed: int | None = None,
) -> OracleVerdict:
    """Check ``B T A = A T B`` on all matrix units and the linear dependence it forces.

    Args:
        a: Square matrix ``A``.
        b: Square matrix ``B`` of the same size.
        tol: Tolerance policy, defaults to the configured one.
        samples: Random ``T`` drawn to cross-check the matrix-unit verdict.
        seed: Seed for the samples.

    Returns:
        The verdict; ``B = lambda A`` when ``A != 0``, ``A = 0 B`` otherwise.
    """
    tol = resolve_tolerance(tol)
    a, b = _square_pair(a, b)
    size = a.shape[0]
    scale = hs_norm(a) * hs_norm(b)
    witness = None
    for i in range(size):
        for j in range(size):
            # B E_ij A and A E_ij B are outer products
            lhs = np.outer(b[:, i], a[j, :])
            rhs = np.outer(a[:, i], b[j, :])
            if not tol.is_zero(hs_norm(lhs - rhs), scale):
                witness = (i, j)
                break
        if witness:
            break
    cross = _cross_check(
        witness is None, lambda t: b @ t @ a - a @ t @ b, size, samples, seed, tol, scale
    )
    if witness is not None:
        return OracleVerdict(
            hypothesis_holds=False,
            conclusion_holds=_linearly_dependent(a, b, tol),
            witness=matrix_unit(size, *witness),
            witness_index=witness,
            cross_check_agrees=cross,
        )
    norm_a = hs_norm(a)
    if tol.is_zero(norm_a):
        coefficient, relation, residual = 0j, "A = lambda B", norm_a
    else:
        coefficient = hs_inner(a, b) / hs_inner(a, a)
        relation = "B = lambda A"
        residual = hs_norm(b - coefficient * a)
    return OracleVerdict(
        hypothesis_holds=True,
        conclusion_holds=tol.is_zero(residual, 1.0 + norm_a),
        dependence_coefficient=coefficient,
        relation=relation,
        residual=residual,
        cross_check_agrees=cross,
    )


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def phase_check(
    a: np.ndarray,
    b: np.ndarray,
    tol: TolerancePolicy | None = None,
    samples: int = 0,
    seed: int | None = None,
) -> OracleVerdict:
    """Check ``A T A* = B T B*`` on all matrix units and the phase relation it forces.

    Returns:
        The verdict; on success ``theta`` in ``[0, 1)`` with
        ``B = exp(2 i pi theta) A``.
    """
    tol = resolve_tolerance(tol)
    a, b = _square_pair(a, b)
    size = a.shape[0]
    scale = hs_norm(a) ** 2 + hs_norm(b) ** 2
    witness = None
    for i in range(size):
        for j in range(size):
            # A E_ij A* = a_i a_j^*
            lhs = np.outer(a[:, i], np.conj(a[:, j]))
            rhs = np.outer(b[:, i], np.conj(b[:, j]))
            if not tol.is_zero(hs_norm(lhs - rhs), scale):
                witness = (i, j)
                break
        if witness:
            break
    cross = _cross_check(
        witness is None,
        lambda t: a @ t @ adjoint(a) - b @ t @ adjoint(b),
        size,
        samples,
        seed,
        tol,
        scale,
    )
    if witness is not None:
        return OracleVerdict(
            hypothesis_holds=False,
            conclusion_holds=False,
            witness=matrix_unit(size, *witness),
            witness_index=witness,
            cross_check_agrees=cross,
        )
    norm_a = hs_norm(a)
    overlap = hs_inner(a, b)
    theta = 0.0 if tol.is_zero(norm_a) else float(np.angle(overlap) / (2 * np.pi)) % 1.0
    phase = np.exp(2j * np.pi * theta)
    residual = hs_norm(b - phase * a)
    return OracleVerdict(
        hypothesis_holds=True,
        conclusion_holds=tol.is_zero(residual, 1.0 + norm_a),
        dependence_coefficient=complex(phase),
        theta=theta,
        relation="B = exp(2 i pi theta) A",
        residual=residual,
        cross_check_agrees=cross,
    )


class TrialFailure(BaseModel):
    """One failed check with the data needed to replay it."""

    trial: int
    check: str
    expected: Any
    observed: Any
    instance: dict[str, Any]


class CampaignReport(BaseModel):
    """Result of a seeded campaign over random algebras, automorphisms and representations."""

    seed: int
    trials: int
    max_block: int
    failures: list[TrialFailure] = Field(default_factory=list)
    rows: list[dict[str, Any]] = Field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        """No check failed."""
        return not self.failures

    def to_frame(self) -> pd.DataFrame:
        """One row per trial."""
        return pd.DataFrame(self.rows)


class RandomInstance(BaseModel):
    """A random block algebra with an order-two automorphism and a representation.

    The algebra is ``Q (sum_i x_i (x) 1_{m_i}) Q*``; ``sigma`` sends block
    ``i`` to ``u_i x_{tau(i)} u_i*`` where ``tau`` swaps the paired blocks when
    ``swap`` is set; ``pi`` repeats block ``i`` ``n_i`` times and is conjugated
    by ``R``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    blocks: list[tuple[int, int]]
    pair: tuple[int, int] | None
    swap: bool
    rep_multiplicities: list[int]
    hide: np.ndarray
    twists: list[np.ndarray]
    rep_unitary: np.ndarray
    algebra: StarAlgebra
    sigma: OrderTwoAutomorphism
    pi: StarHom

    def tau(self, i: int) -> int:
        """Block permutation of ``sigma``."""
        if self.swap and self.pair is not None and i in self.pair:
            return self.pair[1] if i == self.pair[0] else self.pair[0]
        return i

    @property
    def pi_irreducible(self) -> bool:
        """``pi`` carries exactly one block once."""
        return sorted(self.rep_multiplicities)[-1] == 1 and sum(self.rep_multiplicities) == 1

    @property
    def pi_faithful(self) -> bool:
        """``pi`` carries every block."""
        return min(self.rep_multiplicities) > 0

    def record(self) -> dict[str, Any]:
        """Rounded description for failure replay."""
        return {
            "blocks": self.blocks,
            "pair": self.pair,
            "swap": self.swap,
            "rep_multiplicities": self.rep_multiplicities,
            "hide": rounded_record(self.hide),
            "twists": [rounded_record(u) for u in self.twists],
            "rep_unitary": rounded_record(self.rep_unitary),
        }


def _order_two_unitary(size: int, rng: np.random.Generator) -> CMatrix:
    v = random_unitary(size, rng)
    signs = rng.choice([-1.0, 1.0], size=size)
    return v @ np.diag(signs) @ adjoint(v)


def _draw_blocks(
    rng: np.random.Generator, max_block: int, force: str | None
) -> tuple[list[tuple[int, int]], tuple[int, int] | None, bool]:
    if force == "swap":
        return [(1, 1), (1, 1)], (0, 1), True
    count = int(rng.integers(1, 4))
    blocks = [
        (int(rng.integers(1, max_block + 1)), int(rng.integers(1, 3))) for _ in range(count)
    ]
    pair = None
    if count >= 2 and rng.random() < 0.6:
        pair = (0, 1)
        blocks[1] = (blocks[0][0], int(rng.integers(1, 3)))
    swap = pair is not None and force != "identity" and rng.random() < 0.75
    return blocks, pair, swap


def _draw_rep_multiplicities(
    rng: np.random.Generator, blocks: list[tuple[int, int]], force: str | None
) -> list[int]:
    count = len(blocks)
    if force == "swap" or rng.random() < 0.5:
        chosen = 0 if force == "swap" else int(rng.integers(0, count))
        return [1 if i == chosen else 0 for i in range(count)]
    while True:
        mults = [int(x) for x in rng.integers(0, 3, size=count)]
        if sum(mults) and sum(k * n for (k, _), n in zip(blocks, mults, strict=True)) <= 6:
            return mults


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def random_instance(
    rng: np.random.Generator,
    max_block: int = 3,
    force: Literal["identity", "swap"] | None = None,
    tol: TolerancePolicy | None = None,
) -> RandomInstance:
    """Draw a random algebra, automorphism and representation.

    Args:
        rng: Source of randomness.
        max_block: Largest block size.
        force: ``"identity"`` for ``sigma = id``; ``"swap"`` for the swap of
            the two characters of ``C + C`` with ``pi`` the first character.
        tol: Tolerance policy, defaults to the configured one.
    """
    tol = resolve_tolerance(tol)
    blocks, pair, swap = _draw_blocks(rng, max_block, force)
    d = sum(k * m for k, m in blocks)
    hide = random_unitary(d, rng)
    if force == "identity":
        twists = [np.eye(k, dtype=np.complex128) for k, _ in blocks]
    else:
        twists = [_order_two_unitary(k, rng) for k, _ in blocks]
        if swap and pair is not None:
            v = random_unitary(blocks[pair[0]][0], rng)
            twists[pair[0]], twists[pair[1]] = v, adjoint(v)
    mults = _draw_rep_multiplicities(rng, blocks, force)
    carrier = sum(k * n for (k, _), n in zip(blocks, mults, strict=True))
    rep_unitary = random_unitary(carrier, rng)

    def tau(i: int) -> int:
        if swap and pair is not None and i in pair:
            return pair[1] if i == pair[0] else pair[0]
        return i

    def ambient(parts: list[CMatrix]) -> CMatrix:
        diag = la.block_diag(
            *(np.kron(np.eye(m), x) for x, (_, m) in zip(parts, blocks, strict=True))
        )
        return hide @ diag @ adjoint(hide)

    def rep(parts: list[CMatrix]) -> CMatrix:
        diag = la.block_diag(
            *(np.kron(np.eye(n), x) for x, n in zip(parts, mults, strict=True) if n)
        )
        return rep_unitary @ diag @ adjoint(rep_unitary)

    basis_parts = []
    for i, (k, m) in enumerate(blocks):
        for a in range(k):
            for c in range(k):
                parts = [np.zeros((kk, kk), dtype=np.complex128) for kk, _ in blocks]
                parts[i] = matrix_unit(k, a, c) / np.sqrt(m)
                basis_parts.append(parts)
    algebra = StarAlgebra(
        ambient_dim=d, basis=[ambient(p) for p in basis_parts], name="A"
    )
    images = []
    for parts in basis_parts:
        moved = [twists[j] @ parts[tau(j)] @ adjoint(twists[j]) for j in range(len(blocks))]
        images.append(ambient(moved))
    sigma = (
        identity_automorphism(algebra)
        if force == "identity"
        else make_automorphism(algebra, images, tol=tol)
    )
    pi = representation(algebra, [rep(p) for p in basis_parts], name="pi")
    return RandomInstance(
        blocks=blocks,
        pair=pair,
        swap=swap,
        rep_multiplicities=mults,
        hide=hide,
        twists=twists,
        rep_unitary=rep_unitary,
        algebra=algebra,
        sigma=sigma,
        pi=pi,
    )


def _run_trial(
    trial: int, instance: RandomInstance, tol: TolerancePolicy, seed: int
) -> tuple[dict[str, Any], list[TrialFailure]]:
    failures: list[TrialFailure] = []

    def expect(check: str, expected: Any, observed: Any) -> None:
        if expected != observed:
            failures.append(
                TrialFailure(
                    trial=trial,
                    check=check,
                    expected=expected,
                    observed=observed,
                    instance=instance.record(),
                )
            )

    crossed = crossed_product(instance.sigma, tol)
    structure = structure_report(crossed, tol)
    expect("crossed product structure", True, structure.passed)
    residual = grading_residual(instance.sigma, grading(instance.sigma, tol))
    expect("grading reconstruction", True, tol.is_zero(residual, 1.0))

    criteria = induction_criteria(instance.pi, instance.sigma, crossed, tol, seed)
    expect("bullet1 <=> bullet2", criteria.bullet1, criteria.bullet2)
    if instance.pi_irreducible:
        expect("bullet3 agreement", criteria.bullet1, criteria.bullet3)
        block = instance.rep_multiplicities.index(1)
        expect("induced irreducibility", instance.tau(block) != block, criteria.bullet1)
    else:
        expect("bullet3 not evaluated", "not evaluated", criteria.bullet3)

    faithful = faithfulness_check(instance.pi, instance.sigma, crossed, tol)
    expect("faithfulness implication", True, faithful.implication_holds)
    expect("faithfulness of pi", instance.pi_faithful, faithful.pi_faithful)

    rng = np.random.default_rng([seed, trial, 1])
    rho = conjugate_rep(instance.pi, random_unitary(instance.pi.carrier_dim, rng))
    induced_pi = induce(instance.pi, instance.sigma, crossed, tol)
    induced_rho = induce(rho, instance.sigma, crossed, tol)
    expect(
        "induction functoriality",
        True,
        unitarily_equivalent(induced_pi, induced_rho, tol, seed).equivalent,
    )
    row = {
        "trial": trial,
        "blocks": str(instance.blocks),
        "swap": instance.swap,
        "carrier": instance.pi.carrier_dim,
        "pi_irreducible": instance.pi_irreducible,
        "bullet1": criteria.bullet1,
        "bullet2": criteria.bullet2,
        "bullet3": criteria.bullet3,
        "pi_faithful": faithful.pi_faithful,
        "induced_faithful": faithful.induced_faithful,
    }
    return row, failures


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def induction_campaign(
    seed: int,
    trials: int = 100,
    max_block: int = 3,
    tol: TolerancePolicy | None = None,
    force: Literal["identity", "swap"] | None = None,
) -> CampaignReport:
    """Randomized check of the irreducibility and faithfulness criteria for induction.

    Trial ``t`` draws from ``numpy.random.default_rng([seed, t])``, so trials
    are independent and the report depends only on the arguments.

    Args:
        seed: Master seed.
        trials: Number of random instances, at least 1.
        max_block: Largest block size of the random algebras.
        tol: Tolerance policy, defaults to the configured one.
        force: Optional forced automorphism, see ``random_instance``.

    Returns:
        The campaign report; failures are data, not exceptions.
    """
    if trials < 1 or max_block < 1:
        raise InvalidInputError("trials and max_block must be positive")
    tol = resolve_tolerance(tol)
    start = time.perf_counter()
    report = CampaignReport(seed=seed, trials=trials, max_block=max_block)
    for trial in range(trials):
        instance = random_instance(np.random.default_rng([seed, trial]), max_block, force, tol)
        try:
            row, failures = _run_trial(trial, instance, tol, seed)
        except CrossedZ2Error as e:
            logger.warning("trial %d raised %s", trial, e)
            row = {"trial": trial, "error": str(e)}
            failures = [
                TrialFailure(
                    trial=trial,
                    check="no exception",
                    expected=None,
                    observed=f"{type(e).__name__}: {e}",
                    instance=instance.record(),
                )
            ]
        report.rows.append(row)
        report.failures.extend(failures)
    report.elapsed = time.perf_counter() - start
    if report.failures:
        logger.warning("campaign seed=%d: %d failed checks", seed, len(report.failures))
    return report


def _suite_pair(
    check: str, kind: str, d: int, rng: np.random.Generator
) -> tuple[CMatrix, CMatrix]:
    a = random_complex((d, d), rng)
    if kind == "unrelated":
        return a, random_complex((d, d), rng)
    if kind == "zero":
        return np.zeros((d, d), dtype=np.complex128), random_complex((d, d), rng)
    if check == "dependence":
        return a, complex(*rng.standard_normal(2)) * a
    return a, np.exp(2j * np.pi * rng.random()) * a


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def oracle_suite(
    check: Literal["dependence", "phase"],
    seed: int,
    trials: int = 200,
    max_dim: int = 6,
    tol: TolerancePolicy | None = None,
    samples: int = 2,
) -> CampaignReport:
    """Run a brute-force check on seeded random pairs for every size ``2..max_dim``.

    Pairs cycle through unrelated matrices, related ones (``B = lambda A`` or
    ``B = exp(2 i pi theta) A``) and ``A = 0``. A pair passes when the verdict
    carries either a hypothesis witness or a verified conclusion, and the
    random-sample cross-check agrees.

    Returns:
        A campaign report with one row per pair; ``max_block`` holds ``max_dim``.
    """
    if trials < 1 or max_dim < 2:
        raise InvalidInputError("trials must be positive and max_dim at least 2")
    tol = resolve_tolerance(tol)
    checker = dependence_check if check == "dependence" else phase_check
    kinds = ("unrelated", "related", "zero")
    start = time.perf_counter()
    report = CampaignReport(seed=seed, trials=trials, max_block=max_dim)
    for d in range(2, max_dim + 1):
        for trial in range(trials):
            kind = kinds[trial % len(kinds)]
            a, b = _suite_pair(check, kind, d, np.random.default_rng([seed, d, trial]))
            verdict = checker(a, b, tol, samples, seed + trial)
            decided = (
                verdict.witness is not None
                if not verdict.hypothesis_holds
                else verdict.conclusion_holds
            )
            ok = decided and verdict.cross_check_agrees is not False
            report.rows.append(
                {
                    "dim": d,
                    "trial": trial,
                    "kind": kind,
                    "hypothesis_holds": verdict.hypothesis_holds,
                    "conclusion_holds": verdict.conclusion_holds,
                    "residual": verdict.residual,
                }
            )
            if not ok:
                report.failures.append(
                    TrialFailure(
                        trial=trial,
                        check=f"{check} verdict",
                        expected="witness or verified conclusion",
                        observed=verdict.summary(),
                        instance={"dim": d, "a": rounded_record(a), "b": rounded_record(b)},
                    )
                )
    report.elapsed = time.perf_counter() - start
    return report
