import numpy as np
import pytest

from crossed_z2.exceptions import InvalidInputError
from crossed_z2.numkernel import matrix_unit, random_complex
from crossed_z2.oracles import (
    dependence_check,
    induction_campaign,
    oracle_suite,
    phase_check,
    random_instance,
)
from crossed_z2.star_algebra import check_star_algebra


def test_dependence_of_multiples(tol, rng):
    a = random_complex((3, 3), rng)
    verdict = dependence_check(a, (2 - 1j) * a, tol, samples=2, seed=0)
    assert verdict.hypothesis_holds
    assert verdict.conclusion_holds
    assert verdict.dependence_coefficient == pytest.approx(2 - 1j)
    assert verdict.cross_check_agrees


def test_dependence_witness_for_orthogonal_projections(tol):
    verdict = dependence_check(matrix_unit(2, 0, 0), matrix_unit(2, 1, 1), tol)
    assert not verdict.hypothesis_holds
    assert verdict.witness_index == (0, 1)
    np.testing.assert_array_equal(verdict.witness, matrix_unit(2, 0, 1))
    assert verdict.cross_check_agrees is None


def test_dependence_with_zero_first_matrix(tol, rng):
    verdict = dependence_check(np.zeros((2, 2)), random_complex((2, 2), rng), tol)
    assert verdict.hypothesis_holds
    assert verdict.conclusion_holds
    assert verdict.relation == "A = lambda B"
    assert verdict.dependence_coefficient == 0


def test_dependence_rejects_mismatched_sizes(tol):
    with pytest.raises(InvalidInputError):
        dependence_check(np.eye(2), np.eye(3), tol)


@pytest.mark.parametrize("theta", [0.0, 0.25, 0.7])
def test_phase_recovers_theta(tol, rng, theta):
    a = random_complex((3, 3), rng)
    verdict = phase_check(a, np.exp(2j * np.pi * theta) * a, tol, samples=2, seed=1)
    assert verdict.hypothesis_holds
    assert verdict.conclusion_holds
    assert verdict.theta == pytest.approx(theta, abs=1e-9)
    assert verdict.cross_check_agrees


def test_phase_witness(tol):
    verdict = phase_check(matrix_unit(2, 0, 0), matrix_unit(2, 0, 1), tol)
    assert not verdict.hypothesis_holds
    assert verdict.witness_index == (0, 0)


def test_phase_rejects_real_multiples(tol, rng):
    a = random_complex((2, 2), rng)
    verdict = phase_check(a, 2 * a, tol, samples=3, seed=2)
    assert not verdict.hypothesis_holds
    assert verdict.cross_check_agrees


def test_verdict_summary_is_json_ready(tol):
    summary = phase_check(np.eye(2), 1j * np.eye(2), tol).summary()
    assert summary["theta"] == pytest.approx(0.25)
    assert summary["dependence_coefficient"] == pytest.approx([0.0, 1.0])
    assert summary["witness"] is None


@pytest.mark.parametrize("check", ["dependence", "phase"])
def test_oracle_suite_small(tol, check):
    report = oracle_suite(check, seed=42, trials=12, max_dim=3, tol=tol)
    assert report.passed, report.failures
    assert len(report.rows) == 24
    assert {row["kind"] for row in report.rows} == {"unrelated", "related", "zero"}


@pytest.mark.slow
@pytest.mark.parametrize("check", ["dependence", "phase"])
def test_oracle_suite_full(tol, check):
    report = oracle_suite(check, seed=42, trials=200, max_dim=6, tol=tol)
    assert report.passed, report.failures[:3]
    assert len(report.rows) == 5 * 200


def test_oracle_suite_rejects_bad_arguments():
    with pytest.raises(InvalidInputError):
        oracle_suite("phase", seed=1, max_dim=1)


@pytest.mark.parametrize("seed", range(8))
def test_random_instance_is_a_valid_algebra(tol, seed):
    instance = random_instance(np.random.default_rng(seed), tol=tol)
    check_star_algebra(instance.algebra, tol)
    assert instance.pi.source is instance.algebra
    assert sum(instance.rep_multiplicities) > 0


def test_forced_identity_campaign(tol):
    report = induction_campaign(seed=42, trials=6, tol=tol, force="identity")
    assert report.passed, report.failures
    for row in report.rows:
        assert row["bullet1"] is False
        assert row["bullet2"] is False


def test_forced_swap_campaign(tol):
    report = induction_campaign(seed=42, trials=4, tol=tol, force="swap")
    assert report.passed, report.failures
    for row in report.rows:
        assert (row["bullet1"], row["bullet2"], row["bullet3"]) == (True, True, True)


def test_campaign_is_reproducible(tol):
    first = induction_campaign(seed=7, trials=5, tol=tol)
    second = induction_campaign(seed=7, trials=5, tol=tol)
    assert first.rows == second.rows
    assert first.to_frame().shape[0] == 5


def test_campaign_rejects_zero_trials():
    with pytest.raises(InvalidInputError):
        induction_campaign(seed=1, trials=0)


@pytest.mark.slow
def test_induction_campaign_seed_42(tol):
    report = induction_campaign(seed=42, trials=200, tol=tol)
    assert report.passed, report.failures[:3]
    assert len(report.rows) == 200
