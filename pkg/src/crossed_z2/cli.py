"""Command-line entry point.

Every command writes one JSON report on standard output and a readable
summary on standard error. Exit codes: 0 success, 2 invalid input, 3
numerical tolerance failure, 4 property violation.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Literal, NamedTuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from crossed_z2.classify import ClassKind, extend_to_z, reinduction_matches, splitting_check
from crossed_z2.config import get_settings
from crossed_z2.constants import (
    EXIT_INVALID_INPUT,
    EXIT_OK,
    EXIT_PROPERTY_VIOLATION,
    EXIT_TOLERANCE,
)
from crossed_z2.crossed import (
    CrossedProduct,
    OrderTwoAutomorphism,
    crossed_product,
    faithfulness_check,
    grading,
    grading_residual,
    induction_criteria,
    make_automorphism,
    structure_report,
)
from crossed_z2.exceptions import (
    InvalidInputError,
    NumericalToleranceError,
    PropertyViolationError,
)
from crossed_z2.funcs import decode_matrix, encode_matrix, int_strings, set_pandas_setup
from crossed_z2.ktheory import (
    IntMatrix,
    PushoutInputs,
    case_study,
    k0,
    k0_map,
    smith_normal_form,
)
from crossed_z2.models import (
    CircleModel,
    build_circle,
    build_m2_demo,
    census,
    evaluation,
    induced_points,
)
from crossed_z2.numkernel import TolerancePolicy
from crossed_z2.oracles import induction_campaign, oracle_suite
from crossed_z2.star_algebra import (
    StarAlgebra,
    StarHom,
    decompose_rep,
    generate,
    identity_representation,
)

logger = logging.getLogger(__name__)

# short names accepted by ``verify --lemma``
LEMMA_CHECKS = {"central": "dependence", "central2": "phase", "rep0": "induction"}


class AlgebraFile(BaseModel):
    """JSON description of an algebra by generators, with an optional automorphism."""

    format: Literal[1]
    name: str = "A"
    ambient_dim: int = Field(ge=1)
    generators: list[list[Any]] = Field(min_length=1)
    automorphism: list[list[Any]] | None = None

    def build(
        self, tol: TolerancePolicy
    ) -> tuple[StarAlgebra, OrderTwoAutomorphism | None]:
        """Generate the algebra and validate the automorphism.

        Raises:
            InvalidInputError: Naming the offending entry or condition.
        """
        gens = [decode_matrix(g, f"generators[{i}]") for i, g in enumerate(self.generators)]
        alg = generate(self.ambient_dim, gens, tol, name=self.name)
        if self.automorphism is None:
            return alg, None
        images = [
            decode_matrix(g, f"automorphism[{i}]") for i, g in enumerate(self.automorphism)
        ]
        return alg, make_automorphism(alg, images, gens, tol)


def load_algebra_file(path: str | Path) -> AlgebraFile:
    """Read and validate an algebra file.

    Raises:
        InvalidInputError: If the file cannot be read or does not match the schema.
    """
    try:
        with open(path) as f:
            data = json.load(f)
        return AlgebraFile.model_validate(data)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise InvalidInputError(f"cannot load algebra file {path}: {e}") from e


class Report(BaseModel):
    """Machine-readable outcome of one command."""

    command: list[str]
    seed: int
    tolerance: dict[str, float]
    results: dict[str, Any]
    anchor: str
    exit_code: int
    elapsed_seconds: float


class CommandResult(NamedTuple):
    """What a handler hands back to ``run``."""

    results: dict[str, Any]
    anchor: str
    exit_code: int = EXIT_OK
    table: pd.DataFrame | None = None


class Selected(NamedTuple):
    """Algebra and automorphism chosen on the command line."""

    label: str
    algebra: StarAlgebra
    sigma: OrderTwoAutomorphism
    circle: CircleModel | None


def _select(args: argparse.Namespace, tol: TolerancePolicy) -> Selected:
    if args.algebra:
        alg, sigma = load_algebra_file(args.algebra).build(tol)
        if sigma is None:
            raise InvalidInputError(f"{args.algebra} has no automorphism")
        return Selected(alg.name, alg, sigma, None)
    if args.model == "m2":
        alg, sigma = build_m2_demo()
        return Selected("m2", alg, sigma, None)
    model = build_circle(args.n, "flip" if args.model == "circle-flip" else "conj", tol)
    return Selected(f"{args.model} n={args.n}", model.algebra, model.sigma, model)


def _complex_pair(z: complex | None) -> list[float] | None:
    return None if z is None else [float(np.real(z)), float(np.imag(z))]


def _census_results(crossed: CrossedProduct, selected: Selected, tol: TolerancePolicy, seed: int) -> tuple[dict[str, Any], pd.DataFrame]:
    result = census(crossed, tol, seed)
    results: dict[str, Any] = {
        "model": selected.label,
        "counts": list(result.counts),
        "class_dims": result.class_dims,
        "classes": result.records,
    }
    if selected.circle is not None:
        results["induced_points"] = [list(p) for p in induced_points(selected.circle, result, tol)]
        results["fixed_points"] = selected.circle.fixed_points()
    return results, result.to_frame()


def cmd_grading(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    del seed
    selected = _select(args, tol)
    graded = grading(selected.sigma, tol)
    residual = grading_residual(selected.sigma, graded)
    if not tol.is_zero(residual, 1.0):
        raise NumericalToleranceError(f"grading reconstruction residual {residual}")
    return CommandResult(
        {"model": selected.label, "dims": list(graded.dims), "residual": residual},
        "every element splits uniquely into a fixed and an odd part",
    )


def cmd_crossed_product(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    del seed
    selected = _select(args, tol)
    report = structure_report(crossed_product(selected.sigma, tol), tol)
    return CommandResult(
        {"model": selected.label, **report.model_dump()},
        "the crossed product is the span of psi(a) + psi(b) W, of twice the dimension",
        EXIT_OK if report.passed else EXIT_TOLERANCE,
    )


def cmd_classify(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    selected = _select(args, tol)
    crossed = crossed_product(selected.sigma, tol)
    result = census(crossed, tol, seed)
    rows = []
    for record, irrep, cls in zip(result.records, result.irreps, result.classifications, strict=True):
        row = {**record, "link": _complex_pair(cls.link), "eta": _complex_pair(cls.eta)}
        if cls.kind == ClassKind.TYPE2_INDUCED:
            row["reinduction_matches"] = reinduction_matches(irrep, cls, crossed, tol, seed)
        rows.append(row)
    splitting = []
    for c in decompose_rep(identity_representation(selected.algebra), tol, seed).classes:
        check = splitting_check(c.irrep, selected.sigma, tol, seed)
        splitting.append({"dim": c.irrep.carrier_dim, "lhs": check.lhs, "rhs": check.rhs})
    ok = all(r.get("reinduction_matches", True) for r in rows) and all(
        s["lhs"] == s["rhs"] for s in splitting
    )
    return CommandResult(
        {"model": selected.label, "classes": rows, "base_splitting": splitting},
        "each irreducible class is Type1, Type2Split or Type2Induced",
        EXIT_OK if ok else EXIT_PROPERTY_VIOLATION,
        pd.DataFrame(rows),
    )


def cmd_induce(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    selected = _select(args, tol)
    if args.rep == "point":
        if selected.circle is None:
            raise InvalidInputError("point representations need a circle model")
        pi: StarHom = evaluation(selected.circle, args.point)
    else:
        pi = identity_representation(selected.algebra)
    crossed = crossed_product(selected.sigma, tol)
    criteria = induction_criteria(pi, selected.sigma, crossed, tol, seed)
    faithful = faithfulness_check(pi, selected.sigma, crossed, tol)
    ok = criteria.consistent and faithful.implication_holds
    return CommandResult(
        {
            "model": selected.label,
            "rep": pi.name,
            "bullet1": criteria.bullet1,
            "bullet2": criteria.bullet2,
            "bullet3": criteria.bullet3,
            **faithful.model_dump(),
        },
        "the induced representation is irreducible iff pi is irreducible and inequivalent to pi o sigma",
        EXIT_OK if ok else EXIT_PROPERTY_VIOLATION,
    )


def cmd_census(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    selected = _select(args, tol)
    results, table = _census_results(crossed_product(selected.sigma, tol), selected, tol, seed)
    return CommandResult(results, "every irreducible class of the crossed product, by kind", table=table)


def cmd_verify(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    check = args.check or LEMMA_CHECKS[args.lemma]
    if check == "induction":
        report = induction_campaign(seed, args.trials, args.max_block, tol)
        anchor = "induction criteria agree and faithfulness is inherited on random instances"
    else:
        report = oracle_suite(check, seed, args.trials, args.dim, tol)
        anchor = (
            "B T A = A T B for all T forces linear dependence"
            if check == "dependence"
            else "A T A* = B T B* for all T forces B = exp(2 i pi theta) A"
        )
    return CommandResult(
        {
            "check": check,
            "trials": report.trials,
            "cases": len(report.rows),
            "failures": [f.model_dump() for f in report.failures],
            "passed": report.passed,
        },
        anchor,
        EXIT_OK if report.passed else EXIT_PROPERTY_VIOLATION,
        report.to_frame(),
    )


def _k0_target(args: argparse.Namespace, selected: Selected, tol: TolerancePolicy) -> StarAlgebra:
    if args.of == "base":
        return selected.algebra
    if args.of == "fixed":
        return grading(selected.sigma, tol).fixed_algebra()
    return crossed_product(selected.sigma, tol).algebra


def cmd_k0(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    selected = _select(args, tol)
    result = k0(_k0_target(args, selected, tol), tol, seed)
    return CommandResult(
        {"model": selected.label, "of": args.of, **result.group.summary(), "blocks": [b.model_dump() for b in result.blocks]},
        "K0 of a finite-dimensional algebra is free on its blocks",
        table=result.to_frame(),
    )


def cmd_k0_map(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    selected = _select(args, tol)
    crossed = crossed_product(selected.sigma, tol)
    if args.map == "embed":
        phi = crossed.embed
    else:
        symmetric = generate(crossed.algebra.ambient_dim, [crossed.symmetry], tol, name="C*(Z2)")
        phi = StarHom(source=symmetric, target=crossed.algebra, images=symmetric.basis, name="i")
    matrix = k0_map(phi, tol, seed)
    return CommandResult(
        {"model": selected.label, "map": args.map, "matrix": matrix.to_strings()},
        "K0 maps of inclusions are multiplicity matrices",
    )


def _parse_json_arg(value: str) -> Any:
    text = value if value.lstrip().startswith(("[", "{")) else Path(value).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"invalid JSON: {e}") from e


def cmd_snf(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    del tol, seed
    rows = _parse_json_arg(args.matrix)
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InvalidInputError("matrix must be a JSON list of integer rows")
    form = smith_normal_form(IntMatrix.from_rows(rows))
    return CommandResult(
        {
            "u": form.u.to_strings(),
            "d": form.d.to_strings(),
            "v": form.v.to_strings(),
            "invariants": int_strings(form.invariants),
        },
        "U M V = D with U, V unimodular and a divisibility chain on D",
    )


def cmd_pushout_k(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    del tol, seed
    inputs = PushoutInputs.model_validate(_parse_json_arg(args.input))
    return CommandResult(
        inputs.compute().summary(),
        "K-theory of an amalgamated free product crossed product as a cokernel",
    )


def cmd_case_study(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    del tol, seed
    report = case_study(args.case)
    results = {
        "case": report.case_id,
        "k0": report.k0.summary(),
        "k1": report.k1.summary(),
        "expected_k0": report.expected_k0.summary(),
        "expected_k1": report.expected_k1.summary(),
        "side_check": None
        if report.side_check is None
        else {"rank": str(report.side_check.rank), "divisors": int_strings(list(report.side_check.divisors))},
        "matches": report.matches,
        "notes": report.notes,
    }
    return CommandResult(
        results, report.anchor, EXIT_OK if report.matches else EXIT_PROPERTY_VIOLATION
    )


def cmd_demo(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    selected = _select(args, tol)
    crossed = crossed_product(selected.sigma, tol)
    structure = structure_report(crossed, tol)
    results, table = _census_results(crossed, selected, tol, seed)
    rank = k0(crossed.algebra, tol, seed).group.free_rank
    if rank != len(results["class_dims"]):
        raise PropertyViolationError(
            f"K0 rank {rank} differs from the class count {len(results['class_dims'])}"
        )
    results |= {
        "grading_dims": list(grading(selected.sigma, tol).dims),
        "structure": structure.model_dump(),
        "k0_rank": rank,
    }
    return CommandResult(
        results,
        "structure, classification and K0 of a gallery crossed product",
        EXIT_OK if structure.passed else EXIT_TOLERANCE,
        table,
    )


def cmd_extend_z(args: argparse.Namespace, tol: TolerancePolicy, seed: int) -> CommandResult:
    selected = _select(args, tol)
    crossed = crossed_product(selected.sigma, tol)
    lam = complex(np.exp(2j * np.pi * args.lambda_turns))
    rows = []
    for i, c in enumerate(decompose_rep(identity_representation(crossed.algebra), tol, seed).classes):
        extension = extend_to_z(c.irrep, crossed, lam, tol, seed)
        rows.append(
            {
                "index": i,
                "dim": c.irrep.carrier_dim,
                "irreducible": extension.irreducible,
                "wz": encode_matrix(extension.wz_image),
            }
        )
    ok = all(r["irreducible"] for r in rows)
    return CommandResult(
        {"model": selected.label, "lambda": _complex_pair(lam), "classes": rows},
        "rescaling W by a unimodular scalar extends irreducibles to the crossed product by Z",
        EXIT_OK if ok else EXIT_PROPERTY_VIOLATION,
        pd.DataFrame([{k: v for k, v in r.items() if k != "wz"} for r in rows]),
    )


COMMANDS = {
    "grading": cmd_grading,
    "crossed-product": cmd_crossed_product,
    "classify": cmd_classify,
    "induce": cmd_induce,
    "census": cmd_census,
    "verify": cmd_verify,
    "k0": cmd_k0,
    "k0-map": cmd_k0_map,
    "snf": cmd_snf,
    "pushout-k": cmd_pushout_k,
    "paper": cmd_case_study,
    "case-study": cmd_case_study,
    "demo": cmd_demo,
    "extend-z": cmd_extend_z,
}


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse the command line."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Seed for randomized steps.")
    common.add_argument("--abs-tol", type=float, default=None, help="Absolute tolerance.")
    common.add_argument("--rel-tol", type=float, default=None, help="Relative tolerance.")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument(
        "--model",
        choices=["m2", "circle-flip", "circle-conj"],
        default="m2",
        help="Gallery model (default: m2).",
    )
    model.add_argument("--n", type=int, default=8, help="Points of a circle model (default: 8).")
    model.add_argument("--algebra", default=None, help="Algebra file, overrides --model.")

    p = argparse.ArgumentParser(
        prog="crossed-z2",
        description="Workbench for crossed products of finite-dimensional algebras by Z/2.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("grading", "crossed-product", "classify", "census", "demo"):
        sub.add_parser(name, parents=[common, model])

    induce = sub.add_parser("induce", parents=[common, model])
    induce.add_argument("--rep", choices=["identity", "point"], default="identity")
    induce.add_argument("--point", type=int, default=0, help="Point index for --rep point.")

    verify = sub.add_parser("verify", parents=[common])
    which = verify.add_mutually_exclusive_group(required=True)
    which.add_argument("--check", choices=["dependence", "phase", "induction"])
    which.add_argument("--lemma", choices=sorted(LEMMA_CHECKS), help="Same checks under their short names.")
    verify.add_argument("--trials", type=int, default=200)
    verify.add_argument("--dim", type=int, default=6, help="Largest matrix size for the pair checks.")
    verify.add_argument("--max-block", type=int, default=3, help="Largest block of random algebras.")

    k0_parser = sub.add_parser("k0", parents=[common, model])
    k0_parser.add_argument("--of", choices=["crossed", "base", "fixed"], default="crossed")

    k0_map_parser = sub.add_parser("k0-map", parents=[common, model])
    k0_map_parser.add_argument("--map", choices=["embed", "symmetry"], default="embed")

    snf = sub.add_parser("snf", parents=[common])
    snf.add_argument("--matrix", required=True, help="JSON list of integer rows, or a path.")

    pushout = sub.add_parser("pushout-k", parents=[common])
    pushout.add_argument("--input", required=True, help="JSON object with g1, g2, gG, i1, i2, or a path.")

    case = sub.add_parser("paper", aliases=["case-study"], parents=[common])
    case.add_argument("--case", choices=["alpha", "beta"], required=True)

    extend = sub.add_parser("extend-z", parents=[common, model])
    extend.add_argument("--lambda-turns", type=float, default=0.0, help="lambda = exp(2 i pi T).")

    return p.parse_args(argv)


def _exit_code_for(error: Exception) -> int:
    if isinstance(error, NumericalToleranceError):
        return EXIT_TOLERANCE
    if isinstance(error, PropertyViolationError):
        return EXIT_PROPERTY_VIOLATION
    return EXIT_INVALID_INPUT


def run(argv: list[str] | None = None) -> int:
    """Run one command, print its report and return the exit code."""
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    start = time.perf_counter()
    seed = 0
    tol = TolerancePolicy()
    try:
        settings = get_settings()
        logging.basicConfig(
            level=settings.log_level,
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        seed = settings.seed if args.seed is None else args.seed
        tol = TolerancePolicy(
            abs_tol=settings.abs_tol if args.abs_tol is None else args.abs_tol,
            rel_tol=settings.rel_tol if args.rel_tol is None else args.rel_tol,
        )
        outcome = COMMANDS[args.command](args, tol, seed)
    except (InvalidInputError, NumericalToleranceError, PropertyViolationError, ValidationError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        outcome = CommandResult({"error": str(e)}, "", _exit_code_for(e))
    report = Report(
        command=list(sys.argv[1:] if argv is None else argv),
        seed=seed,
        tolerance={"abs_tol": tol.abs_tol, "rel_tol": tol.rel_tol},
        results=outcome.results,
        anchor=outcome.anchor,
        exit_code=outcome.exit_code,
        elapsed_seconds=time.perf_counter() - start,
    )
    print(report.model_dump_json(indent=2))
    set_pandas_setup()
    summary = (
        outcome.table
        if outcome.table is not None
        else pd.Series({k: v for k, v in outcome.results.items() if not isinstance(v, list | dict)})
    )
    print(f"{args.command}: exit {outcome.exit_code}", file=sys.stderr)
    if len(summary):
        print(summary.to_string(), file=sys.stderr)
    return outcome.exit_code


def main() -> None:
    """Console script entry point."""
    sys.exit(run())
