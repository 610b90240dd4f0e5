# main.py
# Entrypoint: command-line front door for the verification suites and the
# ideal / subspace / matrix tooling. Reports go to stdout (or --out) as
# canonical JSON; logs go to stderr.
#
# Exit codes: 0 all checks pass, 1 mathematical violation, 2 input or
# configuration error.

import argparse
import dataclasses
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

from config import get_config, validate_config
from json_io import load_json, write_report
from lattice import (
    IdealSpec,
    SpecError,
    build_subspace,
    carleson_integral,
    check_invariance,
    check_membership,
    distance_to_span,
    enlarge_with_pushforwards,
    make_member,
    require_valid,
    validate_spec,
)
from operators import OperatorTag, apply_tn, matrix_of
from series import TaylorPoly, hardy_norm
from suite_runner import SuiteRunner, case_rng
from suites import GENERATE_CODE, cmd_verify_identities, cmd_verify_norms, random_polynomial

logger = logging.getLogger("main")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT_ERROR = 2

# Random cofactors for `ideal generate` without --cofactors
DEFAULT_COFACTOR_COUNT = 3
COFACTOR_DEGREE_MAX = 4

# Relative span distance accepted for T_n f against the enlarged basis
SPAN_DISTANCE_TOL = 1e-9


def configure_logging(verbose: bool = False, quiet: bool = False):
    """Log to stderr so stdout carries only the report."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    logging.getLogger().setLevel(level)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Base seed for random streams (default: 42)")
    common.add_argument("--trials", type=int, help="Random samples per suite (default: 200)")
    common.add_argument("--n-max", dest="n_max", type=int, help="Largest operator order (default: 5)")
    common.add_argument("--degree", dest="trunc_degree", type=int, help="Truncation degree (default: 45)")
    common.add_argument("--tol", type=float, help="Comparison tolerance; 0 selects the mode default (ideal, subspace: replaces the spec tol)")
    common.add_argument("--mode", choices=["float", "rational"], help="Scalar mode (default: rational)")
    common.add_argument("--out", dest="output", help="Write the report here instead of stdout")
    common.add_argument("--threads", type=int, help="Worker threads (capped by VL_THREADS)")
    common.add_argument("--timing", dest="include_timing", action="store_true", default=None,
                        help="Include wall_time in the report")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--quiet", action="store_true", help="Warnings and errors only")

    parser = argparse.ArgumentParser(
        prog="volterra-lattice",
        description="Verification harness for T_n = M_z + n*V, its similarity to M_z and its invariant subspaces",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    identities = commands.add_parser("verify-identities", parents=[common],
                                     help="Exact operator identities over random polynomials")
    identities.add_argument("--corrupt-operator", dest="corrupt_operator", action="store_true", default=None,
                            help="Self-test: perturb one matrix entry; failures are expected")

    commands.add_parser("verify-norms", parents=[common], help="S_n^2 inequalities with explicit constants")

    ideal = commands.add_parser("ideal", parents=[common], help="Validate, generate members of, or check an ideal")
    ideal.add_argument("action", choices=["validate", "generate", "check"])
    ideal.add_argument("spec", help="IdealSpec JSON file")
    ideal.add_argument("--cofactors", help="JSON list of Series JSON cofactors (generate)")
    ideal.add_argument("--count", type=int, default=DEFAULT_COFACTOR_COUNT,
                       help="Random cofactors when --cofactors is not given (generate)")
    ideal.add_argument("--series", help="Series JSON to check against the spec (check)")

    subspace = commands.add_parser("subspace", parents=[common], help="Build or check an invariant subspace")
    subspace.add_argument("action", choices=["build", "check-invariance"])
    subspace.add_argument("spec", help="IdealSpec JSON file")
    subspace.add_argument("--cofactors", help="JSON list of Series JSON cofactors")

    matrix = commands.add_parser("matrix", parents=[common], help="Dump an operator's band matrix")
    matrix.add_argument("action", choices=["dump"])
    matrix.add_argument("op", help="Operator tag, e.g. shift, volterra, t_n(2), riemann_liouville(3)")
    matrix.add_argument("--dim", type=int, default=8, help="Matrix dimension (default: 8)")
    return parser


def apply_overrides(config: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    for key in ("seed", "trials", "n_max", "trunc_degree", "tol", "mode", "output", "threads",
                "include_timing", "corrupt_operator"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


def load_spec(path: str, tol: float = 0.0) -> IdealSpec:
    """Read an IdealSpec; a positive tol replaces the one in the file."""
    spec = IdealSpec.from_dict(load_json(path))
    if tol and tol > 0:
        spec = dataclasses.replace(spec, tol=float(tol))
    return spec


def load_series(path: str) -> TaylorPoly:
    return TaylorPoly.from_dict(load_json(path))


def load_cofactors(path: str, mode: str) -> List[TaylorPoly]:
    data = load_json(path)
    if not isinstance(data, list):
        raise ValueError(f"{path} must hold a JSON list of Series JSON objects")
    return [TaylorPoly.from_dict(entry).to_mode(mode) for entry in data]


# ===== Commands =====

def cmd_ideal(action: str, spec_path: str, config: Dict[str, Any], args: argparse.Namespace,
              runner: SuiteRunner) -> Tuple[Dict[str, Any], int]:
    spec = load_spec(spec_path, config["tol"])
    mode = config["mode"]

    if action == "validate":
        validation = validate_spec(spec)
        carleson = carleson_integral(
            spec,
            quad_points=config["quad_points"],
            levels=config["quad_levels"],
            drop_factor=config["divergence_drop_factor"],
            collision_radius=config["collision_radius"],
        )
        report = {"command": "ideal validate", "validation": validation.to_dict(), "carleson": carleson.to_dict()}
        return report, EXIT_OK if validation.valid else EXIT_VIOLATION

    require_valid(spec)
    if action == "generate":
        if args.cofactors:
            cofactors = load_cofactors(args.cofactors, mode)
        else:
            if args.count < 1:
                raise ValueError(f"--count must be positive, got {args.count}")
            cofactors = [random_polynomial(case_rng(config["seed"], GENERATE_CODE, i), COFACTOR_DEGREE_MAX, mode)
                         for i in range(args.count)]
        factor = config["atom_truncation_factor"]
        recipes = runner.map(lambda q: make_member(spec, q, mode, atom_factor=factor), cofactors, name="generate")
        report = {"command": "ideal generate", "spec": spec.to_dict(), "members": [r.to_dict() for r in recipes]}
        return report, EXIT_OK

    if not args.series:
        raise ValueError("ideal check needs --series")
    f = load_series(args.series)
    membership = check_membership(f, spec)
    report = {"command": "ideal check", "membership": membership.to_dict()}
    return report, EXIT_OK if membership.ok else EXIT_VIOLATION


def cmd_subspace(action: str, spec_path: str, cofactors_path: Optional[str],
                 config: Dict[str, Any]) -> Tuple[Dict[str, Any], int]:
    spec = load_spec(spec_path, config["tol"])
    if not cofactors_path:
        raise ValueError("subspace commands need --cofactors")
    cofactors = load_cofactors(cofactors_path, config["mode"])
    basis = build_subspace(spec, cofactors, config["mode"])

    if action == "build":
        return {"command": "subspace build", "basis": basis.to_dict()}, EXIT_OK

    invariance = check_invariance(basis)
    enlarged = enlarge_with_pushforwards(basis)
    distances = []
    for f in basis.elements:
        image = apply_tn(f, spec.n)
        distance = distance_to_span(image, enlarged)
        entry = distance.to_dict()
        entry["relative"] = distance.distance / max(1.0, hardy_norm(image))
        distances.append(entry)
    max_distance = max(d["distance"] for d in distances)
    max_relative = max(d["relative"] for d in distances)
    if max_relative > SPAN_DISTANCE_TOL:
        logger.warning(f"T_n f lies {max_relative:.3e} (relative) from the enlarged span")
    report = {
        "command": "subspace check-invariance",
        "invariance": invariance.to_dict(),
        "distances": distances,
        "max_distance": max_distance,
        "max_relative_distance": max_relative,
    }
    return report, EXIT_OK if invariance.ok else EXIT_VIOLATION


def cmd_matrix_dump(op_text: str, dim: int, config: Dict[str, Any]) -> Tuple[Dict[str, Any], int]:
    tag = OperatorTag.parse(op_text)
    return matrix_of(tag, dim, config["mode"]).to_dict(), EXIT_OK


def run_command(args: argparse.Namespace, config: Dict[str, Any]) -> Tuple[Dict[str, Any], int]:
    runner = SuiteRunner(config)
    try:
        if args.command == "verify-identities":
            report = cmd_verify_identities(config, runner)
            return report, EXIT_OK if report["failures"] == 0 else EXIT_VIOLATION
        if args.command == "verify-norms":
            report = cmd_verify_norms(config, runner)
            return report, EXIT_OK if report["failures"] == 0 else EXIT_VIOLATION
        if args.command == "ideal":
            return cmd_ideal(args.action, args.spec, config, args, runner)
        if args.command == "subspace":
            return cmd_subspace(args.action, args.spec, args.cofactors, config)
        return cmd_matrix_dump(args.op, args.dim, config)
    finally:
        runner.stop()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT_ERROR if e.code not in (0, None) else EXIT_OK

    configure_logging(args.verbose, args.quiet)
    config = apply_overrides(get_config(), args)
    is_valid, problems = validate_config(config)
    if not is_valid:
        for problem in problems:
            logger.error(f"Invalid configuration: {problem}")
        return EXIT_INPUT_ERROR

    try:
        report, code = run_command(args, config)
    except (SpecError, ValueError, TypeError, KeyError, json.JSONDecodeError, OSError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INPUT_ERROR
    except Exception as e:
        logger.error(f"Unhandled exception in {args.command}: {e}", exc_info=True)
        return EXIT_INPUT_ERROR

    try:
        write_report(report, config.get("output"))
    except OSError as e:
        logger.error(f"Could not write report: {e}")
        return EXIT_INPUT_ERROR
    if code != EXIT_OK:
        logger.info(f"{args.command} finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
