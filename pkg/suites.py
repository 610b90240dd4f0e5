"""
suites.py
---------
Randomized verification suites.

- verify-identities: the exact operator identities (intertwining, inverse
  pair, iterated integral, the two forms of T_n, band-matrix consistency,
  range and boundedness of V_n, and a quadrature cross-check of V_n).
- verify-norms: the S_n^2 inequalities (pointwise bound, nesting, derivative
  bound, product bound) with their explicit constants.

Random polynomial model: degree uniform in [0, degree_max], real and
imaginary parts k/256 with k uniform in [-256, 256). These values are exact
in both scalar modes.

Each case record is {"check", "n", "digest", "lhs", "rhs", "ok"} where digest
identifies the sampled inputs.
"""

import functools
import logging
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from json_io import digest
from operators import (
    BandMatrix,
    OperatorKind,
    OperatorTag,
    apply_riemann_liouville,
    matrix_of,
    riemann_liouville_quadrature,
    verify_boundedness,
    verify_intertwining,
    verify_inverse,
    verify_iterated_integral,
    verify_matrix,
    verify_range,
    verify_tn_paths,
    BOUNDEDNESS_CONSTANT,
)
from series import FLOAT, RATIONAL, QComplex, TaylorPoly, evaluate
from spaces import (
    POINTWISE_CONSTANT,
    check_derivative_bound,
    check_nesting,
    check_pointwise_bound,
    check_submultiplicative,
    derivative_constant,
    nesting_constant,
    submultiplicative_constants,
)
from suite_runner import SuiteRunner

logger = logging.getLogger(__name__)

IDENTITIES_SUITE = "verify-identities"
NORMS_SUITE = "verify-norms"
IDENTITIES_CODE = 1
NORMS_CODE = 2
GENERATE_CODE = 3

DYADIC_DENOMINATOR = 256

# Quadrature cross-check: monomial degrees, orders and disk radius
QUADRATURE_MAX_DEGREE = 10
QUADRATURE_MAX_ORDER = 3
QUADRATURE_RADIUS = 0.9
QUADRATURE_TOL = 1e-9

SeriesFactory = Callable[[np.random.Generator, int, str], TaylorPoly]


def random_polynomial(rng: np.random.Generator, degree_max: int, mode: str = RATIONAL) -> TaylorPoly:
    """Random polynomial with dyadic coefficients in the complex unit square."""
    degree = int(rng.integers(0, degree_max + 1))
    parts = rng.integers(-DYADIC_DENOMINATOR, DYADIC_DENOMINATOR, size=(degree + 1, 2))
    if mode == RATIONAL:
        coeffs = tuple(QComplex(Fraction(int(re), DYADIC_DENOMINATOR), Fraction(int(im), DYADIC_DENOMINATOR))
                       for re, im in parts)
    else:
        coeffs = tuple(complex(re / DYADIC_DENOMINATOR, im / DYADIC_DENOMINATOR) for re, im in parts)
    return TaylorPoly(coeffs, mode)


def _case(check: str, n: int, key: str, lhs: float, rhs: float, ok: bool) -> Dict[str, Any]:
    return {"check": check, "n": n, "digest": key, "lhs": lhs, "rhs": rhs, "ok": bool(ok)}


def _identity_case(report, key: str) -> Dict[str, Any]:
    return _case(report.check, report.n, key, report.relative_residual, report.tol, report.ok)


def _check_summary(cases: List[Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
    """Per-check counts and the worst observed lhs/rhs ratio."""
    summary: Dict[str, Dict[str, Any]] = {}
    for case in cases:
        entry = summary.setdefault(case["check"], {"cases": 0, "failures": 0, "worst_lhs": 0.0, "worst_ratio": 0.0})
        entry["cases"] += 1
        entry["failures"] += not case["ok"]
        entry["worst_lhs"] = max(entry["worst_lhs"], case["lhs"])
        if case["rhs"] > 0:
            entry["worst_ratio"] = max(entry["worst_ratio"], case["lhs"] / case["rhs"])
    return summary


def _finish(state, summary: Dict[str, Any], config: Dict[str, Any], started: float) -> Dict[str, Any]:
    elapsed = time.perf_counter() - started
    logger.info(f"Suite '{state.suite}' wall time {elapsed:.3f}s")
    return state.build_report(summary, elapsed if config.get("include_timing") else None)


@functools.lru_cache(maxsize=64)
def _tn_matrix(n: int, dim: int, mode: str) -> BandMatrix:
    return matrix_of(OperatorTag(OperatorKind.T_N, n), dim, mode)


def cmd_verify_identities(config: Dict[str, Any], runner: Optional[SuiteRunner] = None,
                          series_factory: Optional[SeriesFactory] = None) -> Dict[str, Any]:
    """
    Run the operator identity suite.

    For each trial one random polynomial f is drawn and every identity is
    checked for n = 1..n_max.

    Args:
        config: Run configuration (see config.py)
        runner: SuiteRunner to use; one is built from config when omitted
        series_factory: Replaces random_polynomial (used by tests)

    Returns:
        dict: SuiteReport
    """
    runner = runner or SuiteRunner(config)
    factory = series_factory or random_polynomial
    mode = config.get("mode", RATIONAL)
    n_max = config["n_max"]
    degree_max = config["trunc_degree"] - n_max
    tol = config.get("tol") or None
    corrupt = bool(config.get("corrupt_operator", False))
    if corrupt:
        logger.warning("Corrupted-operator self-test: matrix entry (1, 0) of every T_n matrix is perturbed")

    def trial(index: int, rng: np.random.Generator):
        f = factory(rng, degree_max, mode)
        cases = []
        f_json = f.to_dict()
        for n in range(1, n_max + 1):
            key = digest({"f": f_json, "n": n})
            cases.append(_identity_case(verify_intertwining(n, f, tol), key))
            inverse = verify_inverse(n, f, tol=tol)
            for part in (inverse.forward, inverse.backward, inverse.kernel):
                cases.append(_identity_case(part, key))
            cases.append(_identity_case(verify_iterated_integral(n, f, tol), key))
            cases.append(_identity_case(verify_tn_paths(n, f, tol), key))

            tag = OperatorTag(OperatorKind.T_N, n)
            matrix = _tn_matrix(n, f.trunc_degree + 1, mode)
            if corrupt:
                matrix = matrix.perturbed(1, 0, 1)
            cases.append(_identity_case(verify_matrix(tag, f, matrix, tol), key))
            image = apply_riemann_liouville(f, n)
            cases.append(_identity_case(verify_range(n, f, image), key))

            bounded = verify_boundedness(n, f, image)
            cases.append(_case(bounded.check, n, key, bounded.lhs, bounded.rhs, bounded.ok))

        # Quadrature cross-check on a random monomial at a random disk point
        n = int(rng.integers(1, min(QUADRATURE_MAX_ORDER, n_max) + 1))
        k = int(rng.integers(0, QUADRATURE_MAX_DEGREE + 1))
        radius = QUADRATURE_RADIUS * float(rng.random())
        z = radius * complex(np.exp(2j * np.pi * float(rng.random())))
        monomial = TaylorPoly.monomial(k, 1, FLOAT)
        quadrature = riemann_liouville_quadrature(monomial, n, z)
        exact = evaluate(apply_riemann_liouville(monomial, n), z)
        error = abs(quadrature - exact)
        key = digest({"k": k, "n": n, "z": [z.real, z.imag]})
        cases.append(_case("rl_quadrature", n, key, error, QUADRATURE_TOL, error <= QUADRATURE_TOL))
        return cases

    started = time.perf_counter()
    state = runner.run(IDENTITIES_SUITE, IDENTITIES_CODE, config["trials"], trial)
    snapshot = state.get_snapshot()
    summary = {
        "mode": mode,
        "n_max": n_max,
        "trials": config["trials"],
        "trunc_degree": config["trunc_degree"],
        "corrupt_operator": corrupt,
        "checks": _check_summary(snapshot["cases"]),
        "constants": {"boundedness": BOUNDEDNESS_CONSTANT},
    }
    return _finish(state, summary, config, started)


def cmd_verify_norms(config: Dict[str, Any], runner: Optional[SuiteRunner] = None,
                     series_factory: Optional[SeriesFactory] = None) -> Dict[str, Any]:
    """
    Run the S_n^2 inequality suite in float mode.

    Zero samples are skipped as vacuous. The summary carries the constant
    and worst observed ratio of every check.

    Args:
        config: Run configuration (see config.py)
        runner: SuiteRunner to use; one is built from config when omitted
        series_factory: Replaces random_polynomial (used by tests)

    Returns:
        dict: SuiteReport
    """
    runner = runner or SuiteRunner(config)
    factory = series_factory or random_polynomial
    if config.get("mode", FLOAT) != FLOAT:
        logger.info("verify-norms always runs in float mode")
    grid = config.get("grid_size", 4096)
    k_max = config.get("nesting_k_max", 4)
    submult_max = config.get("submult_n_max", 3)
    degree_max = config.get("norm_degree_max", 30)
    pair_max = config.get("pair_degree_max", 20)

    def trial(index: int, rng: np.random.Generator):
        cases = []
        skipped = 0
        f = factory(rng, degree_max, FLOAT)
        if f.is_zero():
            skipped += 1 + 2 * k_max
        else:
            key = digest({"f": f.to_dict()})
            for report in [check_pointwise_bound(f, grid)]:
                cases.append(_case(report.check, report.n, key, report.lhs, report.rhs, report.ok))
            for k in range(1, k_max + 1):
                for report in (check_nesting(f, k), check_derivative_bound(f, k)):
                    cases.append(_case(report.check, report.n, key, report.lhs, report.rhs, report.ok))

        g = factory(rng, pair_max, FLOAT)
        h = factory(rng, pair_max, FLOAT)
        if g.is_zero() or h.is_zero():
            skipped += submult_max
        else:
            key = digest({"f": g.to_dict(), "g": h.to_dict()})
            for n in range(1, submult_max + 1):
                report = check_submultiplicative(g, h, n)
                cases.append(_case(report.check, n, key, report.lhs, report.rhs, report.ok))
        return cases, skipped

    started = time.perf_counter()
    state = runner.run(NORMS_SUITE, NORMS_CODE, config["trials"], trial)
    snapshot = state.get_snapshot()
    constants = {
        "pointwise_bound": POINTWISE_CONSTANT,
        "nesting": {str(k): nesting_constant(k) for k in range(1, k_max + 1)},
        "derivative_bound": {str(k): (derivative_constant(k) + 1.0) ** 0.5 for k in range(1, k_max + 1)},
        "submultiplicative": {str(level.level): level.M for level in submultiplicative_constants(submult_max)},
    }
    summary = {
        "mode": FLOAT,
        "trials": config["trials"],
        "grid_size": grid,
        "checks": _check_summary(snapshot["cases"]),
        "constants": constants,
    }
    return _finish(state, summary, config, started)
