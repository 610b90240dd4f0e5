#!/usr/bin/env python3
"""
Command Line and Harness Test Suite
-----------------------------------
Tests the volterra-lattice front door and the machinery behind it:
- Configuration defaults, validation and the VL_THREADS cap
- SuiteState / SuiteRunner (slot order, error capture, thread independence)
- verify-identities and verify-norms reports, including the corrupted
  operator self-test and injected series factories
- ideal, subspace and matrix subcommands end to end through main()
- Exit codes: 0 pass, 1 violation, 2 input error

Run with pytest, or directly: python3 test_cli.py
"""

import json
import math
import os
import sys
import tempfile
from pathlib import Path

import pytest

import main
from config import THREADS_ENV, get_config, validate_config
from json_io import canonical_dumps
from series import RATIONAL, TaylorPoly
from suite_runner import SuiteRunner, case_rng
from suite_state import SuiteState
from suites import cmd_verify_identities, cmd_verify_norms

SMALL_RUN = ["--trials", "4", "--n-max", "2", "--degree", "12"]

VALID_SPEC = {"n": 2, "inner": {"blaschke": [{"re": "1/2", "im": "0"}]}, "chain": [[0, "pi"], [0]]}
BOUNDARY_SPEC = {"n": 1, "chain": [[0]]}
NESTING_SPEC = {"n": 2, "chain": [[0], ["pi"]]}


def small_config(**overrides):
    config = get_config()
    config.update({"trials": 4, "n_max": 2, "trunc_degree": 12, "threads": 2})
    config.update(overrides)
    return config


def write_json(directory, name, data):
    path = Path(directory) / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def scratch_dir():
    return Path(tempfile.mkdtemp(prefix="volterra-lattice-test-"))


def run_cli(directory, *args):
    """Run main() with --out in directory; returns (exit code, report or None)."""
    out = Path(directory) / "report.json"
    if out.exists():
        out.unlink()
    code = main.main(list(args) + ["--out", str(out), "--quiet"])
    report = json.loads(out.read_text(encoding="utf-8")) if out.exists() else None
    return code, report


def test_config():
    """Defaults validate; bad values are reported."""
    print("\n=== Test 1: Configuration ===")

    is_valid, problems = validate_config(get_config())
    assert is_valid and not problems, f"defaults must validate: {problems}"

    bad = [
        {"trials": 0},
        {"seed": -1},
        {"mode": "complex"},
        {"tol": -1.0},
        {"threads": 0},
        {"n_max": 5, "trunc_degree": 6},
        {"quad_points": 128},
        {"grid_size": 8},
    ]
    for override in bad:
        config = get_config()
        config.update(override)
        is_valid, problems = validate_config(config)
        assert not is_valid and problems, f"{override} must be rejected"
    print(f"✓ Defaults valid, {len(bad)} bad overrides rejected")


def test_threads_env(monkeypatch):
    """VL_THREADS caps the worker count."""
    print("\n=== Test 2: Thread Cap ===")

    monkeypatch.setenv(THREADS_ENV, "2")
    config = get_config()
    config["threads"] = 8
    assert config["threads_cap"] == 2 and SuiteRunner(config).thread_count == 2

    monkeypatch.setenv(THREADS_ENV, "many")
    is_valid, problems = validate_config(get_config())
    assert not is_valid and any(THREADS_ENV in p for p in problems)
    print("✓ VL_THREADS respected and validated")


def test_suite_state():
    """Slots come back in index order; raised trials count as failures."""
    print("\n=== Test 3: SuiteState ===")

    state = SuiteState("demo", 3)
    state.set_cases(2, [{"check": "c", "ok": False}])
    state.set_cases(0, [{"check": "a", "ok": True}], skipped=2)
    state.set_error(1, "ValueError: boom")
    snapshot = state.get_snapshot()
    assert [case["check"] for case in snapshot["cases"]] == ["a", "c"]
    assert snapshot["failures"] == 2 and snapshot["skipped"] == 2 and state.completed() == 3

    report = state.build_report({"k": 1}, wall_time=0.5)
    assert report["summary"] == {"k": 1} and report["wall_time"] == 0.5 and report["errors"]
    print("✓ Snapshot ordered, failures counted")


def test_suite_runner():
    """Per-index streams, ordered map results and first-error propagation."""
    print("\n=== Test 4: SuiteRunner ===")

    first = case_rng(42, 1, 7).integers(0, 1 << 30, size=4)
    again = case_rng(42, 1, 7).integers(0, 1 << 30, size=4)
    other = case_rng(42, 2, 7).integers(0, 1 << 30, size=4)
    assert list(first) == list(again) and list(first) != list(other)

    runner = SuiteRunner(small_config(threads=4))
    try:
        assert runner.map(lambda x: x * x, list(range(20))) == [x * x for x in range(20)]

        def fail_on_odd(x):
            if x % 2:
                raise ValueError(f"odd {x}")
            return x

        with pytest.raises(ValueError, match="odd 1"):
            runner.map(fail_on_odd, list(range(10)))

        def trial(index, rng):
            if index == 3:
                raise RuntimeError("broken trial")
            return [{"check": "draw", "ok": True, "value": int(rng.integers(0, 1000))}]

        snapshot = runner.run("demo", 9, 6, trial).get_snapshot()
        assert snapshot["failures"] == 1 and len(snapshot["cases"]) == 5
        assert snapshot["errors"][0]["index"] == 3
    finally:
        runner.stop()
    print("✓ Runner deterministic per index and propagates errors")


def test_identity_suite_reports():
    """Passing run, thread independence and the corrupted-operator self-test."""
    print("\n=== Test 5: Identity Suite ===")

    one = cmd_verify_identities(small_config(threads=1))
    three = cmd_verify_identities(small_config(threads=3))
    assert one["failures"] == 0, f"identity failures: {one['summary']['checks']}"
    assert canonical_dumps(one) == canonical_dumps(three), "thread count must not change the report"
    assert "wall_time" not in one
    assert one["summary"]["checks"]["intertwining"]["cases"] == 4 * 2
    print(f"✓ {len(one['cases'])} cases pass, report independent of threads")

    float_run = cmd_verify_identities(small_config(mode="float"))
    assert float_run["failures"] == 0 and float_run["summary"]["mode"] == "float"

    corrupted = cmd_verify_identities(small_config(corrupt_operator=True))
    matrix_checks = {k: v for k, v in corrupted["summary"]["checks"].items() if k.startswith("matrix")}
    assert corrupted["failures"] > 0 and sum(v["failures"] for v in matrix_checks.values()) > 0
    print("✓ Corrupted operator detected")

    zero = cmd_verify_identities(small_config(), series_factory=lambda rng, degree, mode: TaylorPoly.zero(mode))
    assert zero["failures"] == 0, "the zero series satisfies every identity"
    timed = cmd_verify_identities(small_config(include_timing=True))
    assert timed["wall_time"] >= 0.0


def test_norm_suite_reports():
    """Worst ratios for f = 1 and skipping of zero samples."""
    print("\n=== Test 6: Norm Suite ===")

    report = cmd_verify_norms(small_config(), series_factory=lambda rng, degree, mode: TaylorPoly.constant(1, mode))
    checks = report["summary"]["checks"]
    assert report["failures"] == 0
    assert checks["pointwise_bound"]["worst_ratio"] == pytest.approx(0.5)
    assert checks["nesting"]["worst_ratio"] == pytest.approx(1 / math.sqrt(2))
    assert checks["submultiplicative"]["worst_ratio"] == pytest.approx(0.25)
    assert report["summary"]["constants"]["submultiplicative"]["1"] == 4.0

    report = cmd_verify_norms(small_config(), series_factory=lambda rng, degree, mode: TaylorPoly.zero(mode))
    assert report["failures"] == 0 and not report["cases"] and report["skipped"] > 0

    report = cmd_verify_norms(small_config(trials=20))
    assert report["failures"] == 0 and report["skipped"] >= 0
    print("✓ Norm suite ratios and skips correct")


def test_cli_suites():
    """verify-identities / verify-norms through main() and byte-identical output."""
    print("\n=== Test 7: Suite Commands ===")
    directory = scratch_dir()

    first, second = directory / "a.json", directory / "b.json"
    assert main.main(["verify-identities", *SMALL_RUN, "--seed", "7", "--threads", "1", "--out", str(first), "--quiet"]) == 0
    assert main.main(["verify-identities", *SMALL_RUN, "--seed", "7", "--threads", "4", "--out", str(second), "--quiet"]) == 0
    assert first.read_bytes() == second.read_bytes(), "same seed must give byte-identical reports"

    code, report = run_cli(directory, "verify-identities", *SMALL_RUN, "--corrupt-operator")
    assert code == 1 and report["failures"] > 0

    code, report = run_cli(directory, "verify-norms", *SMALL_RUN)
    assert code == 0 and report["suite"] == "verify-norms"
    print("✓ Suite commands exit 0, corrupted run exits 1, output deterministic")


def test_cli_input_errors():
    """Usage, configuration and input errors exit 2."""
    print("\n=== Test 8: Input Errors ===")
    directory = scratch_dir()

    assert main.main([]) == 2
    assert main.main(["verify-identities", "--mode", "complex"]) == 2
    assert main.main(["verify-identities", "--trials", "0", "--quiet"]) == 2
    assert main.main(["--help"]) == 0

    missing = str(directory / "missing.json")
    broken = directory / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    no_order = write_json(directory, "no_order.json", {"chain": [[0]]})
    for spec in (missing, str(broken), no_order):
        code, report = run_cli(directory, "ideal", "validate", spec)
        assert code == 2 and report is None, f"{spec} must be an input error"

    spec = write_json(directory, "spec.json", BOUNDARY_SPEC)
    assert run_cli(directory, "ideal", "check", spec)[0] == 2, "check needs --series"
    assert run_cli(directory, "subspace", "build", spec)[0] == 2, "subspace needs --cofactors"
    empty = write_json(directory, "empty.json", [])
    assert run_cli(directory, "subspace", "build", spec, "--cofactors", empty)[0] == 2
    not_list = write_json(directory, "not_list.json", {"mode": "rational", "coeffs": [["1", "0"]]})
    assert run_cli(directory, "subspace", "build", spec, "--cofactors", not_list)[0] == 2
    assert run_cli(directory, "ideal", "generate", spec, "--count", "0")[0] == 2
    assert run_cli(directory, "matrix", "dump", "t_m(2)")[0] == 2
    print("✓ Input errors exit 2 without a report")


def test_cli_ideal():
    """ideal validate / generate / check."""
    print("\n=== Test 9: Ideal Commands ===")
    directory = scratch_dir()

    spec = write_json(directory, "spec.json", VALID_SPEC)
    code, report = run_cli(directory, "ideal", "validate", spec)
    assert code == 0 and report["validation"]["valid"] and report["carleson"]["verdict"] == "finite"

    code, report = run_cli(directory, "ideal", "validate", write_json(directory, "nesting.json", NESTING_SPEC))
    assert code == 1 and not report["validation"]["valid"]
    assert run_cli(directory, "ideal", "generate", str(directory / "nesting.json"))[0] == 2

    code, report = run_cli(directory, "ideal", "generate", spec, "--count", "2")
    assert code == 0 and len(report["members"]) == 2
    again = run_cli(directory, "ideal", "generate", spec, "--count", "2")[1]
    assert again == report, "random cofactors depend only on the seed"

    cofactors = write_json(directory, "cofactors.json", [{"mode": "rational", "coeffs": [["1", "0"]]}])
    boundary = write_json(directory, "boundary.json", BOUNDARY_SPEC)
    code, report = run_cli(directory, "ideal", "generate", boundary, "--cofactors", cofactors)
    member = report["members"][0]["member"]
    assert code == 0 and TaylorPoly.from_dict(member) == TaylorPoly.from_coeffs([0, -1, 1], RATIONAL)
    print("✓ validate and generate correct")

    series = write_json(directory, "member.json", member)
    code, report = run_cli(directory, "ideal", "check", boundary, "--series", series)
    assert code == 0 and report["membership"]["ok"]

    one = write_json(directory, "one.json", {"mode": "rational", "coeffs": [["1", "0"]]})
    code, report = run_cli(directory, "ideal", "check", boundary, "--series", one)
    assert code == 1 and not report["membership"]["cond_i"]
    assert report["membership"]["counterexamples"][0]["zeta"] == [1.0, 0.0]
    print("✓ check exits 0 for members and 1 for non-members")

    # f(1) = 1e-6: rejected at the spec tol of 1e-9, accepted with --tol 1e-3
    near = write_json(directory, "near.json", {"mode": "rational", "coeffs": [["0", "0"], ["-999999/1000000", "0"], ["1", "0"]]})
    code, report = run_cli(directory, "ideal", "check", boundary, "--series", near)
    assert code == 1 and not report["membership"]["cond_i"]
    code, report = run_cli(directory, "ideal", "check", boundary, "--series", near, "--tol", "1e-3")
    assert code == 0 and report["membership"]["ok"], "--tol replaces the spec tol"
    print("✓ --tol overrides the spec tolerance")


def test_cli_subspace():
    """subspace build / check-invariance."""
    print("\n=== Test 10: Subspace Commands ===")
    directory = scratch_dir()

    spec = write_json(directory, "spec.json", VALID_SPEC)
    cofactors = write_json(directory, "cofactors.json", [
        {"mode": "rational", "coeffs": [["1", "0"]]},
        {"mode": "rational", "coeffs": [["0", "0"], ["1/2", "1/4"]]},
    ])
    code, report = run_cli(directory, "subspace", "build", spec, "--cofactors", cofactors)
    assert code == 0 and len(report["basis"]["elements"]) == 2 and report["basis"]["n"] == 2

    code, report = run_cli(directory, "subspace", "check-invariance", spec, "--cofactors", cofactors)
    assert code == 0 and report["invariance"]["ok"] and report["invariance"]["max_residual"] == 0.0
    assert report["max_relative_distance"] <= 1e-9 and len(report["distances"]) == 2

    code, report = run_cli(directory, "subspace", "check-invariance", spec, "--cofactors", cofactors, "--mode", "float")
    assert code == 0 and report["invariance"]["ok"]
    print("✓ Subspace built and invariant in both modes")


def test_cli_matrix():
    """matrix dump for T_2."""
    print("\n=== Test 11: Matrix Dump ===")
    directory = scratch_dir()

    code, report = run_cli(directory, "matrix", "dump", "t_n(2)", "--dim", "4")
    assert code == 0 and report["op"] == "t_n(2)" and report["dim"] == 4
    assert report["entries"] == [[1, 0, ["3", "0"]], [2, 1, ["2", "0"]], [3, 2, ["5/3", "0"]]]
    print("✓ T_2 band matrix correct")


def test_cli_stdout(capsys):
    """Without --out the report goes to stdout as one canonical JSON line."""
    print("\n=== Test 12: Report on stdout ===")
    capsys.readouterr()
    assert main.main(["matrix", "dump", "shift", "--dim", "3", "--quiet"]) == 0
    out = capsys.readouterr().out
    assert out.endswith("\n") and out.count("\n") == 1
    report = json.loads(out)
    assert out == canonical_dumps(report) + "\n"
    assert report["entries"] == [[1, 0, ["1", "0"]], [2, 1, ["1", "0"]]]


def run_all_tests():
    """Run all command-line tests."""
    print("=" * 60)
    print("COMMAND LINE TEST SUITE")
    print("=" * 60)

    tests = [
        test_config,
        test_suite_state,
        test_suite_runner,
        test_identity_suite_reports,
        test_norm_suite_reports,
        test_cli_suites,
        test_cli_input_errors,
        test_cli_ideal,
        test_cli_subspace,
        test_cli_matrix,
    ]

    passed = 0
    failed = 0

    saved = os.environ.pop(THREADS_ENV, None)
    try:
        for test_func in tests:
            try:
                test_func()
                passed += 1
            except Exception as e:
                print(f"✗ {test_func.__name__} failed: {e}")
                import traceback
                traceback.print_exc()
                failed += 1
    finally:
        if saved is not None:
            os.environ[THREADS_ENV] = saved

    print("\n" + "=" * 60)
    print("TEST SUMMARY")
    print("=" * 60)
    print(f"Total tests: {len(tests)}")
    print(f"Passed: {passed}")
    print(f"Failed: {failed}")

    if failed == 0:
        print("\n✓ ALL COMMAND LINE TESTS PASSED")
        return 0
    print(f"\n✗ {failed} TEST(S) FAILED")
    return 1


if __name__ == "__main__":
    sys.exit(run_all_tests())
