#!/usr/bin/env python3
"""
Lattice Test Suite
------------------
Tests ideals of S_n^2 and the T_n-invariant subspaces built from them:
- IdealSpec parsing and validation (nesting, atom association)
- Carleson quadrature verdicts
- Boundary factors and generated members
- The membership test, vanishing chains and ideal closure
- Subspace bases, invariance under T_n and distances to spans
- A sweep over random ideal specs

Run with pytest, or directly: python3 test_lattice.py
"""

import math
import sys
from fractions import Fraction

import numpy as np
import pytest

from inner import BlaschkeZero, InnerSpec, SingularAtom
from lattice import (
    DIVERGENT,
    EMPTY,
    FINITE,
    IdealSpec,
    SpecError,
    ZeroChain,
    boundary_factor,
    build_subspace,
    carleson_integral,
    check_invariance,
    check_membership,
    distance_to_span,
    enlarge_with_pushforwards,
    make_member,
    multiply_member,
    require_valid,
    validate_spec,
    vanishing_chain,
)
from operators import apply_tn
from series import FLOAT, RATIONAL, TaylorPoly, evaluate, hardy_norm, multiply
from suites import random_polynomial

HALF = BlaschkeZero(Fraction(1, 2))

# n = 2, K_0 = {1, -1}, K_1 = {1}, G = B_(1/2)
EXAMPLE_SPEC = IdealSpec(2, InnerSpec((HALF,)), ZeroChain(2, ((0.0, math.pi), (0.0,))))

CANDIDATE_ANGLES = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2, math.pi / 3, 5 * math.pi / 4, 2.0, 4.5]


def poly(values, mode=RATIONAL):
    return TaylorPoly.from_coeffs(values, mode)


def chain(n, *sets):
    return ZeroChain(n, tuple(tuple(s) for s in sets))


def random_spec(rng, with_atoms):
    """Nested chain with up to 4 points, up to 2 exact zeros and at most one atom."""
    n = int(rng.integers(1, 4))
    size = int(rng.integers(1 if with_atoms else 0, 5))
    sets = [[float(a) for a in rng.choice(CANDIDATE_ANGLES, size=size, replace=False)]]
    for _ in range(1, n):
        keep = int(rng.integers(1 if with_atoms else 0, len(sets[-1]) + 1))
        sets.append(sets[-1][:keep])
    zeros = []
    for _ in range(int(rng.integers(0, 3))):
        re, im = (int(v) for v in rng.integers(-5, 6, size=2))
        if re * re + im * im < 36:
            zeros.append(BlaschkeZero([Fraction(re, 8), Fraction(im, 8)]))
    atoms = ()
    if with_atoms:
        atoms = (SingularAtom(sets[-1][0], float(rng.choice([0.25, 0.5]))),)
    return IdealSpec(n, InnerSpec(tuple(zeros), atoms), ZeroChain(n, tuple(tuple(s) for s in sets)))


def random_cofactors(rng, count, mode):
    cofactors = []
    while len(cofactors) < count:
        q = random_polynomial(rng, 3, mode)
        if not q.is_zero():
            cofactors.append(q.truncate(q.degree))
    return cofactors


def test_spec_parsing():
    """IdealSpec JSON, chain padding and malformed input."""
    print("\n=== Test 1: IdealSpec Parsing ===")

    data = {"n": 2, "inner": {"blaschke": [{"re": "1/2", "im": 0}]}, "chain": [[0, "pi"], [0]]}
    spec = IdealSpec.from_dict(data)
    assert spec == EXAMPLE_SPEC, "JSON and constructor agree"
    assert IdealSpec.from_dict(spec.to_dict()) == spec
    assert chain(3, [0.0]).sets == ((0.0,), (), ()), "short chains are padded with empty sets"
    assert chain(1, ["pi/2", math.pi / 2 + 1e-15]).sets == ((math.pi / 2,),), "duplicate angles merge"
    assert EXAMPLE_SPEC.chain.order_of(0.0) == 2 and EXAMPLE_SPEC.chain.order_of(math.pi) == 1
    assert EXAMPLE_SPEC.chain.order_of(1.0) == 0
    print("✓ Specs read back and chains canonicalize")

    bad_specs = [
        {"chain": [[0]]},
        {"n": "two"},
        {"n": 0},
        {"n": 1, "chain": [[0], [0]]},
        {"n": 1, "chain": [["north"]]},
        {"n": 1, "chain": "0"},
        {"n": 1, "inner": {"blaschke": [{"re": 2}]}},
        {"n": 1, "inner": {"atoms": [{"theta": 0, "mass": -1}]}},
        [1, 2],
    ]
    for bad in bad_specs:
        with pytest.raises(SpecError):
            IdealSpec.from_dict(bad)
    print(f"✓ {len(bad_specs)} malformed specs raise SpecError")


def test_validation():
    """Nesting, atom association and warnings."""
    print("\n=== Test 2: Validation ===")

    valid = IdealSpec(2, chain=chain(2, [0.0, math.pi / 2], [0.0]))
    report = validate_spec(valid)
    assert report.valid and not report.errors and len(report.notes) == 3
    assert require_valid(valid).valid

    report = validate_spec(IdealSpec(2, chain=chain(2, [0.0], [math.pi])))
    assert not report.valid and "nesting" in report.errors[0], "K_1 must lie inside K_0"

    atom_spec = IdealSpec(1, InnerSpec(atoms=(SingularAtom(math.pi, 1.0),)), chain(1, [0.0]))
    report = validate_spec(atom_spec)
    assert not report.valid and "atom" in report.errors[0], "atoms must lie in K_(n-1)"
    with pytest.raises(SpecError):
        require_valid(atom_spec)
    print("✓ Nesting and atom association enforced")

    report = validate_spec(IdealSpec(1, InnerSpec((BlaschkeZero(0.9),))))
    assert report.valid and any("trunc_degree" in w for w in report.warnings)
    report = validate_spec(IdealSpec(1, InnerSpec(atoms=(SingularAtom(0.0, 1.0),)), chain(1, [0.0])))
    assert report.valid and any("heuristic" in w for w in report.warnings)
    print("✓ Truncation and heuristic warnings reported")


def test_carleson():
    """Quadrature of log rho with grid doubling."""
    print("\n=== Test 3: Carleson Integral ===")

    report = carleson_integral(IdealSpec(1))
    assert report.value == 0.0 and report.verdict == EMPTY, "empty K gives 0"

    report = carleson_integral(IdealSpec(1, chain=chain(1, [0.0])), quad_points=1 << 16, levels=1)
    assert abs(report.value) <= 1e-3 and report.finite, f"single point integrates to 0, got {report.value}"

    report = carleson_integral(IdealSpec(1, InnerSpec((BlaschkeZero(0.5),))))
    assert abs(report.value) <= 1e-12 and report.verdict == FINITE

    report = carleson_integral(IdealSpec(1, chain=chain(1, [0.0, math.pi / 2])), quad_points=4096, levels=1)
    assert report.verdict == FINITE and report.relative_change <= 1e-2
    print("✓ Finite sets integrate with a stable value")

    arc = [k * (math.pi / 2) / 512 for k in range(512)]
    report = carleson_integral(IdealSpec(1, chain=chain(1, arc)))
    assert report.verdict == DIVERGENT and not report.finite, f"dense arc must look divergent: {report.to_dict()}"
    assert len(report.levels) == 4 and report.collisions > 0
    print(f"✓ Dense arc flagged divergent (increments {[round(i, 3) for i in report.increments]})")

    with pytest.raises(ValueError):
        carleson_integral(IdealSpec(1, chain=chain(1, [0.0])), quad_points=128)


def test_boundary_factor():
    """prod (z - zeta)^d(zeta) over K_0."""
    print("\n=== Test 4: Boundary Factor ===")

    assert boundary_factor(chain(1, [0.0])) == poly([-1, 1]), "(z - 1)"
    assert boundary_factor(chain(2, [0.0], [0.0])) == poly([1, -2, 1]), "(z - 1)^2"
    assert boundary_factor(chain(2, [0.0, math.pi], [0.0])) == poly([1, -1, -1, 1]), "(z - 1)^2 (z + 1)"
    assert boundary_factor(chain(2)) == poly([1])

    P = boundary_factor(chain(3, [math.pi / 3, 2.0, 4.5], [math.pi / 3, 2.0], [math.pi / 3]))
    assert P.degree == 6
    print("✓ Hand-expanded factors correct")


def test_make_member():
    """Generated members on hand-checked specs."""
    print("\n=== Test 5: Member Generation ===")

    one = poly([1])
    assert make_member(IdealSpec(1), one).member == poly([0, 1]), "trivial spec, q = 1 gives z"
    assert make_member(IdealSpec(1, chain=chain(1, [0.0])), one).member == poly([0, -1, 1]), "z^2 - z"

    recipe = make_member(IdealSpec(1, InnerSpec((HALF,)), chain(1, [0.0])), one)
    f = recipe.member
    assert abs(evaluate(f, Fraction(1, 2))) <= 1e-10, "vanishes at the Blaschke zero"
    assert evaluate(f, 1) == 0 and evaluate(f, 0) == 0, "vanishes exactly at 1 and 0"
    assert recipe.working_degree >= 64 and f.mode == RATIONAL
    assert set(recipe.to_dict()) == {"cofactor", "member", "working_degree"}

    with pytest.raises(ValueError):
        make_member(IdealSpec(1), TaylorPoly.monomial(40, 1, RATIONAL), working=64)
    print("✓ Members assembled as G * boundary factor * z^n * q")


def test_membership():
    """Members pass; non-members fail the right condition."""
    print("\n=== Test 6: Membership ===")

    rng = np.random.default_rng(11)
    specs = [IdealSpec(1), IdealSpec(2, chain=chain(2, [0.0, math.pi / 3], [0.0])), EXAMPLE_SPEC]
    for spec in specs:
        for q in random_cofactors(rng, 3, RATIONAL):
            recipe = make_member(spec, q)
            report = check_membership(recipe.member, spec, recipe.working_degree)
            assert report.ok, f"generated member rejected: {report.to_dict()}"
    print("✓ Generated members pass all four conditions")

    trivial = make_member(IdealSpec(1), poly([1])).member
    assert trivial == poly([0, 1])
    report = check_membership(trivial, IdealSpec(1))
    assert report.ok and report.sn_change <= 1e-12, f"z rejected by the trivial ideal: {report.to_dict()}"
    boundary_spec = IdealSpec(1, chain=chain(1, [0.0]))
    short = make_member(boundary_spec, poly([1])).member
    assert short == poly([0, -1, 1])
    report = check_membership(short, boundary_spec)
    assert report.ok and report.sn_change <= 1e-12, f"z^2 - z rejected: {report.to_dict()}"
    assert check_membership(make_member(EXAMPLE_SPEC, poly([1])).member, EXAMPLE_SPEC).ok
    print("✓ Default tail window keeps every stored coefficient")

    report = check_membership(poly([1]), IdealSpec(1, chain=chain(1, [0.0])))
    assert not report.cond_i and not report.ok, "f = 1 does not vanish at 1"
    assert report.counterexamples[0]["zeta"] == [1.0, 0.0]
    assert not report.in_zero_subalgebra

    report = check_membership(poly([0, -1, 1]), IdealSpec(1, InnerSpec((HALF,))))
    assert report.cond_i and not report.cond_ii, "z(z - 1) is not divisible by B_(1/2)"
    assert report.to_dict()["labels"]["cond_ii"] == "vacuous"
    print("✓ Non-members fail the expected condition")

    atom_spec = IdealSpec(1, InnerSpec(atoms=(SingularAtom(0.0, 0.5),)), chain(1, [0.0]))
    recipe = make_member(atom_spec, poly([1, 1], FLOAT))
    report = check_membership(recipe.member, atom_spec, recipe.working_degree)
    assert report.ok and report.heuristic, f"member with an atom rejected: {report.to_dict()}"
    assert report.to_dict()["labels"]["cond_ii"] == "heuristic"
    print("✓ Atom member passes with heuristic labels")


def test_vanishing_and_closure():
    """K_i(f) of a member, monotonicity and multiplication by polynomials."""
    print("\n=== Test 7: Vanishing Chain and Closure ===")

    recipe = make_member(EXAMPLE_SPEC, poly([2, 1]))
    found = vanishing_chain(recipe.member, [0.0, math.pi, math.pi / 2], 2)
    assert found.sets == ((0.0, math.pi), (0.0,)), f"unexpected chain {found.sets}"

    weaker = IdealSpec(2, chain=chain(2, [0.0]))
    assert check_membership(recipe.member, weaker, recipe.working_degree).ok, "smaller data gives a larger ideal"
    stronger = IdealSpec(2, InnerSpec((HALF,)), chain(2, [0.0, math.pi], [0.0, math.pi]))
    assert not check_membership(recipe.member, stronger, recipe.working_degree).cond_i
    print("✓ Vanishing chain recovered, monotone in the data")

    p = poly([2, 0, -1])
    closed = multiply_member(recipe, p)
    cofactor = multiply(poly([2, 1]), p)
    direct = make_member(EXAMPLE_SPEC, cofactor, working=recipe.working_degree)
    assert closed.member == direct.member, "f * p equals the member for cofactor q * p"
    assert closed.cofactor == cofactor.truncate(cofactor.degree)
    assert check_membership(closed.member, EXAMPLE_SPEC, closed.working_degree).ok
    print("✓ Ideal closed under polynomial multiplication")


def test_build_subspace():
    """Pre-images and their n-th derivatives."""
    print("\n=== Test 8: Subspace Basis ===")

    basis = build_subspace(IdealSpec(1), [poly([1])])
    assert basis.pre_images[0] == poly([0, 1]) and basis.elements[0] == poly([1])

    basis = build_subspace(IdealSpec(2), [poly([1]), poly([0, 1])])
    assert basis.elements[0] == poly([2]) and basis.elements[1] == poly([0, 6]), "elements 2 and 6z"

    basis = build_subspace(IdealSpec(1, chain=chain(1, [0.0])), [poly([1])])
    assert basis.elements[0] == poly([-1, 2]), "element 2z - 1"
    assert basis.to_dict()["mode"] == RATIONAL and len(basis.to_dict()["elements"]) == 1

    with pytest.raises(ValueError):
        build_subspace(IdealSpec(1), [])
    with pytest.raises(SpecError):
        build_subspace(IdealSpec(2, chain=chain(2, [0.0], [math.pi])), [poly([1])])
    print("✓ Bases built on hand-checked specs")


def test_invariance():
    """T_n f = D^n(z g) and z*g stays in the ideal."""
    print("\n=== Test 9: Invariance ===")

    basis = build_subspace(IdealSpec(1), [poly([1]), poly([0, 1]), poly([0, 0, 1])])
    report = check_invariance(basis)
    assert report.ok and report.max_residual == 0.0

    basis = build_subspace(IdealSpec(1, chain=chain(1, [0.0])), [poly([1])])
    assert apply_tn(basis.elements[0], 1) == poly([0, -2, 3]), "T_1(2z - 1) = 3z^2 - 2z"
    assert check_invariance(basis).ok

    basis = build_subspace(EXAMPLE_SPEC, [poly([1]), poly([1, -1])])
    report = check_invariance(basis)
    assert report.ok and report.max_residual == 0.0, "exact invariance with a Blaschke factor"

    spec = IdealSpec(1, InnerSpec((BlaschkeZero(0.5),), (SingularAtom(0.0, 0.25),)), chain(1, [0.0]))
    basis = build_subspace(spec, [poly([1], FLOAT), poly([1, 0.5], FLOAT)])
    report = check_invariance(basis)
    assert report.ok and all(r.relative_residual <= 1e-10 for r in report.identities), report.to_dict()
    print("✓ Subspaces invariant, exactly in rational mode")


def test_distance_to_span():
    """Least-squares distance in H^2."""
    print("\n=== Test 10: Distance to Span ===")

    basis = build_subspace(IdealSpec(1), [poly([1]), poly([0, 1])])
    assert distance_to_span(basis.elements[1], basis).distance <= 1e-12
    assert distance_to_span(poly([0, 0, 0, 0, 0, 1]), basis).distance == pytest.approx(1.0)
    perturbed = poly([1] + [0] * 9 + [Fraction(1, 1000)])
    report = distance_to_span(perturbed, basis)
    assert report.distance == pytest.approx(1e-3, rel=1e-9) and report.rank == 2 and not report.singular
    print("✓ In-span, orthogonal and perturbed targets correct")

    report = distance_to_span(poly([1]), build_subspace(IdealSpec(1), [poly([1]), poly([1])]))
    assert report.singular and report.rank == 1 and report.distance <= 1e-12
    print("✓ Duplicate elements reported as a singular Gram matrix")

    basis = build_subspace(EXAMPLE_SPEC,
                           [poly([1], FLOAT), poly([0, 1], FLOAT)])
    enlarged = enlarge_with_pushforwards(basis)
    assert len(enlarged.elements) == 4 and enlarged.working_degree == basis.working_degree + 1
    for f in basis.elements:
        target = apply_tn(f, 2)
        assert distance_to_span(target, enlarged).distance <= 1e-9 * max(1.0, hardy_norm(target))
    print("✓ T_n f lies in the enlarged span")


def _sweep(rng, count, with_atoms, mode):
    for _ in range(count):
        spec = random_spec(rng, with_atoms)
        require_valid(spec)
        basis = build_subspace(spec, random_cofactors(rng, 5, mode), mode)
        for g in basis.pre_images:
            report = check_membership(g, spec, basis.working_degree)
            assert report.ok, f"pre-image rejected for {spec.to_dict()}: {report.to_dict()}"
        invariance = check_invariance(basis)
        assert invariance.ok, f"invariance failed for {spec.to_dict()}: {invariance.to_dict()}"
        enlarged = enlarge_with_pushforwards(basis)
        for f in basis.elements:
            target = apply_tn(f, spec.n)
            distance = distance_to_span(target, enlarged).distance
            assert distance <= 1e-9 * max(1.0, hardy_norm(target)), f"T_n f left the span by {distance}"


def test_random_specs():
    """Random valid specs: members, invariance and span distances."""
    print("\n=== Test 11: Random Specs ===")

    _sweep(np.random.default_rng(21), 10, with_atoms=False, mode=RATIONAL)
    print("✓ 10 atom-free specs pass in rational mode")
    _sweep(np.random.default_rng(22), 6, with_atoms=True, mode=FLOAT)
    print("✓ 6 specs with an atom pass in float mode")


def run_all_tests():
    """Run all lattice tests."""
    print("=" * 60)
    print("LATTICE TEST SUITE")
    print("=" * 60)

    tests = [
        test_spec_parsing,
        test_validation,
        test_carleson,
        test_boundary_factor,
        test_make_member,
        test_membership,
        test_vanishing_and_closure,
        test_build_subspace,
        test_invariance,
        test_distance_to_span,
        test_random_specs,
    ]

    passed = 0
    failed = 0

    for test_func in tests:
        try:
            test_func()
            passed += 1
        except Exception as e:
            print(f"✗ {test_func.__name__} failed: {e}")
            import traceback
            traceback.print_exc()
            failed += 1

    print("\n" + "=" * 60)
    print("TEST SUMMARY")
    print("=" * 60)
    print(f"Total tests: {len(tests)}")
    print(f"Passed: {passed}")
    print(f"Failed: {failed}")

    if failed == 0:
        print("\n✓ ALL LATTICE TESTS PASSED")
        return 0
    print(f"\n✗ {failed} TEST(S) FAILED")
    return 1


if __name__ == "__main__":
    sys.exit(run_all_tests())
