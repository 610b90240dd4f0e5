"""
lattice.py
----------
Ideals I{G; K_0, ..., K_(n-1)} of S_n^2 and the invariant subspaces of T_n
built from them.

An ideal is described by an IdealSpec: the order n, an inner function G
(InnerSpec) and a chain of finite boundary sets K_0 >= K_1 >= ... >= K_(n-1).
Members are generated as

    f = G * prod_(zeta in K_0) (z - zeta)^d(zeta) * z^n * q,    d(zeta) = 1 + max{i : zeta in K_i},

checked against the defining conditions, and pushed through D^n to give the
elements of the T_n-invariant subspace S = {f^(n)}.

IdealSpec JSON:
---------------
    {"n": 2,
     "inner": {"blaschke": [...], "atoms": [...]},
     "chain": [[0, "pi"], [0]],
     "trunc_degree": 64,
     "tol": 1e-9}

Chain angles are radians, given as numbers or strings such as "pi/2".
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from inner import HEURISTIC, DivisibilityReport, InnerSpec, divides_inner_part, inner_series
from operators import IdentityReport, apply_tn, compare_series
from series import (
    ANGLE_TOL,
    RATIONAL,
    TWO_PI,
    TaylorPoly,
    angle_distance,
    boundary_grid,
    canonical_angle,
    differentiate,
    evaluate,
    multiply,
    parse_angle,
    times_z_power,
    to_scalar,
    unit_point,
)
from spaces import in_zero_subalgebra, sn_norm

logger = logging.getLogger(__name__)

DEFAULT_TRUNC_DEGREE = 64
DEFAULT_TOL = 1e-9
DEFAULT_HEURISTIC_TOL = 1e-4
ATOM_TRUNCATION_FACTOR = 2

# Carleson quadrature defaults
DEFAULT_QUAD_POINTS = 256
MIN_QUAD_POINTS = 256
DEFAULT_QUAD_LEVELS = 3
DEFAULT_DROP_FACTOR = 1.5
COLLISION_RADIUS = 1e-14

# Increments below this are converged regardless of their ratio
INCREMENT_FLOOR = 1e-9

# Gram matrices above this condition number are reported as singular
SINGULAR_CONDITION = 1e12

FINITE = "finite"
DIVERGENT = "divergent"
EMPTY = "empty"


class SpecError(ValueError):
    """Malformed or invalid ideal specification."""


def _canonical_set(angles) -> Tuple[float, ...]:
    out: List[float] = []
    for theta in sorted(canonical_angle(parse_angle(a)) for a in angles):
        if not any(angle_distance(theta, seen) <= ANGLE_TOL for seen in out):
            out.append(theta)
    return tuple(out)


def _contains(angles: Sequence[float], theta: float) -> bool:
    return any(angle_distance(theta, a) <= ANGLE_TOL for a in angles)


@dataclass(frozen=True)
class ZeroChain:
    """Boundary sets K_0, ..., K_(n-1), canonicalized to [0, 2*pi).

    A shorter list is padded with empty sets; a longer one is rejected.
    Nesting is not enforced here; validate_spec reports violations.
    """
    n: int
    sets: Tuple[Tuple[float, ...], ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise SpecError(f"chain order n must be a positive integer, got {self.n!r}")
        sets = [_canonical_set(s) for s in self.sets]
        if len(sets) > self.n:
            raise SpecError(f"chain has {len(sets)} sets but n = {self.n}")
        sets.extend(() for _ in range(self.n - len(sets)))
        object.__setattr__(self, "sets", tuple(sets))

    @property
    def points(self) -> Tuple[float, ...]:
        """Union of all sets, which equals K_0 for a nested chain."""
        return _canonical_set(theta for s in self.sets for theta in s)

    def order_of(self, theta: float) -> int:
        """1 + max{i : theta in K_i}, or 0 when theta lies in no set."""
        order = 0
        for i, s in enumerate(self.sets):
            if _contains(s, theta):
                order = i + 1
        return order

    def nesting_violations(self) -> List[Tuple[int, float]]:
        violations = []
        for i in range(1, self.n):
            for theta in self.sets[i]:
                if not _contains(self.sets[i - 1], theta):
                    violations.append((i, theta))
        return violations

    def is_empty(self) -> bool:
        return not any(self.sets)

    def to_list(self) -> List[List[float]]:
        return [list(s) for s in self.sets]


@dataclass(frozen=True)
class IdealSpec:
    n: int
    inner: InnerSpec = field(default_factory=InnerSpec)
    chain: Optional[ZeroChain] = None
    trunc_degree: int = DEFAULT_TRUNC_DEGREE
    tol: float = DEFAULT_TOL
    atom_order: Optional[int] = None
    heuristic_tol: float = DEFAULT_HEURISTIC_TOL

    def __post_init__(self):
        if self.chain is None:
            object.__setattr__(self, "chain", ZeroChain(self.n))
        elif not isinstance(self.chain, ZeroChain):
            object.__setattr__(self, "chain", ZeroChain(self.n, tuple(self.chain)))

    @property
    def has_atoms(self) -> bool:
        return bool(self.inner.atoms)

    @property
    def effective_atom_order(self) -> int:
        return self.atom_order if self.atom_order is not None else 2 * self.n + 4

    @property
    def boundary_tol(self) -> float:
        """Tolerance for boundary-point checks; atoms make those checks heuristic."""
        return self.heuristic_tol if self.has_atoms else self.tol

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "n": self.n,
            "inner": self.inner.to_dict(),
            "chain": self.chain.to_list(),
            "trunc_degree": self.trunc_degree,
            "tol": self.tol,
            "heuristic_tol": self.heuristic_tol,
        }
        if self.atom_order is not None:
            data["atom_order"] = self.atom_order
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IdealSpec":
        if not isinstance(data, dict):
            raise SpecError("ideal spec must be a JSON object")
        if "n" not in data:
            raise SpecError("ideal spec is missing 'n'")
        try:
            n = data["n"]
            if not isinstance(n, int) or isinstance(n, bool):
                raise SpecError(f"'n' must be an integer, got {n!r}")
            chain_data = data.get("chain", []) or []
            if not isinstance(chain_data, list) or not all(isinstance(s, list) for s in chain_data):
                raise SpecError("'chain' must be a list of angle lists")
            atom_order = data.get("atom_order")
            return cls(
                n=n,
                inner=InnerSpec.from_dict(data.get("inner")),
                chain=ZeroChain(n, tuple(tuple(s) for s in chain_data)),
                trunc_degree=int(data.get("trunc_degree", DEFAULT_TRUNC_DEGREE)),
                tol=float(data.get("tol", DEFAULT_TOL)),
                atom_order=int(atom_order) if atom_order is not None else None,
                heuristic_tol=float(data.get("heuristic_tol", DEFAULT_HEURISTIC_TOL)),
            )
        except SpecError:
            raise
        except (ValueError, TypeError, KeyError) as e:
            raise SpecError(f"malformed ideal spec: {e}") from e


# ===== Validation =====

@dataclass
class ValidationReport:
    valid: bool
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "errors": list(self.errors),
            "warnings": list(self.warnings),
            "notes": list(self.notes),
        }


def validate_spec(spec: IdealSpec) -> ValidationReport:
    """Nesting of the chain, association of atoms with K_(n-1), and hygiene warnings."""
    errors: List[str] = []
    warnings: List[str] = []
    notes: List[str] = []

    for i, theta in spec.chain.nesting_violations():
        errors.append(f"nesting violated: angle {theta:.17g} is in K_{i} but not in K_{i - 1}")

    last = spec.chain.sets[spec.n - 1]
    for atom in spec.inner.atoms:
        if not _contains(last, atom.theta):
            errors.append(f"atom at angle {atom.theta:.17g} is not in K_{spec.n - 1}")

    if spec.trunc_degree < 1:
        errors.append(f"trunc_degree must be positive, got {spec.trunc_degree}")
    if not spec.tol >= 0:
        errors.append(f"tol must be non-negative, got {spec.tol}")
    if not spec.heuristic_tol >= 0:
        errors.append(f"heuristic_tol must be non-negative, got {spec.heuristic_tol}")
    if spec.atom_order is not None and spec.atom_order < 1:
        errors.append(f"atom_order must be positive, got {spec.atom_order}")

    warnings.extend(spec.inner.boundary_warnings())
    needed = spec.inner.default_truncation(spec.n) if spec.inner.blaschke else 0
    if spec.trunc_degree < needed:
        warnings.append(
            f"trunc_degree {spec.trunc_degree} is below the {needed} suggested by the zero moduli; "
            f"members use the larger value"
        )
    if spec.has_atoms:
        warnings.append("singular atoms present: boundary and S_n^2 verdicts are heuristic")

    notes.append("K_0 \\ K_(n-1) is finite, hence isolated")
    notes.append("finitely many zeros have no limit points; the accumulation condition holds vacuously")
    notes.append("finite boundary sets have arc-length measure zero, so the ideal is not forced to be zero")

    for message in warnings:
        logger.warning(message)
    return ValidationReport(not errors, errors, warnings, notes)


def require_valid(spec: IdealSpec) -> ValidationReport:
    report = validate_spec(spec)
    if not report.valid:
        raise SpecError("; ".join(report.errors))
    return report


# ===== Carleson integral =====

@dataclass(frozen=True)
class CarlesonReport:
    """Mean of log rho over the circle, rho = distance to K_0 and the Blaschke zeros.

    `levels` lists (grid size, value) for each doubling; `verdict` is
    "finite", "divergent" (advisory) or "empty" for K empty.
    """
    value: float
    verdict: str
    levels: Tuple[Tuple[int, float], ...]
    increments: Tuple[float, ...]
    collisions: int
    relative_change: float

    @property
    def finite(self) -> bool:
        return self.verdict != DIVERGENT

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "verdict": self.verdict,
            "levels": [[m, v] for m, v in self.levels],
            "increments": list(self.increments),
            "collisions": self.collisions,
            "relative_change": self.relative_change,
        }


def _log_cell_average(lo: float, hi: float) -> float:
    """Average of log|u| over [lo, hi] with lo <= 0 <= hi."""
    def primitive(x: float) -> float:
        return x * math.log(x) - x if x > 0 else 0.0
    return (primitive(hi) + primitive(-lo)) / (hi - lo)


def _log_rho_mean(boundary: np.ndarray, zeros: np.ndarray, M: int, collision_radius: float):
    theta = boundary_grid(M)
    h = TWO_PI / M
    rho = np.full(M, np.inf)
    if boundary.size:
        d = np.abs(theta[:, None] - boundary[None, :])
        d = np.minimum(d, TWO_PI - d)
        rho = np.minimum(rho, np.min(2.0 * np.sin(d / 2.0), axis=1))
    if zeros.size:
        points = np.exp(1j * theta)
        rho = np.minimum(rho, np.min(np.abs(points[:, None] - zeros[None, :]), axis=1))
    collisions = int(np.count_nonzero(rho < collision_radius))
    with np.errstate(divide="ignore"):
        log_rho = np.log(rho)

    # Cells containing a boundary point of K use the exact average of log|theta - zeta|
    nearest: Dict[int, float] = {}
    for phi in boundary:
        j = int(round(phi / h)) % M
        offset = math.remainder(theta[j] - phi, TWO_PI)
        if j not in nearest or abs(offset) < abs(nearest[j]):
            nearest[j] = offset
    for j, offset in nearest.items():
        log_rho[j] = _log_cell_average(offset - h / 2.0, offset + h / 2.0)
    return float(np.mean(log_rho)), collisions


def carleson_integral(spec: IdealSpec, quad_points: int = DEFAULT_QUAD_POINTS,
                      levels: int = DEFAULT_QUAD_LEVELS, drop_factor: float = DEFAULT_DROP_FACTOR,
                      collision_radius: float = COLLISION_RADIUS) -> CarlesonReport:
    """Periodic trapezoid quadrature of log rho with grid doubling.

    Divergent when the decrease per doubling fails to shrink by drop_factor
    twice in a row.
    """
    if quad_points < MIN_QUAD_POINTS:
        raise ValueError(f"quad_points must be at least {MIN_QUAD_POINTS}, got {quad_points}")
    boundary = np.array(spec.chain.points, dtype=float)
    zeros = np.array([zero.point for zero in spec.inner.blaschke], dtype=np.complex128)
    if boundary.size == 0 and zeros.size == 0:
        return CarlesonReport(0.0, EMPTY, ((quad_points, 0.0),), (), 0, 0.0)

    values: List[Tuple[int, float]] = []
    collisions = 0
    for p in range(levels + 1):
        M = quad_points << p
        value, hits = _log_rho_mean(boundary, zeros, M, collision_radius)
        values.append((M, value))
        collisions = hits

    increments = tuple(values[p][1] - values[p + 1][1] for p in range(len(values) - 1))
    stalls = 0
    verdict = FINITE
    for p in range(len(increments) - 1):
        current, following = increments[p], increments[p + 1]
        shrinking = following <= INCREMENT_FLOOR or abs(current) >= drop_factor * abs(following)
        stalls = 0 if shrinking else stalls + 1
        if stalls >= 2:
            verdict = DIVERGENT
            break

    final = values[-1][1]
    change = abs(increments[-1]) / max(1.0, abs(final)) if increments else 0.0
    if collisions:
        logger.debug(f"Carleson quadrature: {collisions} node(s) collide with K")
    if verdict == DIVERGENT:
        logger.warning(f"Carleson integral looks divergent under grid doubling (value {final:.6g})")
    return CarlesonReport(final, verdict, tuple(values), increments, collisions, change)


# ===== Members =====

def vanishing_orders(spec: IdealSpec) -> Dict[float, int]:
    """Boundary vanishing order per point of K_0, raised at atoms so S_n^2 tails converge."""
    orders = {theta: spec.chain.order_of(theta) for theta in spec.chain.points}
    for atom in spec.inner.atoms:
        for theta in orders:
            if angle_distance(theta, atom.theta) <= ANGLE_TOL:
                orders[theta] = max(orders[theta], spec.effective_atom_order)
    return orders


def boundary_factor(chain: ZeroChain, mode: str = RATIONAL,
                    orders: Optional[Dict[float, int]] = None) -> TaylorPoly:
    """prod over K_0 of (z - zeta)^d(zeta); minimal orders unless given."""
    if orders is None:
        orders = {theta: chain.order_of(theta) for theta in chain.points}
    product = TaylorPoly.constant(1, mode)
    for theta in sorted(orders):
        linear = TaylorPoly((-unit_point(theta, mode), to_scalar(1, mode)), mode)
        for _ in range(orders[theta]):
            product = multiply(product, linear, keep="full")
    return product


@dataclass(frozen=True)
class MemberRecipe:
    """A generated ideal member f = G_N * P * q with P = boundary factor * z^n.

    `working_degree` is N, the truncation of G; coefficients of f up to N are
    the coefficients of the infinite product.
    """
    spec: IdealSpec
    cofactor: TaylorPoly
    member: TaylorPoly
    working_degree: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cofactor": self.cofactor.to_dict(),
            "member": self.member.to_dict(),
            "working_degree": self.working_degree,
        }


def working_degree(spec: IdealSpec, prefactor_degree: int, atom_factor: int = ATOM_TRUNCATION_FACTOR) -> int:
    base = spec.trunc_degree
    if spec.inner.blaschke:
        base = max(base, spec.inner.default_truncation(spec.n))
    N = base + 2 * prefactor_degree
    if spec.has_atoms:
        N *= atom_factor
    return N


def make_member(spec: IdealSpec, q: TaylorPoly, mode: Optional[str] = None,
                working: Optional[int] = None, atom_factor: int = ATOM_TRUNCATION_FACTOR) -> MemberRecipe:
    """Assemble G * boundary_factor * z^n * q; the product with G is kept in full."""
    mode = mode or q.mode
    q = q.to_mode(mode)
    P = times_z_power(multiply(boundary_factor(spec.chain, mode, vanishing_orders(spec)), q, keep="full"), spec.n)
    P = P.truncate(P.degree)
    if working is None:
        working = working_degree(spec, P.degree, atom_factor)
    elif 2 * P.degree > working:
        raise ValueError(f"polynomial part of degree {P.degree} exceeds the budget of working degree {working}")

    if spec.inner.is_trivial():
        member = P
    else:
        member = multiply(inner_series(spec.inner, working, mode), P, keep="full")
    logger.debug(f"Member built: prefactor degree {P.degree}, working degree {working}, mode {mode}")
    return MemberRecipe(spec, q, member, working)


def multiply_member(recipe: MemberRecipe, p: TaylorPoly) -> MemberRecipe:
    """Ideal closure under polynomial multiplication: the member for cofactor q*p."""
    p = p.to_mode(recipe.member.mode)
    p = p.truncate(p.degree)
    cofactor = multiply(recipe.cofactor, p, keep="full")
    cofactor = cofactor.truncate(cofactor.degree)
    member = multiply(recipe.member, p, keep="full")
    return MemberRecipe(recipe.spec, cofactor, member, recipe.working_degree)


# ===== Membership =====

@dataclass(frozen=True)
class MembershipReport:
    cond_i: bool
    cond_ii: bool
    in_sn2: bool
    in_zero_subalgebra: bool
    heuristic: bool
    counterexamples: Tuple[Dict[str, Any], ...]
    divisibility: DivisibilityReport
    sn_change: float

    @property
    def ok(self) -> bool:
        return self.cond_i and self.cond_ii and self.in_sn2 and self.in_zero_subalgebra

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "cond_i": self.cond_i,
            "cond_ii": self.cond_ii,
            "in_sn2": self.in_sn2,
            "in_zero_subalgebra": self.in_zero_subalgebra,
            "labels": {
                "cond_i": HEURISTIC if self.heuristic else "numeric",
                "cond_ii": self.divisibility.singular_label,
                "in_sn2": HEURISTIC,
            },
            "counterexamples": list(self.counterexamples),
            "divisibility": self.divisibility.to_dict(),
            "sn_change": self.sn_change,
        }


def _boundary_values(f: TaylorPoly, theta: float, order: int):
    """|f^(j)(e^{i theta})| for j < order, exact in rational mode."""
    zeta = unit_point(theta, f.mode)
    values = []
    derivative = f
    for j in range(order):
        if j:
            derivative = differentiate(derivative, 1)
        values.append(abs(evaluate(derivative, zeta)))
    return zeta, values


def check_membership(f: TaylorPoly, spec: IdealSpec, N_check: Optional[int] = None) -> MembershipReport:
    """Conditions (i) and (ii), the S_n^2 tail proxy and vanishing to order n at 0.

    Without N_check the tail window is twice the stored degree, zero padded,
    so its lower half still holds every stored coefficient.
    """
    if N_check is None:
        divisibility_degree = f.trunc_degree
        N_check = 2 * max(1, f.trunc_degree)
    else:
        divisibility_degree = N_check
    n = spec.n
    scale = max(1.0, sn_norm(f, n).total)
    tol_i = spec.boundary_tol * scale

    counterexamples: List[Dict[str, Any]] = []
    for theta in spec.chain.points:
        order = spec.chain.order_of(theta)
        zeta, values = _boundary_values(f, theta, order)
        for j, value in enumerate(values):
            if value > tol_i:
                counterexamples.append({
                    "condition": "i",
                    "theta": theta,
                    "zeta": [float(complex(zeta).real), float(complex(zeta).imag)],
                    "derivative": j,
                    "value": value,
                    "bound": tol_i,
                })
    cond_i = not counterexamples

    if f.is_zero():
        divisibility = DivisibilityReport(True, True, "vacuous", (), 0.0, 0.0)
    else:
        divisibility = divides_inner_part(spec.inner, f, divisibility_degree, spec.tol, spec.heuristic_tol)
    if not divisibility.ok:
        counterexamples.append({"condition": "ii", **divisibility.to_dict()})

    window = f.truncate(max(N_check, 1))
    full = sn_norm(window, n).total
    half = sn_norm(window.truncate(max(N_check // 2, 0)), n).total
    change = abs(full - half) / max(1.0, full)
    in_sn2 = math.isfinite(full) and change <= spec.heuristic_tol

    zero_sub = in_zero_subalgebra(f, n, 0.0 if f.mode == RATIONAL else spec.tol * scale)
    return MembershipReport(cond_i, divisibility.ok, in_sn2, zero_sub, spec.has_atoms,
                            tuple(counterexamples), divisibility, change)


def vanishing_chain(f: TaylorPoly, angles, n: int, tol: float = 0.0) -> ZeroChain:
    """K_i(f) = {zeta : f(zeta) = ... = f^(i)(zeta) = 0} over the candidate angles."""
    scale = max(1.0, sn_norm(f, n).total)
    bound = tol * scale
    sets: List[List[float]] = [[] for _ in range(n)]
    for theta in _canonical_set(angles):
        _, values = _boundary_values(f, theta, n)
        for i, value in enumerate(values):
            if value > bound:
                break
            sets[i].append(theta)
    return ZeroChain(n, tuple(tuple(s) for s in sets))


# ===== Subspaces =====

@dataclass(frozen=True)
class SubspaceBasis:
    """Pre-images g (members vanishing to order n at 0) and elements f = g^(n)."""
    spec: IdealSpec
    pre_images: Tuple[TaylorPoly, ...]
    elements: Tuple[TaylorPoly, ...]
    working_degree: int

    @property
    def mode(self) -> str:
        return self.pre_images[0].mode

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.spec.n,
            "mode": self.mode,
            "working_degree": self.working_degree,
            "pre_images": [g.to_dict() for g in self.pre_images],
            "elements": [f.to_dict() for f in self.elements],
        }


def build_subspace(spec: IdealSpec, cofactors: Sequence[TaylorPoly], mode: Optional[str] = None) -> SubspaceBasis:
    """pre_images[i] = make_member(spec, cofactors[i]).member, elements[i] = its n-th derivative."""
    if not cofactors:
        raise ValueError("build_subspace needs at least one cofactor")
    require_valid(spec)
    mode = mode or cofactors[0].mode
    cofactors = [q.to_mode(mode) for q in cofactors]
    prefactor = boundary_factor(spec.chain, mode, vanishing_orders(spec))
    top = max(prefactor.degree + spec.n + q.degree for q in cofactors)
    working = working_degree(spec, top)
    recipes = [make_member(spec, q, mode, working) for q in cofactors]
    pre_images = tuple(r.member for r in recipes)
    elements = tuple(differentiate(g, spec.n) for g in pre_images)
    logger.info(f"Subspace built: {len(elements)} element(s), n={spec.n}, mode {mode}")
    return SubspaceBasis(spec, pre_images, elements, working)


def enlarge_with_pushforwards(basis: SubspaceBasis) -> SubspaceBasis:
    """Append z*g and D^n(z*g) for every pre-image g."""
    shifted = tuple(times_z_power(g, 1) for g in basis.pre_images)
    pushed = tuple(differentiate(g, basis.spec.n) for g in shifted)
    return SubspaceBasis(basis.spec, basis.pre_images + shifted, basis.elements + pushed,
                         basis.working_degree + 1)


@dataclass(frozen=True)
class InvarianceReport:
    n: int
    identities: Tuple[IdentityReport, ...]
    memberships: Tuple[MembershipReport, ...]

    @property
    def max_residual(self) -> float:
        return max((r.max_abs_residual for r in self.identities), default=0.0)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.identities) and all(m.ok for m in self.memberships)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "ok": self.ok,
            "max_residual": self.max_residual,
            "identities": [r.to_dict() for r in self.identities],
            "memberships": [m.to_dict() for m in self.memberships],
        }


def check_invariance(basis: SubspaceBasis, tol: Optional[float] = None) -> InvarianceReport:
    """T_n f = D^n(z g) for every element, and z*g stays in the ideal."""
    if not basis.elements:
        raise ValueError("check_invariance needs a non-empty basis")
    n = basis.spec.n
    identities = []
    memberships = []
    for g, f in zip(basis.pre_images, basis.elements):
        shifted = times_z_power(g, 1)
        identities.append(compare_series("invariance", n, apply_tn(f, n), differentiate(shifted, n), tol))
        memberships.append(check_membership(shifted, basis.spec, basis.working_degree + 1))
    report = InvarianceReport(n, tuple(identities), tuple(memberships))
    logger.info(f"Invariance check: {len(identities)} element(s), max residual {report.max_residual:.3e}, ok={report.ok}")
    return report


@dataclass(frozen=True)
class DistanceReport:
    distance: float
    condition: float
    rank: int
    singular: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"distance": self.distance, "condition": self.condition,
                "rank": self.rank, "singular": self.singular}


def distance_to_span(f: TaylorPoly, basis: SubspaceBasis) -> DistanceReport:
    """H^2 distance from f to the span of the basis elements.

    The Gram matrix is formed for its condition number; the distance itself
    is the residual of a least-squares fit on normalized columns.
    """
    columns = [e.to_numpy() for e in basis.elements]
    length = max([f.trunc_degree + 1] + [c.size for c in columns])
    target = np.zeros(length, dtype=np.complex128)
    target[:f.trunc_degree + 1] = f.to_numpy()
    A = np.zeros((length, len(columns)), dtype=np.complex128)
    for k, column in enumerate(columns):
        A[:column.size, k] = column

    norms = np.linalg.norm(A, axis=0)
    live = norms > 0
    gram = A.conj().T @ A
    condition = float(np.linalg.cond(gram)) if live.all() else math.inf
    if not live.any():
        return DistanceReport(float(np.linalg.norm(target)), condition, 0, True)

    normalized = A[:, live] / norms[live]
    coeffs, _, rank, _ = np.linalg.lstsq(normalized, target, rcond=None)
    distance = float(np.linalg.norm(target - normalized @ coeffs))
    singular = bool(rank < len(columns) or not condition < SINGULAR_CONDITION)
    if singular:
        logger.warning(f"Gram matrix is singular or ill-conditioned (cond {condition:.3e}, rank {rank})")
    return DistanceReport(distance, condition, int(rank), singular)
