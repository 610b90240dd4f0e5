"""
inner.py
--------
Desk-scale inner functions and inner-part divisibility.

- Finite Blaschke products B(z) = prod (|a|/a) (a - z)/(1 - conj(a) z), with the
  factor z for a zero at the origin.
- Atomic singular inner functions S(z) = exp(-sum mu_j (zeta_j + z)/(zeta_j - z)).
- Boundary/interior modulus checks and the test "G divides the inner part of f".

InnerSpec JSON:
---------------
    {"blaschke": [{"re": ..., "im": ..., "mult": ...}],
     "atoms":    [{"theta": ..., "mass": ...}]}

re/im given as integers or "p/q" strings are kept exact; theta may be a number
or text such as "pi/2".
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from series import (
    FLOAT,
    RATIONAL,
    QComplex,
    TaylorPoly,
    angle_distance,
    boundary_grid,
    canonical_angle,
    differentiate,
    divide,
    evaluate,
    evaluate_many,
    exp_series,
    hardy_norm,
    max_abs_coefficient,
    multiply,
    parse_angle,
    reciprocal,
)
from spaces import sn_norm

logger = logging.getLogger(__name__)

# Zeros closer than this to the circle degrade truncation quality
BOUNDARY_WARNING_DISTANCE = 1e-3

# Base truncation and per-factor increment for inner series
BASE_TRUNCATION = 64
TRUNCATION_PER_FACTOR = 16

# Geometric tail target used when sizing truncations for large zero moduli
TAIL_TARGET = 1e-14

DEFAULT_EXCLUSION_RADIUS = 0.1
DEFAULT_INTERIOR_RADII = (0.5, 0.9)

HEURISTIC = "heuristic"
VACUOUS = "vacuous"


def _exact_value(value: Any) -> bool:
    return isinstance(value, (int, Fraction, QComplex, str))


@dataclass(frozen=True)
class BlaschkeZero:
    """Interior zero a (|a| < 1) with its multiplicity.

    `a` is kept as a QComplex when it was given exactly (ints, fractions,
    "p/q" strings) and as a Python complex otherwise.
    """
    a: Any
    multiplicity: int = 1

    def __post_init__(self):
        a = self.a
        if _exact_value(a):
            a = QComplex.coerce(a)
        elif isinstance(a, (list, tuple)) and len(a) == 2 and all(_exact_value(x) for x in a):
            a = QComplex.coerce(list(a))
        elif isinstance(a, (list, tuple)) and len(a) == 2:
            a = complex(float(a[0]), float(a[1]))
        else:
            a = complex(a)
        object.__setattr__(self, "a", a)
        if isinstance(a, QComplex):
            inside = a.abs2() < 1
        else:
            inside = math.isfinite(a.real) and math.isfinite(a.imag) and abs(a) < 1.0
        if not inside:
            raise ValueError(f"Blaschke zero must lie in the open unit disk, got {self.a!r}")
        if not isinstance(self.multiplicity, int) or self.multiplicity < 1:
            raise ValueError(f"zero multiplicity must be a positive integer, got {self.multiplicity!r}")

    @property
    def point(self) -> complex:
        return complex(self.a)

    @property
    def exact(self) -> QComplex:
        return QComplex.coerce(self.a)

    @property
    def modulus(self) -> float:
        return abs(self.point)

    def to_dict(self) -> Dict[str, Any]:
        if isinstance(self.a, QComplex):
            return {"re": str(self.a.re), "im": str(self.a.im), "mult": self.multiplicity}
        return {"re": self.a.real, "im": self.a.imag, "mult": self.multiplicity}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BlaschkeZero":
        if not isinstance(data, dict) or "re" not in data:
            raise ValueError(f"Blaschke zero must be an object with 're', 'im', 'mult': {data!r}")
        re_part, im_part = data["re"], data.get("im", 0)
        if _exact_value(re_part) and _exact_value(im_part):
            a = QComplex.coerce([re_part, im_part])
        else:
            a = complex(float(re_part), float(im_part))
        return cls(a, int(data.get("mult", 1)))


@dataclass(frozen=True)
class SingularAtom:
    """Point mass `mass` at the boundary point e^{i theta}."""
    theta: float
    mass: float

    def __post_init__(self):
        object.__setattr__(self, "theta", canonical_angle(parse_angle(self.theta)))
        mass = float(self.mass)
        if not math.isfinite(mass) or mass <= 0:
            raise ValueError(f"atom mass must be positive, got {self.mass!r}")
        object.__setattr__(self, "mass", mass)

    def to_dict(self) -> Dict[str, Any]:
        return {"theta": self.theta, "mass": self.mass}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SingularAtom":
        if not isinstance(data, dict) or "theta" not in data or "mass" not in data:
            raise ValueError(f"atom must be an object with 'theta' and 'mass': {data!r}")
        mass = data["mass"]
        if isinstance(mass, str):
            mass = float(Fraction(mass.strip()))
        return cls(parse_angle(data["theta"]), mass)


def _merge_zeros(zeros) -> Tuple[BlaschkeZero, ...]:
    merged: Dict[Any, BlaschkeZero] = {}
    for zero in zeros:
        key = zero.exact
        if key in merged:
            prior = merged[key]
            merged[key] = BlaschkeZero(prior.a, prior.multiplicity + zero.multiplicity)
        else:
            merged[key] = zero
    return tuple(merged.values())


def _merge_atoms(atoms) -> Tuple[SingularAtom, ...]:
    merged: List[SingularAtom] = []
    for atom in atoms:
        for i, prior in enumerate(merged):
            if angle_distance(prior.theta, atom.theta) <= 1e-12:
                merged[i] = SingularAtom(prior.theta, prior.mass + atom.mass)
                break
        else:
            merged.append(atom)
    return tuple(merged)


@dataclass(frozen=True)
class InnerSpec:
    """Inner function G = B * S given by finitely many zeros and atoms.

    Repeated zeros (and atoms at the same angle) are merged on construction.
    """
    blaschke: Tuple[BlaschkeZero, ...] = field(default_factory=tuple)
    atoms: Tuple[SingularAtom, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "blaschke", _merge_zeros(self.blaschke))
        object.__setattr__(self, "atoms", _merge_atoms(self.atoms))

    @property
    def total_multiplicity(self) -> int:
        return sum(zero.multiplicity for zero in self.blaschke)

    @property
    def total_mass(self) -> float:
        return math.fsum(atom.mass for atom in self.atoms)

    def is_trivial(self) -> bool:
        return not self.blaschke and not self.atoms

    def default_truncation(self, derivative_order: int = 0) -> int:
        """64 + 16 per factor, raised until (N+1)^order r^N/(1-r) <= 1e-14 for the largest zero modulus r."""
        N = BASE_TRUNCATION + TRUNCATION_PER_FACTOR * (self.total_multiplicity + len(self.atoms))
        r = max((zero.modulus for zero in self.blaschke), default=0.0)
        if r <= 0.0:
            return N
        limit = 1 << 16
        while N < limit and (N + 1) ** derivative_order * r ** N / (1.0 - r) > TAIL_TARGET:
            N += 8
        return N

    def exclusion_angles(self) -> Tuple[float, ...]:
        """Atom angles plus the directions of zeros hugging the boundary."""
        angles = [atom.theta for atom in self.atoms]
        for zero in self.blaschke:
            if zero.modulus > 1.0 - BOUNDARY_WARNING_DISTANCE:
                angles.append(canonical_angle(cmath.phase(zero.point)))
        return tuple(angles)

    def boundary_warnings(self) -> List[str]:
        warnings = []
        for zero in self.blaschke:
            if 1.0 - zero.modulus < BOUNDARY_WARNING_DISTANCE:
                warnings.append(
                    f"Blaschke zero {zero.point} lies within {BOUNDARY_WARNING_DISTANCE} "
                    f"of the boundary; truncated series will be poor near it"
                )
        return warnings

    def to_dict(self) -> Dict[str, Any]:
        return {
            "blaschke": [zero.to_dict() for zero in self.blaschke],
            "atoms": [atom.to_dict() for atom in self.atoms],
        }

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "InnerSpec":
        if data is None:
            return cls()
        if not isinstance(data, dict):
            raise ValueError("inner spec must be an object with 'blaschke' and 'atoms'")
        zeros = tuple(BlaschkeZero.from_dict(z) for z in data.get("blaschke", []) or [])
        atoms = tuple(SingularAtom.from_dict(a) for a in data.get("atoms", []) or [])
        return cls(zeros, atoms)


# ===== Series builders =====

def _rational_modulus(a: QComplex) -> Optional[Fraction]:
    """|a| when it is rational, else None."""
    sq = a.abs2()
    num, den = math.isqrt(sq.numerator), math.isqrt(sq.denominator)
    if num * num == sq.numerator and den * den == sq.denominator:
        return Fraction(num, den)
    return None


def _blaschke_factor(zero: BlaschkeZero, N: int, mode: str) -> TaylorPoly:
    """One factor: c_0 = |a|, c_k = (|a|/a) conj(a)^(k-1) (|a|^2 - 1)."""
    if mode == RATIONAL:
        a = zero.exact
        if a.is_zero():
            return TaylorPoly.monomial(1, 1, RATIONAL).truncate(N)
        modulus = _rational_modulus(a)
        # Without a rational |a| the unimodular constant |a|/a is dropped
        unit = a.conjugate() / modulus if modulus is not None else QComplex(1)
        abar = a.conjugate()
        coeffs = [a * unit]
        step = unit * (a.abs2() - 1)
        for _ in range(1, N + 1):
            coeffs.append(step)
            step = step * abar
        return TaylorPoly(tuple(coeffs), RATIONAL)

    a = zero.point
    if a == 0:
        return TaylorPoly.monomial(1, 1, FLOAT).truncate(N)
    r = abs(a)
    abar = a.conjugate()
    coeffs = [complex(r)]
    step = (r / a) * (r * r - 1.0)
    for _ in range(1, N + 1):
        coeffs.append(step)
        step *= abar
    return TaylorPoly(tuple(coeffs), FLOAT)


def blaschke_series(zeros, N: int, mode: str = FLOAT) -> TaylorPoly:
    """Taylor coefficients of the finite Blaschke product to degree N."""
    zeros = tuple(zeros)
    total = sum(zero.multiplicity for zero in zeros)
    if N < total:
        raise ValueError(f"truncation {N} is below the total zero multiplicity {total}")
    product = TaylorPoly.constant(1, mode).truncate(N)
    for zero in zeros:
        factor = _blaschke_factor(zero, N, mode)
        for _ in range(zero.multiplicity):
            product = multiply(product, factor, keep=N)
    return product


@lru_cache(maxsize=64)
def _singular_coefficients(atoms: Tuple[Tuple[float, float], ...], N: int) -> Tuple[complex, ...]:
    exponent = [0j] * (N + 1)
    exponent[0] = complex(-math.fsum(mass for _, mass in atoms))
    for k in range(1, N + 1):
        exponent[k] = -2.0 * sum(mass * cmath.exp(-1j * k * theta) for theta, mass in atoms)
    return exp_series(TaylorPoly(tuple(exponent), FLOAT), N).coeffs


def singular_series(atoms, N: int, mode: str = FLOAT) -> TaylorPoly:
    """Atomic singular inner function to degree N via the series exponential.

    The exponent is -sum mu - 2 sum_k (sum mu conj(zeta)^k) z^k. Rational mode
    returns the exact dyadic image of the float coefficients.
    """
    if N < 1:
        raise ValueError(f"singular series needs N >= 1, got {N}")
    atoms = tuple(atoms)
    if not atoms:
        return TaylorPoly.constant(1, mode).truncate(N)
    key = tuple((atom.theta, atom.mass) for atom in atoms)
    series = TaylorPoly(_singular_coefficients(key, N), FLOAT)
    return series.to_mode(mode)


def inner_series(spec: InnerSpec, N: int, mode: str = FLOAT) -> TaylorPoly:
    """G = B * S to degree N."""
    B = blaschke_series(spec.blaschke, N, mode)
    if not spec.atoms:
        return B
    return multiply(B, singular_series(spec.atoms, N, mode), keep=N)


# ===== Modulus checks =====

@dataclass(frozen=True)
class ModulusViolation:
    kind: str
    theta: float
    radius: float
    modulus: float

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "theta": self.theta, "radius": self.radius, "modulus": self.modulus}


@dataclass(frozen=True)
class ModulusReport:
    tol: float
    boundary_points: int
    worst_boundary_deviation: float
    worst_interior_modulus: float
    violations: Tuple[ModulusViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "tol": self.tol,
            "boundary_points": self.boundary_points,
            "worst_boundary_deviation": self.worst_boundary_deviation,
            "worst_interior_modulus": self.worst_interior_modulus,
            "violations": [v.to_dict() for v in self.violations],
        }


def inner_modulus_check(f: TaylorPoly, grid: int, exclusion=(), tol: float = 1e-6,
                        exclusion_radius: float = DEFAULT_EXCLUSION_RADIUS,
                        interior_radii=DEFAULT_INTERIOR_RADII, max_reported: int = 5) -> ModulusReport:
    """|f| <= 1 + tol inside the disk and ||f| - 1| <= tol on boundary points
    farther than exclusion_radius from every exclusion angle."""
    if grid < 16:
        raise ValueError(f"grid must be at least 16, got {grid}")
    thetas = boundary_grid(grid)
    keep = np.ones(grid, dtype=bool)
    for angle in exclusion:
        d = np.abs(thetas - canonical_angle(angle))
        d = np.minimum(d, 2.0 * math.pi - d)
        keep &= d > exclusion_radius
    kept = thetas[keep]

    violations: List[ModulusViolation] = []
    worst_boundary = 0.0
    if kept.size:
        moduli = np.abs(evaluate_many(f, np.exp(1j * kept)))
        deviation = np.abs(moduli - 1.0)
        worst_boundary = float(np.max(deviation))
        for idx in np.argsort(-deviation)[:max_reported]:
            if deviation[idx] > tol:
                violations.append(ModulusViolation("boundary", float(kept[idx]), 1.0, float(moduli[idx])))

    worst_interior = 0.0
    interior_grid = thetas[::max(1, grid // 256)]
    for radius in interior_radii:
        moduli = np.abs(evaluate_many(f, radius * np.exp(1j * interior_grid)))
        idx = int(np.argmax(moduli))
        worst_interior = max(worst_interior, float(moduli[idx]))
        if moduli[idx] > 1.0 + tol and len(violations) < 2 * max_reported:
            violations.append(ModulusViolation("interior", float(interior_grid[idx]), radius, float(moduli[idx])))

    report = ModulusReport(tol, int(kept.size), worst_boundary, worst_interior, tuple(violations))
    logger.debug(f"Modulus check: {kept.size} boundary points, worst deviation {worst_boundary:.3e}")
    return report


# ===== Divisibility =====

@dataclass(frozen=True)
class ZeroResidual:
    a: complex
    order: int
    value: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.value <= self.bound

    def to_dict(self) -> Dict[str, Any]:
        return {"re": self.a.real, "im": self.a.imag, "order": self.order,
                "value": self.value, "bound": self.bound, "ok": self.ok}


@dataclass(frozen=True)
class DivisibilityReport:
    """Both sub-verdicts of "G divides the inner part of f".

    The singular verdict is a tail-stability proxy and is labeled heuristic
    whenever atoms are present.
    """
    blaschke_ok: bool
    singular_ok: bool
    singular_label: str
    residuals: Tuple[ZeroResidual, ...]
    tail_change: float
    tail_bound: float

    @property
    def ok(self) -> bool:
        return self.blaschke_ok and self.singular_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "blaschke_ok": self.blaschke_ok,
            "singular_ok": self.singular_ok,
            "singular_label": self.singular_label,
            "residuals": [r.to_dict() for r in self.residuals if not r.ok],
            "tail_change": self.tail_change,
            "tail_bound": self.tail_bound,
        }


def _singular_tail_check(spec: InnerSpec, f: TaylorPoly, N: int, tol: float):
    S = singular_series(spec.atoms, N, f.mode)
    if f.mode == RATIONAL:
        # Dyadic S makes the triangular solve exact
        h = divide(f, S, N)
        noise = 0.0
    else:
        inverse = reciprocal(S, N)
        h = multiply(f.truncate(N), inverse, keep=N)
        noise = (np.finfo(float).eps * max_abs_coefficient(f) * max_abs_coefficient(inverse)
                 * (N + 1) ** 1.5)
    full = hardy_norm(h)
    half = hardy_norm(h.truncate(N // 2))
    change = abs(full - half)
    bound = tol * max(1.0, full) + noise
    return change <= bound, change, bound


def divides_inner_part(G: InnerSpec, f: TaylorPoly, N_check: Optional[int] = None,
                       tol: float = 1e-9, heuristic_tol: float = 1e-4) -> DivisibilityReport:
    """Blaschke part: f^(j)(a) ~ 0 for j < mult(a). Singular part: h = f/S keeps
    a stable H^2 norm between truncation N_check/2 and N_check."""
    if f.is_zero():
        raise ValueError("divisibility is undefined for the zero series")
    if N_check is None:
        N_check = f.trunc_degree

    residuals: List[ZeroResidual] = []
    for zero in G.blaschke:
        m = zero.multiplicity
        scale = max(1.0, sn_norm(f, m).total)
        point = zero.exact if f.mode == RATIONAL else zero.point
        derivative = f
        for j in range(m):
            if j:
                derivative = differentiate(derivative, 1)
            value = abs(evaluate(derivative, point))
            residuals.append(ZeroResidual(zero.point, j, value, tol * scale))
    blaschke_ok = all(r.ok for r in residuals)

    if G.atoms:
        singular_ok, change, bound = _singular_tail_check(G, f, max(N_check, 2), heuristic_tol)
        label = HEURISTIC
    else:
        singular_ok, change, bound, label = True, 0.0, 0.0, VACUOUS

    if not blaschke_ok:
        logger.debug(f"Blaschke divisibility failed at {sum(not r.ok for r in residuals)} derivative(s)")
    return DivisibilityReport(blaschke_ok, singular_ok, label, tuple(residuals), change, bound)
