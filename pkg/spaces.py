"""
spaces.py
---------
The algebras S_n^2 = {f in H^2 : f^(n) in H^2} with the norm

    ||f||^2_{S_n} = ||f^(n)||^2_{H^2} + ||f||^2_{H^2},

their embedding and nesting inequalities with explicit constants, the
submultiplicativity constant chain, the subalgebra 0S_n^2 of series vanishing
to order n at the origin, and the decomposition
S_n^2 = [1] + [z] + ... + [z^(n-1)] + 0S_n^2.

Every inequality check returns an InequalityReport whose `to_dict()` is the
per-check report JSON: {"check", "n", "lhs", "rhs", "constant", "ok"}.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from series import (
    RATIONAL,
    TaylorPoly,
    differentiate,
    hardy_norm,
    hardy_norm_squared,
    multiply,
    sup_norm_estimate,
    zero_scalar,
)

logger = logging.getLogger(__name__)

# Boundary samples used for the sup-norm side of the pointwise bound
DEFAULT_GRID = 4096

# Absolute slack for float comparisons, scaled by max(1, rhs)
INEQUALITY_SLACK = 1e-12

# Constant of the level-1 product bound (square root of 16)
LEVEL_ONE_PRODUCT_CONSTANT = 4.0

POINTWISE_CONSTANT = 2.0


@dataclass(frozen=True)
class SnNormReport:
    n: int
    hardy_part: float
    derivative_part: float
    total: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "hardy_part": self.hardy_part,
            "derivative_part": self.derivative_part,
            "total": self.total,
        }


@dataclass(frozen=True)
class Decomposition:
    n: int
    poly_part: TaylorPoly
    tail: TaylorPoly


@dataclass(frozen=True)
class InequalityReport:
    check: str
    n: int
    lhs: float
    rhs: float
    constant: float
    ok: bool

    @property
    def ratio(self) -> float:
        """lhs/rhs, the quantity a regression in constants would push above 1."""
        return self.lhs / self.rhs if self.rhs > 0 else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "n": self.n,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constant": self.constant,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class ConstantLevel:
    """Constants at one level of the product-bound chain.

    C and D are the nesting and derivative constants of the level below
    (None at level 1); M is the admissible product constant at this level.
    """
    level: int
    C: Optional[float]
    D: Optional[float]
    M: float

    def to_dict(self) -> Dict[str, Any]:
        return {"level": self.level, "C": self.C, "D": self.D, "M": self.M}


@dataclass(frozen=True)
class SubmultiplicativeReport(InequalityReport):
    chain: Tuple[ConstantLevel, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["chain"] = [level.to_dict() for level in self.chain]
        return data


@dataclass(frozen=True)
class ContainmentReport:
    n: int
    norms: Tuple[SnNormReport, ...]
    checks: Tuple[InequalityReport, ...]

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)


def _holds(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + INEQUALITY_SLACK * max(1.0, rhs)


def _check_order(n: int, name: str = "n"):
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"{name} must be a positive integer, got {n!r}")


def sn_norm(f: TaylorPoly, n: int) -> SnNormReport:
    """S_n^2 norm split into its H^2 and n-th derivative parts."""
    _check_order(n)
    derivative = differentiate(f, n)
    hardy_sq = hardy_norm_squared(f)
    derivative_sq = hardy_norm_squared(derivative)
    # Exact sum first in rational mode so total^2 = hardy^2 + derivative^2 holds tightly
    total = math.sqrt(float(hardy_sq + derivative_sq))
    return SnNormReport(
        n=n,
        hardy_part=math.sqrt(float(hardy_sq)),
        derivative_part=math.sqrt(float(derivative_sq)),
        total=total,
    )


def nesting_constant(k: int) -> float:
    """C_k = sqrt((k!)^2 + 1), so that ||f||_{S_k} <= C_k ||f||_{S_(k+1)}."""
    _check_order(k, "k")
    return math.sqrt(math.factorial(k) ** 2 + 1)


def derivative_constant(k: int) -> float:
    """D_k = C_k^2 bounds ||f||^2_{S_1} by D_k ||f||^2_{S_(k+1)}."""
    _check_order(k, "k")
    return float(math.factorial(k) ** 2 + 1)


def submultiplicative_constants(n: int) -> Tuple[ConstantLevel, ...]:
    """Admissible product constants M for levels 1..n.

    Level 1 uses 4. Going from level k to k+1 the product rule, the nesting
    constant C_k and the derivative constant D_k give
    M_(k+1) = M_k * sqrt(4 C_k^2 (D_k + 1) + C_k^4).
    """
    _check_order(n)
    chain: List[ConstantLevel] = [ConstantLevel(1, None, None, LEVEL_ONE_PRODUCT_CONSTANT)]
    for k in range(1, n):
        C = nesting_constant(k)
        D = derivative_constant(k)
        M = chain[-1].M * math.sqrt(4.0 * C * C * (D + 1.0) + C ** 4)
        chain.append(ConstantLevel(k + 1, C, D, M))
    return tuple(chain)


def check_pointwise_bound(f: TaylorPoly, grid: int = DEFAULT_GRID) -> InequalityReport:
    """sup over the boundary grid of |f| against 2 ||f||_{S_1}."""
    lhs = sup_norm_estimate(f, grid)
    rhs = POINTWISE_CONSTANT * sn_norm(f, 1).total
    return InequalityReport("pointwise_bound", 1, lhs, rhs, POINTWISE_CONSTANT, _holds(lhs, rhs))


def check_nesting(f: TaylorPoly, k: int) -> InequalityReport:
    """||f||_{S_k} <= C_k ||f||_{S_(k+1)}."""
    C = nesting_constant(k)
    lhs = sn_norm(f, k).total
    rhs = C * sn_norm(f, k + 1).total
    return InequalityReport("nesting", k, lhs, rhs, C, _holds(lhs, rhs))


def check_derivative_bound(f: TaylorPoly, k: int) -> InequalityReport:
    """||f'||_{S_k} <= sqrt(D_k + 1) ||f||_{S_(k+1)}."""
    constant = math.sqrt(derivative_constant(k) + 1.0)
    lhs = sn_norm(differentiate(f, 1), k).total
    rhs = constant * sn_norm(f, k + 1).total
    return InequalityReport("derivative_bound", k, lhs, rhs, constant, _holds(lhs, rhs))


def check_submultiplicative(f: TaylorPoly, g: TaylorPoly, n: int) -> SubmultiplicativeReport:
    """||fg||_{S_n} <= M_n ||f||_{S_n} ||g||_{S_n} with the product taken at full degree."""
    chain = submultiplicative_constants(n)
    M = chain[-1].M
    lhs = sn_norm(multiply(f, g, keep="full"), n).total
    rhs = M * sn_norm(f, n).total * sn_norm(g, n).total
    return SubmultiplicativeReport("submultiplicative", n, lhs, rhs, M, _holds(lhs, rhs), chain)


def check_containment(f: TaylorPoly, n: int, grid: int = DEFAULT_GRID) -> ContainmentReport:
    """Norms for levels 1..n+1 plus the pointwise and nesting checks on one series."""
    _check_order(n)
    norms = tuple(sn_norm(f, level) for level in range(1, n + 2))
    checks = [check_pointwise_bound(f, grid)]
    checks.extend(check_nesting(f, k) for k in range(1, n + 1))
    return ContainmentReport(n, norms, tuple(checks))


def default_zero_tolerance(f: TaylorPoly, n: int) -> float:
    if f.mode == RATIONAL:
        return 0.0
    return 1e-10 * sn_norm(f, n).total


def in_zero_subalgebra(f: TaylorPoly, n: int, tol: Optional[float] = None) -> bool:
    """True iff the coefficients a_0..a_(n-1) vanish (|a_i| <= tol)."""
    _check_order(n)
    if tol is None:
        tol = default_zero_tolerance(f, n)
    for c in f.coeffs[:n]:
        if tol == 0:
            if c:
                return False
        elif abs(c) > tol:
            return False
    return True


def decompose(f: TaylorPoly, n: int) -> Decomposition:
    """Split f into its polynomial head of degree < n and its 0S_n^2 tail."""
    _check_order(n)
    zero = zero_scalar(f.mode)
    poly_part = TaylorPoly(f.coeffs[:n], f.mode)
    head = min(n, len(f.coeffs))
    tail = TaylorPoly((zero,) * head + f.coeffs[head:], f.mode)
    return Decomposition(n, poly_part, tail)
