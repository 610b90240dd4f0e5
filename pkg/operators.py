"""
operators.py
------------
Coefficient-level operators on truncated series.

- shift (M_z):              z^k -> z^(k+1)
- volterra:                 f -> integral_0^z f
- t_n(n):                   f -> z f + n integral_0^z f, i.e. z^k -> ((k+1+n)/(k+1)) z^(k+1)
- riemann_liouville(n):     z^k -> (k!/(k+n)!) z^(k+n)
- nth_derivative(n):        f -> f^(n)

plus their monomial-basis band matrices and the identity checks linking them:
V_n T_n = M_z V_n, D^n V_n = Id, V_n D^n = Id on 0S_n^2.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

import numpy as np

from series import (
    RATIONAL,
    DiskPoint,
    ModeMismatchError,
    TaylorPoly,
    add,
    differentiate,
    evaluate_many,
    hardy_norm,
    integrate,
    max_abs_coefficient,
    max_abs_residual,
    scale,
    times_z_power,
    to_scalar,
    zero_scalar,
)
from spaces import InequalityReport, decompose, sn_norm

logger = logging.getLogger(__name__)

# Relative coefficient residual accepted for identities in float mode
FLOAT_IDENTITY_TOL = 1e-12

# Constant of the V_n boundedness estimate ||V_n f||_{S_n} <= 2 ||f||_{H^2}
BOUNDEDNESS_CONSTANT = 2.0


class OperatorKind(str, Enum):
    SHIFT = "shift"
    VOLTERRA = "volterra"
    RIEMANN_LIOUVILLE = "riemann_liouville"
    NTH_DERIVATIVE = "nth_derivative"
    T_N = "t_n"


_PARAMETRIZED = (OperatorKind.RIEMANN_LIOUVILLE, OperatorKind.NTH_DERIVATIVE, OperatorKind.T_N)

_TAG_PATTERN = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*(\d+)\s*\))?\s*$")


@dataclass(frozen=True)
class OperatorTag:
    """An operator kind plus its order for the parametrized kinds.

    The text form used on the command line is `shift`, `volterra`, `t_n(2)`,
    `riemann_liouville(3)` or `nth_derivative(5)`.
    """
    kind: OperatorKind
    n: Optional[int] = None

    def __post_init__(self):
        kind = OperatorKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in _PARAMETRIZED:
            if not isinstance(self.n, int) or self.n < 1:
                raise ValueError(f"operator '{kind.value}' needs an order n >= 1, got {self.n!r}")
        elif self.n is not None:
            raise ValueError(f"operator '{kind.value}' takes no order")

    @classmethod
    def parse(cls, text: str) -> "OperatorTag":
        match = _TAG_PATTERN.match(text or "")
        if not match:
            raise ValueError(f"cannot parse operator tag '{text}'")
        name, order = match.group(1), match.group(2)
        try:
            kind = OperatorKind(name)
        except ValueError:
            known = ", ".join(k.value for k in OperatorKind)
            raise ValueError(f"unknown operator '{name}' (known: {known})") from None
        return cls(kind, int(order) if order is not None else None)

    @property
    def band(self) -> int:
        return self.n if self.kind in (OperatorKind.RIEMANN_LIOUVILLE, OperatorKind.NTH_DERIVATIVE) else 1

    def __str__(self):
        if self.n is None:
            return self.kind.value
        return f"{self.kind.value}({self.n})"


def _check_order(n: int):
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"operator order must be a positive integer, got {n!r}")


# ===== Operators =====

def apply_shift(f: TaylorPoly) -> TaylorPoly:
    """M_z: b_(k+1) = a_k, b_0 = 0."""
    return times_z_power(f, 1)


def apply_volterra(f: TaylorPoly) -> TaylorPoly:
    return integrate(f)


def apply_tn(f: TaylorPoly, n: int) -> TaylorPoly:
    """T_n f = z f + n * integral_0^z f."""
    _check_order(n)
    return add(apply_shift(f), scale(integrate(f), n))


def apply_tn_weighted(f: TaylorPoly, n: int) -> TaylorPoly:
    """T_n through its weighted-shift form z^k -> ((k+1+n)/(k+1)) z^(k+1)."""
    _check_order(n)
    if f.mode == RATIONAL:
        weights = [Fraction(k + 1 + n, k + 1) for k in range(len(f.coeffs))]
    else:
        weights = [(k + 1 + n) / (k + 1) for k in range(len(f.coeffs))]
    return TaylorPoly((zero_scalar(f.mode),) + tuple(w * c for w, c in zip(weights, f.coeffs)), f.mode)


def apply_riemann_liouville(f: TaylorPoly, n: int) -> TaylorPoly:
    """V_n: z^k -> (k!/(k+n)!) z^(k+n); trunc_degree N + n."""
    _check_order(n)
    if f.mode == RATIONAL:
        image = tuple(c / math.perm(k + n, n) for k, c in enumerate(f.coeffs))
    else:
        image = []
        for k, c in enumerate(f.coeffs):
            ratio = 1.0
            for j in range(1, n + 1):
                ratio /= k + j
            image.append(c * ratio)
        image = tuple(image)
    return TaylorPoly((zero_scalar(f.mode),) * n + image, f.mode)


def apply_iterated_volterra(f: TaylorPoly, n: int) -> TaylorPoly:
    """n-fold primitive, each vanishing at the origin."""
    _check_order(n)
    for _ in range(n):
        f = integrate(f)
    return f


def apply_nth_derivative(f: TaylorPoly, n: int) -> TaylorPoly:
    _check_order(n)
    return differentiate(f, n)


def apply_operator(tag: OperatorTag, f: TaylorPoly) -> TaylorPoly:
    if tag.kind is OperatorKind.SHIFT:
        return apply_shift(f)
    if tag.kind is OperatorKind.VOLTERRA:
        return apply_volterra(f)
    if tag.kind is OperatorKind.T_N:
        return apply_tn(f, tag.n)
    if tag.kind is OperatorKind.RIEMANN_LIOUVILLE:
        return apply_riemann_liouville(f, tag.n)
    return apply_nth_derivative(f, tag.n)


def riemann_liouville_quadrature(f: TaylorPoly, n: int, z: Any, nodes: int = 64) -> complex:
    """(1/(n-1)!) integral_0^z (z-w)^(n-1) f(w) dw by Gauss-Legendre on the segment [0, z].

    Used as an independent oracle for the monomial rule of V_n.
    """
    _check_order(n)
    if isinstance(z, DiskPoint):
        z = z.z
    z = complex(z)
    t, w = np.polynomial.legendre.leggauss(nodes)
    s = (t + 1.0) / 2.0
    points = s * z
    integrand = (z - points) ** (n - 1) * evaluate_many(f, points)
    return complex(np.sum((w / 2.0) * integrand) * z / math.factorial(n - 1))


# ===== Band matrices =====

@dataclass(frozen=True)
class BandMatrix:
    """Monomial-basis matrix of an operator truncated to dim x dim.

    `entries` maps (row, col) to the non-zero scalars; every key satisfies
    |row - col| <= band.
    """
    dim: int
    band: int
    entries: Dict[Tuple[int, int], Any] = field(default_factory=dict)
    mode: str = RATIONAL
    op: Optional[str] = None

    def entry(self, row: int, col: int):
        return self.entries.get((row, col), zero_scalar(self.mode))

    def apply(self, f: TaylorPoly) -> TaylorPoly:
        """Matrix-vector product on the first dim coefficients of f."""
        if f.mode != self.mode:
            raise ModeMismatchError(f"matrix is '{self.mode}' but series is '{f.mode}'")
        out = [zero_scalar(self.mode)] * self.dim
        for (row, col), value in self.entries.items():
            if col < len(f.coeffs):
                out[row] = out[row] + value * f.coeffs[col]
        return TaylorPoly(tuple(out), self.mode)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for (row, col), value in self.entries.items():
            dense[row, col] = complex(value)
        return dense

    def perturbed(self, row: int, col: int, delta: Any) -> "BandMatrix":
        """Copy with entry (row, col) shifted by delta; backs the harness sensitivity self-test."""
        entries = dict(self.entries)
        entries[(row, col)] = self.entry(row, col) + to_scalar(delta, self.mode)
        return BandMatrix(self.dim, max(self.band, abs(row - col)), entries, self.mode, self.op)

    def to_dict(self) -> Dict[str, Any]:
        rows = []
        for (row, col) in sorted(self.entries):
            value = self.entries[(row, col)]
            if self.mode == RATIONAL:
                pair = [str(value.re), str(value.im)]
            else:
                pair = [value.real, value.imag]
            rows.append([row, col, pair])
        return {"dim": self.dim, "op": self.op, "band": self.band, "mode": self.mode, "entries": rows}


def _monomial_image(op: OperatorTag, k: int) -> Tuple[int, Fraction]:
    """Every supported operator sends z^k to weight * z^row."""
    if op.kind is OperatorKind.SHIFT:
        return k + 1, Fraction(1)
    if op.kind is OperatorKind.VOLTERRA:
        return k + 1, Fraction(1, k + 1)
    if op.kind is OperatorKind.T_N:
        return k + 1, Fraction(k + 1 + op.n, k + 1)
    if op.kind is OperatorKind.RIEMANN_LIOUVILLE:
        return k + op.n, Fraction(1, math.perm(k + op.n, op.n))
    return k - op.n, Fraction(math.perm(k, op.n))


def matrix_of(op: OperatorTag, dim: int, mode: str = RATIONAL) -> BandMatrix:
    """Column k holds the image of z^k under `op`, cut to dim rows."""
    if dim < 1:
        raise ValueError(f"matrix dimension must be at least 1, got {dim}")
    entries = {}
    for k in range(dim):
        row, weight = _monomial_image(op, k)
        if 0 <= row < dim and weight:
            entries[(row, k)] = to_scalar(weight, mode)
    return BandMatrix(dim, op.band, entries, mode, str(op))


# ===== Identity checks =====

@dataclass(frozen=True)
class IdentityReport:
    """Coefficientwise comparison of two computations of the same series."""
    check: str
    n: int
    lhs: TaylorPoly
    rhs: TaylorPoly
    max_abs_residual: float
    relative_residual: float
    tol: float

    @property
    def ok(self) -> bool:
        if self.lhs.mode == RATIONAL and self.tol == 0:
            return self.max_abs_residual == 0.0
        return self.relative_residual <= self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "n": self.n,
            "max_abs_residual": self.max_abs_residual,
            "relative_residual": self.relative_residual,
            "ok": self.ok,
        }


def _default_tol(f: TaylorPoly) -> float:
    return 0.0 if f.mode == RATIONAL else FLOAT_IDENTITY_TOL


def compare_series(check: str, n: int, lhs: TaylorPoly, rhs: TaylorPoly,
                   tol: Optional[float] = None) -> IdentityReport:
    residual = max_abs_residual(lhs, rhs)
    scale_ = max(1.0, max_abs_coefficient(lhs), max_abs_coefficient(rhs))
    return IdentityReport(check, n, lhs, rhs, residual, residual / scale_,
                          _default_tol(lhs) if tol is None else tol)


def verify_intertwining(n: int, f: TaylorPoly, tol: Optional[float] = None) -> IdentityReport:
    """V_n(T_n f) against M_z(V_n f); exact zero residual expected in rational mode."""
    _check_order(n)
    lhs = apply_riemann_liouville(apply_tn(f, n), n)
    rhs = apply_shift(apply_riemann_liouville(f, n))
    return compare_series("intertwining", n, lhs, rhs, tol)


@dataclass(frozen=True)
class InverseReport:
    n: int
    forward: IdentityReport
    backward: IdentityReport
    kernel: IdentityReport

    @property
    def ok(self) -> bool:
        return self.forward.ok and self.backward.ok and self.kernel.ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "forward": self.forward.to_dict(),
            "backward": self.backward.to_dict(),
            "kernel": self.kernel.to_dict(),
            "ok": self.ok,
        }


def verify_inverse(n: int, f: TaylorPoly, g: Optional[TaylorPoly] = None,
                   tol: Optional[float] = None) -> InverseReport:
    """D^n V_n f = f, V_n D^n g = g for g in 0S_n^2 (default g = z^n f), and
    V_n D^n f = the 0S_n^2 tail of f (the head of degree < n is annihilated)."""
    _check_order(n)
    if g is None:
        g = times_z_power(f, n)
    forward = compare_series("inverse_forward", n,
                             apply_nth_derivative(apply_riemann_liouville(f, n), n), f, tol)
    backward = compare_series("inverse_backward", n,
                              apply_riemann_liouville(apply_nth_derivative(g, n), n), g, tol)
    kernel = compare_series("inverse_kernel", n,
                            apply_riemann_liouville(apply_nth_derivative(f, n), n),
                            decompose(f, n).tail, tol)
    return InverseReport(n, forward, backward, kernel)


def verify_iterated_integral(n: int, f: TaylorPoly, tol: Optional[float] = None) -> IdentityReport:
    """n-fold integrate against V_n."""
    return compare_series("iterated_integral", n, apply_iterated_volterra(f, n),
                          apply_riemann_liouville(f, n), tol)


def verify_tn_paths(n: int, f: TaylorPoly, tol: Optional[float] = None) -> IdentityReport:
    """shift + n*integrate against the weighted-shift form."""
    return compare_series("tn_dual_path", n, apply_tn(f, n), apply_tn_weighted(f, n), tol)


def verify_matrix(tag: OperatorTag, f: TaylorPoly, matrix: Optional[BandMatrix] = None,
                  tol: Optional[float] = None) -> IdentityReport:
    """Band matrix product against the functional operator, both cut to dim rows."""
    if matrix is None:
        matrix = matrix_of(tag, len(f.coeffs), f.mode)
    lhs = matrix.apply(f.truncate(matrix.dim - 1))
    rhs = apply_operator(tag, f).truncate(matrix.dim - 1)
    return compare_series(f"matrix[{tag}]", tag.n or 1, lhs, rhs,
                          tol if tol is not None else (0.0 if f.mode == RATIONAL else 1e-13))


def verify_range(n: int, f: TaylorPoly, image: Optional[TaylorPoly] = None) -> IdentityReport:
    """The first n coefficients of V_n f vanish exactly: range V_n lies in 0S_n^2.

    `image` may carry a precomputed V_n f.
    """
    _check_order(n)
    if image is None:
        image = apply_riemann_liouville(f, n)
    head = decompose(image, n).poly_part
    return compare_series("range", n, head, TaylorPoly.zero(f.mode).truncate(head.trunc_degree),
                          0.0 if f.mode == RATIONAL else None)


def verify_boundedness(n: int, f: TaylorPoly, image: Optional[TaylorPoly] = None) -> InequalityReport:
    """||V_n f||_{S_n} <= 2 ||f||_{H^2}, with the left side in floating point."""
    _check_order(n)
    if image is None:
        image = apply_riemann_liouville(f, n)
    lhs = sn_norm(image.to_float(), n).total
    rhs = BOUNDEDNESS_CONSTANT * hardy_norm(f)
    ok = lhs <= rhs + 1e-12 * max(1.0, rhs)
    return InequalityReport("boundedness", n, lhs, rhs, BOUNDEDNESS_CONSTANT, ok)
