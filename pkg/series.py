"""
series.py
---------
Truncated Taylor series core for the volterra-lattice toolkit.

A TaylorPoly holds the coefficients a_0..a_N of f(z) = sum a_k z^k together with
a scalar mode:

- "float": coefficients are Python complex numbers (IEEE double pairs).
- "rational": coefficients are QComplex values whose real and imaginary parts
  are fractions.Fraction, so every ring operation is exact.

All values are immutable and every function here is pure, so series can be
shared freely between suite worker threads.

Series JSON:
------------
    {"mode": "float" | "rational", "coeffs": [[re, im], ...]}

Rational parts are written as "p/q" strings and read back bit-exactly.
"""

import cmath
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

FLOAT = "float"
RATIONAL = "rational"
MODES = (FLOAT, RATIONAL)

TWO_PI = 2.0 * math.pi

# Boundary angles closer than this are treated as the same point
ANGLE_TOL = 1e-12


class ModeMismatchError(ValueError):
    """Raised when series of different scalar modes are combined."""


class QComplex:
    """Exact complex number with Fraction real and imaginary parts.

    Instances are treated as immutable. Mixed arithmetic with int and Fraction
    is supported; mixing with float or complex is refused so that rounding can
    never leak into exact computations.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def coerce(cls, value: Any) -> "QComplex":
        """Convert ints, fractions, floats, complex numbers, "p/q" strings and
        [re, im] pairs to an exact value. Floats convert exactly (binary value)."""
        if isinstance(value, QComplex):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        if isinstance(value, (float, np.floating)):
            return cls(Fraction(float(value)), 0)
        if isinstance(value, (complex, np.complexfloating)):
            value = complex(value)
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, np.integer):
            return cls(int(value), 0)
        if isinstance(value, str):
            return cls(_parse_fraction(value), 0)
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return cls(_parse_fraction(value[0]), _parse_fraction(value[1]))
        raise TypeError(f"cannot convert {value!r} to an exact complex scalar")

    @staticmethod
    def _lift(other):
        if isinstance(other, QComplex):
            return other
        if isinstance(other, (int, Fraction)):
            return QComplex(other, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QComplex(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QComplex(self.re * other, self.im * other)
        if isinstance(other, QComplex):
            return QComplex(self.re * other.re - self.im * other.im,
                            self.re * other.im + self.im * other.re)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by exact zero")
            return QComplex(self.re / other, self.im / other)
        if isinstance(other, QComplex):
            d = other.abs2()
            if d == 0:
                raise ZeroDivisionError("division by exact zero")
            return QComplex((self.re * other.re + self.im * other.im) / d,
                            (self.im * other.re - self.re * other.im) / d)
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "QComplex":
        return QComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        if isinstance(other, QComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"QComplex({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


QZERO = QComplex(0, 0)
QONE = QComplex(1, 0)


def _parse_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational number")


def to_scalar(value: Any, mode: str):
    """Coerce a value to the scalar type of `mode`."""
    if mode == FLOAT:
        if isinstance(value, str):
            return complex(float(Fraction(value.strip())))
        if isinstance(value, (list, tuple)):
            return complex(float(_parse_fraction(value[0])), float(_parse_fraction(value[1])))
        if isinstance(value, Fraction):
            return complex(float(value))
        return complex(value)
    if mode == RATIONAL:
        return QComplex.coerce(value)
    raise ValueError(f"Unknown scalar mode '{mode}'. Use 'float' or 'rational'.")


def zero_scalar(mode: str):
    return 0j if mode == FLOAT else QZERO


@dataclass(frozen=True)
class DiskPoint:
    """A point of the open unit disk."""
    z: complex

    def __post_init__(self):
        if not abs(complex(self.z)) < 1.0:
            raise ValueError(f"DiskPoint requires |z| < 1, got {self.z!r}")


@dataclass(frozen=True)
class TaylorPoly:
    """Truncated power series a_0 + a_1 z + ... + a_N z^N in one scalar mode.

    `coeffs` always holds N + 1 entries; trailing zeros are allowed and carry
    truncation bookkeeping. The zero polynomial is (0,) with N = 0.
    """
    coeffs: Tuple[Any, ...]
    mode: str = FLOAT

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"Unknown scalar mode '{self.mode}'. Use 'float' or 'rational'.")
        if not self.coeffs:
            object.__setattr__(self, "coeffs", (zero_scalar(self.mode),))
        elif not isinstance(self.coeffs, tuple):
            object.__setattr__(self, "coeffs", tuple(self.coeffs))

    # ----- construction -----

    @classmethod
    def from_coeffs(cls, values: Iterable[Any], mode: str = FLOAT) -> "TaylorPoly":
        coeffs = tuple(to_scalar(v, mode) for v in values)
        if mode == FLOAT:
            for c in coeffs:
                if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                    raise ValueError("float series coefficients must be finite")
        return cls(coeffs, mode)

    @classmethod
    def zero(cls, mode: str = FLOAT) -> "TaylorPoly":
        return cls((zero_scalar(mode),), mode)

    @classmethod
    def constant(cls, value: Any, mode: str = FLOAT) -> "TaylorPoly":
        return cls((to_scalar(value, mode),), mode)

    @classmethod
    def monomial(cls, k: int, value: Any = 1, mode: str = FLOAT) -> "TaylorPoly":
        """value * z^k with trunc_degree k."""
        if k < 0:
            raise ValueError("monomial degree must be non-negative")
        zero = zero_scalar(mode)
        return cls((zero,) * k + (to_scalar(value, mode),), mode)

    # ----- inspection -----

    @property
    def trunc_degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def degree(self) -> int:
        """Index of the highest non-zero coefficient (0 for the zero series)."""
        for k in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[k]:
                return k
        return 0

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return zero_scalar(self.mode)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, N: int) -> "TaylorPoly":
        """Keep indices 0..N, padding with zeros when N exceeds trunc_degree."""
        if N < 0:
            raise ValueError("truncation degree must be non-negative")
        head = self.coeffs[:N + 1]
        if len(head) < N + 1:
            head = head + (zero_scalar(self.mode),) * (N + 1 - len(head))
        return TaylorPoly(head, self.mode)

    def to_numpy(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=np.complex128)

    def to_float(self) -> "TaylorPoly":
        if self.mode == FLOAT:
            return self
        return TaylorPoly(tuple(complex(c) for c in self.coeffs), FLOAT)

    def to_rational(self) -> "TaylorPoly":
        if self.mode == RATIONAL:
            return self
        return TaylorPoly(tuple(QComplex.coerce(c) for c in self.coeffs), RATIONAL)

    def to_mode(self, mode: str) -> "TaylorPoly":
        return self.to_rational() if mode == RATIONAL else self.to_float()

    # ----- operators sugar -----

    def __add__(self, other):
        if not isinstance(other, TaylorPoly):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other):
        if not isinstance(other, TaylorPoly):
            return NotImplemented
        return subtract(self, other)

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, TaylorPoly):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    # ----- Series JSON -----

    def to_dict(self) -> Dict[str, Any]:
        if self.mode == RATIONAL:
            pairs = [[str(c.re), str(c.im)] for c in self.coeffs]
        else:
            pairs = [[c.real, c.imag] for c in self.coeffs]
        return {"mode": self.mode, "coeffs": pairs}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TaylorPoly":
        if not isinstance(data, dict) or "coeffs" not in data:
            raise ValueError("series JSON must be an object with 'mode' and 'coeffs'")
        mode = data.get("mode", FLOAT)
        coeffs = data["coeffs"]
        if not isinstance(coeffs, list):
            raise ValueError("series 'coeffs' must be a list of [re, im] pairs")
        values = []
        for entry in coeffs:
            if isinstance(entry, (list, tuple)):
                if len(entry) != 2:
                    raise ValueError(f"coefficient {entry!r} is not an [re, im] pair")
                values.append(list(entry))
            else:
                values.append(entry)
        return cls.from_coeffs(values, mode)


def _check_modes(*polys: TaylorPoly) -> str:
    mode = polys[0].mode
    for p in polys[1:]:
        if p.mode != mode:
            raise ModeMismatchError(f"cannot combine '{mode}' and '{p.mode}' series")
    return mode


def _padded(f: TaylorPoly, length: int) -> Tuple[Any, ...]:
    if len(f.coeffs) >= length:
        return f.coeffs
    return f.coeffs + (zero_scalar(f.mode),) * (length - len(f.coeffs))


# ===== Arithmetic =====

def add(f: TaylorPoly, g: TaylorPoly) -> TaylorPoly:
    """Coefficientwise sum; trunc_degree = max(N_f, N_g)."""
    mode = _check_modes(f, g)
    length = max(len(f.coeffs), len(g.coeffs))
    a, b = _padded(f, length), _padded(g, length)
    return TaylorPoly(tuple(x + y for x, y in zip(a, b)), mode)


def subtract(f: TaylorPoly, g: TaylorPoly) -> TaylorPoly:
    mode = _check_modes(f, g)
    length = max(len(f.coeffs), len(g.coeffs))
    a, b = _padded(f, length), _padded(g, length)
    return TaylorPoly(tuple(x - y for x, y in zip(a, b)), mode)


def scale(f: TaylorPoly, c: Any) -> TaylorPoly:
    """Multiply every coefficient by the scalar c (coerced to f's mode)."""
    if isinstance(c, (int, Fraction)) and f.mode == RATIONAL:
        factor = c
    else:
        factor = to_scalar(c, f.mode)
    return TaylorPoly(tuple(factor * x for x in f.coeffs), f.mode)


def times_z_power(f: TaylorPoly, k: int) -> TaylorPoly:
    """z^k * f; trunc_degree grows by k."""
    if k < 0:
        raise ValueError("power must be non-negative")
    return TaylorPoly((zero_scalar(f.mode),) * k + f.coeffs, f.mode)


def _integer_form(coeffs: Sequence[QComplex]):
    """Common denominator and integer numerators of exact coefficients."""
    den = 1
    for c in coeffs:
        den = math.lcm(den, c.re.denominator, c.im.denominator)
    re = [c.re.numerator * (den // c.re.denominator) for c in coeffs]
    im = [c.im.numerator * (den // c.im.denominator) for c in coeffs]
    return den, re, im


def _pack(values: Sequence[int], bits: int) -> int:
    acc = 0
    for v in reversed(values):
        acc = (acc << bits) + v
    return acc


def _unpack(value: int, bits: int, count: int):
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    out = []
    for _ in range(count):
        digit = value & mask
        value >>= bits
        if digit >= half:
            digit -= 1 << bits
            value += 1
        out.append(digit)
    return out


def _int_convolve(a: Sequence[int], b: Sequence[int]):
    """Exact convolution of signed integer sequences by Kronecker substitution."""
    count = len(a) + len(b) - 1
    if not any(a) or not any(b):
        return [0] * count
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    bits = bound.bit_length() + 2
    return _unpack(_pack(a, bits) * _pack(b, bits), bits, count)


def _exact_product(a: Sequence[QComplex], b: Sequence[QComplex]):
    da, ar, ai = _integer_form(a)
    db, br, bi = _integer_form(b)
    count = len(a) + len(b) - 1
    real = _int_convolve(ar, br)
    imag = [0] * count
    if any(ai) and any(bi):
        real = [x - y for x, y in zip(real, _int_convolve(ai, bi))]
    if any(bi):
        imag = [x + y for x, y in zip(imag, _int_convolve(ar, bi))]
    if any(ai):
        imag = [x + y for x, y in zip(imag, _int_convolve(ai, br))]
    den = da * db
    return [QComplex(Fraction(x, den), Fraction(y, den)) for x, y in zip(real, imag)]


def multiply(f: TaylorPoly, g: TaylorPoly, keep: Union[int, str] = "full") -> TaylorPoly:
    """Cauchy product.

    keep="full" returns the whole product (trunc_degree N_f + N_g); an integer
    keep returns the product truncated (or zero padded) to trunc_degree keep.
    Rational mode is exact.
    """
    mode = _check_modes(f, g)
    if keep == "full":
        top = f.trunc_degree + g.trunc_degree
    elif isinstance(keep, int) and not isinstance(keep, bool) and keep >= 0:
        top = keep
    else:
        raise ValueError(f"keep must be 'full' or a non-negative integer, got {keep!r}")

    a, b = f.coeffs[:top + 1], g.coeffs[:top + 1]
    if mode == FLOAT:
        prod = np.convolve(np.array(a, dtype=np.complex128), np.array(b, dtype=np.complex128))
        coeffs = tuple(complex(c) for c in prod[:top + 1])
    else:
        coeffs = tuple(_exact_product(a, b)[:top + 1])
    return TaylorPoly(coeffs, mode).truncate(top)


# ===== Calculus =====

def differentiate(f: TaylorPoly, order: int = 1) -> TaylorPoly:
    """order-th derivative: b_k = (k+order)!/k! * a_{k+order}; trunc_degree N - order.

    A series with N < order differentiates to the zero polynomial.
    """
    if order < 1:
        raise ValueError(f"derivative order must be positive, got {order}")
    N = f.trunc_degree
    if N < order:
        return TaylorPoly.zero(f.mode)
    return TaylorPoly(
        tuple(math.perm(k + order, order) * f.coeffs[k + order] for k in range(N - order + 1)),
        f.mode,
    )


def integrate(f: TaylorPoly) -> TaylorPoly:
    """Primitive vanishing at 0: b_{k+1} = a_k/(k+1); trunc_degree N + 1."""
    return TaylorPoly(
        (zero_scalar(f.mode),) + tuple(c / (k + 1) for k, c in enumerate(f.coeffs)),
        f.mode,
    )


# ===== Evaluation =====

def _is_exact_point(z: Any) -> bool:
    return isinstance(z, (int, Fraction, QComplex))


def _exact_horner(coeffs: Sequence[QComplex], z: QComplex) -> QComplex:
    # Homogenized Horner over integers: no gcd work until the final division
    den, re, im = _integer_form(coeffs)
    r = math.lcm(z.re.denominator, z.im.denominator)
    p = z.re.numerator * (r // z.re.denominator)
    q = z.im.numerator * (r // z.im.denominator)
    top = len(coeffs) - 1
    acc_re, acc_im = re[top], im[top]
    power = 1
    for k in range(top - 1, -1, -1):
        power *= r
        acc_re, acc_im = (acc_re * p - acc_im * q + re[k] * power,
                          acc_re * q + acc_im * p + im[k] * power)
    total = den * power
    return QComplex(Fraction(acc_re, total), Fraction(acc_im, total))


def evaluate(f: TaylorPoly, z: Any):
    """Horner evaluation of f at z.

    Exact (QComplex) when f is rational and z is an exact point; complex otherwise.
    """
    if f.mode == RATIONAL and _is_exact_point(z):
        return _exact_horner(f.coeffs, QComplex.coerce(z))
    zc = complex(z)
    acc = 0j
    for c in reversed(f.coeffs):
        acc = acc * zc + complex(c)
    return acc


def evaluate_many(f: TaylorPoly, points: np.ndarray) -> np.ndarray:
    """Vectorized float evaluation at an array of points."""
    return np.polyval(f.to_numpy()[::-1], np.asarray(points, dtype=np.complex128))


def boundary_grid(grid_size: int) -> np.ndarray:
    """Angles 2*pi*j/grid_size; doubling a grid keeps the old nodes bit-exactly."""
    return np.arange(grid_size) / grid_size * TWO_PI


# ===== Norms =====

def hardy_norm_squared(f: TaylorPoly):
    """sum |a_k|^2, exact Fraction in rational mode."""
    if f.mode == RATIONAL:
        den, re, im = _integer_form(f.coeffs)
        return Fraction(sum(x * x + y * y for x, y in zip(re, im)), den * den)
    return math.fsum(c.real * c.real + c.imag * c.imag for c in f.coeffs)


def hardy_norm(f: TaylorPoly) -> float:
    """H^2 norm sqrt(sum |a_k|^2)."""
    return math.sqrt(float(hardy_norm_squared(f)))


def hardy_inner(f: TaylorPoly, g: TaylorPoly):
    """<f, g> = sum a_k conj(b_k); exact in rational mode."""
    mode = _check_modes(f, g)
    count = min(len(f.coeffs), len(g.coeffs))
    if mode == FLOAT:
        return complex(np.vdot(np.array(g.coeffs[:count]), np.array(f.coeffs[:count])))
    acc = QZERO
    for a, b in zip(f.coeffs[:count], g.coeffs[:count]):
        acc = acc + a * b.conjugate()
    return acc


def sup_norm_estimate(f: TaylorPoly, grid_size: int) -> float:
    """Maximum of |f| over grid_size equispaced boundary points.

    This is a lower bound for the sup norm on the closed disk, so using it on
    the left of an upper-bound inequality keeps the check sound.
    """
    if grid_size < 16:
        raise ValueError(f"grid_size must be at least 16, got {grid_size}")
    values = evaluate_many(f, np.exp(1j * boundary_grid(grid_size)))
    return float(np.sqrt(np.max(values.real ** 2 + values.imag ** 2)))


def max_abs_residual(f: TaylorPoly, g: TaylorPoly) -> float:
    """max_k |a_k - b_k| over the padded coefficient ranges; 0.0 iff exactly equal in rational mode."""
    mode = _check_modes(f, g)
    length = max(len(f.coeffs), len(g.coeffs))
    a, b = _padded(f, length), _padded(g, length)
    if mode == RATIONAL:
        worst = max((x - y).abs2() for x, y in zip(a, b))
        return math.sqrt(float(worst))
    return max(abs(x - y) for x, y in zip(a, b))


def max_abs_coefficient(f: TaylorPoly) -> float:
    return max(abs(c) for c in f.coeffs)


# ===== Reciprocal, division, exponential =====

def reciprocal(f: TaylorPoly, N: int) -> TaylorPoly:
    """1/f to trunc_degree N by Newton iteration g <- g(2 - f g)."""
    head = f.coeffs[0]
    if not head:
        raise ValueError("series with zero constant term has no reciprocal")
    mode = f.mode
    g = TaylorPoly((to_scalar(1, mode) / head,), mode)
    two = TaylorPoly.constant(2, mode)
    precision = 1
    while precision < N + 1:
        precision = min(2 * precision, N + 1)
        fg = multiply(f.truncate(precision - 1), g, keep=precision - 1)
        g = multiply(g, subtract(two, fg), keep=precision - 1)
    return g.truncate(N)


def _exact_quotient(f: Sequence[QComplex], g: Sequence[QComplex], N: int) -> Tuple[QComplex, ...]:
    # Triangular solve of h*g = f; denominators stay small whenever the true quotient is a polynomial
    head = g[0]
    h = []
    for k in range(N + 1):
        acc = f[k]
        for j in range(max(0, k - len(g) + 1), k):
            if h[j]:
                acc = acc - h[j] * g[k - j]
        h.append(acc / head)
    return tuple(h)


def divide(f: TaylorPoly, g: TaylorPoly, N: int = None) -> TaylorPoly:
    """Series quotient f/g to trunc_degree N (default N_f); g(0) must be non-zero.

    Float mode multiplies by the Newton reciprocal; rational mode solves the
    triangular system exactly.
    """
    mode = _check_modes(f, g)
    if N is None:
        N = f.trunc_degree
    if not g.coeffs[0]:
        raise ValueError("cannot divide by a series with zero constant term")
    if mode == RATIONAL:
        return TaylorPoly(_exact_quotient(_padded(f, N + 1), g.coeffs[:N + 1], N), mode)
    return multiply(f.truncate(N), reciprocal(g, N), keep=N)


def exp_series(exponent: TaylorPoly, N: int) -> TaylorPoly:
    """Float series of exp(E) from s' = E' s: k s_k = sum_j j e_j s_{k-j}."""
    e = [complex(c) for c in _padded(exponent, N + 1)[:N + 1]]
    weighted = [j * e[j] for j in range(N + 1)]
    s = [0j] * (N + 1)
    s[0] = cmath.exp(e[0])
    for k in range(1, N + 1):
        acc = 0j
        for j in range(1, k + 1):
            acc += weighted[j] * s[k - j]
        s[k] = acc / k
    return TaylorPoly(tuple(s), FLOAT)


# ===== Boundary points =====

def canonical_angle(theta: float) -> float:
    """Angle reduced to [0, 2*pi)."""
    t = math.fmod(float(theta), TWO_PI)
    if t < 0:
        t += TWO_PI
    if t >= TWO_PI - ANGLE_TOL:
        t = 0.0
    return t


_PI_MULTIPLE = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$")


def parse_angle(value: Any) -> float:
    """Read an angle given as a number or as text like "pi", "pi/2", "3*pi/4", "-pi/3"."""
    if isinstance(value, bool):
        raise ValueError(f"invalid angle {value!r}")
    if isinstance(value, (int, float, Fraction, np.integer, np.floating)):
        theta = float(value)
    elif isinstance(value, str):
        match = _PI_MULTIPLE.match(value.lower())
        if match:
            factor = match.group(1)
            if factor in ("", "+"):
                factor = 1.0
            elif factor == "-":
                factor = -1.0
            else:
                factor = float(factor)
            divisor = int(match.group(2)) if match.group(2) else 1
            if divisor == 0:
                raise ValueError(f"invalid angle '{value}'")
            theta = factor * math.pi / divisor
        else:
            try:
                theta = float(value)
            except ValueError:
                raise ValueError(f"invalid angle '{value}'") from None
    else:
        raise ValueError(f"invalid angle {value!r}")
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {value!r}")
    return theta


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles along the circle."""
    d = abs(canonical_angle(a) - canonical_angle(b))
    return min(d, TWO_PI - d)


_QUADRANTS = (QComplex(1, 0), QComplex(0, 1), QComplex(-1, 0), QComplex(0, -1))


def unit_point(theta: float, mode: str = FLOAT):
    """The boundary point e^{i theta} as a scalar of `mode`.

    In rational mode the result lies exactly on the unit circle: quadrantal
    angles map to 1, i, -1, -i and other angles to the rational point given by
    the tangent half-angle parametrization, within ~2e-16 of e^{i theta}.
    """
    theta = canonical_angle(theta)
    if mode == FLOAT:
        return cmath.exp(1j * theta)
    quarter = theta / (math.pi / 2)
    k = round(quarter)
    if abs(quarter - k) * (math.pi / 2) <= ANGLE_TOL:
        return _QUADRANTS[k % 4]
    half = theta / 2
    t = math.tan(half)
    if abs(t) <= 1.0:
        t = Fraction(t).limit_denominator(1 << 53)
        den = 1 + t * t
        return QComplex((1 - t * t) / den, 2 * t / den)
    s = Fraction(1.0 / t).limit_denominator(1 << 53)
    den = 1 + s * s
    return QComplex((s * s - 1) / den, 2 * s / den)
