"""Double-double arithmetic: ~31 significant decimal digits from paired floats.

A value is carried as an unevaluated sum hi + lo of two doubles with
|lo| <= ulp(hi)/2.  All primitives are built on error-free transformations
(Knuth two-sum, Dekker split/product), so the only rounding happens in the
final renormalization of each operation.

Supported surface is deliberately small: +, -, *, / plus promotion and the
log-2 constant.  That is everything the split Legendre sum needs; general
transcendental functions are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

from numba import njit

_SPLITTER = 134217729.0  # 2**27 + 1, exact in a double


@njit(cache=True)
def two_sum(a: float, b: float):
    """Return (s, e) with s = fl(a+b) and s + e == a + b exactly."""
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True)
def quick_two_sum(a: float, b: float):
    """two_sum specialized to |a| >= |b|."""
    s = a + b
    return s, b - (s - a)


@njit(cache=True)
def dekker_split(a: float):
    """Split a into high/low 26-bit halves; exact for |a| < 2**996."""
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True)
def two_prod(a: float, b: float):
    """Return (p, e) with p = fl(a*b) and p + e == a * b exactly."""
    p = a * b
    ahi, alo = dekker_split(a)
    bhi, blo = dekker_split(b)
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


# Core pair arithmetic on raw (hi, lo) floats; compiled so the hot series
# kernels in _kernels.py can call the very same code paths.

@njit(cache=True)
def add_dd_dd(xh, xl, yh, yl):
    sh, se = two_sum(xh, yh)
    th, te = two_sum(xl, yl)
    se += th
    sh, se = quick_two_sum(sh, se)
    se += te
    return quick_two_sum(sh, se)


@njit(cache=True)
def add_dd_d(xh, xl, y):
    sh, se = two_sum(xh, y)
    se += xl
    return quick_two_sum(sh, se)


@njit(cache=True)
def mul_dd_dd(xh, xl, yh, yl):
    p, e = two_prod(xh, yh)
    e += xh * yl + xl * yh
    return quick_two_sum(p, e)


@njit(cache=True)
def mul_dd_d(xh, xl, y):
    p, e = two_prod(xh, y)
    e += xl * y
    return quick_two_sum(p, e)


@njit(cache=True)
def div_dd_dd(xh, xl, yh, yl):
    # long division with two refinement steps
    q1 = xh / yh
    rh, rl = mul_dd_d(yh, yl, q1)
    rh, rl = add_dd_dd(xh, xl, -rh, -rl)
    q2 = rh / yh
    rh2, rl2 = mul_dd_d(yh, yl, q2)
    rh, rl = add_dd_dd(rh, rl, -rh2, -rl2)
    q3 = rh / yh
    qh, ql = quick_two_sum(q1, q2)
    return add_dd_d(qh, ql, q3)


@njit(cache=True)
def div_dd_d(xh, xl, y):
    q1 = xh / y
    rh, rl = two_prod(q1, y)
    rh, rl = add_dd_dd(xh, xl, -rh, -rl)
    q2 = rh / y
    rh2, rl2 = two_prod(q2, y)
    rh, rl = add_dd_dd(rh, rl, -rh2, -rl2)
    qh, ql = quick_two_sum(q1, q2)
    return add_dd_d(qh, ql, rh / y)


@dataclass(frozen=True, slots=True)
class DDReal:
    """Double-double real: the exact value hi + lo, normalized."""

    hi: float
    lo: float = 0.0

    def __add__(self, other):
        o = _coerce(other)
        return DDReal(*add_dd_dd(self.hi, self.lo, o.hi, o.lo))

    __radd__ = __add__

    def __neg__(self):
        return DDReal(-self.hi, -self.lo)

    def __sub__(self, other):
        o = _coerce(other)
        return DDReal(*add_dd_dd(self.hi, self.lo, -o.hi, -o.lo))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        o = _coerce(other)
        return DDReal(*mul_dd_dd(self.hi, self.lo, o.hi, o.lo))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o.hi == 0.0 and o.lo == 0.0:
            raise ZeroDivisionError("double-double division by zero")
        return DDReal(*div_dd_dd(self.hi, self.lo, o.hi, o.lo))

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __float__(self):
        return self.hi + self.lo

    def __abs__(self):
        return -self if self.hi < 0.0 else self

    def __repr__(self):
        return f"DDReal({self.hi!r}, {self.lo!r})"


def _coerce(x) -> DDReal:
    if isinstance(x, DDReal):
        return x
    return DDReal(float(x), 0.0)


def dd_from_double(x: float) -> DDReal:
    """Promote a double exactly."""
    return DDReal(float(x), 0.0)


def dd_to_double(a: DDReal) -> float:
    """Nearest double to the represented value."""
    return a.hi + a.lo


def dd_add(a: DDReal, b: DDReal) -> DDReal:
    return _coerce(a) + _coerce(b)


def dd_sub(a: DDReal, b: DDReal) -> DDReal:
    return _coerce(a) - _coerce(b)


def dd_mul(a: DDReal, b: DDReal) -> DDReal:
    return _coerce(a) * _coerce(b)


def dd_div(a: DDReal, b: DDReal) -> DDReal:
    return _coerce(a) / _coerce(b)


# ln 2 to 107 bits; the pair is the two leading doubles of the exact value.
LOG2 = DDReal(0.6931471805599453, 2.3190468138462996e-17)

# log(e/2) = 1 - ln 2, the additive constant of the unscreened log kernel.
LOG_E_HALF = DDReal(1.0) - LOG2

# pi to 107 bits, used to apply the 1/(4 pi) kernel prefactor in dd.
PI_DD = DDReal(3.141592653589793, 1.2246467991473532e-16)


def dd_constants() -> dict:
    """Named double-double constants used by the series evaluator."""
    return {"log2": LOG2, "e_half_log_aux": LOG_E_HALF}
