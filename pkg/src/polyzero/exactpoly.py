"""Exact polynomial arithmetic over arbitrary-precision integers.

Polynomials are dense coefficient tuples, index ``k`` holding the coefficient
of ``z**k``.  The only factors that ever occur in the product-form families
are ``1 - z**k`` and ``1 / (1 - z**a)``, so both get O(degree) stride passes
instead of a general convolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, NamedTuple, Sequence

import mpmath

from .errors import InvalidSpec, NotAPolynomial

__all__ = [
    "ExactPolynomial",
    "FactorSpec",
    "ComplexValue",
    "multiply",
    "build_product_form",
    "eval_rational",
    "eval_complex",
]


def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    n = len(coeffs)
    while n > 1 and coeffs[n - 1] == 0:
        n -= 1
    if n == 0:
        return (0,)
    return tuple(coeffs[:n])


@dataclass(frozen=True)
class ExactPolynomial:
    """Dense integer polynomial; the zero polynomial is ``(0,)``."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim([int(c) for c in self.coeffs]))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> ExactPolynomial:
        return cls(tuple(coeffs))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> ExactPolynomial:
        return cls((0,) * k + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> int:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __add__(self, other: ExactPolynomial) -> ExactPolynomial:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return ExactPolynomial(tuple(out))

    def __neg__(self) -> ExactPolynomial:
        return ExactPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: ExactPolynomial) -> ExactPolynomial:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return ExactPolynomial(tuple(other * c for c in self.coeffs))
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> ExactPolynomial:
        result = ExactPolynomial((1,))
        base = self
        while e:
            if e & 1:
                result = multiply(result, base)
            e >>= 1
            if e:
                base = multiply(base, base)
        return result

    def shift(self, s: int) -> ExactPolynomial:
        """Multiply by ``z**s``."""
        if self.is_zero():
            return self
        return ExactPolynomial((0,) * s + self.coeffs)

    def reversed(self) -> ExactPolynomial:
        return ExactPolynomial(self.coeffs[::-1])

    def is_palindromic(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def __call__(self, x):
        return eval_rational(self, x)

    def __repr__(self) -> str:
        if len(self.coeffs) > 12:
            head = ", ".join(map(str, self.coeffs[:6]))
            return f"ExactPolynomial(degree={self.degree}, coeffs=({head}, ...))"
        return f"ExactPolynomial({self.coeffs})"


@dataclass(frozen=True)
class FactorSpec:
    """Exponent pairs ``(a_j, b_j)`` of ``prod (1 - z**b_j) / (1 - z**a_j)``.

    Pairs with ``a_j == b_j`` contribute a factor 1 and are allowed (the
    descending-plane-partition family carries one).  An empty spec is the
    constant polynomial 1.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        for a, b in pairs:
            if a < 1 or b < a:
                raise InvalidSpec(f"pair (a={a}, b={b}) violates b >= a >= 1")
        nontrivial = [(a, b) for a, b in pairs if a != b]
        if nontrivial and max(a for a, _ in pairs) >= max(b for _, b in pairs):
            raise InvalidSpec("max_j a_j must be smaller than max_j b_j")

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> FactorSpec:
        return cls(tuple(pairs))

    @property
    def N(self) -> int:
        return len(self.pairs)

    @property
    def degree(self) -> int:
        return sum(b - a for a, b in self.pairs)

    @property
    def max_b(self) -> int:
        """``M_N``; 1 for the empty spec."""
        return max((b for _, b in self.pairs), default=1)

    def value_at_one(self) -> Fraction:
        out = Fraction(1)
        for a, b in self.pairs:
            out *= Fraction(b, a)
        return out

    def is_degenerate(self) -> bool:
        return self.degree == 0


class ComplexValue(NamedTuple):
    value: mpmath.mpc
    residual_bound: mpmath.mpf


def multiply(p: ExactPolynomial, q: ExactPolynomial) -> ExactPolynomial:
    """Schoolbook convolution, skipping zero coefficients of the shorter side."""
    if p.is_zero() or q.is_zero():
        return ExactPolynomial((0,))
    a, b = p.coeffs, q.coeffs
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, cb in enumerate(b):
        if cb == 0:
            continue
        for i, ca in enumerate(a):
            out[i + j] += ca * cb
    return ExactPolynomial(tuple(out))


def _times_one_minus(coeffs: list[int], k: int, length: int) -> list[int]:
    # (1 - z**k) * series, truncated to `length` terms
    padded = coeffs[:length] + [0] * max(0, length - len(coeffs))
    shifted = [0] * k + padded[: max(0, length - k)]
    return [x - y for x, y in zip(padded, shifted)]


def _div_one_minus(coeffs: list[int], a: int, length: int) -> list[int]:
    # series / (1 - z**a): prefix sums along each residue class mod a
    out = coeffs[:length] + [0] * max(0, length - len(coeffs))
    for r in range(min(a, length)):
        out[r::a] = list(accumulate(out[r::a]))
    return out


def build_product_form(spec: FactorSpec) -> ExactPolynomial:
    """Expand ``prod (1 - z**b_j) / (1 - z**a_j)`` exactly.

    The quotient is built as a truncated integer power series and then
    checked by multiplying back with every denominator factor.  Raises
    ``NotAPolynomial`` if the check fails.
    """
    n = spec.degree
    length = n + 1
    series = [1] + [0] * n
    for a, b in spec.pairs:
        if a == b:
            continue
        series = _times_one_minus(series, b, length)
        series = _div_one_minus(series, a, length)

    full = sum(b for a, b in spec.pairs if a != b) + 1
    back = series + [0] * (full - length)
    numerator = [1] + [0] * (full - 1)
    for a, b in spec.pairs:
        if a == b:
            continue
        back = _times_one_minus(back, a, full)
        numerator = _times_one_minus(numerator, b, full)
    if back != numerator:
        raise NotAPolynomial(f"{spec.pairs!r} does not define a polynomial")
    return ExactPolynomial(tuple(series))


def eval_rational(p: ExactPolynomial, x) -> Fraction:
    """Exact Horner evaluation at a rational point."""
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def eval_complex(p: ExactPolynomial, z, precision: int = 128) -> ComplexValue:
    """Horner evaluation at ``precision`` bits.

    Returns the value and an a-priori bound on the accumulated rounding
    error, ``gamma_{2n+2} * sum |c_k| |z|**k``.
    """
    if precision < 53:
        raise ValueError("precision must be at least 53 bits")
    with mpmath.workprec(precision):
        z = mpmath.mpc(z)
        acc = mpmath.mpc(0)
        for c in reversed(p.coeffs):
            acc = acc * z + mpmath.mpf(c)
        r = abs(z)
        absval = mpmath.mpf(0)
        for c in reversed(p.coeffs):
            absval = absval * r + abs(mpmath.mpf(c))
        u = mpmath.ldexp(1, -precision)
        k = 2 * len(p.coeffs) + 2
        gamma = k * u / (1 - k * u)
        bound = gamma * absval * mpmath.mpf("1.01")
        return ComplexValue(acc, bound)
