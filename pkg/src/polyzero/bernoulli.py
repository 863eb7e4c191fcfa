"""Bernoulli numbers, closed-form cumulants and the cumulant bound toolkit.

Bound verdicts are decided in interval arithmetic (``mpmath.iv``); nothing
irrational ever passes through binary64 on the way to a yes/no answer.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath
from mpmath import iv

from .errors import DegenerateVariance
from .exactpoly import FactorSpec

__all__ = [
    "BernoulliTable",
    "BoundCertificate",
    "bernoulli_numbers",
    "bernoulli_polynomial",
    "closed_form_cumulant",
    "closed_form_sigma2",
    "gaussian_cumulant_hurwitz",
    "delta_N",
    "corrected_delta",
    "verify_cumulant_bound",
    "lemma_inequality",
    "bernoulli_bound",
    "c_m",
    "c_sequence_decreasing",
    "appendix_constant",
    "interval_precision",
    "iv_from_fraction",
]

DEFAULT_PRECISION = 128


@contextlib.contextmanager
def interval_precision(bits: int):
    """Temporarily set the working precision of ``mpmath.iv``."""
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def iv_from_fraction(q) -> iv.mpf:
    q = Fraction(q)
    return iv.mpf(q.numerator) / q.denominator


def lower(x) -> mpmath.mpf:
    return mpmath.mp.make_mpf(x._mpi_[0])


def upper(x) -> mpmath.mpf:
    return mpmath.mp.make_mpf(x._mpi_[1])


@lru_cache(maxsize=None)
def _bernoulli_minus(M: int) -> tuple[Fraction, ...]:
    # B^-: the B_1 = -1/2 convention, from sum_{k<=m} C(m+1, k) B_k = 0
    out = [Fraction(1)]
    for m in range(1, M + 1):
        if m > 1 and m % 2:
            out.append(Fraction(0))
            continue
        acc = sum(comb(m + 1, k) * out[k] for k in range(m))
        out.append(-acc / (m + 1))
    return tuple(out)


@dataclass(frozen=True)
class BernoulliTable:
    """``values[m] = B_m`` with ``B_1 = +1/2``."""

    values: tuple[Fraction, ...]

    def __getitem__(self, m: int) -> Fraction:
        return self.values[m]

    def __len__(self) -> int:
        return len(self.values)

    def minus_convention(self) -> tuple[Fraction, ...]:
        if len(self.values) < 2:
            return self.values
        return (self.values[0], -self.values[1]) + self.values[2:]


def bernoulli_numbers(M: int) -> BernoulliTable:
    if M < 0:
        raise ValueError("M must be >= 0")
    vals = list(_bernoulli_minus(M))
    if M >= 1:
        vals[1] = Fraction(1, 2)
    return BernoulliTable(tuple(vals))


def bernoulli_polynomial(m: int, x) -> Fraction:
    """``B_m(x) = sum_k C(m, k) B_k x**(m-k)`` in the ``B_1 = -1/2`` convention."""
    x = Fraction(x)
    b = _bernoulli_minus(m)
    return sum((comb(m, k) * b[k] * x ** (m - k) for k in range(m + 1)), Fraction(0))


def closed_form_cumulant(spec: FactorSpec, m: int) -> Fraction:
    """``kappa_m = B_m / m * sum_j (b_j**m - a_j**m)``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    B = bernoulli_numbers(m)[m]
    if B == 0:
        return Fraction(0)
    s = sum(b**m - a**m for a, b in spec.pairs)
    return B * s / m


def closed_form_sigma2(spec: FactorSpec) -> Fraction:
    return Fraction(sum(b * b - a * a for a, b in spec.pairs), 12)


def gaussian_cumulant_hurwitz(N: int, ell: int, m: int) -> Fraction:
    """Cumulant of the Gaussian-polynomial law through Hurwitz zeta values.

    Uses ``zeta(-m, a) = -B_{m+1}(a) / (m+1)`` and the power sum
    ``H = sum_{0<=k<=N} k**m``; an independent route to the same number as
    :func:`closed_form_cumulant` on the pairs ``(j, j + ell)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")

    def zeta_neg(a):
        return -bernoulli_polynomial(m + 1, a) / (m + 1)

    H = sum(k**m for k in range(N + 1))
    B = bernoulli_numbers(m)[m]
    return B / m * (-H - zeta_neg(ell + N + 1) + zeta_neg(ell + 1))


def delta_N(spec: FactorSpec, precision: int = DEFAULT_PRECISION):
    """Enclosure of ``pi**2 * sqrt(7/6) * sigma / M``."""
    s2 = closed_form_sigma2(spec)
    if s2 == 0:
        raise DegenerateVariance("sigma^2 = 0, Delta is undefined")
    with interval_precision(precision):
        return iv.pi**2 * iv.sqrt(iv.mpf(7) / 6) * iv.sqrt(iv_from_fraction(s2)) / spec.max_b


def corrected_delta(spec: FactorSpec, precision: int = DEFAULT_PRECISION):
    """Enclosure of ``sqrt(2) * pi * sigma / M``.

    With this Delta the bound holds for every ``m >= 2``: the Bernoulli bound
    and the lemma give ``|kappa*_{2m}| <= (2m)! c_m (M / sigma)**(2m-2)``, and
    ``c_m (2 pi**2)**(m-1) = 3 / (m pi**2 (1 - 2**(1-2m))) < 1``.  The
    constant ``pi**2 sqrt(7/6)`` only works for ``m = 2``, since ``c_m`` is not
    bounded by ``c_2**(m-1)``.
    """
    s2 = closed_form_sigma2(spec)
    if s2 == 0:
        raise DegenerateVariance("sigma^2 = 0, Delta is undefined")
    with interval_precision(precision):
        return iv.sqrt(2) * iv.pi * iv.sqrt(iv_from_fraction(s2)) / spec.max_b


@dataclass(frozen=True)
class BoundCertificate:
    """``|kappa*_{2m}| <= (2m)! / Delta**(2m-2)`` decided with intervals.

    ``lhs`` is the exact pair ``(kappa_{2m}, sigma2)``; ``|kappa*| =
    |kappa| / sigma2**m``.  ``margin`` is ``inf(rhs) - sup(lhs)``.
    """

    m: int
    lhs: tuple[Fraction, Fraction]
    rhs: object
    holds: bool
    margin: object
    precision: int = DEFAULT_PRECISION
    delta_rule: str = "pi^2 sqrt(7/6) sigma/M"

    def to_dict(self) -> dict:
        k, s2 = self.lhs
        return {
            "order": 2 * self.m,
            "kappa": str(k),
            "sigma2": str(s2),
            "rhs_lower": mpmath.nstr(lower(self.rhs), 20) if self.rhs is not None else None,
            "rhs_upper": mpmath.nstr(upper(self.rhs), 20) if self.rhs is not None else None,
            "holds": self.holds,
            "margin": mpmath.nstr(self.margin, 20) if self.margin is not None else None,
            "precision_bits": self.precision,
            "delta_rule": self.delta_rule,
        }


def verify_cumulant_bound(
    spec: FactorSpec, m: int, precision: int = DEFAULT_PRECISION, corrected: bool = False
) -> BoundCertificate:
    """Certificate for order ``2m`` (so ``m >= 2`` means the fourth cumulant up).

    ``corrected`` swaps Delta for :func:`corrected_delta`.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    rule = "sqrt(2) pi sigma/M" if corrected else "pi^2 sqrt(7/6) sigma/M"
    kappa = closed_form_cumulant(spec, 2 * m)
    s2 = closed_form_sigma2(spec)
    if kappa == 0:
        # nothing to bound; also covers the degenerate sigma^2 = 0 specs
        return BoundCertificate(m, (kappa, s2), None, True, None, precision, rule)
    with interval_precision(precision):
        lhs = iv_from_fraction(abs(kappa) / s2**m)
        d = corrected_delta(spec, precision) if corrected else delta_N(spec, precision)
        rhs = iv.mpf(factorial(2 * m)) / d ** (2 * m - 2)
        # endpoint comparison is exact; the margin itself is informational
        holds = bool(lower(rhs) > upper(lhs))
        with mpmath.workprec(precision):
            margin = lower(rhs) - upper(lhs)
    return BoundCertificate(m, (kappa, s2), rhs, holds, margin, precision, rule)


def lemma_inequality(a, b, m: int) -> bool:
    """``b**(2m) - a**(2m) <= (b**2 - a**2) * 2**(m-1) * b**(2m-2)`` exactly."""
    a, b = Fraction(a), Fraction(b)
    if not (0 <= a <= b) or m < 2:
        raise ValueError("need 0 <= a <= b and m >= 2")
    return b ** (2 * m) - a ** (2 * m) <= (b * b - a * a) * 2 ** (m - 1) * b ** (2 * m - 2)


def bernoulli_bound(m: int, precision: int = DEFAULT_PRECISION) -> bool:
    """``|B_{2m}| <= 2 (2m)! / (2 pi)**(2m) / (1 - 2**(1-2m))`` in intervals."""
    if m < 1:
        raise ValueError("m must be >= 1")
    B = abs(bernoulli_numbers(2 * m)[2 * m])
    # the two sides differ by a relative 2**(-2m) or so; give the intervals room
    with interval_precision(max(precision, 4 * m + 64)):
        rhs = 2 * iv.mpf(factorial(2 * m)) / (2 * iv.pi) ** (2 * m)
        rhs = rhs / (1 - iv.mpf(2) ** (1 - 2 * m))
        return bool(upper(iv_from_fraction(B)) <= lower(rhs))


def c_m(m: int, precision: int = DEFAULT_PRECISION):
    """``3 * 2**(1-m) / (m * pi**(2m) * (1 - 2**(1-2m)))`` as an interval."""
    with interval_precision(precision):
        two = iv.mpf(2)
        return 3 * two ** (1 - m) / (m * iv.pi ** (2 * m) * (1 - two ** (1 - 2 * m)))


def c_sequence_decreasing(M: int, precision: int = DEFAULT_PRECISION) -> bool:
    """Strict decrease of ``c_2 > c_3 > ... > c_M`` with disjoint enclosures."""
    vals = [c_m(m, precision) for m in range(2, M + 1)]
    return all(lower(x) > upper(y) for x, y in zip(vals, vals[1:]))


def appendix_constant(gamma=0, precision: int = DEFAULT_PRECISION):
    """``C_gamma = 2**(1/(2(2 gamma+1)) + 2) * 3**(1/(2 gamma+1) + 3)``."""
    g = Fraction(gamma)
    if g < 0:
        raise ValueError("gamma must be >= 0")
    e = Fraction(1) / (2 * g + 1)
    with interval_precision(precision):
        two_exp = iv_from_fraction(e / 2 + 2)
        three_exp = iv_from_fraction(e + 3)
        return iv.mpf(2) ** two_exp * iv.mpf(3) ** three_exp
