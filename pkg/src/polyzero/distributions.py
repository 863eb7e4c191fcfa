"""Exact and binary64 laws on {0, ..., n} built from generating polynomials."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import comb, floor, ceil, gcd
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import DegenerateVariance, NegativeCoefficient, Underflow
from .exactpoly import ExactPolynomial, FactorSpec

__all__ = [
    "DiscretePMF",
    "FloatPMF",
    "CumulantSequence",
    "StandardizedCumulant",
    "pmf_from_polynomial",
    "raw_moments",
    "cumulants_from_moments",
    "cumulants",
    "cdf_and_tail",
    "mgf_at",
    "float_pmf_from_factors",
    "float_pmf_from_polynomial",
    "pmf_to_csv",
]


@dataclass(frozen=True)
class DiscretePMF:
    """Exact law on ``{0, ..., n}``.

    Stored as non-negative integer weights over a common positive total, so
    ``probs[k] == Fraction(weights[k], total)``.
    """

    weights: tuple[int, ...]
    total: int

    def __post_init__(self):
        if self.total <= 0:
            raise ValueError("total mass must be positive")
        if any(w < 0 for w in self.weights):
            raise NegativeCoefficient("negative weight")
        if sum(self.weights) != self.total:
            raise ValueError("weights must sum to total")

    @classmethod
    def from_probs(cls, probs: Iterable) -> DiscretePMF:
        probs = [Fraction(p) for p in probs]
        den = 1
        for p in probs:
            den = den * p.denominator // gcd(den, p.denominator)
        weights = tuple(p.numerator * (den // p.denominator) for p in probs)
        return cls(weights, sum(weights))

    @property
    def n(self) -> int:
        return len(self.weights) - 1

    @property
    def probs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w, self.total) for w in self.weights)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.weights):
            return Fraction(self.weights[k], self.total)
        return Fraction(0)

    def to_float(self) -> np.ndarray:
        # exact ratio then rounding; int/int true division is correctly rounded
        return np.array([w / self.total for w in self.weights], dtype=float)

    def mean(self) -> Fraction:
        return raw_moments(self, 1)[0]

    def variance(self) -> Fraction:
        m1, m2 = raw_moments(self, 2)
        return m2 - m1 * m1


@dataclass(frozen=True)
class FloatPMF:
    probs: np.ndarray
    renormalization_count: int = 0

    @property
    def n(self) -> int:
        return len(self.probs) - 1

    def mean(self) -> float:
        k = np.arange(len(self.probs))
        return float(np.dot(k, self.probs))

    def variance(self) -> float:
        k = np.arange(len(self.probs), dtype=float)
        mu = np.dot(k, self.probs)
        return float(np.dot((k - mu) ** 2, self.probs))


@dataclass(frozen=True)
class StandardizedCumulant:
    """``kappa_m / sigma**m`` kept exact as the pair ``(kappa_m, sigma2)``.

    Even orders are rational; odd orders are compared through their squares.
    """

    m: int
    kappa: Fraction
    sigma2: Fraction

    @property
    def exact(self) -> Fraction:
        if self.m % 2:
            raise ValueError("odd-order standardized cumulants are not rational in general")
        return self.kappa / self.sigma2 ** (self.m // 2)

    @property
    def squared(self) -> Fraction:
        return self.kappa * self.kappa / self.sigma2**self.m

    def to_mpf(self, precision: int = 128):
        with mpmath.workprec(precision):
            if self.m % 2 == 0:
                v = self.exact
                return mpmath.mpf(v.numerator) / v.denominator
            s = mpmath.sqrt(mpmath.mpf(self.sigma2.numerator) / self.sigma2.denominator)
            return (mpmath.mpf(self.kappa.numerator) / self.kappa.denominator) / s**self.m

    def __float__(self) -> float:
        return float(self.to_mpf(64))


@dataclass(frozen=True)
class CumulantSequence:
    """Cumulants ``kappa_1..kappa_M``; ``raw[0]`` is ``kappa_1``."""

    raw: tuple[Fraction, ...]

    @property
    def sigma2(self) -> Fraction:
        return self.raw[1]

    def __getitem__(self, m: int) -> Fraction:
        if m < 1:
            raise IndexError("cumulants are indexed from 1")
        return self.raw[m - 1]

    @property
    def max_order(self) -> int:
        return len(self.raw)

    def standardized(self, m: int) -> StandardizedCumulant:
        if self.sigma2 == 0:
            raise DegenerateVariance("variance is zero")
        return StandardizedCumulant(m, self[m], self.sigma2)


def pmf_from_polynomial(p: ExactPolynomial) -> DiscretePMF:
    if any(c < 0 for c in p.coeffs):
        raise NegativeCoefficient("generating polynomial has a negative coefficient")
    total = sum(p.coeffs)
    if total == 0:
        raise NegativeCoefficient("generating polynomial is identically zero")
    return DiscretePMF(p.coeffs, total)


def raw_moments(pmf: DiscretePMF, M: int) -> list[Fraction]:
    """Exact ``E[X**m]`` for ``m = 1..M``."""
    if M < 1:
        raise ValueError("M must be >= 1")
    powers = list(pmf.weights)
    ks = range(len(powers))
    out = []
    for _ in range(M):
        powers = [w * k for w, k in zip(powers, ks)]
        out.append(Fraction(sum(powers), pmf.total))
    return out


def cumulants_from_moments(moments: Sequence) -> CumulantSequence:
    """Moment-cumulant recursion on raw moments ``mu'_1, mu'_2, ...``."""
    if len(moments) < 2:
        raise ValueError("need at least two moments")
    mu = [Fraction(1)] + [Fraction(x) for x in moments]
    kappa = [Fraction(0)] * len(mu)
    for m in range(1, len(mu)):
        acc = mu[m]
        for k in range(1, m):
            acc -= comb(m - 1, k - 1) * kappa[k] * mu[m - k]
        kappa[m] = acc
    return CumulantSequence(tuple(kappa[1:]))


def cumulants(pmf: DiscretePMF, M: int) -> CumulantSequence:
    return cumulants_from_moments(raw_moments(pmf, max(M, 2)))


def cdf_and_tail(pmf: DiscretePMF, x) -> tuple[Fraction, Fraction]:
    """Exact ``(P(X <= x), P(X >= x))``."""
    x = Fraction(x)
    lo = floor(x)
    hi = ceil(x)
    below = sum(pmf.weights[: max(0, min(lo + 1, len(pmf.weights)))])
    above = sum(pmf.weights[max(0, hi):])
    return Fraction(below, pmf.total), Fraction(above, pmf.total)


def mgf_at(pmf: DiscretePMF, t, precision: int = 128):
    """``E[exp(t X)]`` for real or complex ``t`` at ``precision`` bits."""
    guard = 16 + len(pmf.weights).bit_length()
    with mpmath.workprec(precision + guard):
        w = mpmath.exp(mpmath.mpmathify(t))
        acc = mpmath.mpf(0)
        for c in reversed(pmf.weights):
            acc = acc * w + c
        val = acc / pmf.total
    with mpmath.workprec(precision):
        return +val


def _apply_pair_float(p: np.ndarray, a: int, b: int, length: int) -> np.ndarray:
    # a non-polynomial intermediate is an infinite series: keep all n + 1 terms
    out_len = min(length, len(p) + b - a) if b % a == 0 else length
    src = np.zeros(out_len)
    src[: min(len(p), out_len)] = p[:out_len]
    if b % a == 0:
        # polynomial factor 1 + z^a + ... + z^(b-a): stride-a window sums
        w = b // a
        out = np.empty(out_len)
        for r in range(min(a, out_len)):
            c = np.concatenate(([0.0], np.cumsum(src[r::a])))
            idx = np.arange(1, len(c))
            out[r::a] = c[idx] - c[np.maximum(idx - w, 0)]
        return out
    if b < out_len:
        src[b:] = src[b:] - src[:-b].copy()
    for r in range(min(a, out_len)):
        src[r::a] = np.cumsum(src[r::a])
    return src


def float_pmf_from_factors(spec: FactorSpec) -> FloatPMF:
    """Binary64 law of the product-form polynomial.

    Factors with ``a | b`` are applied as stride window sums (no sign
    changes); the remaining pairs as a ``(1 - z^b)`` difference followed by a
    stride-``a`` prefix sum.  The vector is rescaled to unit l1 mass after
    every factor.
    """
    length = spec.degree + 1
    remaining = [(a, b) for a, b in spec.pairs if a != b]
    top = max((b for _, b in remaining), default=1)
    divs = np.arange(1, top + 1)
    # excess[d-1] = #{b : d | b} - #{a : d | a} over the pairs applied so far;
    # the partial product is a polynomial iff no entry is negative
    excess = np.zeros(top, dtype=np.int64)

    def delta(ab):
        return (ab[1] % divs == 0).astype(np.int64) - (ab[0] % divs == 0)

    p = np.ones(1)
    count = 0
    deg = 0
    while remaining:
        # window-sum factors first, then any pair that keeps the partial
        # product a polynomial, else the next pair in order
        pick = next((ab for ab in remaining if ab[1] % ab[0] == 0), None)
        if pick is None:
            pick = next((ab for ab in remaining if (excess + delta(ab)).min() >= 0), remaining[0])
        remaining.remove(pick)
        a, b = pick
        p = _apply_pair_float(p, a, b, length)
        excess += delta(pick)
        deg += b - a
        if deg + 1 < len(p) and excess.min() >= 0:
            # exact zeros beyond the degree; stops rounding noise from being
            # prefix-summed by later divisions
            p = p[: deg + 1].copy()
        scale = float(np.abs(p).sum())
        if not np.isfinite(scale) or scale == 0.0:
            raise Underflow(f"renormalization factor out of range after pair {(a, b)}")
        p = p / scale
        count += 1
    if len(p) < length:
        p = np.concatenate([p, np.zeros(length - len(p))])
    p = p[:length]
    # round-off can leave tiny negative entries in cancelled tails
    if p.min(initial=0.0) < -1e-9:
        raise Underflow("float backend lost all precision (large negative mass)")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    return FloatPMF(p, count)


def float_pmf_from_polynomial(poly: ExactPolynomial) -> FloatPMF:
    return FloatPMF(pmf_from_polynomial(poly).to_float(), 0)


def pmf_to_csv(pmf, stream: io.TextIOBase | None = None) -> str:
    """Two columns ``k,probability``; fractions for exact laws, decimals otherwise."""
    buf = stream if stream is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "probability"])
    if isinstance(pmf, DiscretePMF):
        for k, p in enumerate(pmf.probs):
            writer.writerow([k, str(p)])
    else:
        for k, p in enumerate(pmf.probs):
            writer.writerow([k, repr(float(p))])
    return buf.getvalue() if stream is None else ""
