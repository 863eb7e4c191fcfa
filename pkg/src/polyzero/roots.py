"""Roots of the family polynomials: exact angles, closed forms, Aberth iteration.

Product-form polynomials have only roots of unity, so their root multiset is
pure bookkeeping over divisors.  Everything else goes through a simultaneous
Aberth iteration: a binary64 warm start followed by a high-precision polish
in ``gmpy2``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import gmpy2
import mpmath
import numpy as np
from mpmath import iv

from . import bernoulli as bc
from .errors import NegativeMultiplicity, NonConvergence
from .exactpoly import ExactPolynomial, FactorSpec

__all__ = [
    "NumericRoot",
    "RootMultiset",
    "SectorReport",
    "GeometryReport",
    "product_form_roots",
    "zero_free_sector",
    "cobin_roots",
    "numeric_roots",
    "cluster_roots",
    "match_exact_angles",
    "matched_numeric_roots",
    "geometry_predicates",
    "roots_to_csv",
]

GOLDEN_ANGLE = math.pi * (3 - math.sqrt(5))
MAX_SWEEPS = 200


@dataclass(frozen=True)
class NumericRoot:
    value: complex  # gmpy2.mpc at the working precision
    residual: float  # |p(z)| / sum |a_k| |z|^k
    radius: float  # n |p(z) / p'(z)|: a disc of this radius holds a root

    @property
    def z(self) -> complex:
        return complex(self.value)


@dataclass
class RootMultiset:
    exact_angles: dict = field(default_factory=dict)  # Fraction k/b -> multiplicity
    numeric_roots: list = field(default_factory=list)  # NumericRoot
    precision: int | None = None

    @property
    def degree(self) -> int:
        if self.exact_angles:
            return sum(self.exact_angles.values())
        return len(self.numeric_roots)

    def exact_points(self) -> list[tuple[complex, int]]:
        return [(complex(np.exp(2j * np.pi * float(q))), m) for q, m in sorted(self.exact_angles.items())]


@dataclass(frozen=True)
class SectorReport:
    delta: object  # interval for 2 pi / M
    zero_free: bool
    witness: Fraction | None  # angle (as a fraction of a turn) closest to the positive axis


@dataclass(frozen=True)
class GeometryReport:
    root_unitary: bool
    hurwitz: bool
    real_rooted_negative: bool
    max_modulus_defect: float
    max_real_part: float
    max_imag_ratio: float
    precision: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def product_form_roots(spec: FactorSpec) -> RootMultiset:
    """Multiplicity of every primitive ``d``-th root of unity.

    ``mult(d) = #{j : d | b_j} - #{j : d | a_j}``; the root ``1`` (``d = 1``)
    always cancels.
    """
    count: dict[int, int] = {}
    for a, b in spec.pairs:
        if a == b:
            continue
        for d in _divisors(b):
            count[d] = count.get(d, 0) + 1
        for d in _divisors(a):
            count[d] = count.get(d, 0) - 1
    angles = {}
    for d, m in sorted(count.items()):
        if m < 0:
            raise NegativeMultiplicity(f"primitive {d}-th roots of unity would have multiplicity {m}")
        if m == 0 or d == 1:
            continue
        for k in range(1, d):
            if gcd(k, d) == 1:
                angles[Fraction(k, d)] = m
    return RootMultiset(exact_angles=angles)


def zero_free_sector(spec: FactorSpec, precision: int = 128) -> SectorReport:
    """Check that no root has ``|arg| < 2 pi / M`` using the exact angles."""
    roots = product_form_roots(spec)
    M = spec.max_b
    with bc.interval_precision(precision):
        delta = 2 * iv.pi / M
    if not roots.exact_angles:
        return SectorReport(delta, True, None)
    # |arg| as a fraction of a full turn
    turn = {q: min(q, 1 - q) for q in roots.exact_angles}
    witness = min(turn, key=lambda q: (turn[q], q))
    return SectorReport(delta, turn[witness] >= Fraction(1, M), witness)


def cobin_roots(N: int, p, precision: int = 128) -> list:
    """``z_k = (1/p - 1)(-1 - i cot(pi k / N)) / 2`` for ``k = 1..N-1``."""
    p = Fraction(p)
    if N < 2 or not 0 < p < 1:
        raise ValueError("need N >= 2 and 0 < p < 1")
    with mpmath.workprec(precision):
        scale = (mpmath.mpf(p.denominator) / p.numerator - 1) / 2
        out = []
        for k in range(1, N):
            c = mpmath.cot(mpmath.pi * k / N)
            out.append(mpmath.mpc(-scale, -scale * c))
        return out


# ---------------------------------------------------------------- Aberth


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    a0, an = abs(coeffs[0]), abs(coeffs[-1])
    radius = (a0 / an) ** (1.0 / n) if a0 > 0 else 1.0
    k = np.arange(n)
    # golden-angle spacing plus a small offset keeps guesses off the real
    # axis and away from symmetric stalls
    theta = k * GOLDEN_ANGLE + 0.4
    rad = radius * (1 + 0.05 * np.sin(3.0 * k + 1.0))
    return rad * np.exp(1j * theta)


def _aberth_float(coeffs: np.ndarray, sweeps: int = 120) -> np.ndarray:
    # coeffs in increasing order; numpy.polyval wants decreasing
    c = coeffs[::-1] / np.max(np.abs(coeffs))
    dc = np.polyder(c)
    z = _initial_guesses(coeffs)
    n = len(z)
    with np.errstate(all="ignore"):
        for _ in range(sweeps):
            ratio = np.polyval(c, z) / np.polyval(dc, z)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = ratio / (1 - ratio * s)
            bad = ~np.isfinite(w)
            w[bad] = 0.0
            z = z - w
            if np.all(np.abs(w) <= 1e-14 * np.maximum(1.0, np.abs(z))):
                break
    if not np.all(np.isfinite(z)):
        z = _initial_guesses(coeffs)
    return z.astype(complex)[:n]


def _horner2(coeffs, z):
    # value and derivative at z, coefficients highest degree first
    p = coeffs[0]
    dp = 0
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _polish(coeffs_int, start, precision: int, max_sweeps: int):
    n = len(coeffs_int) - 1
    ctx = gmpy2.context(gmpy2.get_context(), precision=precision)
    with ctx:
        hi = [gmpy2.mpc(c) for c in reversed(coeffs_int)]
        absc = [abs(gmpy2.mpfr(c)) for c in reversed(coeffs_int)]
        z = [gmpy2.mpc(s) if isinstance(s, gmpy2.mpc) else gmpy2.mpc(complex(s)) for s in start]

        def residual(p, zi):
            r = abs(zi)
            scale = gmpy2.mpfr(0)
            for c in absc:
                scale = scale * r + c
            return abs(p) / scale if scale else abs(p)

        # rounding floor of the residual, with slack for the Horner error growth
        floor = gmpy2.mpfr(2) ** (-(precision - 2 * n.bit_length() - 8))
        target = gmpy2.mpfr(2) ** (-precision // 2)
        best = None
        stale = 0
        sweeps = 0
        for sweeps in range(1, max_sweeps + 1):
            worst = gmpy2.mpfr(0)
            for i in range(n):
                zi = z[i]
                p, dp = _horner2(hi, zi)
                res = residual(p, zi)
                if res > worst:
                    worst = res
                if p == 0 or dp == 0:
                    continue
                s = gmpy2.mpc(0)
                for j in range(n):
                    if j != i:
                        d = zi - z[j]
                        if d != 0:
                            s += 1 / d
                ratio = p / dp
                denom = 1 - ratio * s
                z[i] = zi - (ratio / denom if denom != 0 else ratio)
            if worst < floor:
                break
            # past the residual target, clusters around multiple roots can
            # stall well above the rounding floor; stop once progress ends
            if best is None or worst < best * gmpy2.mpfr("0.5"):
                best = worst
                stale = 0
            else:
                stale += 1
                if stale >= 8 and worst < target:
                    break
        out = []
        for zi in z:
            p, dp = _horner2(hi, zi)
            radius = n * abs(p) / abs(dp) if dp != 0 else float("inf")
            out.append(NumericRoot(zi, float(residual(p, zi)), float(radius)))
        return out, sweeps


def numeric_roots(p: ExactPolynomial, precision: int = 128, start=None) -> RootMultiset:
    """All roots of ``p`` by Aberth iteration at ``precision`` bits.

    Stops when every relative residual is below ``2**(-precision/2)`` or after
    200 sweeps (``NonConvergence`` if the residual target is missed).
    """
    if p.degree < 1:
        raise ValueError("degree must be >= 1")
    if precision < 53:
        raise ValueError("precision must be at least 53 bits")
    coeffs = list(p.coeffs)
    # roots at zero split off exactly
    zeros = 0
    while coeffs[0] == 0:
        coeffs.pop(0)
        zeros += 1
    roots: list[NumericRoot] = [NumericRoot(gmpy2.mpc(0), 0.0, 0.0) for _ in range(zeros)]
    if len(coeffs) > 1:
        if start is None:
            fc = np.array([float(mpmath.mpf(c)) for c in coeffs])
            if not np.all(np.isfinite(fc)):
                top = max(abs(c) for c in coeffs)
                fc = np.array([float(Fraction(c, top)) for c in coeffs])
            start = _aberth_float(fc)
        found, _ = _polish(coeffs, start, precision, MAX_SWEEPS)
        target = 2.0 ** (-precision / 2)
        worst = max(r.residual for r in found)
        if worst >= target:
            raise NonConvergence(f"max relative residual {worst:.3g} above target {target:.3g}")
        roots.extend(found)
    return RootMultiset(numeric_roots=roots, precision=precision)


def cluster_roots(roots: RootMultiset, radius_factor: float = 10.0, floor: float = 0.0) -> list[tuple[complex, int]]:
    """Single-linkage clusters: roots closer than ``radius_factor`` times the
    sum of their inclusion radii join.  Returns ``(centroid, size)`` pairs."""
    pts = [complex(r.value) for r in roots.numeric_roots]
    rad = [max(r.radius, floor) for r in roots.numeric_roots]
    n = len(pts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(pts[i] - pts[j]) <= radius_factor * (rad[i] + rad[j]):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [(sum(pts[i] for i in g) / len(g), len(g)) for g in groups.values()]


def match_exact_angles(exact: RootMultiset, numeric: RootMultiset, tol: float = 1e-8) -> tuple[bool, float]:
    """Optimal matching of numeric roots onto exact angles.

    Each exact angle of multiplicity ``m`` must absorb exactly ``m`` numeric
    roots, each within ``tol``.  Returns ``(ok, worst distance)``.
    """
    targets = []
    for q, m in exact.exact_angles.items():
        w = complex(np.exp(2j * np.pi * float(q)))
        targets.extend([w] * m)
    pts = [complex(r.value) for r in numeric.numeric_roots]
    if len(targets) != len(pts):
        return False, float("inf")
    if not pts:
        return True, 0.0
    T = np.array(targets)
    P = np.array(pts)
    dist = np.abs(P[:, None] - T[None, :])
    # optimal assignment keeps multiple roots from stealing each other's slots
    from scipy.optimize import linear_sum_assignment

    rows, cols = linear_sum_assignment(dist)
    worst = float(dist[rows, cols].max())
    return worst <= tol, worst


def matched_numeric_roots(spec: FactorSpec, p: ExactPolynomial, tol: float = 1e-8, precision: int = 128, max_precision: int = 4096):
    """Numeric roots of a product-form polynomial, escalating precision until
    every root sits within ``tol`` of its exact angle."""
    exact = product_form_roots(spec)
    start = None
    prec = precision
    # an m-fold root resolves to roughly precision / m bits, so start high enough
    # for the largest multiplicity instead of climbing through every level
    m = max(exact.exact_angles.values(), default=1)
    while prec < 30 * m + 40 and prec < max_precision:
        prec *= 2
    while True:
        try:
            num = numeric_roots(p, prec, start=start)
        except NonConvergence:
            num = None
        if num is not None:
            ok, worst = match_exact_angles(exact, num, tol)
            if ok:
                return exact, num, worst
            start = [r.value for r in num.numeric_roots]
        if prec >= max_precision:
            raise NonConvergence(f"roots not resolved to {tol} at {prec} bits")
        prec *= 2


def geometry_predicates(roots: RootMultiset, tol: float = 1e-8, poly: ExactPolynomial | None = None, max_precision: int = 2048) -> GeometryReport:
    """Root-unitary, Hurwitz and negative-real-rooted verdicts.

    When a root lies within ``10 tol`` of a decision boundary and the
    polynomial is supplied, precision doubles and the roots are recomputed.
    Multiple roots only resolve to about ``precision / m`` bits, so the
    predicates are taken on cluster centroids, which are accurate again.
    """
    prec = roots.precision or 128
    while True:
        if roots.numeric_roots:
            pts = [z for z, _ in cluster_roots(roots)]
        else:
            pts = [z for z, _ in roots.exact_points()]
        mod = max((abs(abs(z) - 1) for z in pts), default=0.0)
        re_max = max((z.real for z in pts), default=-math.inf)
        im_ratio = max((abs(z.imag) / max(1.0, abs(z)) for z in pts), default=0.0)
        near = abs(re_max) < 10 * tol
        if not near or poly is None or prec >= max_precision:
            break
        prec *= 2
        roots = numeric_roots(poly, prec, start=[r.value for r in roots.numeric_roots])
    negreal = im_ratio <= tol and all(z.real < 0 for z in pts)
    return GeometryReport(
        root_unitary=mod <= tol,
        hurwitz=re_max < 0,
        real_rooted_negative=negreal,
        max_modulus_defect=mod,
        max_real_part=re_max,
        max_imag_ratio=im_ratio,
        precision=prec,
    )


def roots_to_csv(rows, stream=None) -> str:
    """``rows`` of ``(z, multiplicity, family, N)`` to ``re,im,multiplicity,family,N``."""
    buf = stream if stream is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im", "multiplicity", "family", "N"])
    for z, m, fam, N in rows:
        z = complex(z)
        w.writerow([repr(z.real), repr(z.imag), m, fam, N])
    return buf.getvalue() if stream is None else ""
