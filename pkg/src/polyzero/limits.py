"""Finite-N checks of the limit theorems.

Kolmogorov distances and Berry-Esseen ratios, the fourth-cumulant
trajectory and mod-Gaussian ratios, moderate-deviation curves,
concentration envelopes and the fourth-moment diagnostic.  None of the
unspecified absolute constants is asserted; the checks look at shape
(slopes, monotone approach, boundedness) and at the explicit limit values.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Sequence

import mpmath
import numpy as np
from mpmath import iv
from scipy.special import ndtr

from . import bernoulli as bc
from .distributions import DiscretePMF, FloatPMF, cumulants, pmf_from_polynomial
from .errors import DegenerateVariance, NoReference, TailUnderflow
from .families import FamilyDescriptor, factor_spec, family_pmf, polynomial, reference_values

__all__ = [
    "LimitReport",
    "normal_cdf",
    "kolmogorov_distance",
    "delta_value",
    "berry_esseen_ratio",
    "berry_esseen_sweep",
    "loglog_slope",
    "family_cumulant_pair",
    "kappa4_delta2",
    "limit_constant",
    "mod_gaussian_phi",
    "mod_gaussian_trajectory",
    "moderate_deviation_point",
    "moderate_deviation_curve",
    "concentration_envelope",
    "fourth_moment_diagnostic",
    "cdf_vs_normal_csv",
    "k4d2_trajectory_csv",
    "MOD_GAUSSIAN_POINTS",
]

DEFAULT_PRECISION = 128
MOD_GAUSSIAN_POINTS = (0.5, -0.5, 1, -1, 0.5j, -0.5j, 1j, -1j)
TAIL_FLOOR = 1e-300


def _fmt(x, digits: int = 20) -> str:
    return mpmath.nstr(mpmath.mpf(x), digits) if not isinstance(x, str) else x


def serialize(x, digits: int = 20):
    """Decimal string(s) for reports; intervals carry their width."""
    if x is None:
        return None
    if isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, dict):
        return {str(k): serialize(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [serialize(v, digits) for v in x]
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, iv.mpf):
        with mpmath.workdps(digits + 10):
            lo, hi = bc.lower(x), bc.upper(x)
            return {"value": _fmt((lo + hi) / 2, digits), "width": mpmath.nstr(hi - lo, 3)}
    if isinstance(x, (complex, mpmath.mpc)):
        z = mpmath.mpc(x)
        return {"re": _fmt(z.real, digits), "im": _fmt(z.imag, digits)}
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return _fmt(x, digits)


@dataclass
class LimitReport:
    family: str
    check: str
    N_grid: list[int]
    values: list
    target: object = None
    verdict: bool | None = None
    metadata: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.N_grid, self.N_grid[1:])):
            raise ValueError("N_grid must be strictly increasing")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["values"] = [serialize(v) for v in self.values]
        d["target"] = serialize(self.target)
        d["details"] = serialize(self.details)
        d["metadata"] = serialize(self.metadata)
        return d


def _map(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    # results come back in input order, so the merged report is deterministic
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------- normal law


def normal_cdf(x, precision: int = DEFAULT_PRECISION):
    """``Phi(x) = erfc(-x / sqrt 2) / 2`` at ``precision`` bits."""
    with mpmath.workprec(precision + 10):
        x = mpmath.mpf(x)
        val = mpmath.erfc(-x / mpmath.sqrt(2)) / 2
    with mpmath.workprec(precision):
        return +val


# ---------------------------------------------------------------- Kolmogorov


def _moments_float(probs: np.ndarray) -> tuple[float, float]:
    k = np.arange(len(probs), dtype=float)
    mu = float(np.dot(k, probs))
    var = float(np.dot((k - mu) ** 2, probs))
    return mu, var


def kolmogorov_distance(pmf, precision: int = DEFAULT_PRECISION):
    """``sup_x |F*(x) - Phi(x)|`` for the standardized law.

    The supremum is attained at an atom, from the right or the left, so both
    ``F(k)`` and ``F(k-)`` are compared with ``Phi(k*)``.  Exact laws are
    handled at ``precision`` bits, binary64 laws in binary64.
    """
    if isinstance(pmf, DiscretePMF):
        var = pmf.variance()
        if var == 0:
            raise DegenerateVariance("Kolmogorov distance needs sigma^2 > 0")
        mu = pmf.mean()
        best = mpmath.mpf(0)
        with mpmath.workprec(precision):
            sigma = mpmath.sqrt(mpmath.mpf(var.numerator) / var.denominator)
            mu_f = mpmath.mpf(mu.numerator) / mu.denominator
            below = 0
            for k, w in enumerate(pmf.weights):
                phi = normal_cdf((k - mu_f) / sigma, precision)
                left = mpmath.mpf(below) / pmf.total
                below += w
                right = mpmath.mpf(below) / pmf.total
                best = max(best, abs(right - phi), abs(left - phi))
        return best
    probs = np.asarray(pmf.probs if isinstance(pmf, FloatPMF) else pmf, dtype=float)
    mu, var = _moments_float(probs)
    if var <= 0:
        raise DegenerateVariance("Kolmogorov distance needs sigma^2 > 0")
    phi = ndtr((np.arange(len(probs)) - mu) / math.sqrt(var))
    right = np.cumsum(probs)
    left = right - probs
    return float(max(np.abs(right - phi).max(), np.abs(left - phi).max()))


# ---------------------------------------------------------------- Berry-Esseen


def delta_value(family: FamilyDescriptor, precision: int = DEFAULT_PRECISION):
    """The pinned zero-free sector half-angle as an interval."""
    with bc.interval_precision(precision):
        rule = family.delta_rule()
        if rule == "2pi/M_N":
            return 2 * iv.pi / factor_spec(family).max_b
        if rule == "pi/2":
            return iv.pi / 2
        return iv.pi


def _law(family: FamilyDescriptor, backend: str):
    return family_pmf(family, backend)


def _sigma(pmf) -> float:
    if isinstance(pmf, DiscretePMF):
        return math.sqrt(pmf.variance())
    return math.sqrt(_moments_float(np.asarray(pmf.probs))[1])


def berry_esseen_ratio(family: FamilyDescriptor, backend: str = "auto", precision: int = DEFAULT_PRECISION) -> dict:
    """``d_K * delta_N * sigma_N`` together with its factors."""
    pmf = _law(family, backend)
    dk = float(kolmogorov_distance(pmf, precision))
    delta = float(mpmath.mpf(bc.lower(delta_value(family, precision))))
    sigma = _sigma(pmf)
    return {"N": family.N, "d_K": dk, "delta": delta, "sigma": sigma, "ratio": dk * delta * sigma}


def loglog_slope(xs: Sequence, ys: Sequence) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def berry_esseen_sweep(
    template: Callable[[int], FamilyDescriptor],
    N_grid: Sequence[int],
    backend: str = "float",
    slope_window: tuple[float, float] = (-0.65, -0.35),
    ratio_bound: float = 10.0,
    precision: int = DEFAULT_PRECISION,
    jobs: int = 1,
) -> LimitReport:
    """d_K over a grid, its log-log slope and the spread of the ratio."""
    N_grid = list(N_grid)
    fams = [template(N) for N in N_grid]
    cells = _map(partial(berry_esseen_ratio, backend=backend, precision=precision), fams, jobs)
    dks = [c["d_K"] for c in cells]
    ratios = [c["ratio"] for c in cells]
    slope = loglog_slope(N_grid, dks)
    spread = max(ratios) / min(ratios)
    ok = slope_window[0] <= slope <= slope_window[1] and spread < ratio_bound
    fam = template(N_grid[0])
    return LimitReport(
        family=fam.canonical(),
        check="berry-esseen",
        N_grid=N_grid,
        values=dks,
        target={"slope_window": list(slope_window), "ratio_max_over_min": ratio_bound},
        verdict=ok,
        metadata=_meta(fam, precision, backend=backend),
        details={"slope": slope, "ratio": ratios, "ratio_max_over_min": spread},
    )


def _meta(family: FamilyDescriptor, precision: int, **extra) -> dict:
    d = {"delta_rule": family.delta_rule(), "a_rule": None, "precision_bits": precision}
    d.update(extra)
    return d


# ---------------------------------------------------------------- fourth cumulant


def family_cumulant_pair(family: FamilyDescriptor, order: int = 4) -> tuple[Fraction, Fraction]:
    """Exact ``(kappa_order, sigma^2)``: closed form for product forms,
    moment route otherwise."""
    if family.is_product_form:
        spec = factor_spec(family)
        return bc.closed_form_cumulant(spec, order), bc.closed_form_sigma2(spec)
    seq = cumulants(pmf_from_polynomial(polynomial(family)), order)
    return seq[order], seq.sigma2


def _big_delta(family: FamilyDescriptor, sigma2: Fraction, precision: int):
    """Delta for the product forms; ``pi sqrt(7/24) delta_N sigma_N`` otherwise,
    which is the same expression with the pinned ``delta_N``."""
    if sigma2 == 0:
        raise DegenerateVariance("sigma^2 = 0")
    if family.is_product_form:
        return bc.delta_N(factor_spec(family), precision)
    with bc.interval_precision(precision):
        c = iv.pi * iv.sqrt(iv.mpf(7) / 24)
        return c * delta_value(family, precision) * iv.sqrt(bc.iv_from_fraction(sigma2))


def kappa4_delta2(family: FamilyDescriptor, v: int = 4, precision: int = DEFAULT_PRECISION) -> tuple[Fraction | None, object]:
    """``(kappa*_v, kappa*_v Delta^(v-2))``; the first entry is exact when v is even."""
    kv, s2 = family_cumulant_pair(family, v)
    if s2 == 0:
        raise DegenerateVariance("sigma^2 = 0")
    D = _big_delta(family, s2, precision)
    with bc.interval_precision(precision):
        if v % 2 == 0:
            ks = kv / s2 ** (v // 2)
            return ks, bc.iv_from_fraction(ks) * D ** (v - 2)
        ks_iv = bc.iv_from_fraction(kv) / iv.sqrt(bc.iv_from_fraction(s2)) ** v
        return None, ks_iv * D ** (v - 2)


def limit_constant(family: FamilyDescriptor, precision: int = DEFAULT_PRECISION):
    """The known limit of ``kappa*_4 Delta^2`` for the family, as an interval."""
    try:
        ref = reference_values(family, precision)
    except NoReference:
        return None
    return ref.kappa4_delta2_limit


def mod_gaussian_phi(family: FamilyDescriptor, z, v: int = 4, precision: int = DEFAULT_PRECISION):
    """``E[exp(z Y)] exp(-t z^2 / 2)`` with ``Y = Delta^(1-2/v) X*``, ``t = Delta^(2(v-2)/v)``."""
    kv, s2 = family_cumulant_pair(family, 2)
    D = _big_delta(family, s2, precision)
    with mpmath.workprec(precision + 32):
        Dm = (bc.lower(D) + bc.upper(D)) / 2
        z = mpmath.mpmathify(z)
        if z == 0:
            return mpmath.mpc(1)
        sigma = mpmath.sqrt(mpmath.mpf(s2.numerator) / s2.denominator)
        scale = Dm ** (1 - mpmath.mpf(2) / v)
        t = Dm ** (mpmath.mpf(2 * (v - 2)) / v)
        s = z * scale / sigma
        if family.is_product_form:
            # (1 - e^(bs)) / (1 - e^(as)) = e^((b-a)s/2) sinh(bs/2) / sinh(as/2):
            # the exponential prefactors are exactly the centring
            logm = mpmath.mpf(0)
            for a, b in factor_spec(family).pairs:
                if a != b:
                    logm += mpmath.log(a * mpmath.sinh(b * s / 2) / (b * mpmath.sinh(a * s / 2)))
            val = mpmath.exp(logm - t * z * z / 2)
        else:
            pmf = pmf_from_polynomial(polynomial(family))
            mu = pmf.mean()
            w = mpmath.exp(s)
            acc = mpmath.mpc(0)
            for c in reversed(pmf.weights):
                acc = acc * w + c
            val = acc / pmf.total * mpmath.exp(-s * mpmath.mpf(mu.numerator) / mu.denominator - t * z * z / 2)
    with mpmath.workprec(precision):
        return +mpmath.mpc(val)


def _trajectory_cell(fam: FamilyDescriptor, v: int, points, precision: int):
    ks, kd = kappa4_delta2(fam, v, precision)
    phis = [mod_gaussian_phi(fam, z, v, precision) for z in points]
    return ks, kd, phis


def mod_gaussian_trajectory(
    template: Callable[[int], FamilyDescriptor],
    N_grid: Sequence[int],
    v: int = 4,
    points: Sequence = MOD_GAUSSIAN_POINTS,
    tolerance: float = 0.02,
    precision: int = DEFAULT_PRECISION,
    jobs: int = 1,
) -> LimitReport:
    """``kappa*_v Delta^(v-2)`` per N against the limit ``L`` and
    ``phi_N(z)`` against ``Psi(z) = exp(L z^v / v!)``.

    The verdict asks the last grid point to be within ``tolerance``
    (relative) of ``L``; with no known limit it is ``None``.
    """
    if v not in (3, 4):
        raise ValueError("v must be 3 or 4")
    N_grid = list(N_grid)
    fams = [template(N) for N in N_grid]
    cells = _map(partial(_trajectory_cell, v=v, points=list(points), precision=precision), fams, jobs)
    fam = template(N_grid[-1])
    L = limit_constant(fam, precision) if v == 4 else None
    kd_vals = [kd for _, kd, _ in cells]
    details: dict = {
        "kappa_star": [ks for ks, _, _ in cells],
        "z": list(points),
        "phi": [phis for _, _, phis in cells],
    }
    verdict = None
    if L is not None:
        Lm = (bc.lower(L) + bc.upper(L)) / 2
        rel = [abs((bc.lower(kd) + bc.upper(kd)) / 2 - Lm) / abs(Lm) for kd in kd_vals]
        details["relative_distance"] = rel
        with mpmath.workprec(precision):
            psi = [mpmath.exp(Lm * mpmath.mpmathify(z) ** v / math.factorial(v)) for z in points]
        details["phi_error"] = [max((abs(p - q) for p, q in zip(phis, psi)), default=0) for _, _, phis in cells]
        verdict = bool(rel[-1] < tolerance)
    return LimitReport(
        family=fam.canonical(),
        check="k4d2",
        N_grid=N_grid,
        values=kd_vals,
        target=L,
        verdict=verdict,
        metadata=_meta(fam, precision, v=v, tolerance=tolerance),
        details=details,
    )


# ---------------------------------------------------------------- deviations


def default_a_rule(delta: float, sigma: float) -> float:
    """``a_N = (delta_N sigma_N)^(2/5)``: grows, and is ``o(delta_N sigma_N)``."""
    return (delta * sigma) ** 0.4


def _float_law(family: FamilyDescriptor, backend: str) -> np.ndarray:
    pmf = family_pmf(family, backend)
    if isinstance(pmf, DiscretePMF):
        return pmf.to_float()
    return np.asarray(pmf.probs, dtype=float)


def moderate_deviation_point(family: FamilyDescriptor, x: float, backend: str = "float", a_rule=default_a_rule) -> dict:
    """``(1 / a_N^2) log P(X* > a_N x)``."""
    probs = _float_law(family, backend)
    mu, var = _moments_float(probs)
    if var <= 0:
        raise DegenerateVariance("sigma^2 = 0")
    sigma = math.sqrt(var)
    delta = float(bc.lower(delta_value(family)))
    a = a_rule(delta, sigma)
    k = np.arange(len(probs))
    tail = float(probs[(k - mu) / sigma > a * x].sum())
    if tail < TAIL_FLOOR:
        raise TailUnderflow(f"tail probability {tail} below {TAIL_FLOOR}")
    return {"N": family.N, "x": x, "a": a, "tail": tail, "value": math.log(tail) / (a * a)}


def moderate_deviation_curve(
    template: Callable[[int], FamilyDescriptor],
    N_grid: Sequence[int],
    x: float = 1.0,
    tolerance: float = 0.25,
    backend: str = "float",
    a_rule=default_a_rule,
) -> LimitReport:
    """The rate at fixed ``x`` along a grid.

    Verdict: last value within ``tolerance`` (relative) of ``-x^2/2`` and
    strictly closer than at every earlier grid point.
    """
    N_grid = list(N_grid)
    pts = [moderate_deviation_point(template(N), x, backend, a_rule) for N in N_grid]
    target = -x * x / 2
    vals = [p["value"] for p in pts]
    dist = [abs(v - target) for v in vals]
    if target == 0:
        within = dist[-1] < tolerance
    else:
        within = dist[-1] / abs(target) < tolerance
    closer = all(dist[-1] < d for d in dist[:-1])
    fam = template(N_grid[-1])
    return LimitReport(
        family=fam.canonical(),
        check="moderate-deviation",
        N_grid=N_grid,
        values=vals,
        target=target,
        verdict=bool(within and closer),
        metadata=_meta(fam, 53, backend=backend, a_rule="(delta_N sigma_N)^(2/5)" if a_rule is default_a_rule else "custom"),
        details={"x": x, "a": [p["a"] for p in pts], "tail": [p["tail"] for p in pts], "within": within, "monotone": closer},
    )


def concentration_envelope(family: FamilyDescriptor, backend: str = "auto", precision: int = DEFAULT_PRECISION) -> LimitReport:
    """``C_min = max_{x >= 0 atom} P(X* >= x) / exp(-x^2 / (2 (2 + x / Delta)))``."""
    probs = _float_law(family, backend)
    mu, var = _moments_float(probs)
    if var <= 0:
        raise DegenerateVariance("sigma^2 = 0")
    _, s2 = family_cumulant_pair(family, 2)
    D = float(bc.lower(_big_delta(family, s2, precision)))
    sigma = math.sqrt(var)
    xs = (np.arange(len(probs)) - mu) / sigma
    tail = np.cumsum(probs[::-1])[::-1]  # P(X >= k)
    keep = xs >= 0
    x, t = xs[keep], tail[keep]
    log_ratio = np.log(np.maximum(t, np.finfo(float).tiny)) + 0.5 * x * x / (2 + x / D)
    i = int(np.argmax(np.where(t > 0, log_ratio, -np.inf)))
    cmin = float(math.exp(log_ratio[i]))
    return LimitReport(
        family=family.canonical(),
        check="concentration",
        N_grid=[family.N],
        values=[cmin],
        target=None,
        verdict=bool(math.isfinite(cmin)),
        metadata=_meta(family, precision, backend=backend),
        details={"Delta": D, "argmax_x": float(x[i])},
    )


def fourth_moment_diagnostic(template: Callable[[int], FamilyDescriptor], N_grid: Sequence[int]) -> LimitReport:
    """``E(X*)^4 = kappa*_4 + 3`` per N, exact."""
    N_grid = list(N_grid)
    vals = []
    for N in N_grid:
        k4, s2 = family_cumulant_pair(template(N), 4)
        if s2 == 0:
            raise DegenerateVariance(f"sigma^2 = 0 at N = {N}")
        vals.append(k4 / (s2 * s2) + 3)
    dist = [abs(v - 3) for v in vals]
    fam = template(N_grid[-1])
    return LimitReport(
        family=fam.canonical(),
        check="fourth-moment",
        N_grid=N_grid,
        values=vals,
        target=3,
        verdict=bool(dist[-1] <= dist[0]),
        metadata=_meta(fam, 0),
    )


# ---------------------------------------------------------------- plot data


def cdf_vs_normal_csv(pmf, stream=None) -> str:
    """Columns ``x,F_star,Phi`` at the standardized atoms."""
    if isinstance(pmf, DiscretePMF):
        probs = pmf.to_float()
    else:
        probs = np.asarray(pmf.probs, dtype=float)
    mu, var = _moments_float(probs)
    if var <= 0:
        raise DegenerateVariance("sigma^2 = 0")
    xs = (np.arange(len(probs)) - mu) / math.sqrt(var)
    F = np.cumsum(probs)
    buf = stream if stream is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "F_star", "Phi"])
    for x, f, p in zip(xs, F, ndtr(xs)):
        w.writerow([repr(float(x)), repr(float(f)), repr(float(p))])
    return buf.getvalue() if stream is None else ""


def k4d2_trajectory_csv(report: LimitReport, stream=None) -> str:
    """Columns ``N,kappa4_star,kappa4_delta2,target``."""
    buf = stream if stream is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "kappa4_star", "kappa4_delta2", "target"])
    tgt = report.target
    tgt_s = serialize(tgt)["value"] if isinstance(tgt, iv.mpf) else ""
    for N, ks, kd in zip(report.N_grid, report.details.get("kappa_star", []), report.values):
        w.writerow([N, serialize(ks), serialize(kd)["value"], tgt_s])
    return buf.getvalue() if stream is None else ""
