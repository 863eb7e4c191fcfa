"""Acceptance criteria, one test per criterion, at the stated tolerances.

Each test prints a ``CRITERION n PASS|FAIL`` line; the collected lines are
repeated in the pytest terminal summary.  Failing criteria are left failing.
"""

import random
import time
from fractions import Fraction as Q

import mpmath
import numpy as np

from polyzero import bernoulli as bc
from polyzero import limits as lim
from polyzero import montecarlo as mc
from polyzero.distributions import cumulants, pmf_from_polynomial
from polyzero.exactpoly import eval_complex, eval_rational
from polyzero.families import FamilyDescriptor as F
from polyzero.families import (
    _exact_divide,
    _partition_box_poly,
    brute_force_polynomial,
    catalan_number,
    factor_spec,
    family_pmf,
    polynomial,
    reference_values,
)
from polyzero.exactpoly import ExactPolynomial
from polyzero.roots import cobin_roots, geometry_predicates, matched_numeric_roots, numeric_roots

COBIN_P = (Q(1, 4), Q(1, 3), Q(1, 2), Q(2, 3), Q(3, 4))


def product_form_catalog(N_max: int, ells=None, ks=(2, 3, 4)) -> list:
    fams = []
    for N in range(1, N_max + 1):
        fams += [F.coxeter_inversions("A", N), F.coxeter_inversions("B", N), F.dpp(N)]
        fams += [F.gaussian(N, l) for l in (ells or range(1, N_max + 1))]
        if N >= 2:
            fams += [F.coxeter_inversions("D", N), F.qcatalan(N)]
            fams += [F.kcatalan(N, k) for k in ks]
    return fams


def test_criterion_01_oracle_equivalence(acceptance):
    t0 = time.time()
    bad = []
    checked = 0

    def check(fam, other):
        nonlocal checked
        checked += 1
        if polynomial(fam) != other:
            bad.append(fam.canonical())

    for kind, ranks in (("A", range(1, 9)), ("B", range(1, 7)), ("D", range(2, 7))):
        for N in ranks:
            for fam in (F.coxeter_inversions(kind, N), F.coxeter_descents(kind, N)):
                check(fam, brute_force_polynomial(fam))
    for N in range(1, 9):
        for ell in range(1, 9):
            fam = F.gaussian(N, ell)
            check(fam, brute_force_polynomial(fam))
    for N in range(1, 11):
        fam = F.qcatalan(N)
        check(fam, brute_force_polynomial(fam))
        # partition route: Gaussian box polynomial G(N, N) divided by [N + 1]_q
        check(fam, _exact_divide(_partition_box_poly(N, N), ExactPolynomial((1,) * (N + 1))))
        if eval_rational(polynomial(fam), 1) != catalan_number(N):
            bad.append(f"C_{N}(1)")
    if [catalan_number(N) for N in range(1, 7)] != [1, 2, 5, 14, 42, 132]:
        bad.append("catalan numbers")
    for N in range(1, 9):
        check(F.dpp(N), brute_force_polynomial(F.dpp(N)))
    for N in range(1, 11):
        check(F.alternating_descents(N), brute_force_polynomial(F.alternating_descents(N)))
    elapsed = time.time() - t0
    ok = not bad and elapsed <= 300
    acceptance(1, "oracle equivalence", ok, f"{checked} exact comparisons, mismatches={bad or 'none'}, {elapsed:.1f}s (limit 300s)")


def test_criterion_02_cumulant_double_derivation(acceptance):
    bad = []
    fams = product_form_catalog(10, ells=range(1, 11))
    for fam in fams:
        spec = factor_spec(fam)
        seq = cumulants(pmf_from_polynomial(polynomial(fam)), 8)
        closed = [bc.closed_form_cumulant(spec, m) for m in range(1, 9)]
        if any(seq[m] != closed[m - 1] for m in range(1, 9)):
            bad.append((fam.canonical(), "routes differ"))
        if any(seq[m] != 0 or closed[m - 1] != 0 for m in (3, 5, 7)):
            bad.append((fam.canonical(), "odd cumulant"))
        if seq[1] != Q(spec.degree, 2):
            bad.append((fam.canonical(), "mean"))
    acceptance(2, "cumulant double derivation", not bad, f"{len(fams)} families, orders 1..8, failures={bad or 'none'}")


def _printed(fam):
    r = reference_values(fam)
    return r.printed.get("sigma2", r.sigma2), r.printed.get("kappa4_star", r.kappa4_star)


def test_criterion_03_table_regression(acceptance):
    bad = []
    cells = 0
    fams = []
    for N in range(2, 51):
        fams += [F.coxeter_inversions(t, N) for t in "ABD"]
        fams += [F.gaussian(N, ell) for ell in range(2, 21)]
        fams += [F.qcatalan(N), F.dpp(N)]
    for fam in fams:
        spec = factor_spec(fam)
        s2 = bc.closed_form_cumulant(spec, 2)
        k4s = bc.closed_form_cumulant(spec, 4) / s2**2
        ps2, pk4s = _printed(fam)
        cells += 2
        if ps2 != s2:
            bad.append(f"{fam.canonical()} sigma2")
        if pk4s != k4s:
            bad.append(f"{fam.canonical()} kappa4*")
    kinds = sorted({b.split(":")[0] + " " + b.split()[-1] for b in bad})
    detail = f"{cells} printed closed forms, {len(bad)} mismatches"
    if bad:
        detail += f" ({', '.join(kinds)}; first {bad[0]})"
    acceptance(3, "closed-form table regression", not bad, detail)


def test_criterion_04_stated_cumulant_bound(acceptance):
    t0 = time.time()
    fams = product_form_catalog(40)
    failures = []
    cells = 0
    for fam in fams:
        spec = factor_spec(fam)
        for m in range(2, 9):
            cells += 1
            cert = bc.verify_cumulant_bound(spec, m)
            if not cert.holds:
                failures.append((fam.canonical(), 2 * m, float(cert.margin)))
    elapsed = time.time() - t0
    ok = not failures and elapsed <= 120
    detail = f"{cells} cells over {len(fams)} families, {len(failures)} with margin <= 0, {elapsed:.1f}s (limit 120s)"
    if failures:
        first = min(failures, key=lambda f: (f[1], f[0]))
        detail += f"; lowest order failing {first[0]} at 2m={first[1]} margin {first[2]:.4g}"
    acceptance(4, "stated cumulant bound", ok, detail)


def test_criterion_05_k4d2_limits(acceptance):
    N = 2000
    pi4 = mpmath.pi**4
    targets = [
        (F.coxeter_inversions("A", N), -7 * pi4 / 100),
        (F.coxeter_inversions("B", N), -7 * pi4 / 100),
        (F.coxeter_inversions("D", N), -7 * pi4 / 100),
        (F.qcatalan(N), -7 * pi4 / 80),
        (F.dpp(N), -7 * pi4 / 108),
        (F.gaussian(N, N), -35 * pi4 / 576),
    ]
    parts = []
    ok = True
    for fam, L in targets:
        _, kd = lim.kappa4_delta2(fam)
        v = (bc.lower(kd) + bc.upper(kd)) / 2
        rel = float(abs(v - L) / abs(L))
        ok &= rel < 0.02
        parts.append(f"{fam.kind}{':' + fam.type if fam.type else ''} {float(v):.4f} vs {float(L):.4f} rel {rel:.2e}")
    acceptance(5, "kappa4* Delta^2 limits at N=2000", ok, "; ".join(parts))


def test_criterion_06_berry_esseen_shape(acceptance):
    grid = range(20, 201)
    inv = lim.berry_esseen_sweep(lambda N: F.coxeter_inversions("A", N), grid, backend="float")
    cob = lim.berry_esseen_sweep(lambda N: F.cobin(N, Q(1, 2)), grid, backend="float")
    parts = []
    ok = True
    for name, rep in (("inversions A", inv), ("CoBin(N,1/2)", cob)):
        s, r = rep.details["slope"], rep.details["ratio_max_over_min"]
        ok &= -0.65 <= s <= -0.35 and r < 10
        parts.append(f"{name} slope {s:.3f} in [-0.65,-0.35]={-0.65 <= s <= -0.35}, ratio max/min {r:.2f} < 10={r < 10}")
    acceptance(6, "Berry-Esseen shape", ok, "; ".join(parts))


def _root_cases():
    fams = [F.coxeter_inversions("A", N) for N in range(2, 13)]
    fams += [F.coxeter_inversions("B", N) for N in range(2, 9)]
    fams += [F.coxeter_inversions("D", N) for N in range(3, 9)]
    fams += [F.qcatalan(N) for N in range(2, 15)]
    fams += [F.gaussian(N, ell) for N in (3, 6, 10, 20) for ell in (2, 5, 10) if N * ell <= 200]
    fams += [F.dpp(N) for N in range(2, 9)]
    fams += [F.kcatalan(N, 3) for N in range(2, 8)]
    fams += [F.coxeter_inversions("B", 14), F.coxeter_inversions("A", 19)]
    return [f for f in fams if factor_spec(f).degree <= 200]


def test_criterion_07_root_geometry(acceptance):
    bad = []
    worst_pf = 0.0
    cases = _root_cases()
    for fam in cases:
        exact, num, worst = matched_numeric_roots(factor_spec(fam), polynomial(fam))
        mod = max((abs(abs(r.z) - 1) for r in num.numeric_roots), default=0.0)
        worst_pf = max(worst_pf, worst, mod)
        if worst > 1e-8 or mod > 1e-8:
            bad.append(fam.canonical())
    worst_cob = 0.0
    for N in range(2, 51):
        for p in COBIN_P:
            poly = polynomial(F.cobin(N, p))
            for z in cobin_roots(N, p):
                v = eval_complex(poly, z, 128)
                scale = sum(c * abs(complex(z)) ** k for k, c in enumerate(poly.coeffs))
                re_err = abs(complex(z).real - float((1 - 1 / p) / 2))
                res = abs(complex(v.value)) / scale
                worst_cob = max(worst_cob, res)
                if re_err > 1e-10 or res > 1e-8:
                    bad.append(f"cobin:{N}:{p}")
    for t in "ABD":
        for N in range(2 if t == "D" else 1, 13):
            p = polynomial(F.coxeter_descents(t, N))
            if p.degree and not geometry_predicates(numeric_roots(p), 1e-6, poly=p).real_rooted_negative:
                bad.append(f"coxeter-desc:{t}:{N}")
    for N in range(2, 11):
        p = polynomial(F.alternating_descents(N))
        g = geometry_predicates(numeric_roots(p), 1e-6, poly=p)
        if p.degree and not (g.root_unitary and g.hurwitz):
            bad.append(f"altdesc:{N}")
    worst_line = 0.0
    for kind in ("ehrhart-dualA", "ehrhart-dualC"):
        for N in range(1, 31):
            p = polynomial(F(kind, N))
            for r in numeric_roots(p).numeric_roots:
                worst_line = max(worst_line, abs(r.z.real + 0.5))
            if worst_line > 1e-8:
                bad.append(f"{kind}:{N}")
    detail = (
        f"{len(cases)} product forms (max match/modulus error {worst_pf:.1e}), "
        f"cobin residual max {worst_cob:.1e}, Ehrhart duals max |Re+1/2| {worst_line:.1e}, failures={sorted(set(bad)) or 'none'}"
    )
    acceptance(7, "root geometry", not bad, detail)


def test_criterion_08_backend_consistency(acceptance):
    worst = 0.0
    count = 0
    for N in range(1, 13):
        fams = [F.coxeter_inversions("A", N), F.coxeter_inversions("B", N), F.coxeter_descents("A", N), F.coxeter_descents("B", N)]
        fams += [F.dpp(N), F.qcatalan(N), F("ehrhart-cube", N), F("ehrhart-dualA", N), F("ehrhart-dualC", N), F.alternating_descents(N)]
        if N >= 2:
            fams += [F.coxeter_inversions("D", N), F.coxeter_descents("D", N), F.kcatalan(N, 3)]
        fams += [F.gaussian(N, ell) for ell in range(1, 13)]
        fams += [F.cobin(N, p) for p in COBIN_P]
        for fam in fams:
            exact = family_pmf(fam, "exact").to_float()
            flt = np.asarray(family_pmf(fam, "float").probs, dtype=float)
            worst = max(worst, float(np.abs(exact - flt).max()))
            count += 1
    acceptance(8, "float vs exact PMF", worst < 1e-12, f"{count} families with N <= 12, max deviation {worst:.2e} (limit 1e-12)")


def test_criterion_09_monte_carlo(acceptance):
    rec = mc.empirical_vs_exact(F.coxeter_inversions("A", 8), 1_000_000, seed=0, validate=True)
    rows = mc.sample_group("D", 8, 200_000, mc._rng(99), validate=True)
    parity = bool(((rows < 0).sum(axis=1) % 2 == 0).all())
    ok = rec.tv_distance < 5e-3 and rec.chi2_p > 1e-3 and parity
    acceptance(
        9,
        "Monte Carlo agreement",
        ok,
        f"TV {rec.tv_distance:.2e} < 5e-3, chi2 p {rec.chi2_p:.3f} > 1e-3 (dof {rec.chi2_dof}), type D even parity on all draws={parity}",
    )


def test_criterion_10_moderate_deviation(acceptance):
    t0 = time.time()
    rep = lim.moderate_deviation_curve(lambda N: F.coxeter_inversions("A", N), [200, 400, 800], x=1.0, tolerance=0.25)
    elapsed = time.time() - t0
    v = rep.values
    within = rep.details["within"]
    closer = rep.details["monotone"]
    ok = within and closer and elapsed <= 180
    acceptance(
        10,
        "moderate deviation trend",
        ok,
        f"values {v[0]:.4f}, {v[1]:.4f}, {v[2]:.4f} at N=200,400,800; within 25% of -0.5 at 800={within} "
        f"(rel {abs(v[2] + 0.5) / 0.5:.3f}); strictly closer={closer}; {elapsed:.1f}s",
    )


def test_criterion_11_mod_gaussian(acceptance):
    L = -7 * mpmath.pi**4 / 80
    zs = (0.5, -0.5, 1, -1)
    errs = []
    for N in (50, 100, 200):
        fam = F.qcatalan(N)
        errs.append(max(abs(lim.mod_gaussian_phi(fam, z) - mpmath.exp(L * mpmath.mpf(z) ** 4 / 24)) for z in zs))
    ok = errs[0] > errs[1] > errs[2]
    acceptance(11, "mod-Gaussian pointwise", ok, "max |phi_N - Psi| " + ", ".join(f"{float(e):.4f}" for e in errs) + " at N=50,100,200")


def test_criterion_12_inequality_suite(acceptance):
    rng = random.Random(12345)
    fails = 0
    for _ in range(100_000):
        b = rng.randint(0, 10**6)
        a = rng.randint(0, b)
        m = rng.randint(2, 30)
        fails += not bc.lemma_inequality(a, b, m)
    bern = all(bc.bernoulli_bound(m) for m in range(1, 65))
    mono = bc.c_sequence_decreasing(64)
    C0 = bc.appendix_constant(0)
    with mpmath.workprec(128):
        target = 324 * mpmath.sqrt(2)
        c0_ok = bc.lower(C0) <= target <= bc.upper(C0)
        c0 = (bc.lower(C0) + bc.upper(C0)) / 2
    ok = fails == 0 and bern and mono and c0_ok
    acceptance(
        12,
        "inequality suite",
        ok,
        f"lemma failures {fails}/100000, Bernoulli bound m<=64 {bern}, c_m decreasing m<=64 {mono}, "
        f"C_0 = {mpmath.nstr(c0, 20)} encloses 324 sqrt 2={c0_ok}",
    )
