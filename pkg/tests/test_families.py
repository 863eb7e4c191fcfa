from fractions import Fraction as Q
from math import comb

import numpy as np
import pytest

from polyzero import bernoulli as bc
from polyzero.distributions import DiscretePMF, cumulants, pmf_from_polynomial
from polyzero.errors import FamilyParseError, NoReference, TooLarge
from polyzero.exactpoly import eval_rational
from polyzero.families import (
    FamilyDescriptor as F,
    brute_force_polynomial,
    catalan_number,
    degrees,
    factor_spec,
    family_pmf,
    parse_family,
    parse_template,
    polynomial,
    reference_values,
)


def test_degrees():
    assert degrees("A", 3) == (2, 3, 4)
    assert degrees("B", 3) == (2, 4, 6)
    assert degrees("D", 4) == (2, 4, 6, 4)


def test_factor_specs():
    assert factor_spec(F.qcatalan(3)).pairs == ((2, 5), (3, 6))
    assert factor_spec(F.dpp(3)).pairs == ((1, 1), (2, 4), (3, 9))
    assert factor_spec(F.coxeter_inversions("B", 2)).pairs == ((1, 2), (1, 4))


def test_polynomial_examples():
    assert polynomial(F("ehrhart-dualC", 2)).coeffs == (1, 2, 2)
    assert pmf_from_polynomial(polynomial(F.cobin(2, Q(1, 2)))).probs == (Q(1, 3), Q(2, 3))
    assert polynomial(F.alternating_descents(3)).coeffs == (2, 2, 2)


def test_brute_force_examples():
    assert brute_force_polynomial(F.coxeter_inversions("A", 2)).coeffs == (1, 2, 2, 1)
    assert brute_force_polynomial(F.gaussian(2, 2)).coeffs == (1, 1, 2, 1, 1)
    assert brute_force_polynomial(F.dpp(3)).coeffs == (1, 0, 1, 1, 0, 1, 1, 0, 1)
    with pytest.raises(TooLarge):
        brute_force_polynomial(F.coxeter_inversions("A", 12))


def test_reference_values_examples():
    r = reference_values(F.coxeter_inversions("A", 2))
    assert r.sigma2 == Q(11, 12) and r.M == 3
    r = reference_values(F.qcatalan(5))
    assert r.sigma2 == 20 and r.M == 10 and r.kappa4_star == -Q(3, 5) * Q(92, 120)
    r = reference_values(F.gaussian(4, 4))
    assert r.kappa4_star == -Q(6, 5) * (Q(1, 4) + Q(1, 4) - Q(1, 9))
    with pytest.raises(NoReference):
        reference_values(F("ehrhart-dualC", 3))


def test_dpp_printed_variance_differs():
    # the printed 5N^3 term disagrees with the factor sum; 5N^4 agrees
    for N in (2, 5, 9):
        r = reference_values(F.dpp(N))
        assert r.sigma2 == bc.closed_form_sigma2(factor_spec(F.dpp(N)))
        assert r.printed["sigma2"] != r.sigma2


@pytest.mark.xfail(strict=True, reason="printed DPP variance has 5N^3 where the sum gives 5N^4")
def test_dpp_printed_variance_as_printed():
    r = reference_values(F.dpp(4))
    assert r.printed["sigma2"] == bc.closed_form_sigma2(factor_spec(F.dpp(4)))


def test_gaussian_k4d2_prefactor():
    # -6/5 * 7 pi^4 / 72 = -7 pi^4 / 60; the printed simplification uses 432
    r = reference_values(F.gaussian(7, 3))
    ratio = (bc.lower(r.printed["kappa4_delta2"]) / bc.lower(r.kappa4_delta2))
    assert abs(ratio - Q(300, 432)) < 1e-30


@pytest.mark.parametrize("N", range(1, 13))
def test_qcatalan_at_one(N):
    assert eval_rational(polynomial(F.qcatalan(N)), 1) == catalan_number(N)


def test_catalan_numbers():
    assert [catalan_number(N) for N in range(1, 7)] == [1, 2, 5, 14, 42, 132]


@pytest.mark.parametrize("N,k", [(2, 2), (3, 3), (4, 2), (4, 4), (6, 3)])
def test_kcatalan_at_one(N, k):
    assert eval_rational(polynomial(F.kcatalan(N, k)), 1) == Q(comb(k * N, N), (k - 1) * N + 1)


@pytest.mark.parametrize("N", range(1, 9))
def test_ehrhart_dual_a_is_cobin_numerator(N):
    assert polynomial(F("ehrhart-dualA", N)) == polynomial(F.cobin(N + 1, Q(1, 2)))


@pytest.mark.parametrize("N", range(1, 8))
def test_ehrhart_dual_c_law(N):
    # N - U V, U ~ Bin(N, 1/2), V ~ Bernoulli(2^N / (2^N + 1))
    pv = Q(2**N, 2**N + 1)
    law = [Q(0)] * (N + 1)
    for u in range(N + 1):
        pu = Q(comb(N, u), 2**N)
        law[N - u] += pu * pv
        law[N] += pu * (1 - pv)
    assert pmf_from_polynomial(polynomial(F("ehrhart-dualC", N))).probs == tuple(law)


@pytest.mark.parametrize("N", range(1, 51))
def test_reference_sigma2_product_forms(N):
    fams = [F.coxeter_inversions("A", N), F.coxeter_inversions("B", N), F.dpp(N)]
    if N >= 2:
        fams += [F.coxeter_inversions("D", N), F.qcatalan(N), F.kcatalan(N, 3)]
    for ell in (1, 7, N):
        fams.append(F.gaussian(N, ell))
    for fam in fams:
        assert reference_values(fam).sigma2 == bc.closed_form_cumulant(factor_spec(fam), 2)


@pytest.mark.parametrize("n", range(4, 9))
def test_eulerian_cumulants(n):
    c = cumulants(pmf_from_polynomial(polynomial(F.coxeter_descents("A", n - 1))), n)
    B = bc.bernoulli_numbers(n)
    for m in range(2, n + 1):
        assert c[m] == (n + 1) * B[m] / m


@pytest.mark.parametrize("N", range(4, 11))
def test_alternating_descent_moments(N):
    r = reference_values(F.alternating_descents(N))
    c = cumulants(pmf_from_polynomial(brute_force_polynomial(F.alternating_descents(N))), 4)
    assert c[1] == r.mean and c[2] == r.sigma2 and c[4] == r.kappa4


def test_parse_family():
    assert parse_family("coxeter-inv:A:10") == F.coxeter_inversions("A", 10)
    assert parse_family("cobin:20:1/3") == F.cobin(20, Q(1, 3))
    assert parse_template("gaussian", ell_eq_N=True)(6) == F.gaussian(6, 6)
    assert parse_template("cobin:N:1/2")(9) == F.cobin(9, Q(1, 2))
    for bad in ("nosuch:3", "coxeter-inv:Q:3", "coxeter-inv:A", "gaussian:3", "cobin:3:x", "dpp:0"):
        with pytest.raises(FamilyParseError):
            parse_family(bad)


def test_family_pmf_backends():
    fam = F.coxeter_inversions("A", 6)
    exact = family_pmf(fam, "exact")
    assert isinstance(exact, DiscretePMF)
    flt = family_pmf(fam, "float")
    assert np.abs(flt.probs - exact.to_float()).max() < 1e-15
    assert family_pmf(F.dpp(1), "exact").probs == (1,)
