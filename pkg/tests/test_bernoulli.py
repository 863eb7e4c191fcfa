import math
from fractions import Fraction as Q

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyzero import bernoulli as bc
from polyzero.distributions import cumulants, pmf_from_polynomial
from polyzero.errors import DegenerateVariance
from polyzero.exactpoly import FactorSpec, build_product_form
from polyzero.families import FamilyDescriptor, factor_spec, reference_values


def mid(x):
    return float((bc.lower(x) + bc.upper(x)) / 2)


def test_bernoulli_numbers():
    B = bc.bernoulli_numbers(12)
    assert B[0] == 1 and B[1] == Q(1, 2) and B[2] == Q(1, 6)
    assert B[3] == 0 and B[4] == Q(-1, 30) and B[12] == Q(-691, 2730)
    assert all(B[k] == 0 for k in range(3, 13, 2))
    minus = B.minus_convention()
    for m in range(1, 12):
        assert sum(math.comb(m + 1, k) * minus[k] for k in range(m + 1)) == 0


def test_closed_form_cumulant_examples():
    a2 = FactorSpec.of([(1, 2), (1, 3)])
    assert bc.closed_form_cumulant(a2, 2) == Q(11, 12)
    assert bc.closed_form_cumulant(a2, 3) == 0
    assert bc.closed_form_cumulant(FactorSpec.of([(2, 4)]), 2) == 1
    assert bc.closed_form_cumulant(a2, 1) == Q(3, 2)


def test_delta_examples():
    q2 = factor_spec(FamilyDescriptor.qcatalan(2))
    assert abs(mid(bc.delta_N(q2)) - math.pi**2 * math.sqrt(7 / 6) / 4) < 1e-15
    # the quoted 2.6646 is a rounding slip; the value is 2.66510 to five places
    assert abs(mid(bc.delta_N(q2)) - 2.66510) < 1e-5
    for N in (3, 7, 20):
        fam = FamilyDescriptor.coxeter_inversions("B", N)
        d = bc.delta_N(factor_spec(fam))
        ref = reference_values(fam).delta
        assert abs(mid(d) - mid(ref)) <= 1e-30 * mid(ref)
    with pytest.raises(DegenerateVariance):
        bc.delta_N(FactorSpec.of([(2, 2), (3, 3)]))


def test_bound_examples():
    q2 = factor_spec(FamilyDescriptor.qcatalan(2))
    cert = bc.verify_cumulant_bound(q2, 2)
    assert cert.holds and cert.lhs == (Q(-2), Q(1))
    assert abs(float(bc.upper(cert.rhs)) - 24 / (math.pi**4 * 7 / 6 / 16)) < 1e-12
    assert abs(float(bc.upper(cert.rhs)) - 3.38) < 5e-3
    assert bc.verify_cumulant_bound(FactorSpec.of([(1, 1)]), 3).holds
    assert bc.verify_cumulant_bound(factor_spec(FamilyDescriptor.coxeter_inversions("A", 10)), 3).holds


def test_stated_bound_fails_beyond_fourth_order():
    # 1 + z^2 is a Rademacher law up to scale: kappa*_6 = 16 > 6! / Delta^4
    spec = FactorSpec.of([(2, 4)])
    assert bc.closed_form_cumulant(spec, 6) == 16
    assert not bc.verify_cumulant_bound(spec, 3).holds
    assert bc.verify_cumulant_bound(spec, 3, corrected=True).holds
    # independent moment route on S_21 inversions, tenth order
    fam = FamilyDescriptor.coxeter_inversions("A", 20)
    seq = cumulants(pmf_from_polynomial(build_product_form(factor_spec(fam))), 10)
    ks = abs(seq[10]) / seq.sigma2**5
    delta = math.pi**2 * math.sqrt(7 / 6) * math.sqrt(seq.sigma2) / 21
    assert float(ks) > math.factorial(10) / delta**8
    assert not bc.verify_cumulant_bound(factor_spec(fam), 5).holds


def test_lemma_examples():
    assert bc.lemma_inequality(5, 5, 3)
    assert bc.lemma_inequality(0, 1, 2)
    assert bc.lemma_inequality(3, 7, 4)
    with pytest.raises(ValueError):
        bc.lemma_inequality(4, 3, 2)


def test_bernoulli_bound_and_c_m():
    assert bc.bernoulli_bound(1) and bc.bernoulli_bound(2)
    c2 = bc.c_m(2)
    assert abs(mid(c2) - 6 / (7 * math.pi**4)) < 1e-16
    assert abs(mid(c2) - 0.008800) < 1e-6
    assert bc.lower(c2) > bc.upper(bc.c_m(3))


def test_appendix_constant():
    c0 = bc.appendix_constant(0)
    with mpmath.workprec(128):
        target = 324 * mpmath.sqrt(2)
    assert bc.lower(c0) <= target <= bc.upper(c0)


@pytest.mark.parametrize("N,ell", [(1, 1), (3, 5), (8, 8), (12, 4), (20, 15)])
def test_hurwitz_route_matches_closed_form(N, ell):
    spec = factor_spec(FamilyDescriptor.gaussian(N, ell))
    for m in range(1, 11):
        assert bc.gaussian_cumulant_hurwitz(N, ell, m) == bc.closed_form_cumulant(spec, m)


@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(2, 30))
def test_lemma_property(x, y, m):
    a, b = min(x, y), max(x, y)
    assert bc.lemma_inequality(a, b, m)


specs = st.lists(st.tuples(st.integers(1, 12), st.integers(0, 12)), min_size=1, max_size=6).map(
    lambda raw: [(a, a + d) for a, d in raw]
)


@given(specs, st.integers(2, 10))
def test_corrected_bound_property(pairs, m):
    if max(a for a, _ in pairs) >= max(b for _, b in pairs):
        return
    spec = FactorSpec.of(pairs)
    if spec.is_degenerate():
        return
    assert bc.verify_cumulant_bound(spec, m, corrected=True).holds


@given(specs)
def test_sigma2_specialization(pairs):
    if max(a for a, _ in pairs) >= max(b for _, b in pairs):
        return
    spec = FactorSpec.of(pairs)
    assert bc.closed_form_cumulant(spec, 2) == Q(sum(b * b - a * a for a, b in pairs), 12)
