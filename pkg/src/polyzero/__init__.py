"""Exact cumulant bounds, root geometry and finite-N limit checks for
combinatorial generating polynomials."""

from .bernoulli import (
    bernoulli_bound,
    bernoulli_numbers,
    closed_form_cumulant,
    closed_form_sigma2,
    delta_N,
    lemma_inequality,
    verify_cumulant_bound,
)
from .distributions import DiscretePMF, FloatPMF, cumulants, pmf_from_polynomial
from .errors import PolyzeroError
from .exactpoly import ExactPolynomial, FactorSpec, build_product_form
from .families import (
    FamilyDescriptor,
    brute_force_polynomial,
    family_pmf,
    parse_family,
    parse_template,
    polynomial,
    reference_values,
)
from .groups import SignedPermutation, count_statistic
from .limits import LimitReport, kolmogorov_distance, normal_cdf
from .montecarlo import empirical_vs_exact, sample_element
from .roots import geometry_predicates, numeric_roots, product_form_roots

__version__ = "0.1.0"

__all__ = [
    "bernoulli_bound",
    "bernoulli_numbers",
    "closed_form_cumulant",
    "closed_form_sigma2",
    "delta_N",
    "lemma_inequality",
    "verify_cumulant_bound",
    "DiscretePMF",
    "FloatPMF",
    "cumulants",
    "pmf_from_polynomial",
    "PolyzeroError",
    "ExactPolynomial",
    "FactorSpec",
    "build_product_form",
    "FamilyDescriptor",
    "brute_force_polynomial",
    "family_pmf",
    "parse_family",
    "parse_template",
    "polynomial",
    "reference_values",
    "SignedPermutation",
    "count_statistic",
    "LimitReport",
    "kolmogorov_distance",
    "normal_cdf",
    "empirical_vs_exact",
    "sample_element",
    "geometry_predicates",
    "numeric_roots",
    "product_form_roots",
]
