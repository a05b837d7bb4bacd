import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ealab import bounds
from ealab.errors import DomainError, UsageError

F = Fraction


def test_tail_sum_f_examples():
    # (1/2)^2 + 2 * (1/2) * (1/2)
    assert bounds.tail_sum_f(2, 1, 2) == F(3, 4)
    assert bounds.tail_sum_f(7, 7, 3) == 1
    assert bounds.tail_sum_f(5, 0, 4) == F(3, 4) ** 5
    with pytest.raises(UsageError):
        bounds.tail_sum_f(2, 3, 2)


@given(st.integers(1, 12), st.integers(0, 12), st.integers(1, 6))
def test_tail_sum_f_is_binomial_cdf(m, i, n):
    if i > m:
        return
    p = F(1, n)
    expected = sum(math.comb(m, k) * p**k * (1 - p) ** (m - k) for k in range(i + 1))
    assert bounds.tail_sum_f(m, i, n) == expected


def test_tail_monotonicity_examples():
    v = bounds.check_lemma4(2, 0, 50)
    assert v.holds and v.exact
    assert bounds.check_lemma4(10, 10, 200).holds
    # the first step from m = i already has margin 1 - f(i+1, i, n) >= 0
    v = bounds.check_lemma4(3, 2, 3)
    assert v.worst_margin == 1 - bounds.tail_sum_f(3, 2, 3)
    with pytest.raises(UsageError):
        bounds.check_lemma4(3, 5, 4)


@pytest.mark.parametrize("n", [3, 5, 16, 40])
def test_population_sum_single_offspring_is_n_minus_one(n):
    # sum_{i<n} P(X <= i) = n - E[X] and E[X] = 1
    assert bounds.lemma5_sum_exact(n, 1) == n - 1


@settings(max_examples=30)
@given(st.integers(1, 20), st.integers(1, 30))
def test_population_sum_non_increasing_in_lambda(n, lam):
    assert bounds.lemma5_sum_exact(n, lam + 1) <= bounds.lemma5_sum_exact(n, lam)


def test_population_threshold_formula():
    expected = math.ceil(math.e * 2 * math.log(16) / math.log(math.log(16)))
    assert bounds.lemma5_threshold(16, 1) == expected == 15
    with pytest.raises(DomainError):
        bounds.lemma5_threshold(2, 1)


def test_population_sum_extended_precision_fallback():
    exact = bounds.lemma5_sum(20, 30)
    approx = bounds.lemma5_sum(20, 30, bits_budget=10)
    assert isinstance(exact, Fraction) and isinstance(approx, mpmath.mpf)
    with mpmath.workdps(60):
        assert abs(approx - mpmath.mpf(exact.numerator) / exact.denominator) < mpmath.mpf(10) ** -40


@pytest.mark.parametrize("n", [16, 64, 256, 1024])
@pytest.mark.parametrize("c", [1, 2])
def test_population_sum_above_threshold(n, c):
    v = bounds.check_lemma5(n, c)
    assert v.holds and v.params["lambda"] == n**c


def test_population_sum_lambda_precondition():
    with pytest.raises(DomainError):
        bounds.check_lemma5(16, 1, lam=17)


def test_chernoff_examples():
    assert bounds.chernoff_tail_check(5, 1).holds
    assert bounds.binomial_upper_tail(5, 1) == 1 - F(4, 5) ** 5
    assert bounds.binomial_upper_tail(4, 5) == 0
    assert bounds.chernoff_tail_check(4, 5).holds
    assert all(bounds.chernoff_tail_check(20, i).holds for i in range(2, 21))
    with pytest.raises(UsageError):
        bounds.chernoff_tail_check(4, 0)


def test_entropy_bound_n4():
    v = bounds.check_lemma6(4, F(1, 4))
    assert v.holds
    with mpmath.workdps(60):
        h = bounds.entropy_H(F(1, 4))
        assert abs(h - (2 - mpmath.mpf(3) / 4 * mpmath.log(3, 2))) < mpmath.mpf(10) ** -45
        # 2^(n H(eps)) = eps^(-eps n) (1 - eps)^(-(1 - eps) n) = 256/27 here
        assert abs(v.worst_margin - (mpmath.mpf(256) / 27 - 5)) < mpmath.mpf(10) ** -45


def test_entropy_bound_tiny_eps():
    v = bounds.check_lemma6(5, 0.1)
    assert v.holds and v.params["eps"] == "1/10"
    assert v.worst_margin + 1 > 1


@pytest.mark.parametrize("eps", [0, 0.5, 0.7, -0.1])
def test_entropy_bound_eps_range(eps):
    with pytest.raises(UsageError):
        bounds.check_lemma6(4, eps)


def test_initial_phi_mass_small():
    assert bounds.initial_phi_mass(1, 1, 0) == bounds.initial_phi_mass(1, 1, 1) == F(1, 2)
    assert bounds.initial_reference_dcfht(1, 1) == F(1, 2)


def _enumerate_min_zeros(n, mu):
    counts = [0] * (n + 1)
    for keys in itertools.product(range(2**n), repeat=mu):
        counts[min(n - bin(k).count("1") for k in keys)] += 1
    return [F(c, 2 ** (n * mu)) for c in counts]


def test_initial_phi_mass_n4_mu2():
    masses = _enumerate_min_zeros(4, 2)
    assert [bounds.initial_phi_mass(4, 2, j) for j in range(5)] == masses


@given(st.integers(1, 20), st.integers(1, 8))
def test_initial_mass_sums_to_one(n, mu):
    assert sum(bounds.initial_phi_mass(n, mu, j) for j in range(n + 1)) == 1


@given(st.integers(1, 15), st.integers(1, 10))
def test_initial_reference_dcfht_two_paths(n, mu):
    assert bounds.initial_reference_dcfht(n, mu) == bounds.initial_reference_dcfht_by_mass(n, mu)
    assert bounds.initial_reference_dcfht(n, mu + 1) <= bounds.initial_reference_dcfht(n, mu)


def test_initial_dcfht_lower():
    for n in range(4, 21):
        for mu in (2**k for k in range(9)):
            assert bounds.initial_reference_dcfht(n, mu) > bounds.initial_dcfht_lower(n, mu)
    assert math.isclose(bounds.initial_dcfht_lower(200, 1), 200**2 / 4)
    with pytest.raises(UsageError):
        bounds.initial_dcfht_lower(1, 1)
    with pytest.raises(UsageError):
        bounds.initial_dcfht_lower(5, 0)


def test_runtime_bound_step_by_step():
    n, mu, lam, c = 100, 1, 100, 1
    b = bounds.theorem2_bound(n, mu, lam, c)
    m = math.ceil(math.e * (c + 1) * math.log(n) / math.log(math.log(n)))
    assert b.threshold == m == 17
    start = n * n / 4 * math.exp(-mu / (1.13**n - 1))
    gens = start / (n * m)
    assert math.isclose(b.generation_bound, gens, rel_tol=1e-12)
    assert math.isclose(b.population_term, mu + lam * gens, rel_tol=1e-12)
    assert b.black_box_term == n * math.log(n)
    # each relaxation in the chain only weakens the bound
    assert float(bounds.eq4_generation_bound(n, mu, lam)) >= b.generation_bound


def test_runtime_bound_shape_and_errors():
    small = bounds.theorem2_bound(3, 1, 2, 1)
    assert math.isfinite(small.population_term) and small.population_term > 0
    a = bounds.theorem2_bound(50, 4, 10, 1)
    b = bounds.theorem2_bound(50, 4, 20, 1)
    assert math.isclose(b.population_term - 4, 2 * (a.population_term - 4))
    with pytest.raises(DomainError):
        bounds.theorem2_bound(10, 1, 11, 1)
    with pytest.raises(DomainError):
        bounds.theorem2_bound(2, 1, 1, 1)


def test_verdict_csv_and_witness():
    rows = bounds.verdicts_to_csv([bounds.check_lemma4(2, 0, 5)]).splitlines()
    assert rows[0] == "lemma,params,holds,margin"
    assert rows[1].startswith("lemma4,n=2;i=0;m_max=5,True,")
    with pytest.raises(ValueError):
        bounds.LemmaVerdict("x", {}, False, 0)
