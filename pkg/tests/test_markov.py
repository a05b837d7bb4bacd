import math
import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ealab.bitcore import BitString, TabulatedObjective, leadingones, onemax
from ealab.engine import ParentSelector, generation_step, run_mu_lambda_ea
from ealab.errors import DomainError, ResourceError, UsageError
from ealab.harness.stats import TrialStats
from ealab.markov import (
    ChainReport,
    TransitionModel,
    dcfht,
    dcfht_series,
    enumerate_ea_chain,
    enumerate_rls_chain,
    evolve_distribution,
    is_absorbing,
    lump_states,
    make_absorbing,
    nontarget_mass,
    solve_cfht,
    target_mass,
)

B = BitString.from_str
F = Fraction


def _pop(*texts):
    return tuple(B(t) for t in texts)


def test_rls_leadingones_n2_rows():
    m = enumerate_rls_chain(TabulatedObjective.leadingones(2))
    row = m.rows[m.index[B("10")]]
    assert row == {m.index[B("11")]: F(1, 2), m.index[B("10")]: F(1, 2)}
    row = m.rows[m.index[B("00")]]
    assert row == {m.index[B("10")]: F(1, 2), m.index[B("00")]: F(1, 2)}


@pytest.mark.parametrize("n", range(1, 7))
def test_rls_rows_are_exactly_stochastic(n):
    for f in (TabulatedObjective.onemax(n), TabulatedObjective.leadingones(n)):
        m = enumerate_rls_chain(f)
        assert m.exact and m.size == 2**n
        assert all(sum(r.values()) == 1 for r in m.rows)
        assert is_absorbing(m)


def test_one_plus_one_onemax_n2_row():
    m = enumerate_ea_chain(TabulatedObjective.onemax(2), 1, 1)
    row = m.rows[m.index[_pop("00")]]
    assert row == {
        m.index[_pop("00")]: F(1, 4),
        m.index[_pop("01")]: F(1, 4),
        m.index[_pop("10")]: F(1, 4),
        m.index[_pop("11")]: F(1, 4),
    }


def test_ea_chain_states_are_canonical_multisets():
    m = enumerate_ea_chain(TabulatedObjective.onemax(2), 2, 1)
    assert m.size == math.comb(4 + 1, 2)
    for s in m.states:
        assert list(s) == sorted(s, key=lambda b: b.key)
    assert sum(m.initial) == 1
    assert m.initial[m.index[_pop("00", "11")]] == F(2, 16)
    assert m.initial[m.index[_pop("01", "01")]] == F(1, 16)


@pytest.mark.parametrize("mu,lam", [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_elitism_keeps_optimal_populations(mu, lam):
    m = enumerate_ea_chain(TabulatedObjective.onemax(2), mu, lam)
    for i in m.targets:
        assert sum(p for j, p in m.rows[i].items() if j in m.targets) == 1


def test_ea_chain_row_matches_simulation():
    # 4-sigma check of one exact row against 10^6 sampled generations.
    m = enumerate_ea_chain(TabulatedObjective.onemax(3), 2, 2)
    start = _pop("001", "010")
    row = m.rows[m.index[start]]
    samples = 1_000_000
    rng = random.Random(2024)
    counts = Counter(tuple(generation_step("onemax", start, 2, rng=rng)) for _ in range(samples))
    assert set(counts) <= {m.states[j] for j in row}
    for j, p in row.items():
        p = float(p)
        sigma = math.sqrt(samples * p * (1 - p))
        assert abs(counts[m.states[j]] - samples * p) <= 4 * sigma


def test_work_bound_and_stochastic_survivors():
    with pytest.raises(ResourceError):
        enumerate_ea_chain(TabulatedObjective.onemax(5), 3, 3)
    with pytest.raises(ResourceError):
        enumerate_ea_chain(TabulatedObjective.onemax(3), 2, 2, work_bound=100)
    with pytest.raises(UsageError):
        enumerate_ea_chain(TabulatedObjective.onemax(2), 1, 1, survivors="uniform-random-keep-best")
    with pytest.raises(DomainError):
        enumerate_ea_chain(TabulatedObjective.from_function(2, lambda s: 1), 1, 1)
    with pytest.raises(DomainError):
        enumerate_rls_chain(TabulatedObjective.from_function(2, lambda s: 1))


def _two_state(p):
    return TransitionModel(["a", "b"], [{0: 1 - p, 1: p}, {1: F(1)}], frozenset({1}))


@pytest.mark.parametrize("p", [F(1, 2), F(1, 7), F(3, 10), F(1)])
def test_two_state_geometric(p):
    rep = solve_cfht(_two_state(p))
    assert rep.cfht == [1 / p, 0]


def test_single_target_state():
    m = TransitionModel(["x"], [{0: F(1)}], frozenset({0}), initial=[F(1)])
    rep = solve_cfht(m)
    assert rep.cfht == [0] and rep.dcfht == 0


def test_unreachable_target_names_states():
    m = TransitionModel(["a", "b", "c"], [{0: F(1)}, {2: F(1)}, {2: F(1)}], frozenset({2}))
    with pytest.raises(DomainError, match="a"):
        solve_cfht(m)


def test_non_stochastic_rows_rejected():
    with pytest.raises(DomainError):
        TransitionModel(["a"], [{0: F(1, 2)}], frozenset({0}))


@pytest.mark.parametrize("n", range(2, 9))
def test_rls_leadingones_hitting_times(n):
    m = enumerate_rls_chain(TabulatedObjective.leadingones(n))
    rep = solve_cfht(m)
    assert rep.cfht == [n * s.zeros for s in m.states]
    # uniform start: n times the mean number of zeros
    assert rep.dcfht == F(n * n, 2)


def test_dcfht_examples():
    m = enumerate_rls_chain(TabulatedObjective.leadingones(2))
    assert dcfht(m) == 2
    point = [F(0)] * 4
    point[m.index[B("11")]] = F(1)
    assert dcfht(m, point) == 0


def test_make_absorbing():
    m = enumerate_ea_chain(TabulatedObjective.onemax(2), 2, 1)
    a = make_absorbing(m)
    assert all(a.rows[i] == {i: 1} for i in a.targets)
    assert make_absorbing(a).rows == a.rows
    rls = enumerate_rls_chain(TabulatedObjective.leadingones(3))
    assert make_absorbing(rls).rows == rls.rows
    # absorbing a chain that already stays in the target set keeps the hitting times
    assert solve_cfht(a).cfht == solve_cfht(m).cfht


def test_evolve_distribution_properties():
    m = make_absorbing(enumerate_ea_chain(TabulatedObjective.onemax(3), 1, 2))
    pi0 = m.initial
    assert evolve_distribution(m, pi0, 0) == pi0
    masses = [target_mass(m, evolve_distribution(m, pi0, t)) for t in range(15)]
    assert all(a <= b for a, b in zip(masses, masses[1:]))
    assert all(target_mass(m, p) + nontarget_mass(m, p) == 1 for p in [pi0])


def test_rls_n2_converges_to_optimum():
    m = enumerate_rls_chain(TabulatedObjective.leadingones(2))
    pi = evolve_distribution(m, m.initial, 200)
    assert nontarget_mass(m, pi) < F(1, 10**50)


def test_dcfht_series_exact_partial_sums():
    # For an upward-only chain the partial sums approach the exact value from below.
    m = enumerate_rls_chain(TabulatedObjective.leadingones(3))
    exact = dcfht(m)
    s = dcfht_series(m, m.initial, 300)
    assert s.partial_sum <= exact
    assert abs(s.total - float(exact)) <= 1e-9


def test_dcfht_series_float_mode():
    fm = enumerate_ea_chain(TabulatedObjective.onemax(3), 2, 2, exact=False)
    s = dcfht_series(fm, fm.initial, 400)
    assert not fm.exact
    assert abs(s.total - dcfht(fm)) <= 1e-9


def test_float_and_exact_agree():
    m = enumerate_ea_chain(TabulatedObjective.leadingones(3), 2, 1)
    assert math.isclose(float(dcfht(m)), dcfht(m.to_float()), rel_tol=1e-12)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("mu,lam", [(1, 1), (1, 2), (2, 1), (2, 2)])
@pytest.mark.parametrize("parents", list(ParentSelector))
def test_chain_matches_simulated_mean(n, mu, lam, parents):
    m = enumerate_ea_chain(TabulatedObjective.onemax(n), mu, lam, parents)
    expected = float(dcfht(m))
    trials = 4000
    gens = [run_mu_lambda_ea("onemax", n, mu, lam, parents, rng=s).generations for s in range(trials)]
    st_ = TrialStats.from_values(gens)
    assert abs(st_.mean - expected) <= 3 * st_.sd / math.sqrt(trials) + 1e-12


def test_text_round_trip():
    for m in (
        enumerate_rls_chain(TabulatedObjective.leadingones(3)),
        enumerate_ea_chain(TabulatedObjective.onemax(2), 2, 2),
    ):
        text = m.to_text()
        assert text.startswith(f"states {m.size}\n")
        back = TransitionModel.from_text(text)
        assert back.states == m.states
        assert back.rows == m.rows
        assert back.targets == m.targets


def test_chain_report_csv():
    m = enumerate_rls_chain(TabulatedObjective.leadingones(2))
    csv = solve_cfht(m).to_csv().splitlines()
    assert csv[0] == "state,cfht"
    assert csv[1] == "00,4"
    assert csv[-1] == "dcfht,2"


def test_lump_identity_is_isomorphic():
    m = enumerate_rls_chain(TabulatedObjective.leadingones(3))
    q = lump_states(m, lambda s: s)
    assert q.states == m.states and q.rows == m.rows and q.targets == m.targets


@pytest.mark.parametrize("n", range(3, 9))
def test_onemax_fitness_levels_lump(n):
    full = enumerate_ea_chain(TabulatedObjective.onemax(n), 1, 1)
    q = lump_states(full, lambda pop: onemax(pop[0]))
    assert q.size == n + 1
    e_full, e_q = solve_cfht(full).cfht, solve_cfht(q).cfht
    assert all(e == e_q[q.index[onemax(s[0])]] for s, e in zip(full.states, e_full))
    assert dcfht(q) == dcfht(full)


def test_rls_leadingones_zero_count_key_lumps():
    # Every accepted RLS move on LeadingOnes turns one 0 into a 1, and exactly one
    # flip improves, so the number of zeros is a lumpable key.
    n = 4
    m = enumerate_rls_chain(TabulatedObjective.leadingones(n))
    q = lump_states(m, lambda s: s.zeros)
    assert solve_cfht(q).cfht == [n * z for z in q.states]


def test_rls_leadingones_fitness_levels_rejected():
    m = enumerate_rls_chain(TabulatedObjective.leadingones(3))
    with pytest.raises(DomainError, match="not lumpable"):
        lump_states(m, leadingones)


def test_lumping_rejects_mixed_target_class():
    m = enumerate_rls_chain(TabulatedObjective.onemax(2))
    with pytest.raises(DomainError, match="mixes"):
        lump_states(m, lambda s: s.ones >= 1)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=4, max_size=4), st.integers(0, 3))
def test_random_upward_chain_solution(weights, start):
    # Chains on 0 < 1 < 2 < 3 that only move up: cfht by back-substitution.
    rows = []
    for i in range(4):
        if i == 3:
            rows.append({3: F(1)})
            continue
        stay = F(weights[i], weights[i] + 1)
        rows.append({i: stay, i + 1: 1 - stay})
    m = TransitionModel([0, 1, 2, 3], rows, frozenset({3}))
    expected = [sum(w + 1 for w in weights[i:3]) for i in range(4)]
    assert solve_cfht(m).cfht == expected
