import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from ealab.bitcore import (
    BitString,
    TabulatedObjective,
    bitwise_mutate,
    bitwise_mutate_fast,
    find_unique_optimum,
    flip_positions,
    flip_positions_fast,
    hamming,
    leadingones,
    mutation_probability,
    onemax,
    single_bit_flip,
)
from ealab.errors import UsageError

bitstrings = st.lists(st.integers(0, 1), min_size=1, max_size=40).map(lambda b: BitString(tuple(b)))


@pytest.mark.parametrize("text,value", [("1111", 4), ("0000", 0), ("1010", 2)])
def test_onemax_examples(text, value):
    assert onemax(BitString.from_str(text)) == value


@pytest.mark.parametrize("text,value", [("1101", 2), ("0111", 0), ("1111", 4)])
def test_leadingones_examples(text, value):
    assert leadingones(BitString.from_str(text)) == value


@given(bitstrings)
def test_objective_ordering(s):
    n = len(s)
    assert 0 <= leadingones(s) <= onemax(s) <= n
    assert (leadingones(s) == n) == (s == BitString.ones_string(n))
    # prefix-product form of LeadingOnes
    assert leadingones(s) == sum(math.prod(s.bits[: i + 1]) for i in range(n))
    assert s.ones + s.zeros == n


@given(bitstrings)
def test_key_round_trip(s):
    assert BitString.from_key(s.key, len(s)) == s
    assert BitString.from_str(str(s)) == s
    assert BitString.from_bytes(s.to_bytes()) == s


def test_key_is_msb_first():
    assert BitString.from_str("100").key == 4
    assert BitString.from_key(1, 3) == BitString.from_str("001")


def test_invalid_bits_rejected():
    with pytest.raises(ValueError):
        BitString((0, 2))
    with pytest.raises(ValueError):
        BitString(())


def test_mutation_leaves_input_untouched():
    s = BitString.from_str("0101")
    rng = random.Random(3)
    for _ in range(50):
        bitwise_mutate(s, rng)
    assert s == BitString.from_str("0101")


def test_n1_mutation_always_flips():
    rng = random.Random(0)
    for mutate in (bitwise_mutate, bitwise_mutate_fast, single_bit_flip):
        assert all(mutate(BitString.from_str("0"), rng) == BitString.from_str("1") for _ in range(100))


def test_mutation_probability_exact():
    from fractions import Fraction

    assert mutation_probability(4, 0) == Fraction(3, 4) ** 4
    total = sum(math.comb(5, d) * mutation_probability(5, d) for d in range(6))
    assert total == 1


@pytest.mark.parametrize("mutate", [bitwise_mutate, bitwise_mutate_fast])
def test_per_bit_flip_frequency(mutate):
    n, samples = 8, 100_000
    rng = random.Random(11)
    s = BitString((0,) * n)
    counts = np.zeros(n)
    pairs = Counter()
    for _ in range(samples):
        y = mutate(s, rng).bits
        counts += y
        pairs[(y[0], y[1])] += 1
    p = 1 / n
    sigma = math.sqrt(samples * p * (1 - p))
    assert np.all(np.abs(counts - samples * p) <= 4 * sigma)
    table = np.array([[pairs[(0, 0)], pairs[(0, 1)]], [pairs[(1, 0)], pairs[(1, 1)]]])
    _, pvalue, _, _ = stats.chi2_contingency(table)
    assert pvalue > 0.001


@pytest.mark.parametrize("mutate", [bitwise_mutate, bitwise_mutate_fast])
def test_hamming_distance_distribution(mutate):
    n, samples = 6, 100_000
    rng = random.Random(5)
    s = BitString.from_str("010011")
    observed = Counter(hamming(s, mutate(s, rng)) for _ in range(samples))
    expected = [samples * math.comb(n, k) * (1 / n) ** k * (1 - 1 / n) ** (n - k) for k in range(n + 1)]
    # pool the sparse upper tail into one cell
    obs = [observed[k] for k in range(3)] + [sum(observed[k] for k in range(3, n + 1))]
    exp = expected[:3] + [sum(expected[3:])]
    assert stats.chisquare(obs, exp).pvalue > 0.001


def test_fast_path_matches_reference_flip_counts():
    n, samples = 12, 100_000
    rng_a, rng_b = random.Random(21), random.Random(22)
    ref = Counter(len(flip_positions(n, rng_a)) for _ in range(samples))
    fast = Counter(len(flip_positions_fast(n, rng_b)) for _ in range(samples))
    keys = range(4)
    table = np.array([[ref[k] for k in keys] + [samples - sum(ref[k] for k in keys)],
                      [fast[k] for k in keys] + [samples - sum(fast[k] for k in keys)]])
    _, pvalue, _, _ = stats.chi2_contingency(table)
    assert pvalue > 0.001


@given(st.integers(1, 64), st.integers(0, 2**32))
def test_fast_positions_are_sorted_distinct_and_in_range(n, seed):
    pos = flip_positions_fast(n, random.Random(seed))
    assert pos == sorted(set(pos))
    assert all(0 <= p < n for p in pos)


def test_single_bit_flip_uniform():
    n, samples = 5, 100_000
    rng = random.Random(9)
    s = BitString.from_str("00110")
    counts = Counter()
    for _ in range(samples):
        y = single_bit_flip(s, rng)
        assert hamming(s, y) == 1
        counts[next(i for i in range(n) if y[i] != s[i])] += 1
    sigma = math.sqrt(samples * (1 / n) * (1 - 1 / n))
    assert all(abs(counts[i] - samples / n) <= 4 * sigma for i in range(n))


def test_find_unique_optimum_examples():
    assert find_unique_optimum(TabulatedObjective.onemax(3)) == BitString.from_str("111")
    assert find_unique_optimum(TabulatedObjective.leadingones(4)) == BitString.from_str("1111")
    assert find_unique_optimum(TabulatedObjective.from_function(2, lambda s: 0)) is None


@pytest.mark.parametrize("n", range(1, 13))
def test_builtin_tables_have_all_ones_optimum(n):
    for table in (TabulatedObjective.onemax(n), TabulatedObjective.leadingones(n)):
        assert find_unique_optimum(table) == BitString.ones_string(n)


def test_find_unique_optimum_size_limit():
    with pytest.raises(UsageError):
        find_unique_optimum(TabulatedObjective.onemax(21))


def test_table_text_round_trip():
    f = TabulatedObjective.from_function(3, lambda s: s.key * 0.5 - 1)
    text = f.to_text()
    lines = text.splitlines()
    assert lines[0] == "n=3"
    assert lines[1].split()[0] == "000" and lines[-1].split()[0] == "111"
    assert TabulatedObjective.from_text(text) == f


def test_table_rejects_wrong_size_and_nonfinite():
    with pytest.raises(ValueError):
        TabulatedObjective(2, (0, 1, 2))
    with pytest.raises(ValueError):
        TabulatedObjective(1, (0, float("nan")))
