import math
import warnings
from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from conftest import trial_division_primes
from sparse_fourier.primes import (
    InfeasibleError,
    ModulusRangeWarning,
    ParameterError,
    first_primes,
    floor_log,
    pairwise_coprime,
    predicted_row_bound,
    prime_counting_bounds,
    prime_pi,
    primes_from,
    rand_full_band_sample_bound,
    randomized_draws,
    full_band_sample_bound,
    row_bound_hypothesis,
    select_s_moduli,
    select_t_moduli,
    smallest_tensor_floor,
    t_moduli_count,
    tensor_row_bound,
)


def test_first_primes_small():
    assert first_primes(4) == [2, 3, 5, 7]
    assert first_primes(1) == [2]


def test_first_25_primes_match_trial_division():
    ps = first_primes(25)
    assert ps == trial_division_primes(25)
    assert ps[-1] == 97


def test_first_primes_rejects_zero():
    with pytest.raises(ParameterError):
        first_primes(0)


@given(st.integers(2, 5000), st.integers(1, 40))
def test_primes_from_matches_trial_division(start, count):
    assert primes_from(start, count) == trial_division_primes(count, start)


@given(st.integers(1, 10**7), st.integers(2, 50))
def test_floor_log_is_exact(n, base):
    L = floor_log(n, base)
    assert base**L <= n < base ** (L + 1)


def test_floor_log_powers():
    # exact powers are where double-precision logs go wrong
    for base in (2, 3, 7, 10, 1000):
        for e in range(1, 12):
            assert floor_log(base**e, base) == e
            assert floor_log(base**e - 1, base) == e - 1


@pytest.mark.filterwarnings("ignore::sparse_fourier.primes.ModulusRangeWarning")
def test_select_s_moduli_example_grid():
    s = select_s_moduli(2, 1, 8, 4)
    assert s.K == 25
    assert list(s.values) == trial_division_primes(25)
    assert s.row_count == 1060


def test_select_s_moduli_count_for_larger_band():
    s = select_s_moduli(4, 2, 4096, 4)
    assert s.K == 4 * 8 * 4 + 1 == 129
    assert s.s1 == 11


def test_select_s_moduli_rejects_small_band():
    with pytest.raises(ParameterError):
        select_s_moduli(2, 1, 2, 4)
    with pytest.raises(ParameterError):
        select_s_moduli(1, 1, 100, 4)
    with pytest.raises(ParameterError):
        select_s_moduli(2, 1, 100, 1)


def test_range_warning_when_moduli_reach_band():
    with pytest.warns(ModulusRangeWarning):
        select_s_moduli(2, 1, 8, 4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        select_s_moduli(2, 2, 4096, 4)


@given(st.integers(1, 6), st.integers(1, 4), st.integers(2, 3000), st.sampled_from([2, 4, 14]))
def test_s_moduli_invariants(k, e, N, c):
    sparsity = k * e
    if sparsity < 2 or N <= sparsity:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ModulusRangeWarning)
        s = select_s_moduli(k, e, N, c)
    assert s.K == c * sparsity * floor_log(N, sparsity) + 1
    assert all(b > a for a, b in zip(s.values, s.values[1:]))
    assert s.s1 >= sparsity
    assert all(all(v % d for d in range(2, math.isqrt(v) + 1)) for v in s.values)
    assert pairwise_coprime(s.values)


def test_select_t_moduli_large_band():
    s = select_s_moduli(2, 2, 2**20, 4, floor=101)
    assert s.s1 == 101
    t = select_t_moduli(2**20, s)
    assert t.count == 13
    assert list(t.values) == trial_division_primes(13)
    assert t.values[-1] == 41
    assert t.product == 304250263527210
    assert t.product >= math.ceil(2**20 / 101)
    assert pairwise_coprime(t.values + s.values)


def test_select_t_moduli_infeasible_for_tiny_floor():
    s = select_s_moduli(1, 5, 2**20, 4)
    assert s.s1 == 5
    with pytest.raises(InfeasibleError):
        select_t_moduli(2**20, s)


def test_t_count_formula():
    ratio = 2**20 / 101
    assert t_moduli_count(2**20, 101) == math.ceil(3 * math.log(ratio) / math.log(math.log(ratio)))
    with pytest.raises(InfeasibleError):
        t_moduli_count(10, 5)


@pytest.mark.parametrize("N", [256, 1024, 4096, 2**16, 2**20])
def test_smallest_tensor_floor_is_minimal(N):
    p = smallest_tensor_floor(N, 2)
    assert row_bound_hypothesis(N, p)
    for q in trial_division_primes(200):
        if q >= p:
            break
        assert not row_bound_hypothesis(N, q)
    s = select_s_moduli(2, 2, N, 4, floor=p)
    t = select_t_moduli(N, s)
    assert t.values[-1] < s.s1 and t.product * s.s1 >= N


def test_minimal_t_rule_uses_fewest_primes():
    s = select_s_moduli(2, 2, 4096, 4, floor=37)
    t = select_t_moduli(4096, s, rule="minimal")
    assert t.product * 37 >= 4096
    assert math.prod(t.values[:-1]) * 37 < 4096
    with pytest.raises(ParameterError):
        select_t_moduli(4096, s, rule="bogus")


def test_smallest_tensor_floor_infeasible():
    with pytest.raises(InfeasibleError):
        smallest_tensor_floor(40, 2)


def test_predicted_row_bound_value():
    assert predicted_row_bound(2, 1, 8, 4) == 3340
    assert predicted_row_bound(2, 1, 8, 4) >= 1060


@pytest.mark.filterwarnings("ignore::sparse_fourier.primes.ModulusRangeWarning")
def test_predicted_row_bound_small_case():
    s = select_s_moduli(2, 2, 16, 4)
    brute = sum(trial_division_primes(s.K, 4))
    assert s.row_count == brute
    assert predicted_row_bound(2, 2, 16, 4) >= brute


@lru_cache(maxsize=None)
def _row_sum(sparsity, c, L):
    K = c * sparsity * L + 1
    return sum(primes_from(sparsity, K))


def test_predicted_row_bound_dominates_on_grid():
    # both sides depend on N only through floor(log N), so cache the row sum on that
    failures = []
    for k in range(2, 9):
        for e in range(1, 5):
            sp = k * e
            for c in (2, 4, 14):
                for N in range(sp + 1, 2**12 + 1):
                    m = _row_sum(sp, c, floor_log(N, sp))
                    if predicted_row_bound(k, e, N, c) < m:
                        failures.append((k, e, N, c))
    assert failures == []


@pytest.mark.parametrize("n,expected", [(10, 4), (100, 25), (598, 108)])
def test_prime_counting_exact_below_threshold(n, expected):
    assert prime_counting_bounds(n) == (expected, expected)


@pytest.mark.parametrize("n", [599, 1000, 7919, 10**5, 10**6])
def test_prime_counting_bracket(n):
    lo, hi = prime_counting_bounds(n)
    assert lo <= prime_pi(n) <= hi


def test_prime_pi_reference_values():
    assert prime_pi(1000) == 168
    assert prime_pi(599) == 109
    assert prime_pi(1) == 0


def test_prime_counting_rejects_small():
    with pytest.raises(ParameterError):
        prime_counting_bounds(1)


def test_randomized_draw_counts():
    assert randomized_draws(1024, 0.9) == 194
    assert randomized_draws(1, 2 / 3) == 24


def test_sample_bounds_are_positive_and_ordered():
    assert full_band_sample_bound(2, 2, 4096) > 0
    assert rand_full_band_sample_bound(2, 2, 4096, 0.9) > 0
    assert tensor_row_bound(4096, 37) > 1
