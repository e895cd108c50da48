"""Prime generation and coprime modulus selection.

Every modulus family used by the measurement plans is drawn from here: the
``s`` moduli (first ``K`` primes at or above a floor) and the small ``t``
moduli used by tensor plans.  Row-count bound formulas live here too so the
sample accounting of a plan can be checked against its closed form.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "ParameterError",
    "InfeasibleError",
    "ModulusRangeWarning",
    "SModuli",
    "TModuli",
    "sieve",
    "first_primes",
    "primes_from",
    "prime_pi",
    "floor_log",
    "select_s_moduli",
    "select_t_moduli",
    "t_moduli_count",
    "row_bound_hypothesis",
    "smallest_tensor_floor",
    "predicted_row_bound",
    "tensor_row_bound",
    "full_band_sample_bound",
    "identification_sample_bound",
    "randomized_draws",
    "rand_full_band_sample_bound",
    "rand_identification_sample_bound",
    "prime_counting_bounds",
    "pairwise_coprime",
]

_GUARD = 1e-12
PI_EXACT_BELOW = 599


class ParameterError(ValueError):
    """Parameters outside the domain an algorithm is defined on."""


class InfeasibleError(ValueError):
    """No modulus family satisfies the requested constraints."""


class ModulusRangeWarning(UserWarning):
    """Raised when (k/eps) + K reaches the bandwidth N."""


def sieve(limit: int) -> np.ndarray:
    """All primes <= limit, ascending."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


@lru_cache(maxsize=32)
def _sieve_cached(limit: int) -> tuple[int, ...]:
    return tuple(int(p) for p in sieve(limit))


def _primes_up_to(limit: int) -> tuple[int, ...]:
    # round up to a power of two so repeated calls share one cached sieve
    size = 64
    while size < limit:
        size *= 2
    return _sieve_cached(size)


def primes_from(start: int, count: int) -> list[int]:
    """The first ``count`` primes that are >= ``start``."""
    if count < 0:
        raise ParameterError("count must be non-negative")
    if count == 0:
        return []
    start = max(int(start), 2)
    # p_n < n (ln n + ln ln n) for n >= 6; pad for the offset from start
    n = count + int(start / max(math.log(start), 1.0)) + 6
    limit = max(start + 16, int(n * (math.log(n) + math.log(math.log(n)))) + 16)
    while True:
        primes = _primes_up_to(limit)
        lo = int(np.searchsorted(primes, start))
        if len(primes) - lo >= count:
            return list(primes[lo : lo + count])
        limit *= 2


def first_primes(count: int) -> list[int]:
    """``count`` primes starting from 2."""
    if count < 1:
        raise ParameterError("count must be >= 1")
    return primes_from(2, count)


def prime_pi(n: int) -> int:
    """Exact prime counting function by sieve."""
    if n < 2:
        return 0
    return len(sieve(n))


def floor_log(n: int, base: int) -> int:
    """floor(log_base(n)) for integers, exact (no rounding off-by-one)."""
    if base < 2 or n < 1:
        raise ParameterError("floor_log needs base >= 2 and n >= 1")
    guess = int(math.floor(math.log(n) / math.log(base) + _GUARD))
    while guess > 0 and base**guess > n:
        guess -= 1
    while base ** (guess + 1) <= n:
        guess += 1
    return guess


def pairwise_coprime(values) -> bool:
    # v is coprime to every earlier value iff it is coprime to their product
    product = 1
    for v in values:
        v = int(v)
        if math.gcd(v, product) != 1:
            return False
        product *= v
    return True


@dataclass(frozen=True)
class SModuli:
    """The ``K`` pairwise coprime (prime) moduli behind a measurement plan.

    ``log_base`` is the floor the primes were selected from (``k/eps`` unless a
    larger floor was requested); ``K = c * (k/eps) * floor(log_base N) + 1``.
    """

    values: tuple[int, ...]
    k: int
    epsilon_inv: int
    c: int
    N: int
    log_base: int

    @property
    def s1(self) -> int:
        return self.values[0]

    @property
    def K(self) -> int:
        return len(self.values)

    @property
    def sparsity(self) -> int:
        """k/eps, an integer by construction."""
        return self.k * self.epsilon_inv

    @property
    def row_count(self) -> int:
        return sum(self.values)


@dataclass(frozen=True)
class TModuli:
    values: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.values)

    @property
    def product(self) -> int:
        return math.prod(self.values)


def _check_params(k: int, epsilon_inv: int, N: int, c: int) -> int:
    if k < 1 or epsilon_inv < 1:
        raise ParameterError("k and 1/epsilon must be positive integers")
    sparsity = k * epsilon_inv
    if sparsity < 2:
        raise ParameterError(f"k/epsilon = {sparsity} must be at least 2")
    if N <= sparsity:
        raise ParameterError(f"bandwidth N = {N} must exceed k/epsilon = {sparsity}")
    if c < 2:
        raise ParameterError("c must be an integer >= 2")
    return sparsity


def select_s_moduli(k: int, epsilon_inv: int, N: int, c: int, *, floor: int | None = None) -> SModuli:
    """First ``K`` primes no smaller than ``max(k/eps, floor)``.

    ``K = c * (k/eps) * floor(log_b N) + 1`` where ``b`` is that same lower
    bound.  Any family of coprime moduli that are all >= b keeps the collision
    count of every column pair at most ``floor(log_b N)``, which is what the
    entry-estimation guarantee needs.
    """
    sparsity = _check_params(k, epsilon_inv, N, c)
    base = sparsity if floor is None else max(sparsity, int(floor))
    if N <= base:
        raise ParameterError(f"bandwidth N = {N} must exceed the modulus floor {base}")
    K = c * sparsity * floor_log(N, base) + 1
    if sparsity + K >= N:
        warnings.warn(
            f"(k/eps) + K = {sparsity + K} is not below N = {N}; row-count bounds assume it is",
            ModulusRangeWarning,
            stacklevel=2,
        )
    values = tuple(primes_from(base, K))
    return SModuli(values=values, k=k, epsilon_inv=epsilon_inv, c=c, N=N, log_base=base)


def t_moduli_count(N: int, s1: int) -> int:
    """ceil(3 ln(N/s1) / ln ln(N/s1))."""
    ratio = N / s1
    if ratio <= math.e:
        raise InfeasibleError(f"N/s1 = {ratio:.4g} leaves ln ln(N/s1) non-positive")
    value = 3.0 * math.log(ratio) / math.log(math.log(ratio))
    return int(math.ceil(value - _GUARD))


def row_bound_hypothesis(N: int, s1: int) -> bool:
    """N/3 >= s1 > lam (ln lam + ln ln lam) with lam = t_moduli_count(N, s1)."""
    if 3 * s1 > N:
        return False
    lam = t_moduli_count(N, s1)
    return s1 > lam * (math.log(lam) + math.log(math.log(lam)))


def smallest_tensor_floor(N: int, at_least: int) -> int:
    """Smallest prime >= ``at_least`` satisfying :func:`row_bound_hypothesis`."""
    p = primes_from(at_least, 1)[0]
    while 3 * p <= N:
        if row_bound_hypothesis(N, p):
            return p
        p = primes_from(p + 1, 1)[0]
    raise InfeasibleError(f"no prime s1 >= {at_least} with N/3 >= s1 admits t moduli for N = {N}")


def select_t_moduli(N: int, s_moduli: SModuli, *, rule: str = "standard") -> TModuli:
    """Small primes t_1 < ... < t_lam < s1 whose product reaches N/s1.

    ``rule="standard"`` takes the first ``ceil(3 ln(N/s1)/ln ln(N/s1))`` primes and
    insists on the hypothesis that guarantees they fit below s1.
    ``rule="minimal"`` takes the fewest leading primes whose product reaches
    N/s1; it needs only the structural conditions.
    """
    s1 = s_moduli.s1
    if rule == "standard":
        if not row_bound_hypothesis(N, s1):
            raise InfeasibleError(f"s1 = {s1} does not satisfy the t-moduli hypothesis for N = {N}")
        values = tuple(first_primes(t_moduli_count(N, s1)))
    elif rule == "minimal":
        values, product = [], 1
        for p in primes_from(2, max(1, s1)):
            if product * s1 >= N:
                break
            values.append(p)
            product *= p
        values = tuple(values)
    else:
        raise ParameterError(f"unknown t-moduli rule {rule!r}")
    t = TModuli(values)
    if not values or values[-1] >= s1:
        raise InfeasibleError(f"t moduli {values} do not all lie below s1 = {s1}")
    if t.product * s1 < N:
        raise InfeasibleError(f"product of t moduli {t.product} is below N/s1 = {N / s1:.4g}")
    if not pairwise_coprime(values + s_moduli.values):
        raise InfeasibleError("t and s moduli are not pairwise coprime")
    return t


def predicted_row_bound(k: int, epsilon_inv: int, N: int, c: int) -> int:
    """Closed-form upper bound on m = sum(s_j) for the prime moduli family."""
    sparsity = _check_params(k, epsilon_inv, N, c)
    L = floor_log(N, sparsity)
    x = sparsity * L
    value = 0.75 * (c + 1.89) ** 2 * x * x * math.log((c + 1.89) * x)
    return int(math.ceil(value))


def tensor_row_bound(N: int, s1: int) -> float:
    """Upper bound on the row count 1 + sum(t_i) of the t-moduli matrix."""
    lam = t_moduli_count(N, s1)
    return 0.75 * (lam + 1) ** 2 * math.log(lam + 1) + 1


def full_band_sample_bound(k: int, epsilon_inv: int, N: int) -> float:
    """Evaluation-count bound for the deterministic full-band algorithm (c = 4)."""
    sparsity = _check_params(k, epsilon_inv, N, 4)
    x = sparsity * floor_log(N, sparsity)
    return 26.02 * x * x * math.log(5.89 * x)


def identification_sample_bound(k: int, epsilon_inv: int, N: int) -> float:
    """Evaluation-count bound for the deterministic identification algorithm (c = 4)."""
    sparsity = _check_params(k, epsilon_inv, N, 4)
    x = sparsity * floor_log(N, sparsity)
    ratio = N / sparsity
    lam = int(math.ceil(3.0 * math.log(ratio) / math.log(math.log(ratio)) - _GUARD))
    return 19.52 * x * x * math.log(5.89 * x) * ((lam + 1) ** 2 * math.log(lam + 1) + 4.0 / 3.0)


def randomized_draws(set_size: int, sigma: float) -> int:
    """l = ceil(21 ln(set_size / (1 - sigma)))."""
    return int(math.ceil(21.0 * math.log(set_size / (1.0 - sigma)) - _GUARD))


def rand_full_band_sample_bound(k: int, epsilon_inv: int, N: int, sigma: float) -> float:
    """Evaluation-count bound for the randomized full-band algorithm."""
    sparsity = _check_params(k, epsilon_inv, N, 14)
    x = 15.89 * sparsity * floor_log(N, sparsity)
    return randomized_draws(N, sigma) * x * (math.log(x) + math.log(math.log(x)))


def rand_identification_sample_bound(k: int, epsilon_inv: int, N: int, sigma: float, s1: int) -> float:
    """Randomized full-band bound times the t-moduli row bound for floor ``s1``."""
    return rand_full_band_sample_bound(k, epsilon_inv, N, sigma) * tensor_row_bound(N, s1)


def prime_counting_bounds(n: int) -> tuple[float, float]:
    """Bracket pi(n); exact below 599, analytic bounds from 599 on."""
    if n < 2:
        raise ParameterError("n must be >= 2")
    if n < PI_EXACT_BELOW:
        exact = prime_pi(n)
        return exact, exact
    ln = math.log(n)
    return n / ln * (1 + 0.992 / ln), n / ln * (1 + 1.2762 / ln)
