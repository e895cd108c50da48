"""Reduce D-dimensional recovery to one dimension along a coprime-speed line.

Restricting ``f`` to the line ``x -> ((Nt/P_1) x, ..., (Nt/P_D) x)`` maps the
lattice frequency ``(w_1, ..., w_D)`` onto the single frequency
``sum_d (Nt/P_d) w_d``.  With pairwise coprime ``P_d > M*D`` this is a
bijection of the lattice box onto the band of width ``Nt = prod P_d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .crt import centered, mod_inverse
from .primes import ParameterError, pairwise_coprime, primes_from
from .recovery import Params, RecoveryStats, SparseSpectrum, fourier_approximate_2, tensor_plan
from .sampling import TWO_PI, SignalOracle

__all__ = [
    "FrequencyMap",
    "LatticeSpectrum",
    "select_dimension_moduli",
    "g_map",
    "g_inverse",
    "flatten_oracle",
    "FlattenedOracle",
    "multidim_approximate",
    "dimension_count_bound",
    "log_band_bound",
]

_INT_LIMIT = 1 << 63


@dataclass(frozen=True)
class FrequencyMap:
    P: tuple[int, ...]
    M: int
    D: int
    N_tilde: int = field(init=False)
    cofactors: tuple[int, ...] = field(init=False)
    inv_cache: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if len(self.P) != self.D:
            raise ParameterError(f"expected {self.D} moduli, got {len(self.P)}")
        if any(p <= self.M * self.D for p in self.P):
            raise ParameterError(f"every modulus must exceed M*D = {self.M * self.D}")
        if not pairwise_coprime(self.P):
            raise ParameterError(f"moduli {self.P} are not pairwise coprime")
        n = math.prod(self.P)
        if n >= _INT_LIMIT:
            raise OverflowError(f"product of moduli {n} does not fit in 63 bits")
        cof = tuple(n // p for p in self.P)
        object.__setattr__(self, "N_tilde", n)
        object.__setattr__(self, "cofactors", cof)
        object.__setattr__(self, "inv_cache", tuple(mod_inverse(c, p) if p > 1 else 0 for c, p in zip(cof, self.P)))

    def lattice_range(self, d: int) -> tuple[int, int]:
        p = self.P[d]
        return 1 - (p + 1) // 2, p // 2


def _greedy_groups(threshold: int, count: int) -> list[int]:
    """Consecutive-prime products, each the first to exceed ``threshold``."""
    groups, product = [], 1
    p = 2
    while len(groups) < count:
        product *= p
        if product > threshold:
            groups.append(product)
            product = 1
        p = primes_from(p + 1, 1)[0]
    return groups


def select_dimension_moduli(M: int, D: int) -> FrequencyMap:
    if M < 1 or D < 1:
        raise ParameterError("M and D must be positive")
    return FrequencyMap(P=tuple(_greedy_groups(M * D, D)), M=M, D=D)


def g_map(x, fm: FrequencyMap) -> int:
    """Lattice point to its band frequency: centered sum of cofactor-weighted coordinates."""
    x = tuple(int(v) for v in x)
    if len(x) != fm.D:
        raise ValueError(f"expected {fm.D} coordinates")
    for d, v in enumerate(x):
        lo, hi = fm.lattice_range(d)
        if not lo <= v <= hi:
            raise ValueError(f"coordinate {v} outside ({-fm.P[d] / 2}, {fm.P[d] / 2}]")
    total = sum(c * v for c, v in zip(fm.cofactors, x))
    return centered(total, fm.N_tilde)


def g_inverse(omega: int, fm: FrequencyMap) -> tuple[int, ...]:
    return tuple(centered(int(omega) * inv, p) for inv, p in zip(fm.inv_cache, fm.P))


class FlattenedOracle(SignalOracle):
    """One-dimensional restriction of a D-dimensional oracle.

    Grid sampling reduces each huge speed modulo the grid denominator in
    integers, so no precision is lost however large ``N_tilde`` is.  Plain
    float evaluation multiplies in double precision and degrades once the
    speeds exceed about 2**20.
    """

    def __init__(self, source: SignalOracle, fm: FrequencyMap):
        if source.dimension != fm.D:
            raise ValueError(f"oracle has dimension {source.dimension}, map has {fm.D}")
        self.source = source
        self.fm = fm
        self.dimension = 1
        self.declared_bandwidth = fm.N_tilde

    def evaluate(self, points):
        x = np.asarray(points, dtype=float).reshape(-1)
        speeds = np.array(self.fm.cofactors, dtype=float)
        pts = np.mod(np.multiply.outer(x, speeds), TWO_PI)
        return self.source.evaluate(pts)

    def sample(self, numerators, denominator: int):
        a = np.asarray(numerators, dtype=np.int64).reshape(-1) % denominator
        speeds = np.array([c % denominator for c in self.fm.cofactors], dtype=np.int64)
        if denominator * denominator >= (1 << 62):
            nums = np.array([[(int(v) * int(s)) % denominator for s in speeds] for v in a], dtype=object)
        else:
            nums = np.multiply.outer(a, speeds) % denominator
        return self.source.sample(nums, denominator)


def flatten_oracle(f: SignalOracle, fm: FrequencyMap) -> FlattenedOracle:
    return FlattenedOracle(f, fm)


@dataclass(frozen=True)
class LatticeSpectrum:
    entries: Mapping[tuple[int, ...], complex]
    k: int
    M: int
    D: int
    flat: SparseSpectrum | None = None

    @property
    def stats(self) -> RecoveryStats:
        return self.flat.stats if self.flat is not None else RecoveryStats()

    def support(self, tol: float = 0.0) -> set[tuple[int, ...]]:
        return {w for w, c in self.entries.items() if abs(c) > tol}

    def __getitem__(self, x) -> complex:
        return self.entries.get(tuple(x), 0j)

    def __len__(self):
        return len(self.entries)


def multidim_approximate(f: SignalOracle, M: int, k: int, epsilon_inv: int, *, randomized: bool = False,
                         sigma: float = 0.9, seed: int | None = None, c: int | None = None) -> LatticeSpectrum:
    """Recover a sparse D-dimensional spectrum through the flattened oracle."""
    fm = select_dimension_moduli(M, f.dimension)
    sparsity = k * epsilon_inv
    if not randomized and fm.N_tilde <= sparsity * sparsity:
        raise ParameterError(f"N_tilde = {fm.N_tilde} must exceed (k/eps)^2 = {sparsity * sparsity}")
    params = Params(k, epsilon_inv, fm.N_tilde)
    plan = tensor_plan(params, randomized=randomized, sigma=sigma, seed=seed, c=c)
    flat = fourier_approximate_2(flatten_oracle(f, fm), params, plan)
    entries = {g_inverse(w, fm): v for w, v in flat.entries.items()}
    return LatticeSpectrum(entries=entries, k=k, M=M, D=f.dimension, flat=flat)


def dimension_count_bound(M: int, D: int) -> float:
    """Advisory upper bound on how many leading primes the moduli consume."""
    x = D * math.log(M * D)
    return 3.0 * x / math.log(x) + D


def log_band_bound(M: int, D: int) -> float:
    """Advisory upper bound on ln(N_tilde); stated for D >= 2 and (MD)^D >= 2310."""
    dt = dimension_count_bound(M, D)
    return D * (math.log(M * D) + math.log(dt * (math.log(dt) + math.log(math.log(dt)))))
