"""Implicit number-theoretic measurement plans.

A plan never stores matrix rows.  A row is the pair ``(u, h)``: the 0/1
indicator of the residue class ``h`` modulo ``u``.  Flat plans hold one
modulus per ``s_j``.  Tensor plans add the row products with the ``t_i``
classes, i.e. every residue class modulo ``t_i * s_j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from .primes import (
    ParameterError,
    SModuli,
    TModuli,
    pairwise_coprime,
    randomized_draws,
)

__all__ = [
    "MeasurementPlan",
    "deterministic_plan",
    "subsample_moduli",
    "with_t_moduli",
    "tensor_moduli",
    "row_apply",
    "dense_rows",
    "column_rows",
    "distinct_sample_count",
]


@dataclass(frozen=True)
class MeasurementPlan:
    s: SModuli
    multiplicity: Mapping[int, int]
    t: TModuli | None = None
    rng_seed: int | None = None
    draws: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        moduli = tuple(self.multiplicity)
        if any(v < 1 for v in self.multiplicity.values()):
            raise ParameterError("multiplicities must be positive")
        if not set(moduli) <= set(self.s.values):
            raise ParameterError("plan moduli must come from the s moduli")
        if self.t is not None:
            if self.t.values[-1] >= self.s.s1:
                raise ParameterError("t moduli must lie below s1")
            if not pairwise_coprime(self.t.values + moduli):
                raise ParameterError("t and s moduli are not pairwise coprime")

    @property
    def moduli(self) -> tuple[int, ...]:
        """Distinct s moduli in ascending order."""
        return tuple(sorted(self.multiplicity))

    @property
    def weight(self) -> int:
        """Number of s moduli counted with multiplicity (K, or l when sampled)."""
        return sum(self.multiplicity.values())

    @property
    def is_tensor(self) -> bool:
        return self.t is not None

    @property
    def randomized(self) -> bool:
        return self.rng_seed is not None or bool(self.draws)

    @property
    def row_count(self) -> int:
        """m: rows of the flat part, each distinct modulus counted once."""
        return sum(self.moduli)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tensor_moduli(self) if self.t is not None else self.moduli

    @property
    def N(self) -> int:
        return self.s.N


def deterministic_plan(s: SModuli, t: TModuli | None = None) -> MeasurementPlan:
    return MeasurementPlan(s=s, multiplicity={v: 1 for v in s.values}, t=t)


def subsample_moduli(s: SModuli, sigma: float, set_size: int, seed: int | None) -> MeasurementPlan:
    """Draw l = ceil(21 ln(set_size/(1-sigma))) s moduli with replacement."""
    if s.c < 14:
        raise ParameterError(f"randomized plans need c >= 14, got c = {s.c}")
    if not 2.0 / 3.0 <= sigma < 1.0:
        raise ParameterError(f"sigma = {sigma} outside [2/3, 1)")
    if set_size < 1:
        raise ParameterError("set_size must be >= 1")
    l = randomized_draws(set_size, sigma)
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, s.K, size=l)
    draws = tuple(s.values[i] for i in picks)
    counts: dict[int, int] = {}
    for v in draws:
        counts[v] = counts.get(v, 0) + 1
    multiplicity = {v: counts[v] for v in sorted(counts)}
    return MeasurementPlan(s=s, multiplicity=multiplicity, rng_seed=seed, draws=draws)


def with_t_moduli(plan: MeasurementPlan, t: TModuli) -> MeasurementPlan:
    return MeasurementPlan(s=plan.s, multiplicity=plan.multiplicity, t=t, rng_seed=plan.rng_seed, draws=plan.draws)


def tensor_moduli(plan: MeasurementPlan) -> tuple[int, ...]:
    """DFT lengths of a tensor plan: every s_j and every t_i * s_j."""
    if plan.t is None:
        raise ParameterError("plan has no t moduli")
    lengths = set(plan.moduli)
    lengths.update(t * s for s in plan.moduli for t in plan.t.values)
    return tuple(sorted(lengths))


def distinct_sample_count(lengths) -> int:
    """Distinct points of the union of the equispaced grids of the given lengths.

    Point l/u reduces to a/b with b | u, so the union is counted by summing
    Euler's totient over every denominator that divides some length.
    """
    lengths = [int(u) for u in lengths]
    if not lengths:
        return 0
    top = max(lengths)
    factor = _factor_sieved if top <= _SPF_LIMIT else _factor_trial
    seen: dict[int, int] = {}
    for u in lengths:
        # expand the factorization into (divisor, totient) pairs
        pairs = [(1, 1)]
        for p, e in factor(u, top).items():
            step = []
            for d, phi in pairs:
                pe = 1
                for i in range(1, e + 1):
                    pe *= p
                    step.append((d * pe, phi * (pe - pe // p)))
            pairs += step
        seen.update(pairs)
    return sum(seen.values())


_SPF_LIMIT = 1 << 24


@lru_cache(maxsize=4)
def _spf_table(size: int) -> np.ndarray:
    spf = np.zeros(size + 1, dtype=np.int64)
    for p in range(2, math.isqrt(size) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx  # primes (and 0, 1) are their own entry
    return spf


def _factor_sieved(n: int, top: int) -> dict[int, int]:
    size = 1 << max(10, (top - 1).bit_length())  # share tables across nearby sizes
    spf = _spf_table(size)
    out: dict[int, int] = {}
    while n > 1:
        p = int(spf[n])
        out[p] = out.get(p, 0) + 1
        n //= p
    return out


def _factor_trial(n: int, top: int = 0) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def row_apply(u: int, h: int, x: np.ndarray, start: int = 0) -> complex:
    """Dense product of row (u, h) with ``x``; test oracle only.

    ``x[i]`` is the entry for index ``start + i``, so centered spectra are
    handled by passing the lowest band frequency as ``start``.
    """
    if not 0 <= h < u:
        raise ValueError(f"residue {h} not in [0, {u})")
    idx = np.arange(len(x)) + start
    return complex(np.sum(np.asarray(x)[idx % u == h]))


def dense_rows(u: int, N: int, start: int = 0) -> np.ndarray:
    """Explicit (u x N) 0/1 block of the rows for modulus ``u``."""
    idx = np.arange(N) + start
    return (idx[None, :] % u == np.arange(u)[:, None]).astype(np.int8)


def column_rows(x: np.ndarray, moduli, n: int, start: int = 0) -> np.ndarray:
    """Entries of M_{n} x: for each modulus, the sum over the residue class of n."""
    x = np.asarray(x)
    idx = np.arange(len(x)) + start
    out = np.empty(len(moduli), dtype=np.result_type(x.dtype, np.complex128) if np.iscomplexobj(x) else float)
    for j, u in enumerate(moduli):
        out[j] = x[idx % u == (n % u)].sum()
    return out
