"""Sparse Fourier recovery: full-band median estimation and CRT identification.

``fourier_approximate_1`` estimates every band frequency by a median over the
aliased entries that contain it, then keeps the ``2k`` largest.
``fourier_approximate_2`` first identifies a handful of candidate frequencies
from tensor-plan spectra, so its cost does not scale with the band.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .crt import band_limits, crt_reconstruct_many, in_band
from .measurement import (
    MeasurementPlan,
    deterministic_plan,
    subsample_moduli,
    with_t_moduli,
)
from .primes import (
    ParameterError,
    select_s_moduli,
    select_t_moduli,
    smallest_tensor_floor,
)
from .sampling import AliasedSpectra, SignalOracle, fast_multiply

__all__ = [
    "Params",
    "RecoveryStats",
    "SparseSpectrum",
    "IdentificationTally",
    "median_estimate",
    "median_estimates",
    "select_top",
    "full_band_plan",
    "tensor_plan",
    "fourier_approximate_1",
    "identify_frequencies",
    "fourier_approximate_2",
    "plan_summary",
]


@dataclass(frozen=True)
class Params:
    k: int
    epsilon_inv: int
    N: int

    def __post_init__(self):
        if self.k < 1 or self.epsilon_inv < 1:
            raise ParameterError("k and 1/epsilon must be positive integers")
        if self.sparsity < 2:
            raise ParameterError(f"k/epsilon = {self.sparsity} must be at least 2")
        if self.N <= self.sparsity:
            raise ParameterError(f"N = {self.N} must exceed k/epsilon = {self.sparsity}")

    @property
    def sparsity(self) -> int:
        return self.k * self.epsilon_inv

    @property
    def epsilon(self) -> float:
        return 1.0 / self.epsilon_inv


@dataclass
class RecoveryStats:
    samples: int = 0
    sampling_seconds: float = 0.0
    recovery_seconds: float = 0.0
    frequencies_estimated: int = 0
    identification_pairs: int = 0
    candidates: int = 0


@dataclass(frozen=True)
class SparseSpectrum:
    entries: Mapping[int, complex]
    k: int
    N: int
    stats: RecoveryStats = field(default_factory=RecoveryStats, compare=False)

    def __post_init__(self):
        if len(self.entries) > 2 * self.k:
            raise ValueError(f"{len(self.entries)} entries exceed 2k = {2 * self.k}")
        bad = [w for w in self.entries if not in_band(w, self.N)]
        if bad:
            raise ValueError(f"frequencies {bad[:5]} fall outside the band")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, omega: int) -> complex:
        return self.entries.get(omega, 0j)

    def support(self, tol: float = 0.0) -> set[int]:
        return {w for w, c in self.entries.items() if abs(c) > tol}

    def to_dense(self) -> np.ndarray:
        """Coefficient vector in centered order (index 0 is the lowest band frequency)."""
        lo, _ = band_limits(self.N)
        out = np.zeros(self.N, dtype=complex)
        for w, c in self.entries.items():
            out[w - lo] = c
        return out


@dataclass(frozen=True)
class IdentificationTally:
    counts: Mapping[int, int]
    threshold: float

    def survivors(self) -> list[int]:
        return sorted(w for w, n in self.counts.items() if n > self.threshold)


def _median_parts(values: np.ndarray, axis: int = -1) -> np.ndarray:
    # np.median averages the two middle order statistics for even counts
    return np.median(values.real, axis=axis) + 1j * np.median(values.imag, axis=axis)


def _rows_for(plan: MeasurementPlan) -> list[tuple[int, int]]:
    """(length, multiplicity) for every measurement row family hitting a frequency."""
    rows = []
    for s in plan.moduli:
        w = plan.multiplicity[s]
        rows.append((s, w))
        if plan.t is not None:
            rows.extend((t * s, w) for t in plan.t.values)
    return rows


def median_estimate(spectra: AliasedSpectra, omega: int, plan: MeasurementPlan) -> complex:
    """Componentwise median of every entry whose residue class contains ``omega``."""
    vals = []
    for u, w in _rows_for(plan):
        vals.extend([spectra[u][omega % u]] * w)
    return complex(_median_parts(np.array(vals, dtype=complex)))


def median_estimates(spectra: AliasedSpectra, omegas: np.ndarray, plan: MeasurementPlan, chunk: int = 1 << 15) -> np.ndarray:
    """Vectorized :func:`median_estimate` over an array of frequencies."""
    omegas = np.asarray(omegas, dtype=np.int64)
    rows = _rows_for(plan)
    lengths = np.array([u for u, _ in rows], dtype=np.int64)
    weights = np.array([w for _, w in rows], dtype=np.int64)
    out = np.empty(len(omegas), dtype=complex)
    for lo in range(0, len(omegas), chunk):
        block = omegas[lo : lo + chunk]
        gathered = np.empty((len(block), len(rows)), dtype=complex)
        for j, u in enumerate(lengths):
            gathered[:, j] = spectra[int(u)][block % u]
        if np.any(weights > 1):
            gathered = np.repeat(gathered, weights, axis=1)
        out[lo : lo + chunk] = _median_parts(gathered, axis=1)
    return out


def select_top(omegas: np.ndarray, values: np.ndarray, count: int) -> dict[int, complex]:
    """Largest ``count`` nonzero magnitudes; ties go to lower |omega|, then negative first."""
    omegas = np.asarray(omegas, dtype=np.int64)
    values = np.asarray(values, dtype=complex)
    keep = values != 0
    omegas, values = omegas[keep], values[keep]
    mags = np.abs(values)
    if len(mags) > count:
        # pre-filter to the top magnitudes, keeping every tie at the cutoff
        cutoff = np.partition(mags, len(mags) - count)[len(mags) - count]
        sel = mags >= cutoff
        omegas, values, mags = omegas[sel], values[sel], mags[sel]
    order = np.lexsort((omegas > 0, np.abs(omegas), -mags))[:count]
    return {int(omegas[i]): complex(values[i]) for i in order}


def full_band_plan(params: Params, *, randomized: bool = False, c: int | None = None,
                   sigma: float = 0.9, seed: int | None = None) -> MeasurementPlan:
    """Plan for :func:`fourier_approximate_1`: c = 4 deterministic, c = 14 subsampled."""
    if not randomized:
        return deterministic_plan(select_s_moduli(params.k, params.epsilon_inv, params.N, 4 if c is None else c))
    s = select_s_moduli(params.k, params.epsilon_inv, params.N, 14 if c is None else c)
    return subsample_moduli(s, sigma, params.N, seed)


def tensor_plan(params: Params, *, randomized: bool = False, c: int | None = None,
                sigma: float = 0.9, seed: int | None = None, t_rule: str = "standard") -> MeasurementPlan:
    """Plan for :func:`fourier_approximate_2`.

    The smallest s modulus is raised to the first prime for which the small
    t moduli exist below it, since identification cannot work otherwise.
    """
    floor = smallest_tensor_floor(params.N, params.sparsity)
    c = (14 if randomized else 4) if c is None else c
    s = select_s_moduli(params.k, params.epsilon_inv, params.N, c, floor=floor)
    t = select_t_moduli(params.N, s, rule=t_rule)
    base = subsample_moduli(s, sigma, params.N, seed) if randomized else deterministic_plan(s)
    return with_t_moduli(base, t)


def _check_plan(params: Params, plan: MeasurementPlan, tensor: bool):
    if plan.N != params.N:
        raise ParameterError(f"plan bandwidth {plan.N} differs from N = {params.N}")
    if plan.s.sparsity != params.sparsity:
        raise ParameterError("plan was built for a different k/epsilon")
    if tensor and plan.t is None:
        raise ParameterError("fourier_approximate_2 needs a plan with t moduli")
    if not tensor and plan.t is not None:
        raise ParameterError("fourier_approximate_1 needs a flat plan")


def fourier_approximate_1(oracle: SignalOracle, params: Params, plan: MeasurementPlan | None = None,
                          *, spectra: AliasedSpectra | None = None) -> SparseSpectrum:
    """Estimate every band coefficient by medians and keep the 2k largest."""
    plan = full_band_plan(params) if plan is None else plan
    _check_plan(params, plan, tensor=False)
    stats = RecoveryStats()
    if spectra is None:
        spectra = fast_multiply(oracle, plan)
    stats.samples = spectra.sample_count
    stats.sampling_seconds = spectra.sampling_seconds
    t0 = time.perf_counter()
    lo, hi = band_limits(params.N)
    omegas = np.arange(lo, hi + 1, dtype=np.int64)
    estimates = median_estimates(spectra, omegas, plan)
    stats.frequencies_estimated = len(omegas)
    entries = select_top(omegas, estimates, 2 * params.k)
    stats.recovery_seconds = time.perf_counter() - t0
    return SparseSpectrum(entries=entries, k=params.k, N=params.N, stats=stats)


def identify_frequencies(spectra: AliasedSpectra, plan: MeasurementPlan, N: int | None = None,
                         stats: RecoveryStats | None = None) -> IdentificationTally:
    """Tally CRT reconstructions from every (s_j, h) pair of a tensor plan."""
    if plan.t is None:
        raise ParameterError("identification needs a plan with t moduli")
    N = plan.N if N is None else N
    tvals = plan.t.values
    counts: dict[int, int] = {}
    for s in plan.moduli:
        flat = spectra[s]
        h = np.arange(s, dtype=np.int64)
        residues = [h]
        for t in tvals:
            # row b of the reshaped spectrum holds entries h + b*s
            tensor = spectra[t * s].reshape(t, s)
            b_min = np.argmin(np.abs(flat[None, :] - tensor), axis=0)  # first minimum: smallest b
            residues.append((h + b_min * s) % t)
        omega, ok = crt_reconstruct_many(residues, (s,) + tvals, N)
        found, n = np.unique(omega[ok].astype(np.int64), return_counts=True)
        weight = plan.multiplicity[s]
        for w, c in zip(found.tolist(), n.tolist()):
            counts[w] = counts.get(w, 0) + c * weight
        if stats is not None:
            stats.identification_pairs += s
    return IdentificationTally(counts=counts, threshold=plan.weight / 2)


def fourier_approximate_2(oracle: SignalOracle, params: Params, plan: MeasurementPlan | None = None,
                          *, spectra: AliasedSpectra | None = None) -> SparseSpectrum:
    """Identify candidate frequencies by CRT, estimate only those, keep the 2k largest."""
    plan = tensor_plan(params) if plan is None else plan
    _check_plan(params, plan, tensor=True)
    stats = RecoveryStats()
    if spectra is None:
        spectra = fast_multiply(oracle, plan)
    stats.samples = spectra.sample_count
    stats.sampling_seconds = spectra.sampling_seconds
    t0 = time.perf_counter()
    tally = identify_frequencies(spectra, plan, params.N, stats)
    candidates = np.array(tally.survivors(), dtype=np.int64)
    stats.candidates = len(candidates)
    estimates = median_estimates(spectra, candidates, plan) if len(candidates) else np.zeros(0, complex)
    stats.frequencies_estimated = len(candidates)
    entries = select_top(candidates, estimates, 2 * params.k)
    stats.recovery_seconds = time.perf_counter() - t0
    return SparseSpectrum(entries=entries, k=params.k, N=params.N, stats=stats)


def plan_summary(plan: MeasurementPlan) -> dict:
    return {
        "s1": plan.s.s1,
        "K": plan.s.K,
        "weight": plan.weight,
        "distinct_moduli": len(plan.moduli),
        "t": list(plan.t.values) if plan.t is not None else [],
        "rows": plan.row_count,
        "lengths": len(plan.lengths),
        "seed": plan.rng_seed,
        "log_base": plan.s.log_base,
        "max_modulus": max(plan.moduli),
        "c": plan.s.c,
        "draws": len(plan.draws),
    }
