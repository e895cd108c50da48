"""Signal access and the aliased spectra computed from equispaced grids.

Sampling a length-``u`` grid and taking a ``1/u``-normalized DFT folds every
frequency onto its residue class: entry ``h`` equals the sum of all
coefficients at frequencies congruent to ``h`` mod ``u``.  One such DFT per
plan length yields every measurement a recovery algorithm needs.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .crt import band_limits, in_band

__all__ = [
    "SignalOracle",
    "FunctionOracle",
    "TrigPolynomial",
    "AliasedSpectra",
    "dft_any_length",
    "fast_multiply",
    "grid_denominators",
    "worker_count",
]

TWO_PI = 2.0 * math.pi


def worker_count(requested: int | None = None) -> int:
    """Worker threads to use; ``SFT_THREADS`` caps the count, 0 meaning auto."""
    auto = os.cpu_count() or 1
    cap = os.environ.get("SFT_THREADS", "0").strip() or "0"
    try:
        cap_n = int(cap)
    except ValueError:
        cap_n = 0
    n = auto if requested in (None, 0) else int(requested)
    if cap_n > 0:
        n = min(n, cap_n)
    return max(1, n)


class SignalOracle:
    """Black-box periodic function on [0, 2pi]^D.

    Subclasses implement :meth:`evaluate`.  :meth:`sample` evaluates at the
    rational grid points ``2pi * a / b`` and may be overridden for exactness.
    """

    dimension: int = 1
    declared_bandwidth: int | None = None

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample(self, numerators: np.ndarray, denominator: int) -> np.ndarray:
        """Values at ``2pi * numerators / denominator`` (per axis for D > 1)."""
        pts = TWO_PI * np.asarray(numerators, dtype=float) / denominator
        return np.asarray(self.evaluate(pts), dtype=complex)

    def __call__(self, points):
        return self.evaluate(np.asarray(points, dtype=float))


class FunctionOracle(SignalOracle):
    """Wraps a vectorized callable ``fn(points) -> values``."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], dimension: int = 1, declared_bandwidth=None):
        self.fn = fn
        self.dimension = dimension
        self.declared_bandwidth = declared_bandwidth

    def evaluate(self, points):
        return np.asarray(self.fn(np.asarray(points, dtype=float)), dtype=complex)


# phase tables reach int64 limits only for absurd grids; keep products below 2**62
_PHASE_SAFE = 1 << 62


class TrigPolynomial(SignalOracle):
    """Finite Fourier series ``sum_j c_j exp(i <omega_j, x>)``.

    Evaluation on rational grids is exact up to one rounding of the phase:
    the integer ``<omega, a> mod b`` is formed before any floating point.
    """

    def __init__(self, terms: Mapping, dimension: int | None = None, declared_bandwidth=None):
        items = [(k, complex(v)) for k, v in terms.items()]
        if dimension is None:
            first = items[0][0] if items else 0
            dimension = len(first) if isinstance(first, tuple) else 1
        self.dimension = dimension
        self.declared_bandwidth = declared_bandwidth
        merged: dict = {}
        for key, value in items:
            key = tuple(int(v) for v in key) if dimension > 1 else int(key if not isinstance(key, tuple) else key[0])
            merged[key] = merged.get(key, 0j) + value
        self.terms = merged
        keys = list(merged)
        if dimension == 1:
            self._freqs = np.array(keys, dtype=object if _too_big(keys) else np.int64).reshape(-1)
        else:
            self._freqs = np.array(keys, dtype=np.int64).reshape(-1, dimension)
        self._coefs = np.array([merged[k] for k in keys], dtype=complex)

    def __repr__(self):
        return f"TrigPolynomial({len(self.terms)} terms, D={self.dimension})"

    @property
    def l1_norm(self) -> float:
        return float(np.abs(self._coefs).sum())

    def coefficient(self, omega) -> complex:
        return self.terms.get(omega, 0j)

    def band_split(self, N: int) -> tuple[dict, dict]:
        """(in-band terms, out-of-band terms) for the centered band of width N."""
        inside, outside = {}, {}
        for w, c in self.terms.items():
            (inside if in_band(w, N) else outside)[w] = c
        return inside, outside

    def tail_l1(self, N: int) -> float:
        return float(sum(abs(c) for c in self.band_split(N)[1].values()))

    def evaluate(self, points):
        x = np.asarray(points, dtype=float)
        if self.dimension == 1:
            phase = np.multiply.outer(x.reshape(-1), self._freqs.astype(float))
        else:
            phase = x.reshape(-1, self.dimension) @ self._freqs.T.astype(float)
        out = np.exp(1j * phase) @ self._coefs
        return out.reshape(x.shape if self.dimension == 1 else x.shape[:-1])

    def sample(self, numerators, denominator: int, chunk: int = 1 << 16) -> np.ndarray:
        a = np.asarray(numerators)
        b = int(denominator)
        if self.dimension == 1:
            a = a.reshape(-1)
        else:
            a = a.reshape(-1, self.dimension)
        if b * b >= _PHASE_SAFE or self._freqs.dtype == object:
            return super().sample(numerators, denominator)
        freqs = self._freqs % b  # reduce first so products stay below b**2
        roots = np.exp((TWO_PI / b) * 1j * np.arange(b))
        out = np.empty(len(a), dtype=complex)
        for lo in range(0, len(a), chunk):
            block = a[lo : lo + chunk].astype(np.int64) % b
            if self.dimension == 1:
                r = np.multiply.outer(block, freqs) % b
            else:
                r = np.zeros((len(block), len(freqs)), dtype=np.int64)
                for d in range(self.dimension):
                    r = (r + np.multiply.outer(block[:, d], freqs[:, d])) % b
            out[lo : lo + chunk] = roots[r] @ self._coefs
        return out

    @classmethod
    def random_sparse(cls, N: int, count: int, rng: np.random.Generator, *, unit: bool = True):
        """``count`` distinct in-band tones; unit-modulus random-phase coefficients by default."""
        lo, hi = band_limits(N)
        freqs = rng.choice(np.arange(lo, hi + 1), size=count, replace=False)
        if unit:
            coefs = np.exp(1j * rng.uniform(0, TWO_PI, size=count))
        else:
            coefs = rng.standard_normal(count) + 1j * rng.standard_normal(count)
        return cls({int(w): complex(c) for w, c in zip(freqs, coefs)}, declared_bandwidth=N)

    def with_noise(self, N: int, count: int, l1_budget: float, rng: np.random.Generator):
        """Add ``count`` in-band spikes off the current support, total l1 mass ``l1_budget``."""
        lo, hi = band_limits(N)
        pool = np.setdiff1d(np.arange(lo, hi + 1), np.array([w for w in self.terms if in_band(w, N)], dtype=np.int64))
        freqs = rng.choice(pool, size=count, replace=False)
        mags = rng.uniform(0.5, 1.5, size=count)
        mags *= l1_budget / mags.sum()
        coefs = mags * np.exp(1j * rng.uniform(0, TWO_PI, size=count))
        terms = dict(self.terms)
        for w, c in zip(freqs, coefs):
            terms[int(w)] = complex(c)
        return TrigPolynomial(terms, dimension=1, declared_bandwidth=N)

    def plus(self, extra: Mapping):
        terms = dict(self.terms)
        for w, c in extra.items():
            terms[w] = terms.get(w, 0j) + complex(c)
        return TrigPolynomial(terms, dimension=self.dimension, declared_bandwidth=self.declared_bandwidth)


def _too_big(keys) -> bool:
    return any(abs(int(k)) >= (1 << 31) for k in keys if not isinstance(k, tuple))


def dft_any_length(samples) -> np.ndarray:
    """1/u-normalized forward DFT of any length (pocketfft handles prime sizes)."""
    x = np.asarray(samples, dtype=complex)
    if x.ndim != 1 or len(x) < 1:
        raise ValueError("dft_any_length needs a non-empty 1-D array")
    return np.fft.fft(x) / len(x)


@dataclass(frozen=True)
class AliasedSpectra:
    """Per-length aliased spectra: ``spectra[u][h] = sum of coefficients at omega = h mod u``."""

    spectra: Mapping[int, np.ndarray]
    sample_count: int
    sampling_seconds: float = field(default=0.0, compare=False)

    def entry(self, u: int, h: int) -> complex:
        return complex(self.spectra[u][h % u])

    def __getitem__(self, u: int) -> np.ndarray:
        return self.spectra[u]

    def __contains__(self, u: int) -> bool:
        return u in self.spectra

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(sorted(self.spectra))


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def grid_denominators(lengths) -> list[int]:
    """Every reduced denominator that occurs on the union of the grids."""
    out = set()
    for u in lengths:
        out.update(_divisors(int(u)))
    return sorted(out)


@lru_cache(maxsize=1 << 14)
def _primitive_numerators(b: int) -> np.ndarray:
    if b == 1:
        out = np.zeros(1, dtype=np.int64)
    else:
        a = np.arange(b, dtype=np.int64)
        out = a[np.gcd(a, b) == 1]
    out.flags.writeable = False  # shared between calls through the cache
    return out


def fast_multiply(oracle: SignalOracle, plan_or_lengths, *, threads: int | None = None) -> AliasedSpectra:
    """Sample ``oracle`` on every plan grid and return the aliased spectra.

    Each distinct point ``2pi a/b`` (``a/b`` reduced) is evaluated once, so
    ``sample_count`` is the size of the union of the grids.
    """
    if oracle.dimension != 1:
        raise ValueError("fast_multiply needs a one-dimensional oracle")
    lengths = tuple(getattr(plan_or_lengths, "lengths", plan_or_lengths))
    t0 = time.perf_counter()
    denominators = grid_denominators(lengths)

    def evaluate(b):
        nums = _primitive_numerators(b)
        return b, nums, np.asarray(oracle.sample(nums, b), dtype=complex)

    workers = worker_count(threads)
    if workers > 1 and len(denominators) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = {b: (nums, vals) for b, nums, vals in pool.map(evaluate, denominators)}
    else:
        values = {b: (nums, vals) for b, nums, vals in map(evaluate, denominators)}
    count = sum(len(nums) for nums, _ in values.values())

    spectra = {}
    for u in lengths:
        grid = np.empty(u, dtype=complex)
        # l = g * a with b = u / g and gcd(a, b) = 1
        for b in _divisors(u):
            nums, vals = values[b]
            grid[(u // b) * nums] = vals
        spectra[u] = dft_any_length(grid)
    return AliasedSpectra(spectra=spectra, sample_count=count, sampling_seconds=time.perf_counter() - t0)
