"""Dense reference transforms and the instance-optimal error check."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from typing import Mapping

import numpy as np

from .crt import band_limits
from .sampling import SignalOracle

__all__ = [
    "DENSE_CAP",
    "ErrorReport",
    "dense_dft",
    "dense_dft_nd",
    "optimal_terms",
    "verify_bound",
    "spectrum_vector",
]

DENSE_CAP = 1 << 20


def dense_dft(oracle: SignalOracle, N: int) -> np.ndarray:
    """Length-N DFT of the samples, returned in centered order (lowest frequency first)."""
    if N < 1 or N > DENSE_CAP:
        raise ValueError(f"dense transform size {N} outside [1, {DENSE_CAP}]")
    values = np.asarray(oracle.sample(np.arange(N), N), dtype=complex)
    spectrum = np.fft.fft(values) / N
    lo, _ = band_limits(N)
    return spectrum[np.arange(lo, lo + N) % N]


def dense_dft_nd(oracle: SignalOracle, M: int) -> np.ndarray:
    """D-dimensional DFT on an (M+1)^D grid covering the lattice box [-M/2, M/2]^D.

    Axis index ``i`` maps to frequency ``i - M//2``.
    """
    D = oracle.dimension
    n = M + 1
    if n**D > DENSE_CAP:
        raise ValueError(f"dense transform size {n ** D} exceeds {DENSE_CAP}")
    grid = np.stack(np.meshgrid(*[np.arange(n)] * D, indexing="ij"), axis=-1).reshape(-1, D)
    values = np.asarray(oracle.sample(grid, n), dtype=complex).reshape((n,) * D)
    spectrum = np.fft.fftn(values) / n**D
    idx = (np.arange(n) - M // 2) % n
    return spectrum[np.ix_(*[idx] * D)]


def optimal_terms(v, j: int):
    """Best j-term support (lexicographic tie-break) and residual l1, l2 norms."""
    v = np.asarray(v)
    if not 0 <= j <= len(v):
        raise ValueError(f"j = {j} outside [0, {len(v)}]")
    mags = np.abs(v)
    # stable sort on -|v| keeps lower indices first among equal magnitudes
    order = np.argsort(-mags, kind="stable")
    support = set(order[:j].tolist())
    rest = mags[order[j:]]
    return support, float(rest.sum()), float(math.sqrt(float(np.sum(rest * rest))))


@dataclass(frozen=True)
class ErrorReport:
    l2_error: float
    opt_k_l2: float
    opt_keps_l1: float
    tail_l1: float
    rhs: float
    satisfied: bool
    k: int
    epsilon_inv: int

    @property
    def slack(self) -> float:
        return 1e-9 * (1.0 + self.rhs)

    @property
    def terms(self) -> dict:
        """The three right-hand-side contributions, labeled."""
        return {
            "best_k_term_l2": self.opt_k_l2,
            "l1_tail_term": 22.0 * self.opt_keps_l1 / (self.epsilon_inv * math.sqrt(self.k)),
            "out_of_band_term": 22.0 * math.sqrt(self.k) * self.tail_l1,
        }

    def as_dict(self) -> dict:
        out = asdict(self)
        out.update(self.terms)
        return out


def spectrum_vector(result, length: int, offset: int = 0) -> np.ndarray:
    """Dense vector from a sparse result (anything with ``entries``) or a mapping."""
    entries = getattr(result, "entries", result)
    out = np.zeros(length, dtype=complex)
    for w, c in entries.items():
        out[w - offset] = c
    return out


def verify_bound(result, reference, k: int, epsilon_inv: int, tail_l1: float = 0.0) -> ErrorReport:
    """Measure ``result`` against ``reference`` and evaluate the instance-optimal bound.

    ``reference`` is either a dense centered-order vector covering the band or
    a mapping frequency -> coefficient (implicitly zero elsewhere).  For
    D-dimensional results both sides may use tuple keys.
    """
    entries = dict(getattr(result, "entries", result))
    if isinstance(reference, Mapping):
        ref = {w: complex(c) for w, c in reference.items()}
    else:
        ref_arr = np.asarray(reference)
        if ref_arr.ndim == 1:
            lo, _ = band_limits(len(ref_arr))
            ref = {i + lo: complex(c) for i, c in enumerate(ref_arr) if c != 0}
        else:
            half = (ref_arr.shape[0] - 1) // 2
            ref = {
                tuple(int(i) - half for i in idx): complex(ref_arr[idx])
                for idx in itertools.product(*[range(n) for n in ref_arr.shape])
                if ref_arr[idx] != 0
            }
    keys = set(ref) | set(entries)
    diff = np.array([ref.get(w, 0j) - entries.get(w, 0j) for w in keys], dtype=complex)
    l2_error = float(np.linalg.norm(diff))
    mags = np.sort(np.abs(np.array(list(ref.values()), dtype=complex)))[::-1]
    opt_k_l2 = float(np.linalg.norm(mags[k:]))
    opt_keps_l1 = float(mags[k * epsilon_inv :].sum())
    rhs = opt_k_l2 + 22.0 * opt_keps_l1 / (epsilon_inv * math.sqrt(k)) + 22.0 * math.sqrt(k) * tail_l1
    satisfied = l2_error <= rhs + 1e-9 * (1.0 + rhs)
    return ErrorReport(l2_error, opt_k_l2, opt_keps_l1, float(tail_l1), rhs, bool(satisfied), k, epsilon_inv)
