"""Residue arithmetic and Chinese-remainder reconstruction into a centered band."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .primes import pairwise_coprime

__all__ = [
    "NoInverseError",
    "ResidueVector",
    "band_limits",
    "centered",
    "in_band",
    "mod_inverse",
    "residues_of",
    "crt_reconstruct",
    "crt_reconstruct_many",
]

# products below this fit int64 intermediates in the vectorized Garner loop
_INT64_SAFE = 1 << 62


class NoInverseError(ValueError):
    pass


def band_limits(N: int) -> tuple[int, int]:
    """Smallest and largest frequency of the band (-ceil(N/2), floor(N/2)]."""
    return 1 - (N + 1) // 2, N // 2


def in_band(omega: int, N: int) -> bool:
    lo, hi = band_limits(N)
    return lo <= omega <= hi


def centered(x: int, modulus: int) -> int:
    """Representative of x mod modulus in (-ceil(m/2), floor(m/2)]."""
    r = x % modulus
    return r - modulus if r > modulus // 2 else r


def mod_inverse(a: int, m: int) -> int:
    if m < 2:
        raise ValueError("modulus must be >= 2")
    try:
        return pow(a % m, -1, m)
    except ValueError:
        raise NoInverseError(f"{a} has no inverse modulo {m} (gcd = {math.gcd(a, m)})") from None


@dataclass(frozen=True)
class ResidueVector:
    residues: tuple[int, ...]
    moduli: tuple[int, ...]

    def __post_init__(self):
        if len(self.residues) != len(self.moduli):
            raise ValueError("residues and moduli differ in length")
        for r, m in zip(self.residues, self.moduli):
            if m < 1 or not 0 <= r < m:
                raise ValueError(f"residue {r} is not reduced modulo {m}")
        if not pairwise_coprime(self.moduli):
            raise ValueError(f"moduli {self.moduli} are not pairwise coprime")

    @property
    def product(self) -> int:
        return math.prod(self.moduli)


def residues_of(omega: int, moduli: Sequence[int]) -> ResidueVector:
    # Python's % already maps negatives onto [0, m)
    return ResidueVector(tuple(omega % m for m in moduli), tuple(moduli))


def _to_band(x: int, product: int, N: int) -> int | None:
    lo, hi = band_limits(N)
    if x <= hi:
        return x
    x -= product
    return x if x >= lo else None


def crt_reconstruct(rv: ResidueVector, N: int) -> int | None:
    """The unique band frequency with the given residues.

    Returns ``None`` when the solution modulo the product has no
    representative in (-ceil(N/2), floor(N/2)].
    """
    product = rv.product
    if product < N:
        raise ValueError(f"moduli product {product} is below the bandwidth {N}")
    x, acc = 0, 1
    for r, m in zip(rv.residues, rv.moduli):
        if m == 1:
            continue
        step = ((r - x) * mod_inverse(acc, m)) % m
        x += step * acc
        acc *= m
    return _to_band(x, product, N)


def crt_reconstruct_many(residues: Sequence[np.ndarray], moduli: Sequence[int], N: int):
    """Vectorized :func:`crt_reconstruct`.

    ``residues[i]`` holds reduced residues modulo ``moduli[i]``.  Returns
    ``(omega, ok)``: candidate frequencies and a mask of those that landed in
    the band.  Entries of ``omega`` where ``ok`` is False are meaningless.
    """
    product = math.prod(moduli)
    if product < N:
        raise ValueError(f"moduli product {product} is below the bandwidth {N}")
    if product >= _INT64_SAFE:
        columns = [np.asarray(r, dtype=object) for r in residues]
        out = [crt_reconstruct(ResidueVector(tuple(int(v) for v in row), tuple(moduli)), N) for row in zip(*columns)]
        ok = np.array([w is not None for w in out], dtype=bool)
        return np.array([0 if w is None else w for w in out], dtype=object), ok
    x = np.zeros(len(residues[0]), dtype=np.int64)
    acc = 1
    for r, m in zip(residues, moduli):
        if m == 1:
            continue
        inv = mod_inverse(acc % m, m)
        step = ((np.asarray(r, dtype=np.int64) - x) % m) * inv % m
        x = x + step * acc
        acc *= m
    lo, hi = band_limits(N)
    omega = np.where(x <= hi, x, x - product)
    return omega, omega >= lo
