import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import centered_band, trial_division_primes
from sparse_fourier.crt import (
    NoInverseError,
    ResidueVector,
    band_limits,
    centered,
    crt_reconstruct,
    crt_reconstruct_many,
    mod_inverse,
    residues_of,
)


@pytest.mark.parametrize("a,m,expected", [(3, 7, 5), (6, 5, 1), (-1, 7, 6), (1, 2, 1)])
def test_mod_inverse_values(a, m, expected):
    assert mod_inverse(a, m) == expected


def test_mod_inverse_errors():
    with pytest.raises(NoInverseError):
        mod_inverse(4, 6)
    with pytest.raises(ValueError):
        mod_inverse(1, 1)


@given(st.integers(-10**12, 10**12), st.integers(2, 10**6))
def test_mod_inverse_property(a, m):
    if math.gcd(a, m) != 1:
        with pytest.raises(NoInverseError):
            mod_inverse(a, m)
        return
    inv = mod_inverse(a, m)
    assert 0 <= inv < m and (a * inv) % m == 1


def test_band_limits():
    assert band_limits(8) == (-3, 4)
    assert band_limits(7) == (-3, 3)
    assert band_limits(1) == (0, 0)
    assert centered(23, 30) == -7 and centered(15, 30) == 15


def test_reconstruct_examples():
    assert crt_reconstruct(ResidueVector((2, 3, 2), (3, 5, 7)), 105) == 23
    assert crt_reconstruct(ResidueVector((1, 2, 3), (2, 3, 5)), 30) == -7
    assert crt_reconstruct(ResidueVector((0, 0, 0), (2, 3, 5)), 17) == 0


def test_reconstruct_example_by_enumeration():
    # independent check of the first example
    hits = [w for w in range(105) if w % 3 == 2 and w % 5 == 3 and w % 7 == 2]
    assert hits == [23]
    assert -7 % 2 == 1 and -7 % 3 == 2 and -7 % 5 == 3


def test_reconstruct_out_of_band():
    # 29 mod 30 is -1: inside a band of 30 but outside a band of 2 ((-1, 1])
    assert crt_reconstruct(ResidueVector((1, 2, 4), (2, 3, 5)), 30) == -1
    # 14 mod 30 lies above the top of a band of width 20
    assert crt_reconstruct(ResidueVector((0, 2, 4), (2, 3, 5)), 20) is None


def test_reconstruct_rejects_small_product():
    with pytest.raises(ValueError):
        crt_reconstruct(ResidueVector((1, 1), (2, 3)), 7)


def test_residue_vector_validation():
    with pytest.raises(ValueError):
        ResidueVector((3,), (3,))
    with pytest.raises(ValueError):
        ResidueVector((1, 1), (4, 6))
    with pytest.raises(ValueError):
        ResidueVector((1,), (3, 5))


def test_negative_residues():
    rv = residues_of(-7, (2, 3, 5))
    assert rv.residues == (1, 2, 3)


@given(st.integers(2, 3000), st.data())
def test_round_trip_random(N, data):
    moduli, prod = [], 1
    for p in trial_division_primes(20, data.draw(st.integers(2, 50))):
        moduli.append(p)
        prod *= p
        if prod >= N:
            break
    if prod < N:
        return
    w = data.draw(st.sampled_from(centered_band(N)))
    assert crt_reconstruct(residues_of(w, moduli), N) == w


def test_vectorized_matches_scalar():
    moduli = (7, 11, 13)
    N = 900
    band = np.arange(*band_limits(N)[:1], band_limits(N)[1] + 1)
    residues = [band % m for m in moduli]
    omega, ok = crt_reconstruct_many(residues, moduli, N)
    assert ok.all() and (omega == band).all()


def test_vectorized_wide_products():
    # product beyond 2**62 exercises the exact-integer path
    moduli = tuple(trial_division_primes(16))
    N = math.prod(moduli)
    assert N >= 1 << 62
    values = [0, 1, -1, N // 2, 1 - (N + 1) // 2, 123456789012345678]
    residues = [np.array([v % m for v in values], dtype=object) for m in moduli]
    omega, ok = crt_reconstruct_many(residues, moduli, N)
    assert ok.all() and [int(w) for w in omega] == values
