"""Brute-force reference implementations shared by the test modules.

Nothing here calls into the package: these are the independent oracles the
library is checked against.
"""
import cmath
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("ci", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


def trial_division_primes(count, start=2):
    out, n = [], max(start, 2)
    while len(out) < count:
        if all(n % d for d in range(2, math.isqrt(n) + 1)):
            out.append(n)
        n += 1
    return out


def explicit_rows(moduli, N, start=0):
    """Stacked 0/1 residue-class rows, one block per modulus, as a dense matrix."""
    idx = np.arange(N) + start
    blocks = [(idx[None, :] % u == np.arange(u)[:, None]).astype(float) for u in moduli]
    return np.vstack(blocks)


def direct_dft(samples):
    u = len(samples)
    return np.array([sum(samples[l] * cmath.exp(-2j * math.pi * h * l / u) for l in range(u)) / u for h in range(u)])


def centered_band(N):
    return list(range(1 - (N + 1) // 2, N // 2 + 1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def record_criterion(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
