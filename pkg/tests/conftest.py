"""Shared brute-force oracles for the test suite.

These stay deliberately independent of the package implementations they
check: survival by full path enumeration, event probabilities by exact
binomial reflection counts.
"""

import math
from fractions import Fraction

import numpy as np
import pytest


def enumerate_survival_curve(K, j, n):
    """P(S(k) >= -j - K*sqrt(k) for all k <= m), m = 0..n, by enumerating
    all 2**n sign paths with numpy."""
    steps = np.empty((2**n, n), dtype=np.int8)
    masks = np.arange(2**n, dtype=np.int64)
    for k in range(n):
        steps[:, k] = np.where((masks >> k) & 1, 1, -1)
    pos = np.cumsum(steps, axis=1, dtype=np.int64)
    alive = np.ones(2**n, dtype=bool)
    out = np.empty(n + 1, dtype=np.float64)
    out[0] = 1.0
    for m in range(1, n + 1):
        barrier = -j - K * math.sqrt(m)
        alive &= pos[:, m - 1] >= barrier - 2.0**-40
        out[m] = alive.mean()
    return out


def exact_box_event_prob(n, d):
    """Exact P(S(n) > d, min_{k<=n} S(k) > -d) for an n-step simple walk,
    via the bridge reflection identity, as a Fraction."""
    total = Fraction(0)
    for y in range(d + 1, n + 1):
        if (n + y) % 2 != 0:
            continue
        up = (n + y) // 2
        paths = math.comb(n, up)
        jr = (n - 2 * d - y) // 2
        if jr >= 0:
            paths -= math.comb(n, jr)
        total += Fraction(paths, 2**n)
    return total


def enumerate_box_event_prob(n, d):
    """Same probability by direct enumeration of all 2**n paths."""
    count = 0
    for mask in range(2**n):
        pos = 0
        ok = True
        for k in range(n):
            pos += 1 if (mask >> k) & 1 else -1
            if pos <= -d:
                ok = False
                break
        if ok and pos > d:
            count += 1
    return Fraction(count, 2**n)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
