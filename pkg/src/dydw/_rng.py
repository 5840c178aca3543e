"""Counter-based splittable random streams.

Every stochastic object in this package is a pure function of a 64-bit
seed.  Each lattice site (and each auxiliary stream) gets its own key,
derived by hashing (seed, x, t) with the splitmix64 finalizer.  The j-th
variate of a stream is ``finalize(key + (j+1)*GOLDEN)``, i.e. the
generator is used in counter mode: any draw of any stream is addressable
in O(1) with no global state.  This is what makes the lazy infinite
lattice reproducible and safely queryable from parallel workers.
"""

import numpy as np
from numba import njit, types
from numba import uint64

GOLDEN = uint64(0x9E3779B97F4A7C15)
_MASK64 = (1 << 64) - 1


@njit(uint64(uint64), cache=True, nogil=True, inline="always")
def mix64(z):
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(uint64(uint64, types.int64, types.int64), cache=True, nogil=True, inline="always")
def stream_key(seed, a, b):
    """128-bit-style mix of (seed, a, b) down to one 64-bit stream key."""
    h = mix64(seed + GOLDEN)
    h = mix64((h ^ uint64(a)) + GOLDEN)
    h = mix64((h ^ uint64(b)) + GOLDEN)
    return h


@njit(uint64(uint64, types.int64), cache=True, nogil=True, inline="always")
def draw(key, j):
    """j-th raw 64-bit variate of the stream with the given key."""
    return mix64(key + uint64(j + 1) * GOLDEN)


@njit(types.float64(uint64), cache=True, nogil=True, inline="always")
def to_unit(u):
    """Map a 64-bit word to a double in the open interval (0, 1)."""
    return (np.float64(u >> uint64(11)) + 0.5) * (2.0 ** -53)


@njit(types.int64(uint64), cache=True, nogil=True, inline="always")
def to_sign(u):
    return types.int64(1) if u & uint64(1) else types.int64(-1)


def derive_seed(seed, *indices):
    """Child seed for replicate/stream fan-out, pure in (seed, indices).

    Replicate r of a run always sees ``derive_seed(seed, r)`` no matter
    how many workers execute the run, which keeps outputs independent of
    scheduling.
    """
    h = np.uint64(seed & _MASK64)
    for ix in indices:
        h = stream_key(h, np.int64(ix), np.int64(0x5B))
    return int(h)
