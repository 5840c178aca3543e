"""Dynamical arrow substrate over the even space-time lattice.

Each site (x, t) with x + t even carries a right/left arrow (+1/-1) that
evolves in a continuous dynamical time tau: a rate-one Poisson clock
rings and resets the arrow to a fresh uniform sign, so actual switches
happen at rate 1/2.  Schedules are generated lazily and deterministically
from (seed, x, t) with a counter-based stream, so the field behaves as a
pure function: any site can be queried at any time without touching
global state, and re-querying always yields the identical schedule.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from ._rng import draw, stream_key, to_sign, to_unit


class Site(NamedTuple):
    x: int
    t: int


@dataclass(frozen=True)
class RingSchedule:
    """Initial sign plus the (ring time, reset sign) sequence of one site."""

    initial_sign: int
    times: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.signs):
            raise ValueError("times and signs must have equal length")


def _check_site(x, t):
    if (x + t) % 2 != 0:
        raise ValueError(f"site ({x}, {t}) is not on the even lattice (x + t must be even)")


def _check_tau(tau, tau_max):
    if not 0.0 <= tau <= tau_max:
        raise ValueError(f"tau={tau} outside [0, {tau_max}]")


# Draw layout per site stream: draw 0 is the initial sign, ring i uses
# draw 2i+1 for its exponential gap and draw 2i+2 for its reset sign.
# Every kernel below regenerates rings with the same accumulation order,
# so ring times agree bit-for-bit across kernels.


@njit(cache=True, nogil=True)
def _schedule_fill(seed, x, t, tau_max, times, signs):
    key = stream_key(seed, x, t)
    init = to_sign(draw(key, 0))
    cap = times.shape[0]
    tm = 0.0
    i = 0
    while True:
        tm = tm + (-np.log(to_unit(draw(key, 2 * i + 1))))
        if tm > tau_max:
            return i, init
        if i >= cap:
            return -1, init
        times[i] = tm
        signs[i] = to_sign(draw(key, 2 * i + 2))
        i += 1


@njit(cache=True, nogil=True, inline="always")
def _arrow_at(seed, x, t, tau):
    key = stream_key(seed, x, t)
    s = to_sign(draw(key, 0))
    tm = 0.0
    i = 0
    while True:
        tm = tm + (-np.log(to_unit(draw(key, 2 * i + 1))))
        if tm > tau:
            return s
        s = to_sign(draw(key, 2 * i + 2))
        i += 1


@njit(cache=True, nogil=True, inline="always")
def _arrow_or(seed, x, t, lo, hi):
    """+1 iff the arrow is +1 at some point of [lo, hi] (sup coupling)."""
    key = stream_key(seed, x, t)
    s = to_sign(draw(key, 0))
    tm = 0.0
    i = 0
    while True:
        tm = tm + (-np.log(to_unit(draw(key, 2 * i + 1))))
        if tm > lo:
            break
        s = to_sign(draw(key, 2 * i + 2))
        i += 1
    if s == 1:
        return 1
    # rings in (lo, hi]; the value at lo already reflects any ring at lo
    while tm <= hi:
        if to_sign(draw(key, 2 * i + 2)) == 1:
            return 1
        i += 1
        tm = tm + (-np.log(to_unit(draw(key, 2 * i + 1))))
    return -1


@njit(cache=True, nogil=True, inline="always")
def _next_ring(seed, x, t, after):
    """First ring time strictly greater than `after` (+inf if the walk of
    gaps overshoots every float, which cannot happen for finite after)."""
    key = stream_key(seed, x, t)
    tm = 0.0
    i = 0
    while True:
        tm = tm + (-np.log(to_unit(draw(key, 2 * i + 1))))
        if tm > after:
            return tm
        i += 1


@njit(cache=True, nogil=True, inline="always")
def _flip_at(seed, x, t, r):
    """(sign before r, sign at r) for a site that rings exactly at r."""
    key = stream_key(seed, x, t)
    s = to_sign(draw(key, 0))
    tm = 0.0
    i = 0
    while True:
        tm = tm + (-np.log(to_unit(draw(key, 2 * i + 1))))
        if tm >= r:
            return s, to_sign(draw(key, 2 * i + 2))
        s = to_sign(draw(key, 2 * i + 2))
        i += 1


def sign_from_schedule(schedule, tau):
    """Right-continuous evaluation: reset sign of the last ring <= tau."""
    idx = np.searchsorted(schedule.times, tau, side="right")
    if idx == 0:
        return int(schedule.initial_sign)
    return int(schedule.signs[idx - 1])


class ArrowField:
    """Lazy, seed-deterministic dynamical arrow configuration.

    Logically immutable after construction.  The schedule cache is a pure
    memo: concurrent queries may race to fill it but every writer stores
    the identical value, so reads are always consistent.

    Parameters
    ----------
    seed : int
        64-bit master seed.
    tau_max : float
        Horizon of the dynamical time axis.  Queries beyond it raise.
    """

    def __init__(self, seed, tau_max=1.0):
        if tau_max <= 0:
            raise ValueError("tau_max must be positive")
        self.seed = np.uint64(int(seed) & (2**64 - 1))
        self.tau_max = float(tau_max)
        self._cache = {}

    def schedule(self, z):
        """Memoized RingSchedule of site z over [0, tau_max]."""
        z = Site(*z)
        _check_site(z.x, z.t)
        sched = self._cache.get(z)
        if sched is None:
            cap = 64 + 16 * int(np.ceil(self.tau_max))
            while True:
                times = np.empty(cap, dtype=np.float64)
                signs = np.empty(cap, dtype=np.int64)
                n, init = _schedule_fill(self.seed, z.x, z.t, self.tau_max, times, signs)
                if n >= 0:
                    break
                cap *= 2
            sched = RingSchedule(int(init), times[:n].copy(), signs[:n].copy())
            self._cache[z] = sched
        return sched

    def arrow_at(self, z, tau):
        z = Site(*z)
        _check_site(z.x, z.t)
        _check_tau(tau, self.tau_max)
        return int(_arrow_at(self.seed, z.x, z.t, tau))

    def ring_times(self, z, lo, hi):
        """Ring times of site z in the half-open window [lo, hi)."""
        if not 0.0 <= lo <= hi <= self.tau_max:
            raise ValueError(f"bad ring window [{lo}, {hi}) for tau_max={self.tau_max}")
        sched = self.schedule(z)
        a = np.searchsorted(sched.times, lo, side="left")
        b = np.searchsorted(sched.times, hi, side="left")
        return sched.times[a:b].copy()

    def arrow_or_coupling(self, z, lo, hi):
        """+1 iff arrow_at(z, tau) = +1 for some tau in [lo, hi].

        Over a window of length L the marginal law of +1 is
        1 - exp(-L/2)/2: either the arrow already points right at lo, or
        some reset in the window flips it right.
        """
        z = Site(*z)
        _check_site(z.x, z.t)
        if not 0.0 <= lo <= hi <= self.tau_max:
            raise ValueError(f"bad coupling window [{lo}, {hi}] for tau_max={self.tau_max}")
        return int(_arrow_or(self.seed, z.x, z.t, lo, hi))
