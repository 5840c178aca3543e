"""Walk trajectories through a frozen or interval-coupled arrow field.

A path starting at (x0, t0) reads the arrow at its current site at every
discrete time level and steps right or left accordingly.  Two flavours:
`trace` freezes the dynamical time, `trace_drifted` reads the sup of each
arrow over a dynamical window, which yields a right-drifting walk that
dominates every frozen trace in the window (the monotone coupling used
for tameness bounds and interval covers).
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ._rng import stream_key
from .field import Site, _arrow_at, _arrow_or, _check_site, _check_tau

#: comparison slack for float square-root boundaries; ties count as above
BOUNDARY_MARGIN = 2.0 ** -40


@dataclass(frozen=True)
class WalkPath:
    """Traced trajectory: start site plus the +-1 step sequence."""

    start: Site
    steps: np.ndarray
    positions: np.ndarray

    def __len__(self):
        return len(self.steps)

    def pos(self, k):
        return int(self.positions[k])


@dataclass(frozen=True)
class Boundary:
    """Moving barrier t -> -j - K*sqrt(t)."""

    j: float
    K: float

    def __post_init__(self):
        if self.j < 0 or self.K < 0:
            raise ValueError("j and K must be nonnegative")

    def value(self, t):
        return -self.j - self.K * math.sqrt(t)


@njit(cache=True, nogil=True)
def _trace(seed, tau, x0, t0, n, out):
    x = x0
    out[0] = x
    for k in range(n):
        x += _arrow_at(seed, x, t0 + k, tau)
        out[k + 1] = x


@njit(cache=True, nogil=True)
def _trace_or(seed, lo, hi, x0, t0, n, out):
    x = x0
    out[0] = x
    for k in range(n):
        x += _arrow_or(seed, x, t0 + k, lo, hi)
        out[k + 1] = x


@njit(cache=True, nogil=True)
def _trace_endpoints_batch(seed, tau, n, reps, out):
    """Endpoints of origin traces in `reps` fresh fields (replicate r uses
    the child stream keyed by r)."""
    for r in range(reps):
        child = stream_key(seed, r, 3)
        x = 0
        for k in range(n):
            x += _arrow_at(child, x, k, tau)
        out[r] = x


@njit(cache=True, nogil=True)
def _pair_meet_step(seed, tau, xa, xb, t0, n):
    """First step index where the two traced paths meet, or -1.

    Walks both trajectories together and stops at coalescence, which is
    what keeps no-coalescence tail estimation cheap.
    """
    a, b = xa, xb
    for k in range(n):
        a += _arrow_at(seed, a, t0 + k, tau)
        b += _arrow_at(seed, b, t0 + k, tau)
        if a == b:
            return k + 1
    return -1


def _as_path(start, positions):
    steps = np.diff(positions).astype(np.int8)
    return WalkPath(start=start, steps=steps, positions=positions)


def trace(field, tau, start, n_steps):
    """Trace the walk from `start` for n_steps at frozen dynamical time tau."""
    start = Site(*start)
    _check_site(start.x, start.t)
    _check_tau(tau, field.tau_max)
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    out = np.empty(n_steps + 1, dtype=np.int64)
    _trace(field.seed, float(tau), start.x, start.t, int(n_steps), out)
    return _as_path(start, out)


def trace_drifted(field, lo, hi, start, n_steps):
    """Trace against the sup-arrow configuration over [lo, hi].

    Each step is +1 with probability 1 - exp(-(hi-lo)/2)/2 and the result
    dominates trace(field, tau, ...) pointwise for every tau in [lo, hi].
    """
    start = Site(*start)
    _check_site(start.x, start.t)
    if not 0.0 <= lo <= hi <= field.tau_max:
        raise ValueError(f"bad coupling window [{lo}, {hi}] for tau_max={field.tau_max}")
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    out = np.empty(n_steps + 1, dtype=np.int64)
    _trace_or(field.seed, float(lo), float(hi), start.x, start.t, int(n_steps), out)
    return _as_path(start, out)


def coalescence_time(p, q):
    """Smallest k with p.pos(k) == q.pos(k), or None if they never meet.

    Both paths must start on the same time level and have equal length;
    once they meet they read identical arrows and coincide forever.
    """
    if p.start.t != q.start.t:
        raise ValueError("paths must start on the same time level")
    if len(p) != len(q):
        raise ValueError("paths must have equal step counts")
    eq = np.nonzero(p.positions == q.positions)[0]
    if len(eq) == 0:
        return None
    return int(eq[0])


def stays_above(path, boundary):
    """True iff pos(k) >= -j - K*sqrt(k) for every k up to the horizon.

    Finite-horizon surrogate of the subdiffusivity predicate; equality
    counts as above, with a 2**-40 slack absorbing float noise in the
    square root.
    """
    k = np.arange(len(path.positions), dtype=np.float64)
    barrier = -boundary.j - boundary.K * np.sqrt(k)
    return bool(np.all(path.positions >= barrier - BOUNDARY_MARGIN))


def boundary_gamma(gamma, t):
    """Concatenated left-boundary value at time t for growth ratio gamma."""
    if gamma <= 2:
        raise ValueError("gamma must be > 2")
    if t < 0:
        raise ValueError("t must be >= 0")
    from .boxes import boxes_covering

    boxes = boxes_covering(gamma, int(t))
    for b in boxes:
        if b.t <= t < b.t_next:
            return b.left
    raise AssertionError("unreachable: boxes_covering always spans t")
