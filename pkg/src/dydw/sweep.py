"""Exact dynamical-time sweeps of path predicates.

For a predicate that depends on finitely many traced paths, the set
{tau : predicate holds at tau} is a finite union of half-open intervals
whose endpoints are clock rings.  The sweep maintains the traced paths as
tau advances and processes exactly the rings that sit on a current
trajectory: rings elsewhere cannot change any traced path.  After a ring
flips an on-path arrow, only the suffix of the affected path is retraced,
and the retrace stops as soon as the new trajectory re-meets the old one
(from there on both read identical arrows).  The result is exact, not
discretized.

Two engines implement the same event order: a numba kernel for banded
predicates (per-step lower/upper bounds, covering the box events and the
confinement bands) and a pure-Python engine for arbitrary predicates.
The two are cross-checked against each other and against frozen-tau
re-evaluation in the tests.
"""

import heapq
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numba import njit, types
from numba.typed import Dict

from ._rng import uint64
from .field import Site, _arrow_at, _check_site, _flip_at, _next_ring
from .paths import BOUNDARY_MARGIN

_T_SHIFT = np.int64(2**22)  # site key = x * 2**22 + t, valid while 0 <= t < 2**22
_BIG = np.int64(2**62)


# ---------------------------------------------------------------------------
# interval sets


@dataclass(frozen=True)
class TauIntervalSet:
    """Disjoint, sorted, maximal half-open intervals inside [0, tau_max]."""

    intervals: tuple
    tau_max: float

    def __post_init__(self):
        prev = -1.0
        for a, b in self.intervals:
            if not (0.0 <= a < b <= self.tau_max):
                raise ValueError(f"bad interval [{a}, {b})")
            if a <= prev:
                raise ValueError("intervals must be sorted and non-adjacent")
            prev = b

    def __len__(self):
        return len(self.intervals)

    def is_empty(self):
        return len(self.intervals) == 0

    def contains(self, tau):
        starts = [a for a, _ in self.intervals]
        i = bisect_right(starts, tau) - 1
        return i >= 0 and tau < self.intervals[i][1]

    def measure(self):
        return float(sum(b - a for a, b in self.intervals))

    def cover_count(self, eps):
        """Number of grid cells [2*eps*i, 2*eps*(i+1)) meeting the set."""
        if eps <= 0:
            raise ValueError("eps must be positive")
        w = 2.0 * eps
        count = 0
        last = -1
        for a, b in self.intervals:
            i0 = int(math.floor(a / w))
            while w * (i0 + 1) <= a:
                i0 += 1
            i1 = int(math.ceil(b / w)) - 1
            while w * i1 >= b:
                i1 -= 1
            i0 = max(i0, last + 1)
            if i1 >= i0:
                count += i1 - i0 + 1
                last = i1
        return count

    def is_subset_of(self, other):
        return all(
            any(oa <= a and b <= ob for oa, ob in other.intervals) for a, b in self.intervals
        )


def measure(s):
    return s.measure()


def cover_count(s, eps):
    return s.cover_count(eps)


def _assemble(bt, bv, tau_max):
    ivs = []
    m = len(bt)
    for i in range(m):
        a = float(bt[i])
        b = float(bt[i + 1]) if i + 1 < m else tau_max
        if a >= b or not bv[i]:
            continue
        if ivs and ivs[-1][1] == a:
            ivs[-1] = (ivs[-1][0], b)
        else:
            ivs.append((a, b))
    return TauIntervalSet(intervals=tuple(ivs), tau_max=tau_max)


# ---------------------------------------------------------------------------
# predicate specifications


@dataclass(frozen=True)
class BandSpec:
    """Conjunction over paths of per-step inclusive position bands."""

    starts: tuple
    lower: tuple
    upper: tuple

    @property
    def n_steps(self):
        return tuple(len(lo) - 1 for lo in self.lower)

    def evaluate(self, positions):
        for pos, lo, hi in zip(positions, self.lower, self.upper):
            if np.any(pos < lo) or np.any(pos > hi):
                return False
        return True


@dataclass(frozen=True)
class PredicateSpec:
    """Arbitrary predicate over a finite family of traced paths.

    `fn` receives the list of position arrays (one per start, in order)
    and must depend on nothing else: finite dependence is what makes the
    sweep exact.
    """

    starts: tuple
    n_steps: tuple
    fn: Callable[[Sequence[np.ndarray]], bool]


@dataclass(frozen=True)
class SweepStats:
    pops: int
    processed: int
    flips: int
    retrace_steps: int


# ---------------------------------------------------------------------------
# numba band engine


@njit(cache=True, nogil=True)
def _heap_push(ht, hx, hy, hn, t, x, y):
    cap = ht.shape[0]
    if hn >= cap:
        nt = np.empty(cap * 2, np.float64)
        nt[:cap] = ht
        ht = nt
        nx = np.empty(cap * 2, np.int64)
        nx[:cap] = hx
        hx = nx
        ny = np.empty(cap * 2, np.int64)
        ny[:cap] = hy
        hy = ny
    i = hn
    ht[i] = t
    hx[i] = x
    hy[i] = y
    while i > 0:
        p = (i - 1) >> 1
        if ht[p] <= ht[i]:
            break
        ht[p], ht[i] = ht[i], ht[p]
        hx[p], hx[i] = hx[i], hx[p]
        hy[p], hy[i] = hy[i], hy[p]
        i = p
    return ht, hx, hy, hn + 1


@njit(cache=True, nogil=True)
def _heap_drop_root(ht, hx, hy, hn):
    hn -= 1
    ht[0] = ht[hn]
    hx[0] = hx[hn]
    hy[0] = hy[hn]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= hn:
            break
        m = l
        r = l + 1
        if r < hn and ht[r] < ht[l]:
            m = r
        if ht[i] <= ht[m]:
            break
        ht[i], ht[m] = ht[m], ht[i]
        hx[i], hx[m] = hx[m], hx[i]
        hy[i], hy[m] = hy[m], hy[i]
        i = m
    return hn


@njit(cache=True, nogil=True)
def _sweep_band_kernel(seed, tau_max, sx, st, ns, off, lob, hib):
    P = sx.shape[0]
    H = off[P]
    pos = np.empty(H, dtype=np.int64)
    viol = np.zeros(P, dtype=np.int64)

    for p in range(P):
        base = off[p]
        n = ns[p]
        x = sx[p]
        pos[base] = x
        if x < lob[base] or x > hib[base]:
            viol[p] += 1
        for i in range(n):
            x += _arrow_at(seed, x, st[p] + i, 0.0)
            pos[base + i + 1] = x
            if x < lob[base + i + 1] or x > hib[base + i + 1]:
                viol[p] += 1

    live = Dict.empty(types.int64, types.uint8)
    cap = 2 * H + 64
    ht = np.empty(cap, np.float64)
    hx = np.empty(cap, np.int64)
    hy = np.empty(cap, np.int64)
    hn = 0

    for p in range(P):
        base = off[p]
        for i in range(ns[p]):
            x = pos[base + i]
            t = st[p] + i
            key = x * _T_SHIFT + t
            if live.get(key, np.uint8(0)) == np.uint8(0):
                nr = _next_ring(seed, x, t, 0.0)
                if nr < tau_max:
                    ht, hx, hy, hn = _heap_push(ht, hx, hy, hn, nr, x, t)
                    live[key] = np.uint8(1)

    cur = True
    for p in range(P):
        if viol[p] != 0:
            cur = False
            break

    bcap = 64
    bt = np.empty(bcap, np.float64)
    bv = np.empty(bcap, np.uint8)
    nb = 0
    bt[0] = 0.0
    bv[0] = np.uint8(1) if cur else np.uint8(0)
    nb = 1

    aff = np.empty(P, np.int64)
    n_pops = 0
    n_proc = 0
    n_flips = 0
    n_steps_re = 0

    while hn > 0:
        r = ht[0]
        x = hx[0]
        t = hy[0]
        hn = _heap_drop_root(ht, hx, hy, hn)
        n_pops += 1
        key = x * _T_SHIFT + t

        cnt = 0
        for p in range(P):
            i = t - st[p]
            if 0 <= i < ns[p] and pos[off[p] + i] == x:
                aff[cnt] = p
                cnt += 1
        if cnt == 0:
            live[key] = np.uint8(0)
            continue
        n_proc += 1

        old, new = _flip_at(seed, x, t, r)
        if old != new:
            n_flips += 1
            for a in range(cnt):
                p = aff[a]
                base = off[p]
                t0 = st[p]
                n = ns[p]
                i = t - t0
                newx = pos[base + i] + new
                j = i + 1
                while True:
                    oldx = pos[base + j]
                    if newx == oldx:
                        break
                    if oldx < lob[base + j] or oldx > hib[base + j]:
                        viol[p] -= 1
                    if newx < lob[base + j] or newx > hib[base + j]:
                        viol[p] += 1
                    pos[base + j] = newx
                    n_steps_re += 1
                    if j == n:
                        break
                    k2 = newx * _T_SHIFT + (t0 + j)
                    if live.get(k2, np.uint8(0)) == np.uint8(0):
                        nr = _next_ring(seed, newx, t0 + j, r)
                        if nr < tau_max:
                            ht, hx, hy, hn = _heap_push(ht, hx, hy, hn, nr, newx, t0 + j)
                            live[k2] = np.uint8(1)
                    newx = newx + _arrow_at(seed, newx, t0 + j, r)
                    j += 1
            val = True
            for p in range(P):
                if viol[p] != 0:
                    val = False
                    break
            if val != cur:
                if nb >= bcap:
                    nbt = np.empty(bcap * 2, np.float64)
                    nbt[:bcap] = bt
                    bt = nbt
                    nbv = np.empty(bcap * 2, np.uint8)
                    nbv[:bcap] = bv
                    bv = nbv
                    bcap *= 2
                bt[nb] = r
                bv[nb] = np.uint8(1) if val else np.uint8(0)
                nb += 1
                cur = val

        # the flip site stays on every affected trajectory; chain its cursor
        nr = _next_ring(seed, x, t, r)
        if nr < tau_max:
            ht, hx, hy, hn = _heap_push(ht, hx, hy, hn, nr, x, t)
            live[key] = np.uint8(1)
        else:
            live[key] = np.uint8(0)

    stats = np.array([n_pops, n_proc, n_flips, n_steps_re], dtype=np.int64)
    return bt[:nb].copy(), bv[:nb].copy(), stats


@njit(cache=True, nogil=True)
def _retrace_collect(seed, tau, t0, pos, i, new_sign, out_x, out_t):
    """Retrace one path's suffix after a flip of step i; stops at re-merge.

    Writes positions in place, collects the newly visited read-sites, and
    returns (last index written, number of collected sites).
    """
    n = pos.shape[0] - 1
    newx = pos[i] + new_sign
    j = i + 1
    m = 0
    while True:
        if newx == pos[j]:
            return j, m
        pos[j] = newx
        if j == n:
            return j, m
        out_x[m] = newx
        out_t[m] = t0 + j
        m += 1
        newx = newx + _arrow_at(seed, newx, t0 + j, tau)
        j += 1


# ---------------------------------------------------------------------------
# engines


def _validate_starts(field, starts, n_steps, tau_max):
    if not 0.0 < tau_max <= field.tau_max:
        raise ValueError(f"tau_max={tau_max} outside (0, {field.tau_max}]")
    for (sx, stt), n in zip(starts, n_steps):
        _check_site(sx, stt)
        if n < 0:
            raise ValueError("n_steps must be >= 0")
        if not (0 <= stt and stt + n < int(_T_SHIFT)):
            raise ValueError("path time range outside supported window")


def _sweep_band(field, spec, tau_max, return_stats):
    starts = [Site(*s) for s in spec.starts]
    ns = np.array([len(lo) - 1 for lo in spec.lower], dtype=np.int64)
    _validate_starts(field, starts, ns, tau_max)
    P = len(starts)
    off = np.zeros(P + 1, dtype=np.int64)
    for p in range(P):
        off[p + 1] = off[p] + ns[p] + 1
    lob = np.concatenate([np.asarray(lo, dtype=np.int64) for lo in spec.lower])
    hib = np.concatenate([np.asarray(hi, dtype=np.int64) for hi in spec.upper])
    sx = np.array([s.x for s in starts], dtype=np.int64)
    st = np.array([s.t for s in starts], dtype=np.int64)
    bt, bv, stats = _sweep_band_kernel(
        uint64(field.seed), float(tau_max), sx, st, ns, off, lob, hib
    )
    out = _assemble(bt, bv, tau_max)
    if return_stats:
        return out, SweepStats(*[int(v) for v in stats])
    return out


def _sweep_generic(field, spec, tau_max, return_stats):
    starts = [Site(*s) for s in spec.starts]
    ns = list(spec.n_steps)
    _validate_starts(field, starts, ns, tau_max)
    seed = uint64(field.seed)
    P = len(starts)
    positions = []
    for p in range(P):
        out = np.empty(ns[p] + 1, dtype=np.int64)
        x = starts[p].x
        out[0] = x
        for i in range(ns[p]):
            x += _arrow_at(seed, x, starts[p].t + i, 0.0)
            out[i + 1] = x
        positions.append(out)
    bufx = [np.empty(ns[p] + 1, dtype=np.int64) for p in range(P)]
    buft = [np.empty(ns[p] + 1, dtype=np.int64) for p in range(P)]

    heap = []
    live = {}

    def subscribe(x, t, after):
        if live.get((x, t)):
            return
        nr = _next_ring(seed, x, t, after)
        if nr < tau_max:
            heapq.heappush(heap, (nr, x, t))
            live[(x, t)] = True

    for p in range(P):
        for i in range(ns[p]):
            subscribe(int(positions[p][i]), starts[p].t + i, 0.0)

    cur = bool(spec.fn(positions))
    bt = [0.0]
    bv = [cur]
    n_pops = n_proc = n_flips = n_re = 0

    while heap:
        r, x, t = heapq.heappop(heap)
        n_pops += 1
        aff = [
            p
            for p in range(P)
            if 0 <= t - starts[p].t < ns[p] and positions[p][t - starts[p].t] == x
        ]
        if not aff:
            live[(x, t)] = False
            continue
        n_proc += 1
        old, new = _flip_at(seed, x, t, r)
        if old != new:
            n_flips += 1
            for p in aff:
                i = t - starts[p].t
                jend, m = _retrace_collect(
                    seed, r, starts[p].t, positions[p], i, new, bufx[p], buft[p]
                )
                n_re += jend - i
                for q in range(m):
                    subscribe(int(bufx[p][q]), int(buft[p][q]), r)
            val = bool(spec.fn(positions))
            if val != cur:
                bt.append(r)
                bv.append(val)
                cur = val
        nr = _next_ring(seed, x, t, r)
        if nr < tau_max:
            heapq.heappush(heap, (nr, x, t))
            live[(x, t)] = True
        else:
            live[(x, t)] = False

    out = _assemble(bt, bv, tau_max)
    if return_stats:
        return out, SweepStats(n_pops, n_proc, n_flips, n_re)
    return out


def sweep_predicate(field, spec, tau_max=None, return_stats=False):
    """Exact {tau in [0, tau_max) : predicate holds} as a TauIntervalSet.

    BandSpec predicates run in the compiled engine; PredicateSpec runs the
    same event order in Python with an arbitrary predicate callable.
    """
    if tau_max is None:
        tau_max = field.tau_max
    if isinstance(spec, BandSpec):
        return _sweep_band(field, spec, float(tau_max), return_stats)
    if isinstance(spec, PredicateSpec):
        return _sweep_generic(field, spec, float(tau_max), return_stats)
    raise TypeError(f"unsupported spec type {type(spec)!r}")


# ---------------------------------------------------------------------------
# banded predicate builders


def always_true_spec(start, n_steps):
    lo = np.full(n_steps + 1, -_BIG, dtype=np.int64)
    hi = np.full(n_steps + 1, _BIG, dtype=np.int64)
    return BandSpec(starts=(Site(*start),), lower=(lo,), upper=(hi,))


def box_events_spec(gamma, n_boxes):
    """Band spec for the conjunction of the first `n_boxes` box events.

    Event k lives on the path from anchor k over d_k**2 steps: stay
    strictly right of the box's left edge, end strictly right of the next
    anchor.  n_boxes counts events A_0 .. A_{n_boxes-1}.
    """
    from .boxes import box_sequence

    boxes = box_sequence(gamma, n_boxes)
    starts, lowers, uppers = [], [], []
    for k in range(n_boxes):
        b, nxt = boxes[k], boxes[k + 1]
        n = b.height
        lo = np.full(n + 1, b.left + 1, dtype=np.int64)
        lo[n] = nxt.x + 1
        hi = np.full(n + 1, _BIG, dtype=np.int64)
        starts.append(Site(b.x, b.t))
        lowers.append(lo)
        uppers.append(hi)
    return BandSpec(starts=tuple(starts), lower=tuple(lowers), upper=tuple(uppers))


def confinement_spec(j, K1, K2, horizon):
    """Two-sided band -j - K1*sqrt(t) <= pos <= j + K2*sqrt(t) from the origin."""
    t = np.arange(horizon + 1, dtype=np.float64)
    lo = np.ceil(-j - K1 * np.sqrt(t) - BOUNDARY_MARGIN).astype(np.int64)
    hi = np.floor(j + K2 * np.sqrt(t) + BOUNDARY_MARGIN).astype(np.int64)
    return BandSpec(starts=(Site(0, 0),), lower=(lo,), upper=(hi,))


def stays_above_spec(j, K, horizon):
    """One-sided band pos >= -j - K*sqrt(t) from the origin."""
    t = np.arange(horizon + 1, dtype=np.float64)
    lo = np.ceil(-j - K * np.sqrt(t) - BOUNDARY_MARGIN).astype(np.int64)
    hi = np.full(horizon + 1, _BIG, dtype=np.int64)
    return BandSpec(starts=(Site(0, 0),), lower=(lo,), upper=(hi,))


def exceptional_set_En(field, K, n_boxes, tau_max=None, return_stats=False):
    """Exact tau-set where the first n_boxes box events all occur.

    `n_boxes` counts events: n_boxes = 3 sweeps A_0, A_1, A_2 over the
    geometry of box_sequence(gamma(K), 3).  Monotone decreasing in
    n_boxes on a fixed field.
    """
    from .numerics import gamma_of_K

    if n_boxes < 0:
        raise ValueError("n_boxes must be >= 0")
    if tau_max is None:
        tau_max = field.tau_max
    if n_boxes == 0:
        return (
            (TauIntervalSet(((0.0, float(tau_max)),), float(tau_max)), SweepStats(0, 0, 0, 0))
            if return_stats
            else TauIntervalSet(((0.0, float(tau_max)),), float(tau_max))
        )
    gamma = gamma_of_K(K).value
    spec = box_events_spec(gamma, n_boxes)
    return sweep_predicate(field, spec, tau_max, return_stats)


def confinement_sweep(field, j, K1, K2, horizon, tau_max=None, return_stats=False):
    """Exact tau-set where the origin path stays in the two-sided band."""
    if K1 <= 0 or K2 <= 0:
        raise ValueError("K1 and K2 must be positive")
    if tau_max is None:
        tau_max = field.tau_max
    spec = confinement_spec(j, K1, K2, horizon)
    return sweep_predicate(field, spec, tau_max, return_stats)
