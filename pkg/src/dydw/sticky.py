"""Sticky pairs: the same walker observed at two dynamical times.

The pair (S^tau, S^tau') alternates between phases where the two paths
coincide (no clock on the shared trajectory rang inside [tau, tau')) and
phases where they move independently until meeting again.  Equivalently,
the pair is assembled from three independent simple walks: a shared walk
consumed during coincidence phases, and two independent walks consumed
during excursion phases, with geometric-tail phase lengths
P(gap >= j) = exp(-s*j), s = |tau - tau'|.  `sample_sticky_pair` builds
the pair that way; `direct_pair` traces the same object inside an actual
arrow field, and the two constructions are checked against each other.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ._rng import draw, stream_key, to_sign, to_unit, uint64
from .field import Site, _arrow_at
from .paths import WalkPath, trace

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TimeChange:
    """Discrete time change between pair time and excursion time.

    C(t) counts excursion steps among the first t; its inverse is
    t + sum of the geometric gaps spent stuck, indexed by the local time
    of the excursion difference walk at 0.
    """

    delta_t: np.ndarray
    C: np.ndarray


@dataclass(frozen=True)
class StickyPairSample:
    s: float
    horizon: int
    S_tau: WalkPath
    S_tau_prime: WalkPath
    time_change: TimeChange
    shared_positions: np.ndarray
    excursion_positions_a: np.ndarray
    excursion_positions_b: np.ndarray

    def reconstruction_residual(self):
        """Max abs error of S(t) = S_d(C(t)) + S_s(t - C(t)); 0 by construction."""
        c = self.time_change.C
        t = np.arange(self.horizon + 1)
        ra = self.excursion_positions_a[c] + self.shared_positions[t - c]
        rb = self.excursion_positions_b[c] + self.shared_positions[t - c]
        return int(
            max(
                np.abs(ra - self.S_tau.positions).max(initial=0),
                np.abs(rb - self.S_tau_prime.positions).max(initial=0),
            )
        )

    def excursion_local_time(self):
        """Coincidence count of the two excursion walks, indexed by
        excursion time (the local time driving the time change)."""
        return np.cumsum(self.excursion_positions_a == self.excursion_positions_b)


@njit(cache=True, nogil=True)
def _gap(kg, g, s, inf_gap):
    if s <= 0.0:
        return inf_gap
    v = math.floor(-math.log(to_unit(draw(kg, g))) / s)
    if v > inf_gap:
        return inf_gap
    return int(v)


@njit(cache=True, nogil=True)
def _sticky_kernel(seed, s, horizon, pos_a, pos_b, c_of_t, s_steps, da_steps, db_steps, gaps):
    ks = stream_key(seed, 101, 1)
    ka = stream_key(seed, 202, 2)
    kb = stream_key(seed, 303, 3)
    kg = stream_key(seed, 404, 4)
    inf_gap = horizon + 1
    a = 0
    b = 0
    pos_a[0] = 0
    pos_b[0] = 0
    c_of_t[0] = 0
    u = 0
    c = 0
    rem = _gap(kg, 0, s, inf_gap)
    gaps[0] = rem
    g = 1
    together = True
    for t in range(horizon):
        if together and rem == 0:
            together = False
        if together:
            stp = to_sign(draw(ks, u))
            s_steps[u] = stp
            u += 1
            a += stp
            b += stp
            rem -= 1
        else:
            sa = to_sign(draw(ka, c))
            sb = to_sign(draw(kb, c))
            da_steps[c] = sa
            db_steps[c] = sb
            c += 1
            a += sa
            b += sb
            if a == b:
                together = True
                rem = _gap(kg, g, s, inf_gap)
                gaps[g] = rem
                g += 1
        pos_a[t + 1] = a
        pos_b[t + 1] = b
        c_of_t[t + 1] = c
    return u, c, g


def sample_sticky_pair(s, horizon, seed):
    """Sample a |tau - tau'| = s sticky pair from its three-walk decomposition."""
    if s < 0:
        raise ValueError("s must be >= 0")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    h = int(horizon)
    pos_a = np.empty(h + 1, np.int64)
    pos_b = np.empty(h + 1, np.int64)
    c_of_t = np.empty(h + 1, np.int64)
    s_steps = np.zeros(h + 1, np.int64)
    da = np.zeros(h + 1, np.int64)
    db = np.zeros(h + 1, np.int64)
    gaps = np.zeros(h + 2, np.int64)
    u, c, g = _sticky_kernel(
        uint64(int(seed) & (2**64 - 1)), float(s), h, pos_a, pos_b, c_of_t, s_steps, da, db, gaps
    )
    shared = np.concatenate(([0], np.cumsum(s_steps[:u])))
    exc_a = np.concatenate(([0], np.cumsum(da[:c])))
    exc_b = np.concatenate(([0], np.cumsum(db[:c])))
    origin = Site(0, 0)
    return StickyPairSample(
        s=float(s),
        horizon=h,
        S_tau=WalkPath(origin, np.diff(pos_a).astype(np.int8), pos_a),
        S_tau_prime=WalkPath(origin, np.diff(pos_b).astype(np.int8), pos_b),
        time_change=TimeChange(delta_t=gaps[:g].copy(), C=c_of_t),
        shared_positions=shared,
        excursion_positions_a=exc_a,
        excursion_positions_b=exc_b,
    )


def direct_pair(field, tau, tau_prime, horizon):
    """The two origin paths of one field at dynamical times tau and tau'."""
    a = trace(field, tau, Site(0, 0), horizon)
    b = trace(field, tau_prime, Site(0, 0), horizon)
    return a, b


def stick_to_interval(kappa, delta):
    """Dynamical-time separation s giving rescaled stick amount kappa."""
    if kappa <= 0 or delta <= 0:
        raise ValueError("kappa and delta must be positive")
    return delta / (_SQRT2 * kappa)


def interval_to_stick(s, delta):
    if s <= 0 or delta <= 0:
        raise ValueError("s and delta must be positive")
    return delta / (_SQRT2 * s)


@dataclass(frozen=True)
class RescaledStickyPair:
    kappa: float
    delta: float
    s: float
    times: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def coincidence_fraction(self):
        return float(np.mean(self.a == self.b))


def sticky_brownian_pair(kappa, delta, horizon_units, seed):
    """Diffusive-scaling approximation of a kappa-sticky Brownian pair.

    Samples a sticky pair with s = delta / (sqrt(2) * kappa) and rescales
    space by delta and time by delta**2; converges to the continuum pair
    as delta -> 0.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must be in (0, 1]")
    if kappa <= 0:
        raise ValueError("kappa must be > 0")
    if horizon_units <= 0:
        raise ValueError("horizon_units must be > 0")
    n = int(math.ceil(horizon_units / delta**2))
    s = stick_to_interval(kappa, delta)
    pair = sample_sticky_pair(s, n, seed)
    times = np.arange(n + 1, dtype=np.float64) * delta**2
    return RescaledStickyPair(
        kappa=float(kappa),
        delta=float(delta),
        s=s,
        times=times,
        a=pair.S_tau.positions * delta,
        b=pair.S_tau_prime.positions * delta,
    )


# ---------------------------------------------------------------------------
# batch kernels used by the equivalence and decay experiments


@njit(cache=True, nogil=True)
def _direct_pair_batch(seed, s, horizon, t_checks, reps, coin, prod_sum, prod_sq):
    """Coincidence counts at checkpoints plus endpoint product moments,
    for pairs traced directly in fresh arrow fields at tau = 0 and s."""
    for r in range(reps):
        child = stream_key(seed, r, 9)
        a = 0
        b = 0
        ci = 0
        for k in range(horizon):
            a += _arrow_at(child, a, k, 0.0)
            b += _arrow_at(child, b, k, s)
            while ci < t_checks.shape[0] and t_checks[ci] == k + 1:
                if a == b:
                    coin[ci] += 1
                ci += 1
        pr = float(a) * float(b)
        prod_sum[0] += pr
        prod_sq[0] += pr * pr


@njit(cache=True, nogil=True)
def _sticky_pair_batch(seed, s, horizon, t_checks, reps, coin, prod_sum, prod_sq):
    """Same statistics from the three-walk construction."""
    for r in range(reps):
        child = stream_key(seed, r, 13)
        ks = stream_key(child, 101, 1)
        ka = stream_key(child, 202, 2)
        kb = stream_key(child, 303, 3)
        kg = stream_key(child, 404, 4)
        inf_gap = horizon + 1
        a = 0
        b = 0
        u = 0
        c = 0
        rem = _gap(kg, 0, s, inf_gap)
        g = 1
        together = True
        ci = 0
        for t in range(horizon):
            if together and rem == 0:
                together = False
            if together:
                stp = to_sign(draw(ks, u))
                u += 1
                a += stp
                b += stp
                rem -= 1
            else:
                a += to_sign(draw(ka, c))
                b += to_sign(draw(kb, c))
                c += 1
                if a == b:
                    together = True
                    rem = _gap(kg, g, s, inf_gap)
                    g += 1
            while ci < t_checks.shape[0] and t_checks[ci] == t + 1:
                if a == b:
                    coin[ci] += 1
                ci += 1
        pr = float(a) * float(b)
        prod_sum[0] += pr
        prod_sq[0] += pr * pr


@njit(cache=True, nogil=True)
def _sticky_box_event_batch(seed, s, horizon, d, reps):
    """Joint and marginal counts of the crossing event {end > d, min > -d}
    evaluated on both members of sampled sticky pairs."""
    n11 = 0
    na = 0
    nb = 0
    for r in range(reps):
        child = stream_key(seed, r, 17)
        ks = stream_key(child, 101, 1)
        ka = stream_key(child, 202, 2)
        kb = stream_key(child, 303, 3)
        kg = stream_key(child, 404, 4)
        inf_gap = horizon + 1
        a = 0
        b = 0
        min_a = 0
        min_b = 0
        u = 0
        c = 0
        rem = _gap(kg, 0, s, inf_gap)
        g = 1
        together = True
        for t in range(horizon):
            if together and rem == 0:
                together = False
            if together:
                stp = to_sign(draw(ks, u))
                u += 1
                a += stp
                b += stp
                rem -= 1
            else:
                a += to_sign(draw(ka, c))
                b += to_sign(draw(kb, c))
                c += 1
                if a == b:
                    together = True
                    rem = _gap(kg, g, s, inf_gap)
                    g += 1
            if a < min_a:
                min_a = a
            if b < min_b:
                min_b = b
        ok_a = a > d and min_a > -d
        ok_b = b > d and min_b > -d
        if ok_a:
            na += 1
        if ok_b:
            nb += 1
        if ok_a and ok_b:
            n11 += 1
    return n11, na, nb


@njit(cache=True, nogil=True)
def _pair_no_meet_counts(seed, x_gap, t_levels, reps):
    """Counts of pairs started `x_gap` apart that have not coalesced by
    each level in t_levels (walked jointly with early stop)."""
    out = np.zeros(t_levels.shape[0], np.int64)
    n_max = t_levels[t_levels.shape[0] - 1]
    for r in range(reps):
        child = stream_key(seed, r, 21)
        a = 0
        b = x_gap
        met = n_max + 1
        for k in range(n_max):
            a += _arrow_at(child, a, k, 0.0)
            b += _arrow_at(child, b, k, 0.0)
            if a == b:
                met = k + 1
                break
        for i in range(t_levels.shape[0]):
            if met > t_levels[i]:
                out[i] += 1
    return out
