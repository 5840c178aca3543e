import math

import numpy as np
import pytest

from dydw._rng import derive_seed, uint64
from dydw.field import ArrowField, Site
from dydw.paths import (
    Boundary,
    WalkPath,
    _trace_endpoints_batch,
    boundary_gamma,
    coalescence_time,
    stays_above,
    trace,
    trace_drifted,
)
from dydw.sticky import _pair_no_meet_counts


def path_from_steps(steps, x0=0, t0=0):
    steps = np.asarray(steps, dtype=np.int8)
    pos = np.concatenate(([x0], x0 + np.cumsum(steps)))
    return WalkPath(Site(x0, t0), steps, pos)


def test_trace_zero_steps():
    f = ArrowField(1, tau_max=1.0)
    p = trace(f, 0.5, Site(0, 0), 0)
    assert len(p) == 0
    assert p.positions.tolist() == [0]


def test_trace_reads_declared_arrows():
    f = ArrowField(5, tau_max=1.0)
    for tau in (0.0, 0.37, 1.0):
        p = trace(f, tau, Site(2, 4), 50)
        for k in range(50):
            assert p.steps[k] == f.arrow_at(Site(p.pos(k), 4 + k), tau)
            assert (p.pos(k) + 4 + k) % 2 == 0
        assert np.all(np.abs(np.diff(p.positions)) == 1)


def test_ballistic_when_all_arrows_right():
    # a sup coupling over a huge window sees +1 at every site a.s.
    f = ArrowField(9, tau_max=400.0)
    p = trace_drifted(f, 0.0, 400.0, Site(0, 0), 40)
    assert p.positions.tolist() == list(range(41))


def test_endpoint_law_diffusive():
    n, reps = 64, 100_000
    out = np.empty(reps, dtype=np.int64)
    _trace_endpoints_batch(uint64(123), 0.33, n, reps, out)
    mean = out.mean()
    var = out.var()
    assert abs(mean) <= 3.0 * math.sqrt(n / reps)
    # Var(endpoint) = n; the variance estimator has SD ~ n*sqrt(2/reps)
    assert abs(var - n) <= 3.0 * n * math.sqrt(2.0 / reps)


def test_coalescence_identical_starts():
    f = ArrowField(2, tau_max=1.0)
    p = trace(f, 0.1, Site(0, 0), 30)
    q = trace(f, 0.1, Site(0, 0), 30)
    assert coalescence_time(p, q) == 0


def test_coalescence_forced_meeting_and_merge():
    # find a field whose arrows at (0,0) and (2,0) point +1 / -1 at tau=0
    found = False
    for seed in range(200):
        f = ArrowField(seed, tau_max=1.0)
        if f.arrow_at(Site(0, 0), 0.0) == 1 and f.arrow_at(Site(2, 0), 0.0) == -1:
            found = True
            break
    assert found
    p = trace(f, 0.0, Site(0, 0), 40)
    q = trace(f, 0.0, Site(2, 0), 40)
    k = coalescence_time(p, q)
    assert k == 1
    assert np.array_equal(p.positions[k:], q.positions[k:])


def test_coalescence_validation():
    f = ArrowField(2, tau_max=1.0)
    p = trace(f, 0.1, Site(0, 0), 10)
    q = trace(f, 0.1, Site(0, 2), 10)
    with pytest.raises(ValueError):
        coalescence_time(p, q)
    r = trace(f, 0.1, Site(2, 0), 12)
    with pytest.raises(ValueError):
        coalescence_time(p, r)


def test_no_coalescence_tail_exponent():
    # difference of two walks from gap 2: P(no meeting by n) ~ c / sqrt(n)
    levels = np.array([100, 1000, 10000], dtype=np.int64)
    reps = 100_000
    counts = _pair_no_meet_counts(uint64(777), 2, levels, reps)
    frac = counts / reps
    slope = np.polyfit(np.log(levels), np.log(frac), 1)[0]
    assert abs(slope + 0.5) <= 0.05


def test_non_crossing_same_tau():
    for seed in range(50):
        f = ArrowField(derive_seed(4242, seed), tau_max=1.0)
        p = trace(f, 0.6, Site(0, 0), 80)
        q = trace(f, 0.6, Site(4, 0), 80)
        assert np.all(p.positions <= q.positions)


def test_stays_above_examples():
    b10 = Boundary(j=1.0, K=0.0)
    assert stays_above(path_from_steps([-1, +1]), b10)
    assert not stays_above(path_from_steps([-1, -1]), b10)
    b11 = Boundary(j=1.0, K=1.0)
    for steps in ([1, 1], [1, -1], [-1, 1], [-1, -1]):
        assert stays_above(path_from_steps(steps), b11)


def test_boundary_gamma_hand_values():
    for t in (0, 1, 3.9):
        assert boundary_gamma(3.0, t) == -2
    for t in (4, 10, 19):
        assert boundary_gamma(3.0, t) == -2  # x_1 - d_1 = 2 - 4
    for t in (20, 60, 119):
        assert boundary_gamma(3.0, t) == -4  # x_2 - d_2 = 6 - 10
    assert boundary_gamma(3.0, 120) == -12  # x_3 - d_3 = 16 - 28
    with pytest.raises(ValueError):
        boundary_gamma(2.0, 5)
    with pytest.raises(ValueError):
        boundary_gamma(3.0, -1)


def test_boundary_dominates_sqrt_barrier_small_grid():
    from dydw.boxes import left_boundary_profile
    from dydw.numerics import gamma_of_K

    t = np.arange(10_001, dtype=np.float64)
    for K in (0.5, 2.0):
        gamma = gamma_of_K(K).value
        prof = left_boundary_profile(gamma, 10_000)
        assert np.all(prof >= -3.0 - K * np.sqrt(t))


def test_boundary_at_gamma_three_dominates_sqrt2_barrier():
    # K = sqrt(2) maps exactly to gamma = 3
    K = math.sqrt(2.0)
    t = np.arange(100_001, dtype=np.float64)
    from dydw.boxes import left_boundary_profile

    prof = left_boundary_profile(3.0, 100_000)
    assert np.all(prof >= -3.0 - K * np.sqrt(t))


def test_trace_drifted_degenerate_window():
    f = ArrowField(8, tau_max=1.0)
    p = trace(f, 0.4, Site(0, 0), 60)
    q = trace_drifted(f, 0.4, 0.4, Site(0, 0), 60)
    assert np.array_equal(p.positions, q.positions)


def test_trace_drifted_dominates_every_frozen_time():
    taus = np.linspace(0.2, 0.8, 10)
    for seed in range(300):
        f = ArrowField(derive_seed(31337, seed), tau_max=1.0)
        up = trace_drifted(f, 0.2, 0.8, Site(0, 0), 25)
        for tau in taus:
            frozen = trace(f, float(tau), Site(0, 0), 25)
            assert np.all(frozen.positions <= up.positions)


def test_trace_drifted_step_mean():
    # window length 0.2: mean step = 1 - exp(-0.1) ~ 0.09516
    f = ArrowField(12, tau_max=1.0)
    n = 1_000_000
    p = trace_drifted(f, 0.3, 0.5, Site(0, 0), n)
    mean = p.steps.astype(np.float64).mean()
    expect = 1.0 - math.exp(-0.1)
    assert abs(mean - expect) <= 3.0 / math.sqrt(n)
