import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import enumerate_box_event_prob, exact_box_event_prob

from dydw._rng import derive_seed
from dydw.boxes import (
    BROWNIAN_BOX_PROB,
    box_sequence,
    boxes_covering,
    estimate_PAk,
    event_Ak,
    event_from_positions,
    gamma0_hat,
    left_boundary_profile,
)
from dydw.field import ArrowField, Site
from dydw.paths import trace


def test_box_sequence_hand_values_gamma3():
    boxes = box_sequence(3.0, 3)
    assert [b.d for b in boxes] == [2, 4, 10, 28]
    assert [(b.x, b.t) for b in boxes] == [(0, 0), (2, 4), (6, 20), (16, 120)]
    assert boxes[2].t_next == 120
    assert boxes[0].height == 4 and boxes[0].width == 4 and boxes[0].left == -2


def test_box_sequence_domain():
    with pytest.raises(ValueError):
        box_sequence(2.0, 3)
    with pytest.raises(ValueError):
        box_sequence(3.0, -1)


def test_anchor_parity():
    for gamma in (2.5, 3.0, 7.0):
        for b in box_sequence(gamma, 20):
            assert (b.x + b.t) % 2 == 0
            assert b.d % 2 == 0


def test_side_parameter_bounds():
    # floor arithmetic pins gamma^k <= d_k <= gamma^k + 2; compare in
    # exact arithmetic (float g + 2.0 rounds away once ulp(g) > 2)
    for gamma in (2.5, 3.0, 7.0):
        g = 1.0
        for b in box_sequence(gamma, 20):
            exact = Fraction(g)
            assert exact <= b.d <= exact + 2
            g *= gamma


def test_boundary_profile_matches_segments():
    boxes = boxes_covering(3.0, 1000)
    prof = left_boundary_profile(3.0, 1000)
    for b in boxes:
        for t in (b.t, min(b.t_next - 1, 1000)):
            if t <= 1000:
                assert prof[t] == b.left


def test_event_from_positions_strictness():
    d = 2
    up = np.array([0, 1, 2, 3, 4])
    assert event_from_positions(up, d, 0, d)
    down = np.array([0, -1, -2, -3, -4])
    assert not event_from_positions(down, d, 0, d)
    # touching the left edge fails (strict), ending exactly at next_x fails
    touch = np.array([0, -1, -2, -1, 0])
    assert not event_from_positions(touch, d, 0, d)
    flat = np.array([0, 1, 0, 1, 2])
    assert not event_from_positions(flat, d, 0, d)
    with pytest.raises(ValueError):
        event_from_positions(np.array([0, 1]), d, 0, d)


def test_event_Ak_consistent_with_trace():
    f = ArrowField(44, tau_max=1.0)
    boxes = box_sequence(3.0, 2)
    for k in (0, 1):
        b, nxt = boxes[k], boxes[k + 1]
        path = trace(f, 0.25, Site(b.x, b.t), b.height)
        expect = bool(path.positions.min() > b.left and path.positions[-1] > nxt.x)
        assert event_Ak(f, 0.25, 3.0, k) == expect


def test_reflection_formula_equals_enumeration():
    # the bridge-reflection count is exact; verify against brute force
    for n, d in ((8, 2), (12, 2), (14, 4)):
        assert exact_box_event_prob(n, d) == enumerate_box_event_prob(n, d)


def test_pa0_is_one_sixteenth():
    # d_0 = 2: the event requires S(4) = 4, i.e. four up-steps
    assert exact_box_event_prob(4, 2) == Fraction(1, 16)
    est = estimate_PAk(3.0, 0, 40_000, 5, method="field")
    p = 1.0 / 16.0
    assert abs(est.p_hat - p) <= 3.0 * math.sqrt(p * (1 - p) / est.replicates)


def test_estimate_single_replicate():
    est = estimate_PAk(3.0, 0, 1, 12, method="field")
    assert est.p_hat in (0.0, 1.0)
    assert est.se == 0.0


def test_field_and_bridge_routes_agree_with_exact():
    # gamma=3, k=2: d=10, horizon 100; exact value from reflection counts
    p_exact = float(exact_box_event_prob(100, 10))
    walk = estimate_PAk(3.0, 2, 30_000, 101, method="field")
    bridge = estimate_PAk(3.0, 2, 200_000, 102, method="bridge")
    assert abs(walk.p_hat - p_exact) <= 3.0 * walk.se
    assert abs(bridge.p_hat - p_exact) <= 3.0 * bridge.se


def test_deep_box_approaches_brownian_value():
    est = estimate_PAk(3.0, 8, 100_000, 7, method="auto")
    assert est.method == "bridge"
    assert abs(est.p_hat - BROWNIAN_BOX_PROB) <= 3.0 * est.se


def test_event_independence_across_boxes():
    # disjoint arrow sets: indicator covariance compatible with 0
    reps = 20_000
    a = np.empty(reps, dtype=np.float64)
    b = np.empty(reps, dtype=np.float64)
    for r in range(reps):
        f = ArrowField(derive_seed(606, r), tau_max=1e-9)
        a[r] = event_Ak(f, 0.0, 3.0, 0)
        b[r] = event_Ak(f, 0.0, 3.0, 1)
    cov = np.mean(a * b) - a.mean() * b.mean()
    se = np.std(a * b - a.mean() * b) / math.sqrt(reps)
    assert abs(cov) <= 3.0 * se


def test_gamma0_hat_grid():
    est = gamma0_hat([3.0], [0, 2, 8], 100_000, 99, method="bridge")
    # the k=0 cell has 1/p = 16, so any grid containing it clears the
    # Brownian-limit floor 1/0.15731 = 6.357
    assert est.value >= 1.0 / 0.15731
    assert est.value == pytest.approx(16.0, rel=0.05)
    assert est.upper_confidence >= est.value
    assert len(est.cells) == 3


def test_gamma0_hat_zero_successes_fallback():
    est = estimate_PAk(3.0, 2, 4, 1234, method="bridge")
    # upper_inverse never divides by zero even with no successes
    assert math.isfinite(est.upper_inverse())
