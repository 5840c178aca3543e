import math

import pytest

from dydw._rng import derive_seed
from dydw.field import ArrowField
from dydw.sweep import TauIntervalSet, exceptional_set_En
from dydw import experiments as E

LN2 = math.log(2.0)


def test_correlation_decay_gates_and_fit():
    r = E.correlation_decay(
        [1 / 8, 1 / 16], [0.125, 0.25, 0.5, 1.0, 2.0], replicates=20_000, seed=21
    )
    assert r.gate("excess_nonnegative").passed
    assert r.gate("vanishes_at_small_Delta").passed
    assert r.gate("positive_decay_exponent").passed
    assert r.fits["exponent_a"] > 0
    assert r.fits["n_cells"] >= 3
    assert r.passed


def test_correlation_decay_perfect_correlation_at_s0():
    # s = 0 means tau = tau': excess = p - p^2 > 0 by construction
    r = E.correlation_decay([1 / 8], [1e-12], replicates=5_000, seed=22)
    c = r.cells[0]
    assert c["excess"] > 0.1
    assert c["p_joint"] == pytest.approx(c["p_marginal"], abs=0.02)


def test_sticky_equivalence_passes():
    r = E.sticky_equivalence(LN2, 60, 20_000, seed=23, t_checks=(10, 50))
    assert r.passed
    for c in r.cells:
        if "z" in c:
            assert abs(c["z"]) <= 3.0


def test_sticky_equivalence_decorrelates_at_large_s():
    r = E.sticky_equivalence(50.0, 40, 20_000, seed=24, t_checks=(10,))
    cov_cell = [c for c in r.cells if "endpoint_cov_direct" in c][0]
    se = math.sqrt(40.0 * 40.0 * 2 / 20_000)  # conservative for +-1 products
    assert abs(cov_cell["endpoint_cov_sampler"]) <= 3.0 * se
    assert r.passed


def test_sticky_equivalence_s0_trivial():
    r = E.sticky_equivalence(0.0, 50, 100, seed=25)
    assert r.passed


def test_en_statistics_fubini_and_monotone():
    r = E.En_statistics(6.0, 2, 1.0, replicates=4000, seed=5)
    assert r.gate("fubini_product").passed
    assert r.gate("mean_measure_monotone").passed
    cells = {c["n_boxes"]: c for c in r.cells}
    assert cells[2]["mean_measure"] <= cells[1]["mean_measure"]
    assert cells[1]["nonempty_fraction"] > 0


def test_en_statistics_single_event_matches_pak():
    # n_boxes = 1: mean Leb = P(A_0) = 1/16 by stationarity
    r = E.En_statistics(6.0, 1, 1.0, replicates=3000, seed=26)
    c = r.cells[0]
    assert abs(c["mean_measure"] - 1.0 / 16.0) <= 3.0 * c["se_mean_measure"]
    assert r.passed


def test_product_ratio_check():
    r = E.product_ratio_check(6.0, [0.3, 1.0, 5.0], 1, replicates=10_000, seed=27)
    assert r.passed
    assert r.fits["b_theory"] > 0
    prods = r.fits["running_product"]
    # stickier pairs correlate more: the product grows as s shrinks
    assert prods["0.3"] > prods["5.0"]


def test_product_ratio_shrinks_past_N0():
    r = E.product_ratio_check(6.0, [0.25], 2, replicates=30_000, seed=28)
    cells = sorted((c for c in r.cells if c["s"] == 0.25), key=lambda c: c["k"])
    # excess over independence decays with the box index past N0
    excess = [c["ratio"] - 1.0 for c in cells]
    n0 = cells[0]["N0"]
    assert n0 <= 1
    assert excess[-1] <= excess[0] + 3.0 * cells[-1]["se_ratio"]


def test_tameness_probe_gates():
    r = E.tameness_probe(
        [64, 128, 256],
        1.0,
        80,
        seed=11,
        level=6,
        m_cells=8,
        conf_K=0.5,
        conf_j=6.0,
        conf_horizons=(64, 512),
    )
    assert r.passed
    level_cells = [c for c in r.cells if "horizon" in c]
    assert all(c["mean_cell_hit_fraction"] <= c["drifted_cell_bound"] + 3 * c["se_cell_hit"] + 1e-12 for c in level_cells)
    conf_cells = [c for c in r.cells if "conf_horizon" in c]
    assert conf_cells[-1]["mean_measure"] < conf_cells[0]["mean_measure"]


def test_tameness_probe_unreachable_level():
    r = E.tameness_probe([16], 0.5, 30, seed=12, level=18, m_cells=4, conf_horizons=(8, 16))
    cell = [c for c in r.cells if "horizon" in c][0]
    assert cell["mean_measure_fraction"] == 0.0
    assert cell["p_static_exact"] == 0.0


def test_dimension_boxcount_calibration():
    eps_grid = [2.0**-e for e in range(2, 10)]
    full = [TauIntervalSet(((0.0, 1.0),), 1.0)] * 5
    dots = [
        TauIntervalSet(tuple((x, x + 1e-9) for x in (0.1, 0.35, 0.8)), 1.0)
    ] * 5
    r = E.dimension_boxcount({"full": full, "dots": dots}, eps_grid)
    assert r.fits["full"]["slope"] == pytest.approx(1.0, abs=0.05)
    assert abs(r.fits["dots"]["slope"]) <= 0.05
    assert r.passed


def test_dimension_boxcount_requires_two_decades():
    with pytest.raises(ValueError):
        E.dimension_boxcount({"x": []}, [0.5, 0.25])


def test_dimension_boxcount_on_swept_sets():
    eps_grid = [2.0**-e for e in range(2, 10)]
    sets_by_n = {}
    for n in (1, 2):
        sets = []
        for rep in range(300):
            f = ArrowField(derive_seed(29, n, rep), tau_max=1.0)
            sets.append(exceptional_set_En(f, 8.0, n, 1.0))
        sets_by_n[f"n{n}"] = sets
    r = E.dimension_boxcount(sets_by_n, eps_grid)
    s1 = r.fits["n1"]["slope"]
    s2 = r.fits["n2"]["slope"]
    assert s1 is not None and s2 is not None
    # nested sets refine: the deeper sweep cannot scale faster
    assert s2 <= s1 + 0.05


def test_reports_are_reproducible():
    a = E.sticky_equivalence(LN2, 30, 2000, seed=31, t_checks=(10,))
    b = E.sticky_equivalence(LN2, 30, 2000, seed=31, t_checks=(10,))
    assert a.to_dict() == b.to_dict()
    c = E.sticky_equivalence(LN2, 30, 2000, seed=32, t_checks=(10,))
    assert a.to_dict() != c.to_dict()


def test_reports_independent_of_worker_count():
    a = E.En_statistics(6.0, 1, 1.0, replicates=300, seed=34, workers=1)
    b = E.En_statistics(6.0, 1, 1.0, replicates=300, seed=34, workers=2)
    assert a.to_dict() == b.to_dict()


def test_report_json_round_trip():
    import json

    r = E.sticky_equivalence(LN2, 20, 500, seed=33, t_checks=(5,))
    parsed = json.loads(r.to_json())
    assert parsed["name"] == "sticky_equivalence"
    assert parsed["config"]["seed"] == 33
    assert isinstance(parsed["passed"], bool)
