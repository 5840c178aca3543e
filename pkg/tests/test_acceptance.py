"""Acceptance suite: one test per criterion, at the stated scales and
tolerances, printing one PASS line each (run with -s to see them)."""

import math
import time

import numpy as np

from conftest import enumerate_survival_curve

from dydw._parallel import run_replicates
from dydw._rng import derive_seed
from dydw.boxes import BROWNIAN_BOX_PROB, estimate_PAk, left_boundary_profile
from dydw.cli import EXIT_OK, run
from dydw.field import ArrowField
from dydw.numerics import (
    energy_integral_closed,
    gamma_of_K,
    log_gamma,
    p_of_K,
    survival_drifted_reweight,
    survival_symmetric,
    survival_tinf_bracket,
    theta_An,
)
from dydw.paths import trace
from dydw.sweep import box_events_spec, sweep_predicate
from dydw import experiments as E

LN2 = math.log(2.0)


def _report(n, detail):
    print(f"\nACCEPTANCE {n}: PASS  ({detail})")


def test_criterion_01_sweep_exactness_at_scale():
    # 10^3 fields, K=6, 3 box events, tau_max=1, 20 tau probes per field
    t0 = time.time()
    K, n_boxes, tau_max = 6.0, 3, 1.0
    gamma = gamma_of_K(K).value
    spec = box_events_spec(gamma, n_boxes)

    def one(rep):
        f = ArrowField(derive_seed(101, rep), tau_max=tau_max)
        swept = sweep_predicate(f, spec, tau_max)
        rng = np.random.default_rng(derive_seed(102, rep) % 2**32)
        bad = 0
        for tau in rng.uniform(0.0, tau_max, 20):
            pos = [
                trace(f, float(tau), st, n).positions
                for st, n in zip(spec.starts, spec.n_steps)
            ]
            if spec.evaluate(pos) != swept.contains(float(tau)):
                bad += 1
        return bad

    mismatches = sum(run_replicates(one, 1000))
    elapsed = time.time() - t0
    assert mismatches == 0
    assert elapsed < 120.0
    _report(1, f"0 mismatches in 20000 probes over 1000 fields, {elapsed:.1f}s < 120s")


def test_criterion_02_sticky_oracle_equivalence():
    t0 = time.time()
    r = E.sticky_equivalence(LN2, 200, 100_000, seed=201, t_checks=(10, 50, 200))
    elapsed = time.time() - t0
    assert r.passed
    zs = [abs(c["z"]) for c in r.cells if "z" in c]
    assert all(z <= 3.0 for z in zs)
    assert elapsed < 300.0
    _report(2, f"max |z| = {max(zs):.2f} over coincidence/covariance cells, {elapsed:.1f}s < 300s")


def test_criterion_03_survival_dp_vs_enumeration():
    worst = 0.0
    for K in (0.0, 0.5, 1.0, 2.0):
        table = survival_symmetric(K, 1.0, 20)
        oracle = enumerate_survival_curve(K, 1.0, 20)
        worst = max(worst, float(np.max(np.abs(table.values - oracle))))
    assert worst <= 1e-12
    _report(3, f"max |DP - enumeration| = {worst:.2e} for n <= 20, K in {{0, .5, 1, 2}}")


def test_criterion_04_closed_forms():
    assert abs(theta_An(0.75, 1) - 2.0 / 3.0) <= 1e-15
    from scipy import integrate

    def inner(t):
        if t == 0.0:
            return 0.0
        v, _ = integrate.quad(lambda tp: 1.0, 0.0, t, weight="alg", wvar=(0.0, -0.5))
        return v

    quad_val, _ = integrate.quad(inner, 0.0, 1.0, epsabs=1e-10, epsrel=1e-10, limit=200)
    e = energy_integral_closed(0.5)
    assert abs(e - 8.0 / 3.0) <= 1e-12
    assert abs(e - 2.0 * quad_val) <= 1e-6
    assert abs(math.exp(log_gamma(0.5)) - math.sqrt(math.pi)) <= 1e-12
    assert abs(math.exp(log_gamma(5.0)) - 24.0) <= 1e-12
    _report(4, "theta, energy integral vs quadrature, Gamma identities all inside tolerance")


def test_criterion_05_solver_self_consistency():
    grid = np.logspace(-2, 2, 13)
    prev = 1.0
    worst = 0.0
    for K in grid:
        r = p_of_K(float(K))
        worst = max(worst, r.residual)
        assert r.residual <= 1e-10
        assert r.value_log < prev
        prev = r.value_log
    assert p_of_K(0.01).value > 0.9
    assert p_of_K(100.0).value < 0.1
    _report(5, f"max residual {worst:.1e} on 13-point log grid, p strictly decreasing")


def test_criterion_06_boundary_lemma_deterministic():
    t_max = 1_000_000
    t = np.arange(t_max + 1, dtype=np.float64)
    barrier_ok = True
    for K in (0.5, 1.0, 2.0, 5.0, 10.0):
        gamma = gamma_of_K(K).value
        prof = left_boundary_profile(gamma, t_max)
        barrier_ok &= bool(np.all(prof >= -3.0 - K * np.sqrt(t)))
    assert barrier_ok
    _report(6, "profile >= -3 - K sqrt(t) for all integer t <= 1e6, K in {0.5,1,2,5,10}")


def test_criterion_07_brownian_limit_calibration():
    est = estimate_PAk(3.0, 8, 100_000, 7, method="bridge")
    z = (est.p_hat - BROWNIAN_BOX_PROB) / est.se
    assert abs(est.p_hat - 0.157305) <= 3.0 * est.se
    _report(7, f"P_hat(A_8) = {est.p_hat:.5f} +- {est.se:.5f}, z = {z:.2f} vs 0.157305")


def test_criterion_08_appendix_exponent():
    t0 = time.time()
    K = 1.0
    eps_grid = np.logspace(-3, -1, 9)
    vals = []
    for eps in eps_grid:
        tab = survival_tinf_bracket(float(eps), K, rel_width=0.1)
        lo, hi = tab.tinf_bracket
        mid = 0.5 * (lo + hi)
        assert hi - lo < 0.1 * mid
        vals.append(mid)
    x = np.log(eps_grid)
    A = np.vstack([x, np.ones_like(x)]).T
    slope = float(np.linalg.lstsq(A, np.log(vals), rcond=None)[0][0])
    p1 = p_of_K(K).value
    elapsed = time.time() - t0
    assert abs(slope - p1) <= 0.05
    assert elapsed < 600.0
    _report(8, f"slope {slope:.4f} vs p(1) = {p1:.4f} (diff {slope - p1:+.4f}), {elapsed:.0f}s < 600s")


def test_criterion_09_reweighting_brackets_overlap():
    cells = 0
    for K in (0.5, 1.0, 2.0):
        for eps in (0.003, 0.01, 0.03, 0.1):
            tab = survival_tinf_bracket(eps, K, rel_width=0.1)
            lo, hi = tab.tinf_bracket
            rlo, rhi = survival_drifted_reweight(eps, K, tab.horizon)
            assert lo <= hi and rlo <= rhi
            # the brackets are exact up to float accumulation over ~N terms
            assert max(lo, rlo) <= min(hi, rhi) + 1e-9
            cells += 1
    _report(9, f"DP and reweighting brackets overlap on all {cells} (eps, K) cells")


def test_criterion_10_fubini_mean_measure():
    t0 = time.time()
    r = E.En_statistics(6.0, 3, 1.0, replicates=10_000, seed=210, pak_replicates=400_000)
    cell = [c for c in r.cells if c["n_boxes"] == 3][0]
    z = cell["fubini_z"]
    elapsed = time.time() - t0
    assert abs(z) <= 3.0
    _report(
        10,
        f"mean Leb = {cell['mean_measure']:.5f} vs product {cell['product_pak']:.5f} "
        f"(z = {z:.2f}) at 1e4 replicates, {elapsed:.0f}s",
    )


def test_criterion_11_cli_determinism(tmp_path):
    outs = []
    for label, workers in (("a", "1"), ("b", "2")):
        d = tmp_path / label
        code = run(
            ["sweep", "--k", "6", "--boxes", "3", "--tau-max", "1", "--seed", "42",
             "--replicates", "100", "--workers", workers, "--out-dir", str(d)]
        )
        assert code == EXIT_OK
        outs.append(d)
    same = all(
        (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
        for name in ("intervals.csv", "sweep_summary.csv")
    )
    assert same
    _report(11, "sweep outputs byte-identical for worker counts 1 and 2 at seed 42")
