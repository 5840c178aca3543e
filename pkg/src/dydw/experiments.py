"""Reproducible experiment recipes with statistical pass/fail gates.

Every experiment is a pure function of (config, seed): replicate r uses
derive_seed(seed, r), estimates carry replicate counts and standard
errors, and all gates are 3-standard-error tests or explicit analytic
brackets.  Infinite-time statements are always reported as
horizon-indexed surrogates with the horizon in the report.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._parallel import run_replicates
from ._rng import derive_seed, uint64
from .boxes import BROWNIAN_BOX_PROB, box_sequence, estimate_PAk
from .field import ArrowField, Site
from .numerics import drift_up_probability, gamma_of_K
from .sticky import (
    _direct_pair_batch,
    _sticky_box_event_batch,
    _sticky_pair_batch,
)
from .sweep import (
    PredicateSpec,
    confinement_sweep,
    exceptional_set_En,
    sweep_predicate,
)

_NOISE_FLOOR = 5  # cells with fewer expected successes are excluded from fits


def _jsonify(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


@dataclass
class Gate:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        self.passed = bool(self.passed)


@dataclass
class ExperimentReport:
    name: str
    config: dict
    cells: list
    fits: dict = field(default_factory=dict)
    gates: list = field(default_factory=list)

    @property
    def passed(self):
        return all(g.passed for g in self.gates)

    def to_dict(self):
        d = _jsonify(asdict(self))
        d["passed"] = self.passed
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def gate(self, name):
        for g in self.gates:
            if g.name == name:
                return g
        raise KeyError(name)


def _se(p, n):
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def _loglog_fit(x, y):
    lx = np.log(np.asarray(x, dtype=np.float64))
    ly = np.log(np.asarray(y, dtype=np.float64))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, _, _ = np.linalg.lstsq(A, ly, rcond=None)
    slope, icpt = coef
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - (float(res[0]) / ss_tot if len(res) and ss_tot > 0 else 0.0)
    return float(slope), float(icpt), r2


# ---------------------------------------------------------------------------
# correlation decay (noise sensitivity of the tilted crossing event)


def correlation_decay(delta_grid, s_grid, replicates, seed=0):
    """Excess correlation of the crossing event between two dynamical times.

    For each (delta, s) cell a sticky pair at separation s is rescaled by
    delta; the event asks the path to stay above -1/delta and end above
    +1/delta.  Excess = P(both in O) - P(O)^2 is estimated with the
    marginal taken from an independent batch, must be nonnegative within
    noise, vanish as Delta = delta/s -> 0, and fit a positive power law.
    """
    if not delta_grid or not s_grid:
        raise ValueError("grids must be nonempty")
    cells = []
    for di, delta in enumerate(delta_grid):
        d = int(round(1.0 / delta))
        horizon = d * d
        for si, s in enumerate(s_grid):
            # joint batch
            n11, na, nb = _sticky_box_event_batch(
                uint64(derive_seed(seed, 1, di, si)), float(s), horizon, d, replicates
            )
            # independent marginal batch
            _, ma, mb = _sticky_box_event_batch(
                uint64(derive_seed(seed, 2, di, si)), float(s), horizon, d, replicates
            )
            p11 = n11 / replicates
            p1 = (ma + mb) / (2.0 * replicates)
            se11 = _se(p11, replicates)
            se1 = _se(p1, 2 * replicates)
            excess = p11 - p1 * p1
            se_ex = math.sqrt(se11**2 + (2.0 * p1 * se1) ** 2)
            cells.append(
                {
                    "delta": delta,
                    "s": s,
                    "Delta": delta / s,
                    "horizon": horizon,
                    "replicates": replicates,
                    "p_joint": p11,
                    "p_marginal": p1,
                    "excess": excess,
                    "se_excess": se_ex,
                }
            )
    gates = []
    neg = [c for c in cells if c["excess"] < -3.0 * c["se_excess"]]
    gates.append(
        Gate(
            "excess_nonnegative",
            not neg,
            f"{len(neg)} cells below -3 SE" if neg else "all cells >= -3 SE",
        )
    )
    dmin = min(c["Delta"] for c in cells)
    small = [c for c in cells if c["Delta"] == dmin]
    bad = [c for c in small if abs(c["excess"]) > 3.0 * c["se_excess"]]
    gates.append(
        Gate(
            "vanishes_at_small_Delta",
            not bad,
            f"smallest Delta={dmin:.4g}: {len(bad)} of {len(small)} cells outside 3 SE",
        )
    )
    fit_cells = [
        c
        for c in cells
        if c["excess"] > max(3.0 * c["se_excess"], _NOISE_FLOOR / c["replicates"])
    ]
    fits = {}
    if len(fit_cells) >= 3:
        slope, icpt, r2 = _loglog_fit(
            [c["Delta"] for c in fit_cells], [c["excess"] for c in fit_cells]
        )
        fits = {"exponent_a": slope, "intercept": icpt, "r2": r2, "n_cells": len(fit_cells)}
        gates.append(Gate("positive_decay_exponent", slope > 0, f"a_hat={slope:.3f} r2={r2:.3f}"))
    else:
        gates.append(Gate("positive_decay_exponent", False, "degenerate fit: too few cells"))
    # Brownian calibration at the finest delta, with an O(1/d) lattice allowance
    dfine = min(delta_grid)
    dd = int(round(1.0 / dfine))
    fine = [c for c in cells if c["delta"] == dfine]
    pm = fine[0]["p_marginal"]
    sem = _se(pm, 2 * replicates)
    tol = 3.0 * sem + 2.0 / dd
    gates.append(
        Gate(
            "brownian_marginal",
            abs(pm - BROWNIAN_BOX_PROB) <= tol,
            f"p_hat={pm:.5f} vs {BROWNIAN_BOX_PROB:.5f} tol={tol:.5f}",
        )
    )
    config = {
        "delta_grid": list(delta_grid),
        "s_grid": list(s_grid),
        "replicates": replicates,
        "seed": seed,
    }
    return ExperimentReport("correlation_decay", config, cells, fits, gates)


# ---------------------------------------------------------------------------
# sticky three-walk construction vs direct coupled tracing


def sticky_equivalence(s, horizon, replicates, seed=0, t_checks=(10, 50, 200)):
    """Coincidence curves and endpoint covariance: direct pair vs sampler."""
    if s < 0:
        raise ValueError("s must be >= 0")
    t_checks = tuple(t for t in t_checks if t <= horizon)
    tc = np.array(sorted(t_checks), dtype=np.int64)
    cells = []
    if s == 0:
        # degenerate stick: both constructions give identical paths
        config = {"s": s, "horizon": horizon, "replicates": replicates, "seed": seed}
        gates = [Gate("identical_at_s0", True, "s = 0 handled as shared single walk")]
        return ExperimentReport("sticky_equivalence", config, cells, {}, gates)

    coin_d = np.zeros(len(tc), np.int64)
    prod_d = np.zeros(1, np.float64)
    prodsq_d = np.zeros(1, np.float64)
    _direct_pair_batch(
        uint64(derive_seed(seed, 1)), float(s), int(horizon), tc, replicates, coin_d, prod_d, prodsq_d
    )
    coin_s = np.zeros(len(tc), np.int64)
    prod_s = np.zeros(1, np.float64)
    prodsq_s = np.zeros(1, np.float64)
    _sticky_pair_batch(
        uint64(derive_seed(seed, 2)), float(s), int(horizon), tc, replicates, coin_s, prod_s, prodsq_s
    )
    gates = []
    all_ok = True
    for i, t in enumerate(tc):
        pd_, ps_ = coin_d[i] / replicates, coin_s[i] / replicates
        sed, ses = _se(pd_, replicates), _se(ps_, replicates)
        z = (pd_ - ps_) / math.sqrt(sed**2 + ses**2) if sed + ses > 0 else 0.0
        ok = abs(z) <= 3.0
        all_ok = all_ok and ok
        cells.append(
            {
                "t": int(t),
                "replicates": replicates,
                "p_coincide_direct": pd_,
                "se_direct": sed,
                "p_coincide_sampler": ps_,
                "se_sampler": ses,
                "z": z,
            }
        )
    gates.append(Gate("coincidence_curves_match", all_ok, f"{len(tc)} checkpoints, 3 SE"))
    mean_d = prod_d[0] / replicates
    var_d = prodsq_d[0] / replicates - mean_d**2
    mean_s = prod_s[0] / replicates
    var_s = prodsq_s[0] / replicates - mean_s**2
    se_cov = math.sqrt(var_d / replicates + var_s / replicates)
    zc = (mean_d - mean_s) / se_cov if se_cov > 0 else 0.0
    cells.append(
        {
            "t": int(horizon),
            "replicates": replicates,
            "endpoint_cov_direct": mean_d,
            "endpoint_cov_sampler": mean_s,
            "z": zc,
        }
    )
    gates.append(Gate("endpoint_covariance_match", abs(zc) <= 3.0, f"z={zc:.2f}"))
    config = {
        "s": s,
        "horizon": horizon,
        "replicates": replicates,
        "seed": seed,
        "t_checks": [int(t) for t in tc],
    }
    return ExperimentReport("sticky_equivalence", config, cells, {}, gates)


# ---------------------------------------------------------------------------
# exceptional-set sweeps: mean measure, Fubini product, nonemptiness


def En_statistics(K, n_boxes, tau_max, replicates, seed=0, workers=None, pak_replicates=None):
    """Sweep statistics of the exceptional sets for 1..n_boxes box events.

    The mean Lebesgue measure of the swept set must match the product of
    independently estimated event probabilities (stationarity in tau plus
    box independence); per-field nesting makes the mean measure exactly
    nonincreasing in the number of events.
    """
    if n_boxes < 1:
        raise ValueError("n_boxes must be >= 1")
    gamma = gamma_of_K(K).value
    pak_replicates = pak_replicates or max(100_000, 10 * replicates)

    def one(r):
        f = ArrowField(derive_seed(seed, 1, r), tau_max=tau_max)
        out = []
        for n in range(1, n_boxes + 1):
            sset = exceptional_set_En(f, K, n, tau_max)
            out.append((sset.measure(), not sset.is_empty()))
        return out

    rows = run_replicates(one, replicates, workers)
    paks = [
        estimate_PAk(gamma, k, pak_replicates, derive_seed(seed, 2, k), method="bridge")
        for k in range(n_boxes)
    ]
    cells = []
    gates = []
    prev_mean = None
    monotone = True
    for n in range(1, n_boxes + 1):
        meas = np.array([rows[r][n - 1][0] for r in range(replicates)])
        nonempty = np.array([rows[r][n - 1][1] for r in range(replicates)])
        mean = float(meas.mean())
        se_mean = float(meas.std(ddof=1) / math.sqrt(replicates)) if replicates > 1 else 0.0
        prod = 1.0
        rel2 = 0.0
        for k in range(n):
            prod *= paks[k].p_hat
            if paks[k].p_hat > 0:
                rel2 += (paks[k].se / paks[k].p_hat) ** 2
        se_prod = prod * math.sqrt(rel2)
        z = (mean - prod) / math.sqrt(se_mean**2 + se_prod**2) if se_mean + se_prod > 0 else 0.0
        frac = float(nonempty.mean())
        cells.append(
            {
                "n_boxes": n,
                "replicates": replicates,
                "mean_measure": mean,
                "se_mean_measure": se_mean,
                "product_pak": prod,
                "se_product": se_prod,
                "fubini_z": z,
                "nonempty_fraction": frac,
                "se_nonempty": _se(frac, replicates),
                "tau_max": tau_max,
            }
        )
        if prev_mean is not None and mean > prev_mean + 1e-15:
            monotone = False
        prev_mean = mean
    zfull = cells[-1]["fubini_z"]
    gates.append(Gate("fubini_product", abs(zfull) <= 3.0, f"z={zfull:.2f} at n={n_boxes}"))
    gates.append(Gate("mean_measure_monotone", monotone, "nesting forces exact monotonicity"))
    config = {
        "K": K,
        "gamma": gamma,
        "n_boxes": n_boxes,
        "tau_max": tau_max,
        "replicates": replicates,
        "pak_replicates": pak_replicates,
        "seed": seed,
    }
    return ExperimentReport("En_statistics", config, cells, {}, gates)


# ---------------------------------------------------------------------------
# box-counting dimension estimates on swept sets


def dimension_boxcount(sets_by_label, eps_grid, dim_bracket=None):
    """Cover-count scaling of tau-interval sets.

    Fits log E[n(eps)] against log(1/eps) per label; explicitly an
    approximation (finite events, finite horizon).  The acceptance story
    is trend consistency against the theoretical bracket, not equality.
    """
    eps_grid = sorted(eps_grid, reverse=True)
    if eps_grid[0] / eps_grid[-1] < 99.0:
        raise ValueError("eps grid must span at least two decades")
    cells = []
    fits = {}
    gates = []
    for label, sets in sets_by_label.items():
        xs, ys = [], []
        for eps in eps_grid:
            counts = np.array([s.cover_count(eps) for s in sets], dtype=np.float64)
            mean = float(counts.mean())
            cells.append(
                {
                    "label": str(label),
                    "eps": eps,
                    "mean_cover_count": mean,
                    "se": float(counts.std(ddof=1) / math.sqrt(len(sets))) if len(sets) > 1 else 0.0,
                    "replicates": len(sets),
                }
            )
            if mean >= _NOISE_FLOOR / max(1, len(sets)) and mean > 0:
                xs.append(1.0 / eps)
                ys.append(mean)
        if len(xs) >= 3:
            slope, icpt, r2 = _loglog_fit(xs, ys)
            fits[str(label)] = {"slope": slope, "r2": r2, "n_points": len(xs)}
        else:
            fits[str(label)] = {"slope": None, "r2": None, "n_points": len(xs)}
            gates.append(Gate(f"fit_{label}", False, "too few usable eps points"))
    usable = {k: v["slope"] for k, v in fits.items() if v["slope"] is not None}
    gates.append(
        Gate(
            "fits_available",
            len(usable) == len(sets_by_label),
            f"{len(usable)}/{len(sets_by_label)} labels fitted",
        )
    )
    if dim_bracket is not None:
        fits["dim_bracket"] = list(dim_bracket)
    config = {"eps_grid": list(eps_grid), "labels": [str(k) for k in sets_by_label]}
    return ExperimentReport("dimension_boxcount", config, cells, fits, gates)


# ---------------------------------------------------------------------------
# two-time product-ratio bound


def product_ratio_check(K, s_grid, n, replicates, seed=0):
    """Per-box joint/marginal^2 ratios and their running product.

    At large separation the ratios sit at 1; past N0 = ceil(log(1/s)/
    log gamma) the per-cell excess decays geometrically, so the running
    product stays bounded; the fitted 1/s exponent is reported next to
    log(sup_k 1/p_k)/log gamma.

    The independence gate tests the largest s in the grid, so that value
    should sit well inside the decorrelated regime: the residual
    stickiness of box k scales like a power of 1/(d_k * s) and must be
    below the binomial noise floor at the chosen replicate count
    (s >= 5 is comfortably enough at 10^4 replicates).
    """
    if isinstance(s_grid, (int, float)):
        s_grid = [float(s_grid)]
    if any(s <= 0 for s in s_grid):
        raise ValueError("s must be > 0")
    gamma = gamma_of_K(K).value
    boxes = box_sequence(gamma, n + 1)
    cells = []
    sup_inv_p = 0.0
    for k in range(n + 1):
        d = boxes[k].d
        horizon = d * d
        pak = estimate_PAk(gamma, k, max(200_000, 10 * replicates), derive_seed(seed, 3, k), method="bridge")
        sup_inv_p = max(sup_inv_p, 1.0 / pak.p_hat)
        for si, s in enumerate(s_grid):
            n11, na, nb = _sticky_box_event_batch(
                uint64(derive_seed(seed, 4, k, si)), float(s), horizon, d, replicates
            )
            p11 = n11 / replicates
            se11 = _se(p11, replicates)
            denom = pak.p_hat**2
            ratio = p11 / denom if denom > 0 else math.inf
            se_ratio = ratio * math.sqrt(
                (se11 / p11) ** 2 + 4.0 * (pak.se / pak.p_hat) ** 2
            ) if p11 > 0 else math.inf
            cells.append(
                {
                    "k": k,
                    "d": d,
                    "s": s,
                    "replicates": replicates,
                    "p_joint": p11,
                    "p_k": pak.p_hat,
                    "ratio": ratio,
                    "se_ratio": se_ratio,
                    "N0": int(math.ceil(math.log(1.0 / s) / math.log(gamma))) if s < 1 else 0,
                }
            )
    flagged = [c for c in cells if not math.isfinite(c["ratio"])]
    gates = [
        Gate(
            "ratios_estimable",
            not flagged,
            f"{len(flagged)} cells with zero denominator" if flagged else "all cells finite",
        )
    ]
    s_max = max(s_grid)
    big = [c for c in cells if c["s"] == s_max]
    bad = [c for c in big if abs(c["ratio"] - 1.0) > 3.0 * c["se_ratio"]]
    gates.append(
        Gate(
            "independence_at_large_s",
            not bad,
            f"s={s_max}: {len(bad)}/{len(big)} ratios away from 1",
        )
    )
    prods = {}
    for s in s_grid:
        prod = 1.0
        for c in sorted((c for c in cells if c["s"] == s), key=lambda c: c["k"]):
            prod *= c["ratio"]
        prods[s] = prod
    fits = {"running_product": {str(s): prods[s] for s in s_grid}}
    if len(s_grid) >= 3:
        slope, icpt, r2 = _loglog_fit([1.0 / s for s in s_grid], [max(p, 1e-12) for p in prods.values()])
        fits["b_hat"] = slope
        fits["r2"] = r2
    fits["b_theory"] = math.log(sup_inv_p) / math.log(gamma)
    gates.append(
        Gate(
            "product_finite",
            all(math.isfinite(p) for p in prods.values()),
            f"products {sorted(prods.values())[:3]}...",
        )
    )
    config = {"K": K, "gamma": gamma, "s_grid": list(s_grid), "n": n, "replicates": replicates, "seed": seed}
    return ExperimentReport("product_ratio_check", config, cells, fits, gates)


# ---------------------------------------------------------------------------
# tameness probes


def _hit_level_before_zero_dp(p_up, level, horizon):
    """Exact P(walk from 0 reaches >= level before revisiting 0, within horizon)."""
    if level < 1:
        raise ValueError("level must be >= 1")
    # states 1..level-1 transient, absorb at 0 (fail) and level (success)
    probs = np.zeros(level + 1)
    probs[1] = p_up  # after the first step; first step down can never succeed
    success = 0.0
    if level == 1:
        return p_up
    for _ in range(horizon - 1):
        nxt = np.zeros_like(probs)
        nxt[2 : level + 1] += p_up * probs[1:level]
        nxt[0:level - 1] += (1.0 - p_up) * probs[1:level]
        success += nxt[level]
        nxt[level] = 0.0
        nxt[0] = 0.0
        probs = nxt
    return float(success)


def exceed_before_return_spec(level, horizon):
    """Predicate: the origin path reaches >= level before revisiting 0."""

    def fn(positions):
        pos = positions[0]
        hit = np.nonzero(pos[1:] >= level)[0]
        if len(hit) == 0:
            return False
        k = hit[0] + 1
        return not np.any(pos[1:k] == 0)

    return PredicateSpec(starts=(Site(0, 0),), n_steps=(int(horizon),), fn=fn)


def tameness_probe(
    horizon_grid,
    tau_max,
    replicates,
    seed=0,
    level=8,
    m_cells=16,
    conf_K=0.5,
    conf_j=8.0,
    conf_horizons=(256, 1024),
    workers=None,
):
    """Finite-scale tameness surrogates.

    For each horizon h: sweep the tau-set where the origin path reaches
    `level` before revisiting 0.  Gates: the mean swept measure matches
    the exact static probability (stationarity); the fraction of tau-grid
    cells the swept set touches is dominated by the exact drifted-walk
    probability from the sup-arrow coupling; the mean interval count
    stabilizes as the horizon grows.  A two-sided confinement sweep at
    small K must strictly shrink with horizon.
    """
    horizon_grid = sorted(horizon_grid)
    cells = []
    gates = []
    counts_by_h = {}
    for h in horizon_grid:
        spec = exceed_before_return_spec(level, h)

        def one(r, spec=spec, h=h):
            f = ArrowField(derive_seed(seed, 5, h, r), tau_max=tau_max)
            sset = sweep_predicate(f, spec, tau_max)
            grid_w = tau_max / m_cells
            hits = sum(
                1
                for i in range(m_cells)
                if any(a < (i + 1) * grid_w and b > i * grid_w for a, b in sset.intervals)
            )
            return sset.measure(), len(sset), hits

        rows = run_replicates(one, replicates, workers)
        meas = np.array([r[0] for r in rows])
        ncomp = np.array([r[1] for r in rows], dtype=np.float64)
        hits = np.array([r[2] for r in rows], dtype=np.float64)
        p_static = _hit_level_before_zero_dp(0.5, level, h)
        mean_frac = float(meas.mean()) / tau_max
        se_frac = float(meas.std(ddof=1) / math.sqrt(replicates)) / tau_max
        # sup-arrow marginal over a window of length w is 1 - exp(-w/2)/2
        p_bar = drift_up_probability(0.5 * tau_max / m_cells, drift="exp")
        p_cell_bound = _hit_level_before_zero_dp(p_bar, level, h)
        frac_hit = float(hits.mean()) / m_cells
        se_hit = float(hits.std(ddof=1) / math.sqrt(replicates)) / m_cells
        counts_by_h[h] = (float(ncomp.mean()), float(ncomp.std(ddof=1) / math.sqrt(replicates)))
        cells.append(
            {
                "horizon": h,
                "level": level,
                "replicates": replicates,
                "mean_measure_fraction": mean_frac,
                "se": se_frac,
                "p_static_exact": p_static,
                "mean_cell_hit_fraction": frac_hit,
                "se_cell_hit": se_hit,
                "drifted_cell_bound": p_cell_bound,
                "mean_interval_count": counts_by_h[h][0],
                "theta_reference": 1.0 - ((1.0 - p_bar) / p_bar) ** level,
            }
        )
        z = (mean_frac - p_static) / se_frac if se_frac > 0 else 0.0
        gates.append(
            Gate(
                f"stationarity_h{h}",
                abs(z) <= 3.0,
                f"measure fraction {mean_frac:.4f} vs exact {p_static:.4f} (z={z:.2f})",
            )
        )
        gates.append(
            Gate(
                f"sup_coupling_bound_h{h}",
                frac_hit <= p_cell_bound + 3.0 * se_hit,
                f"cell-hit {frac_hit:.4f} <= drifted bound {p_cell_bound:.4f} + 3 SE",
            )
        )
    h_last, h_prev = horizon_grid[-1], horizon_grid[-2] if len(horizon_grid) > 1 else horizon_grid[-1]
    m_last, se_last = counts_by_h[h_last]
    m_prev, se_prev = counts_by_h[h_prev]
    gates.append(
        Gate(
            "interval_count_bounded",
            m_last <= 1.1 * m_prev + 3.0 * math.sqrt(se_last**2 + se_prev**2),
            f"mean count {m_prev:.2f} -> {m_last:.2f} across horizons",
        )
    )

    # two-sided confinement: strictly shrinking tau-measure with horizon
    conf = []
    for h in conf_horizons:
        def one_conf(r, h=h):
            f = ArrowField(derive_seed(seed, 6, r), tau_max=tau_max)
            return confinement_sweep(f, conf_j, conf_K, conf_K, h, tau_max).measure()

        vals = np.array(run_replicates(one_conf, replicates, workers))
        conf.append(
            {
                "conf_horizon": h,
                "K1": conf_K,
                "K2": conf_K,
                "j": conf_j,
                "mean_measure": float(vals.mean()),
                "se": float(vals.std(ddof=1) / math.sqrt(replicates)),
                "replicates": replicates,
            }
        )
    cells.extend(conf)
    shrink = conf[-1]["mean_measure"] < conf[0]["mean_measure"]
    gates.append(
        Gate(
            "confinement_shrinks",
            shrink,
            f"{conf[0]['mean_measure']:.4f} -> {conf[-1]['mean_measure']:.4f}",
        )
    )
    config = {
        "horizon_grid": list(horizon_grid),
        "tau_max": tau_max,
        "replicates": replicates,
        "seed": seed,
        "level": level,
        "m_cells": m_cells,
        "conf_K": conf_K,
        "conf_j": conf_j,
        "conf_horizons": list(conf_horizons),
    }
    return ExperimentReport("tameness_probe", config, cells, {}, gates)
