"""Closed forms, root solvers and exact survival dynamic programs.

The two maps at the heart of the dimension bounds:

* gamma(K), the unique solution in (2, inf) of
  K = (gamma - 2) * sqrt((gamma + 1) / (gamma - 1)), driving the box
  growth that dominates the barrier -3 - K*sqrt(t);
* p(K), the root in (0, 1) of the series equation f(p, K) = 1 with
  f(p, K) = sin(pi p/2) Gamma(1 + p/2) / pi * sum_{n>=1}
  (sqrt(2) K)^n / n! * Gamma((n - p)/2), governing survival above a
  square-root boundary.  1 - p(K) upper-bounds the exceptional-set
  dimension; 1 - log(gamma0)/log(gamma(K)) lower-bounds it.

Survival probabilities above moving boundaries are computed by exact
forward dynamic programming with explicit truncation accounting: an
upper spatial cutoff is handled with both absorb-as-dead and
absorb-as-alive variants, and the infinite-horizon survival of a drifted
walk is bracketed with a supermartingale bound (rho^x with
rho = p_down/p_up is a martingale for the drifted walk, so the chance of
ever falling D below the current position is exactly rho^D).
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

_SQRT2 = math.sqrt(2.0)
_MARGIN = 2.0 ** -40


@dataclass(frozen=True)
class SolverResult:
    value: float
    residual: float
    iterations: int
    bracket: tuple
    #: log of the value, for roots too small for float64 (p(K) ~ exp(-K^2/2))
    value_log: float = None


# ---------------------------------------------------------------------------
# log-gamma (Lanczos, g = 7, 9 terms)

_LANCZOS_G = 7.0
_LANCZOS_C = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _log_gamma_core(x):
    # valid for x >= 0.5
    z = x - 1.0
    s = np.full_like(z, _LANCZOS_C[0])
    for i in range(1, 9):
        s = s + _LANCZOS_C[i] / (z + i)
    base = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(base) - base + np.log(s)


def log_gamma(x):
    """log Gamma(x) for x > 0, scalar or array."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0.0):
        raise ValueError("log_gamma requires x > 0")
    small = arr < 0.5
    out = np.empty_like(arr)
    if np.any(~small):
        out[~small] = _log_gamma_core(arr[~small])
    if np.any(small):
        xs = arr[small]
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        out[small] = math.log(math.pi) - np.log(np.sin(math.pi * xs)) - _log_gamma_core(1.0 - xs)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# gamma(K) and its inverse


def K_of_gamma(gamma):
    """K = (gamma - 2) * sqrt((gamma + 1)/(gamma - 1)), increasing on (2, inf)."""
    g = np.asarray(gamma, dtype=np.float64)
    if np.any(g <= 2.0):
        raise ValueError("gamma must be > 2")
    out = (g - 2.0) * np.sqrt((g + 1.0) / (g - 1.0))
    return float(out) if np.ndim(gamma) == 0 else out


def gamma_of_K(K, tol=1e-12):
    """Invert K_of_gamma by bisection on (2, inf)."""
    if K <= 0:
        raise ValueError("K must be > 0")
    lo, hi = 2.0 + 1e-15, 4.0
    while K_of_gamma(hi) <= K:
        hi *= 2.0
    it = 0
    while hi - lo > 1e-15 * max(1.0, hi) and it < 200:
        mid = 0.5 * (lo + hi)
        if K_of_gamma(mid) < K:
            lo = mid
        else:
            hi = mid
        it += 1
    val = 0.5 * (lo + hi)
    res = abs(K_of_gamma(val) - K)
    if res > tol * max(1.0, K):
        raise ArithmeticError(f"gamma_of_K failed to reach tolerance: residual {res}")
    return SolverResult(value=val, residual=res, iterations=it, bracket=(lo, hi))


# ---------------------------------------------------------------------------
# the survival-exponent series f(p, K) and its root p(K)


def _log_series(p, K, tol=1e-14):
    """log of sum_{n>=1} (sqrt(2) K)^n / n! * Gamma((n - p)/2).

    Terms rise to a peak near n = 2 K^2 and then decay with ratio below
    1/2, so once past max(20, ceil(4 K^2)) the neglected tail is bounded
    by the last term; we stop when that is below tol times the sum.
    """
    lk = math.log(_SQRT2 * K)
    n_min = max(20, int(math.ceil(4.0 * K * K)))
    block = 256
    m = -np.inf
    s = 0.0
    n = 1
    while True:
        ns = np.arange(n, n + block, dtype=np.float64)
        lt = ns * lk - log_gamma(ns + 1.0) + log_gamma((ns - p) / 2.0)
        for v in lt:
            if v > m:
                s = s * math.exp(m - v) + 1.0
                m = v
            else:
                s += math.exp(v - m)
        last = lt[-1]
        n += block
        if n > n_min and last - (m + math.log(s)) < math.log(tol):
            return m + math.log(s)
        if n > 10_000_000:
            raise ArithmeticError("series did not converge")


def _log_f_from_w(w, K, tol=1e-14):
    """log f(exp(w), K), stable for arbitrarily negative w.

    p(K) decays like exp(-K^2/2) for large K, far below float64, so the
    root search runs in w = log p.  For tiny p, log sin(pi p / 2) is
    log(pi/2) + w up to O(exp(2w)) and the series loses its p-dependence.
    """
    if w >= 0.0:
        raise ValueError("w must be negative (p < 1)")
    if K <= 0:
        raise ValueError("K must be > 0")
    p = math.exp(w) if w > -700.0 else 0.0
    if p > 1e-8:
        lsin = math.log(math.sin(math.pi * p / 2.0))
    else:
        lsin = math.log(math.pi / 2.0) + w
    lpref = lsin + log_gamma(1.0 + p / 2.0) - math.log(math.pi)
    return lpref + _log_series(p, K, tol)


def f_sato(p, K, tol=1e-14):
    """The series f(p, K); may overflow to inf for large K at large p."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    lf = _log_f_from_w(math.log(p), K, tol)
    return math.exp(lf) if lf < 700.0 else math.inf


def p_of_K(K, tol=1e-10):
    """Root of f(p, K) = 1 in (0, 1), by bisection on log f in log p.

    The returned SolverResult carries value_log; `value` itself may
    underflow to 0.0 for large K, in which case value_log is the only
    faithful representation.
    """
    hi = math.log(1.0 - 1e-12)
    if _log_f_from_w(hi, K) <= 0.0:
        raise ArithmeticError(f"f below 1 at p -> 1 for K={K}")
    lo = -1.0
    while _log_f_from_w(lo, K) >= 0.0:
        lo *= 2.0
        if lo < -1e7:
            raise ArithmeticError(f"no lower bracket for K={K}")
    it = 0
    # near the root d(log f)/dw >= 1, so drive the bracket down to a few
    # ulps of w to keep the residual well under tol
    while hi - lo > 8e-16 * max(1.0, -lo) and it < 300:
        mid = 0.5 * (lo + hi)
        if _log_f_from_w(mid, K) < 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    w = 0.5 * (lo + hi)
    res = abs(math.expm1(_log_f_from_w(w, K)))
    if res > tol:
        raise ArithmeticError(f"p_of_K residual {res} above {tol}")
    return SolverResult(
        value=math.exp(w), residual=res, iterations=it, bracket=(lo, hi), value_log=w
    )


def dim_upper(K):
    """Upper bound 1 - p(K) for the exceptional-set Hausdorff dimension."""
    return 1.0 - p_of_K(K).value


def dim_lower(K, gamma0):
    """Lower bound 1 - log(gamma0)/log(gamma(K)); None when not applicable.

    Requires gamma(K) > gamma0, i.e. K > K(gamma0); below that the bound
    is vacuous and we report None rather than a negative number.
    """
    if gamma0 <= 1.0:
        raise ValueError("gamma0 must be > 1")
    g = gamma_of_K(K).value
    if g <= gamma0:
        return None
    return 1.0 - math.log(gamma0) / math.log(g)


# ---------------------------------------------------------------------------
# simple closed forms


def theta_An(p, n):
    """P_p(walk from 0 stays above -n forever) = 1 - (1 - (2p-1)/p)**n."""
    if not 0.5 <= p <= 1.0:
        raise ValueError("p must be in [1/2, 1]")
    if n < 0:
        raise ValueError("n must be >= 0")
    return 1.0 - (1.0 - (2.0 * p - 1.0) / p) ** n


def energy_integral_closed(b):
    """Integral of |tau - tau'|**(-b) over the unit square: 2/((1-b)(2-b))."""
    if not 0.0 < b < 1.0:
        raise ValueError("b must be in (0, 1); the integral diverges for b >= 1")
    return 2.0 / ((1.0 - b) * (2.0 - b))


# ---------------------------------------------------------------------------
# survival dynamic programs


@dataclass(frozen=True)
class SurvivalTable:
    """Exact survival curve with truncation accounting.

    values / values_upper are the absorb-as-dead / absorb-as-alive
    variants of P(survive to n); their gap quantifies the upper spatial
    cutoff.  For drifted walks `tinf_bracket` rigorously brackets
    P(never hit the boundary at all).
    """

    K: float
    j: float
    epsilon: float
    horizon: int
    values: np.ndarray
    values_upper: np.ndarray
    tinf_bracket: tuple
    p_up: float

    @property
    def truncation_bounds(self):
        return (float(self.values[-1]), float(self.values_upper[-1]))


@njit(cache=True, nogil=True)
def _survival_dp_kernel(p_up, K, j, N, cutoff_mult):
    p_dn = 1.0 - p_up
    drift = p_up - p_dn

    lmin = int(math.ceil(-j - K * math.sqrt(N) - _MARGIN)) - 2
    umax = int(math.floor(max(drift, 0.0) * N + cutoff_mult * math.sqrt(N + 1.0) + j)) + 2
    width = umax - lmin + 1
    offs = -lmin

    cur = np.zeros(width, np.float64)
    nxt = np.zeros(width, np.float64)

    surv_lo = np.empty(N + 1, np.float64)
    surv_hi = np.empty(N + 1, np.float64)

    cur[offs + 0] = 1.0
    alive = 1.0
    absorbed = 0.0
    surv_lo[0] = 1.0
    surv_hi[0] = 1.0
    Ln = 0
    Un = 0

    for n in range(N):
        m = n + 1
        # survival threshold and top cutoff at step m, parity-adjusted
        L1 = int(math.ceil(-j - K * math.sqrt(m) - _MARGIN))
        if (L1 + m) % 2 != 0:
            L1 += 1
        U1 = int(math.floor(max(drift, 0.0) * m + cutoff_mult * math.sqrt(m + 1.0) + j))
        if (U1 + m) % 2 != 0:
            U1 -= 1

        lo_t = max(L1, Ln - 1)
        hi_t = min(U1, Un + 1)

        death = 0.0
        if Ln - 1 < L1:
            death = p_dn * cur[offs + Ln]
        absorb_step = 0.0
        if Un + 1 > U1:
            absorb_step = p_up * cur[offs + Un]

        for x in range(lo_t, hi_t + 1, 2):
            acc = 0.0
            xm = x - 1
            if Ln <= xm <= Un:
                acc += p_up * cur[offs + xm]
            xp = x + 1
            if Ln <= xp <= Un:
                acc += p_dn * cur[offs + xp]
            nxt[offs + x] = acc

        alive = alive - death - absorb_step
        absorbed += absorb_step

        if (m & 8191) == 0:
            tot = 0.0
            for x in range(lo_t, hi_t + 1, 2):
                tot += nxt[offs + x]
            alive = tot

        surv_lo[m] = alive
        surv_hi[m] = alive + absorbed

        tmp = cur
        cur = nxt
        nxt = tmp
        # stale cells of the write buffer outside the new window are never
        # read: reads are guarded by [Ln, Un]
        Ln = lo_t
        Un = hi_t

    row = np.zeros(Un - Ln + 1, np.float64)
    for x in range(Ln, Un + 1):
        row[x - Ln] = cur[offs + x]
    return surv_lo, surv_hi, row, Ln, Un, absorbed


def _run_survival_dp(p_up, K, j, N, cutoff_mult=10.0):
    if N < 0:
        raise ValueError("horizon must be >= 0")
    return _survival_dp_kernel(float(p_up), float(K), float(j), int(N), float(cutoff_mult))


def survival_symmetric(K, j, n):
    """Exact P(S(k) >= -j - K*sqrt(k) for all k <= m), m = 0..n."""
    surv_lo, surv_hi, row, Ln, Un, absorbed = _run_survival_dp(0.5, K, j, n)
    return SurvivalTable(
        K=float(K),
        j=float(j),
        epsilon=0.0,
        horizon=int(n),
        values=surv_lo,
        values_upper=surv_hi,
        tinf_bracket=(0.0, float(surv_hi[-1])),
        p_up=0.5,
    )


def first_passage_pmf(K, n_max, j=1.0):
    """Exact pmf of the first boundary crossing time, n = 0..n_max.

    T = inf{n > 0 : S(n) < -j - K*sqrt(n)}; pmf[n] = P(T = n).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    table = survival_symmetric(K, j, n_max)
    pmf = np.zeros(n_max + 1, dtype=np.float64)
    pmf[1:] = table.values[:-1] - table.values[1:]
    return pmf


def drift_up_probability(epsilon, drift="linear"):
    """Step-up probability of the drifted walk.

    "linear" is the dominating parameterization (1 + eps)/2; "exp" is the
    sup-coupling value 1/2 + (1 - exp(-eps))/2.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if drift == "linear":
        if epsilon > 1:
            raise ValueError("linear drift requires epsilon <= 1")
        return 0.5 * (1.0 + epsilon)
    if drift == "exp":
        return 0.5 + 0.5 * (1.0 - math.exp(-epsilon))
    raise ValueError(f"unknown drift parameterization {drift!r}")


def survival_drifted_dp(epsilon, K, N, j=1.0, drift="linear"):
    """Exact survival curve of the drifted walk plus a T=infinity bracket.

    The bracket's upper edge counts top-absorbed mass as alive forever;
    the lower edge subtracts, for every surviving state, the exact
    supermartingale bound rho^(x - m*) on ever falling to the level m*
    that any later boundary crossing would require.
    """
    p_up = drift_up_probability(epsilon, drift)
    surv_lo, surv_hi, row, Ln, Un, absorbed = _run_survival_dp(p_up, K, j, N)
    p_dn = 1.0 - p_up
    if p_up > p_dn and N >= 1:
        rho = p_dn / p_up
        m_star = math.ceil(-j - K * math.sqrt(N) - _MARGIN) - 1
        xs = np.arange(Ln, Un + 1, dtype=np.float64)
        tail = float(np.sum(row * rho ** (xs - m_star)))
        lower = max(0.0, float(surv_lo[-1]) - tail)
    else:
        lower = 0.0
    upper = float(surv_hi[-1])
    return SurvivalTable(
        K=float(K),
        j=float(j),
        epsilon=float(epsilon),
        horizon=int(N),
        values=surv_lo,
        values_upper=surv_hi,
        tinf_bracket=(lower, upper),
        p_up=p_up,
    )


def reweight_factor(n, epsilon, K, drift="linear"):
    """Likelihood ratio f_eps(n) of the unique first-crossing path profile.

    A first crossing at time n forces S(n) = -floor(1 + K*sqrt(n)) - 1,
    hence a fixed up/down step count, so
    P(T_eps = n) = P(T_0 = n) * f_eps(n) exactly.
    """
    p_up = drift_up_probability(epsilon, drift)
    p_dn = 1.0 - p_up
    ns = np.asarray(n, dtype=np.float64)
    depth = np.floor(1.0 + K * np.sqrt(ns)) + 1.0
    a = 0.5 * (ns + depth)  # down steps
    b = 0.5 * (ns - depth)  # up steps
    out = np.exp(a * math.log(2.0 * p_dn) + b * math.log(2.0 * p_up))
    return float(out) if np.ndim(n) == 0 else out


def survival_drifted_reweight(epsilon, K, N, j=1.0, drift="linear"):
    """Bracket P(T_eps = infinity) via the symmetric first-passage pmf.

    P(T_eps = inf) = sum_n (1 - f_eps(n)) P(T_0 = n); truncating at N
    gives the lower edge, and the tail is at most P(T_0 > N).
    """
    if j != 1.0:
        raise ValueError("the reweighting identity is specific to j = 1")
    pmf = first_passage_pmf(K, N, j=j)
    ns = np.arange(1, N + 1)
    f = reweight_factor(ns, epsilon, K, drift)
    lower = float(np.sum((1.0 - f) * pmf[1:]))
    tail = max(0.0, 1.0 - float(pmf[1:].sum()))
    return lower, lower + tail


def survival_tinf_bracket(epsilon, K, j=1.0, drift="linear", rel_width=0.1, n_start=None,
                          n_cap=1 << 26):
    """Drifted-DP bracket for P(T_eps = inf), doubling the horizon until
    the bracket width is below rel_width of its midpoint."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    N = n_start or max(4096, int(4.0 / epsilon**2))
    while True:
        table = survival_drifted_dp(epsilon, K, N, j=j, drift=drift)
        lo, hi = table.tinf_bracket
        mid = 0.5 * (lo + hi)
        if mid > 0 and (hi - lo) < rel_width * mid:
            return table
        if N >= n_cap:
            raise ArithmeticError(
                f"bracket width {hi - lo} not below {rel_width} of {mid} at horizon {N}"
            )
        N *= 2
