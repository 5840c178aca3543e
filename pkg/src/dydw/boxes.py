"""Diffusive box hierarchy and the box-crossing events built on it.

Boxes grow geometrically with ratio gamma > 2: box k has even side
parameter d_k = 2*(floor(gamma**k / 2) + 1), height d_k**2 and width
2*d_k, and each box's anchor sits on the upper-right vertex of the
previous one.  The anchors stay on the even lattice, and the
concatenated left boundaries dominate the square-root barrier
-3 - K*sqrt(t) when gamma solves K = (gamma-2)*sqrt((gamma+1)/(gamma-1)).

The event attached to box k asks the walk started at the anchor to stay
strictly right of the box's left edge and to exit strictly right of the
next anchor.  For large k its probability approaches the Brownian value
P(B(1) > 1, inf_{[0,1]} B > -1) = Phi(3) - Phi(1) ~ 0.157305.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._rng import derive_seed, stream_key
from .field import ArrowField, Site
from .paths import trace

#: Brownian limit of the box events: P(B(1) > 1, inf B > -1) = Phi(3) - Phi(1).
BROWNIAN_BOX_PROB = 0.15730535589982682


@dataclass(frozen=True)
class BoxSpec:
    """One diffusive box: anchor (x, t), side parameter d."""

    k: int
    d: int
    x: int
    t: int

    @property
    def height(self):
        return self.d * self.d

    @property
    def width(self):
        return 2 * self.d

    @property
    def left(self):
        return self.x - self.d

    @property
    def t_next(self):
        return self.t + self.d * self.d


def box_sequence(gamma, n):
    """Boxes 0..n for growth ratio gamma > 2.

    Anchors accumulate exactly in integer arithmetic; only gamma**k is
    floating point, and both sides of every derived invariant use the
    same computed power.
    """
    if gamma <= 2:
        raise ValueError("gamma must be > 2")
    if n < 0:
        raise ValueError("n must be >= 0")
    boxes = []
    x, t = 0, 0
    g = 1.0
    for k in range(n + 1):
        d = 2 * (int(g / 2.0) + 1)
        boxes.append(BoxSpec(k=k, d=d, x=x, t=t))
        x += d
        t += d * d
        g *= gamma
    return boxes


def boxes_covering(gamma, t_target):
    """Boxes 0..m with t_{m+1} > t_target."""
    if gamma <= 2:
        raise ValueError("gamma must be > 2")
    boxes = []
    x, t = 0, 0
    g = 1.0
    k = 0
    while True:
        d = 2 * (int(g / 2.0) + 1)
        boxes.append(BoxSpec(k=k, d=d, x=x, t=t))
        x += d
        t += d * d
        if t > t_target:
            return boxes
        g *= gamma
        k += 1


def left_boundary_profile(gamma, t_max):
    """Values of the concatenated left boundary on integer t = 0..t_max."""
    boxes = boxes_covering(gamma, t_max)
    out = np.empty(t_max + 1, dtype=np.int64)
    for b in boxes:
        lo = b.t
        hi = min(b.t_next, t_max + 1)
        if lo > t_max:
            break
        out[lo:hi] = b.left
    return out


def event_from_positions(positions, d, anchor_x, next_x):
    """Box event on a traced position array (start at the anchor).

    Strict inequalities throughout: stay > anchor_x - d, end > next_x.
    """
    if len(positions) != d * d + 1:
        raise ValueError("positions must cover exactly d*d steps")
    return bool(positions.min() > anchor_x - d and positions[-1] > next_x)


def event_Ak(field, tau, gamma, k):
    """Evaluate the box-k crossing event in `field` frozen at time tau."""
    boxes = box_sequence(gamma, k + 1)
    b, nxt = boxes[k], boxes[k + 1]
    path = trace(field, tau, Site(b.x, b.t), b.height)
    return event_from_positions(path.positions, b.d, b.x, nxt.x)


@dataclass(frozen=True)
class ProbEstimate:
    """Monte Carlo estimate with its binomial standard error."""

    p_hat: float
    se: float
    replicates: int
    successes: int
    method: str

    def upper_inverse(self, z=3.0):
        """Conservative upper confidence value for 1/p.

        With zero successes the one-sided rule-of-three style bound
        p >= z^2/(2*replicates)... is degenerate; we report the bound
        derived from p >= (successes + 1)/(replicates) shrunk by z SEs,
        never a division by zero.
        """
        p_lo = self.p_hat - z * self.se
        if p_lo <= 0.0:
            p_lo = 1.0 / (self.replicates + 1.0)
        return 1.0 / p_lo


def _pak_bridge_sample(n, d, replicates, seed):
    """Exact-in-law sampler of the box-event indicator for an n-step walk.

    Draws the endpoint from its binomial law and resolves the barrier
    touch with the bridge reflection identity: the number of n-step paths
    from 0 to y that touch level -d equals the number of paths from 0 to
    -2d - y.  Each replicate is O(1), which is what makes deep boxes
    estimable at all; the route is cross-validated against direct
    field simulation in the tests.
    """
    rng = np.random.Generator(np.random.Philox(key=np.uint64(stream_key(np.uint64(seed), 77, 1))))
    ups = rng.binomial(n, 0.5, size=replicates)
    y = 2 * ups.astype(np.int64) - n
    u = rng.random(replicates)
    ok = y > d
    # touch probability given endpoint: C(n, j*) / C(n, j), j* from reflection
    j = ups[ok]
    jr = (n - 2 * d - y[ok]) // 2
    q = np.zeros(j.shape[0])
    feasible = jr >= 0
    if feasible.any():
        jf = j[feasible].astype(np.float64)
        jrf = jr[feasible].astype(np.float64)
        lg = (
            _lgamma_vec(jf + 1.0)
            + _lgamma_vec(n - jf + 1.0)
            - _lgamma_vec(jrf + 1.0)
            - _lgamma_vec(n - jrf + 1.0)
        )
        q[feasible] = np.exp(lg)
    hit = np.zeros(replicates, dtype=bool)
    hit[ok] = u[ok] >= q
    return int(hit.sum())


def _lgamma_vec(a):
    from scipy.special import gammaln

    return gammaln(a)


def estimate_PAk(gamma, k, replicates, seed, method="auto", field_step_limit=300_000):
    """Monte Carlo estimate of the box-k event probability at tau = 0.

    method:
      "field"  - trace the walk in fresh arrow fields (definitional route)
      "bridge" - O(1) endpoint/barrier-touch sampler (exact in law)
      "auto"   - field route unless the box horizon exceeds field_step_limit
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    boxes = box_sequence(gamma, k + 1)
    b, nxt = boxes[k], boxes[k + 1]
    n = b.height
    if method == "auto":
        method = "field" if n <= field_step_limit else "bridge"
    if method == "bridge":
        succ = _pak_bridge_sample(n, b.d, replicates, seed)
    elif method == "field":
        succ = 0
        for r in range(replicates):
            f = ArrowField(derive_seed(seed, k, r), tau_max=1e-9)
            if event_Ak(f, 0.0, gamma, k):
                succ += 1
    else:
        raise ValueError(f"unknown method {method!r}")
    p = succ / replicates
    se = math.sqrt(max(p * (1.0 - p), 0.0) / replicates)
    return ProbEstimate(p_hat=p, se=se, replicates=replicates, successes=succ, method=method)


@dataclass(frozen=True)
class Gamma0Estimate:
    value: float
    upper_confidence: float
    cells: tuple


def gamma0_hat(gammas, ks, replicates, seed, method="auto"):
    """Grid estimate of sup over (gamma, k) of 1 / P(A_k).

    This is a grid supremum with confidence bounds, clearly an estimate:
    no closed form exists.  Cells are deduplicated by the box side d,
    which is the only quantity the event law depends on.
    """
    cells = []
    best = 0.0
    best_upper = 0.0
    seen = {}
    for g in gammas:
        boxes = box_sequence(g, max(ks) + 1)
        for k in ks:
            d = boxes[k].d
            if d in seen:
                est = seen[d]
            else:
                est = estimate_PAk(g, k, replicates, derive_seed(seed, d), method=method)
                seen[d] = est
            cells.append({"gamma": g, "k": k, "d": d, "p_hat": est.p_hat, "se": est.se})
            if est.p_hat > 0:
                best = max(best, 1.0 / est.p_hat)
            best_upper = max(best_upper, est.upper_inverse())
    return Gamma0Estimate(value=best, upper_confidence=best_upper, cells=tuple(cells))
