"""dydw: simulation and numerics toolkit for the dynamical discrete web."""

__version__ = "0.1.0"

from .field import ArrowField, RingSchedule, Site
from .paths import Boundary, WalkPath, boundary_gamma, coalescence_time, stays_above, trace, trace_drifted
from .boxes import BoxSpec, box_sequence, estimate_PAk, event_Ak, gamma0_hat
from .sweep import (
    BandSpec,
    PredicateSpec,
    TauIntervalSet,
    confinement_sweep,
    cover_count,
    exceptional_set_En,
    measure,
    sweep_predicate,
)
from .sticky import StickyPairSample, direct_pair, sample_sticky_pair, sticky_brownian_pair
from .numerics import (
    K_of_gamma,
    SolverResult,
    SurvivalTable,
    dim_lower,
    dim_upper,
    energy_integral_closed,
    f_sato,
    first_passage_pmf,
    gamma_of_K,
    log_gamma,
    p_of_K,
    survival_drifted_dp,
    survival_drifted_reweight,
    survival_symmetric,
    theta_An,
)

__all__ = [
    "ArrowField",
    "BandSpec",
    "Boundary",
    "BoxSpec",
    "K_of_gamma",
    "PredicateSpec",
    "RingSchedule",
    "Site",
    "SolverResult",
    "StickyPairSample",
    "SurvivalTable",
    "TauIntervalSet",
    "WalkPath",
    "boundary_gamma",
    "box_sequence",
    "coalescence_time",
    "confinement_sweep",
    "cover_count",
    "dim_lower",
    "dim_upper",
    "direct_pair",
    "energy_integral_closed",
    "estimate_PAk",
    "event_Ak",
    "exceptional_set_En",
    "f_sato",
    "first_passage_pmf",
    "gamma0_hat",
    "gamma_of_K",
    "log_gamma",
    "measure",
    "p_of_K",
    "sample_sticky_pair",
    "stays_above",
    "sticky_brownian_pair",
    "survival_drifted_dp",
    "survival_drifted_reweight",
    "survival_symmetric",
    "sweep_predicate",
    "theta_An",
    "trace",
    "trace_drifted",
]
