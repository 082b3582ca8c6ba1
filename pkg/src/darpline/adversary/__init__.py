"""Adversarial instance families and the reactive lower-bound construction."""

from .generators import (
    GOLDEN,
    ParameterError,
    gen_luring,
    gen_nowaiting_lb,
    gen_theta_gt2,
    gen_waiting_lb,
    gt2_eps_prime,
    nowaiting_eps_prime,
    waiting_eps_prime,
)
from .lower_bound import (
    RHO_INTERVAL,
    AdversaryConfig,
    AdversaryError,
    AdversaryTranscript,
    CriticalHistory,
    CriticalReport,
    EagernessViolation,
    StageTwoState,
    check_critical,
    check_rho,
    critical_ratio_bound,
    critical_thresholds,
    crossing_ratio_cap,
    delay,
    delta,
    late_load_threshold,
    line_ell,
    run_general_lower_bound,
    too_late_line_coefficient,
    tour_serves,
)

__all__ = [
    "GOLDEN",
    "RHO_INTERVAL",
    "AdversaryConfig",
    "AdversaryError",
    "AdversaryTranscript",
    "CriticalHistory",
    "CriticalReport",
    "EagernessViolation",
    "ParameterError",
    "StageTwoState",
    "check_critical",
    "check_rho",
    "critical_ratio_bound",
    "critical_thresholds",
    "crossing_ratio_cap",
    "delay",
    "delta",
    "gen_luring",
    "gen_nowaiting_lb",
    "gen_theta_gt2",
    "gen_waiting_lb",
    "gt2_eps_prime",
    "late_load_threshold",
    "line_ell",
    "nowaiting_eps_prime",
    "run_general_lower_bound",
    "too_late_line_coefficient",
    "tour_serves",
    "waiting_eps_prime",
]
