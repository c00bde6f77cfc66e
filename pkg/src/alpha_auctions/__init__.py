"""Solver, simulator, and live-session service for alpha-auctions in
complete-information partnership dissolution."""

from .game import (
    HV,
    LV,
    AuctionSpec,
    BidDomain,
    DomainError,
    GameConstants,
    MixedProfile,
    Outcome,
    TieOutcome,
    ValuationPair,
    ab,
    constants,
    expected_payoff,
    lb,
    payoff_matrix,
    resolve,
    spec_for,
    wb,
)
from .nash import (
    MixingBounds,
    NashCertificate,
    Violation,
    best_response_set,
    enumerate_pure_nash,
    is_nash,
    mixing_bounds,
    strictness,
)
from .qre import (
    QreConvergenceError,
    QrePoint,
    SweepCurve,
    efficiency,
    logit_response,
    solve_qre,
    sweep,
    write_sweep_csv,
)
from .monotonicity import (
    BiasWindow,
    MonotonicityReport,
    ProbeResult,
    bias_window,
    check_sequence,
    evaluate_statements,
    exclusion_probe,
    is_weakly_payoff_monotone,
    nash_distance,
    nash_set_distance,
    t_value,
)

__version__ = "0.1.0"
