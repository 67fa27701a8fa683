"""Regulation games for organic-food supply chains.

Extensive-form scenario games between a producer and a consumer, solved by
backward induction, plus closed-form deterrence thresholds and a 2x2
supplier/retailer inspection game.
"""

from .game import (
    Chance,
    Decision,
    ExtensiveGame,
    InvalidGame,
    Terminal,
    ValidationReport,
    restrict,
    terminal_outcomes,
    validate_game,
)
from .models import (
    DeterrenceInfeasible,
    InvalidParams,
    MarketParams,
    ThresholdReport,
    Verdict,
    baseline,
    build_consumer_monitoring_game,
    build_reputation_game,
    build_third_party_game,
    dishonest_expected_payoff,
    honest_payoff,
    r_feasibility_bound,
    reputation_conditions,
    spne_thresholds_consumer_model,
    third_party_min_penalty,
    third_party_thresholds,
)
from .policy import SweepSpec, classify_equilibrium, demo_report, feasibility_grid, penalty_sweep
from .solvers import (
    SUPPLIER_RETAILER,
    Bimatrix2x2,
    MixedEquilibrium,
    Solution,
    backward_induction,
    brute_force_spne,
    solve_bimatrix_2x2,
    strictly_dominates,
)

__version__ = "0.1.0"
