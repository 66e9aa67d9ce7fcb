"""Over-and-above choice, DA-OA matching, axiom audits and brute-force oracles
for vertical-reservation seat allocation."""
from .choice import (
    ChoiceResult,
    Violation,
    audit_choice,
    check_over_and_above_principle,
    check_quota_filling,
    check_within_category_fairness,
    derive_category_merit,
    over_and_above_choose,
    rank_in_set,
)
from .da import RoundLog, audit_assignment, is_stable, run_da_oa
from .model import (
    Assignment,
    Capacity,
    Category,
    Individual,
    Institution,
    MarketInstance,
    Matching,
    Seat,
    induced_matching,
    validate_instance,
)

__version__ = "0.1.0"
