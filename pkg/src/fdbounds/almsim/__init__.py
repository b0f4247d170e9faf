"""Monte Carlo oracle for the analytic bounds."""

from .configs import conforming, conforming_model, violated, zero_surplus
from .ledger import LedgerConfig, LedgerError, LedgerState, run_on_rates, simulate_paths
from .rates import RateModel, RateModelError, RatePaths, deterministic_rates, simulate_rates
from .two_bond import TwoBondError, two_bond_example
from .valuation import (
    BracketResult,
    Estimate,
    SimValuation,
    bracket_run,
    caplet_check,
    dbsf_evolution_error,
    integration_by_parts_error,
    martingale_check,
    no_leakage,
    ph_star_relation,
    value,
    verify_bracketing,
    verify_representation,
)

__all__ = [
    "BracketResult", "Estimate", "LedgerConfig", "LedgerError", "LedgerState", "RateModel",
    "RateModelError", "RatePaths", "SimValuation", "TwoBondError", "bracket_run", "caplet_check",
    "conforming", "conforming_model", "dbsf_evolution_error", "deterministic_rates",
    "integration_by_parts_error", "martingale_check", "no_leakage", "ph_star_relation",
    "run_on_rates", "simulate_paths", "simulate_rates", "two_bond_example", "value",
    "verify_bracketing", "verify_representation", "violated", "zero_surplus",
]
