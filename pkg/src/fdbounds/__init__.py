"""Analytic bounds for future discretionary benefits of with-profit life business."""

from .bounds import (
    BalanceSheetInputs,
    BoundsReport,
    EstimationParams,
    Scenario,
    bounds_report,
    cog_hat,
    ii_hat,
    iii_lb_hat,
    iii_ub_hat,
    sensitivity_grid,
)
from .curves import DiscountCurve, VolCurve, load_curve, load_vols
from .runoff import RunoffParams

__version__ = "0.1.0"

__all__ = [
    "BalanceSheetInputs",
    "BoundsReport",
    "DiscountCurve",
    "EstimationParams",
    "RunoffParams",
    "Scenario",
    "VolCurve",
    "bounds_report",
    "cog_hat",
    "ii_hat",
    "iii_lb_hat",
    "iii_ub_hat",
    "load_curve",
    "load_vols",
    "sensitivity_grid",
]
