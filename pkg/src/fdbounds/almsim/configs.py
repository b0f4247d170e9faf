"""Reference simulator configurations.

``conforming`` keeps the bundled 2017-like balance sheet and raises the
bonus share of the provisions to 50%.  With that share the bonus stock the
model accumulates stays inside the bound on declared bonuses for most of the
run-off, and the simulated FDB sits comfortably between the analytic bounds.
The assumptions still hold only approximately: declarations proportional to
the book make bonuses a growing fraction of a shrinking book late in the
run-off, which no choice of parameters fully removes.

``violated`` switches off all declarations, so no bonus is ever paid.
"""

from __future__ import annotations

from dataclasses import replace

from ..curves import DiscountCurve, bundled_curve
from .ledger import LedgerConfig
from .rates import RateModel

CONFORMING_VOL = 0.005


def conforming() -> LedgerConfig:
    return LedgerConfig(sigma=0.5)


def violated() -> LedgerConfig:
    return replace(conforming(), nu=0.0, eta_rule="none")


def zero_surplus(T: int = 20) -> LedgerConfig:
    """No gains, no surplus fund, no interest and no costs: nothing to share."""
    return LedgerConfig(
        lp0=100.0, sf0=0.0, ug0=0.0, rho=0.0, gamma=0.0, cost_rate=0.0, chi=0.0,
        asset_duration=0.0, T=T, h=10, d=8,
    )


def conforming_model(seed: int = 1, paths: int = 10_000, curve: DiscountCurve | None = None) -> RateModel:
    return RateModel(curve or bundled_curve(2017), CONFORMING_VOL, seed=seed, paths=paths)
