"""Market parameters from public filing aggregates.

``gamma`` is the technical gain per unit of life assurance provision,
``nph`` the net policyholder share of the surplus and ``gph`` its gross
counterpart before tax.
"""

from __future__ import annotations

import statistics
import warnings
from dataclasses import dataclass
from typing import Sequence


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class MarketAggregates:
    """Filing aggregates in currency units.

    For ``gamma_from_market``: ``a`` surplus net of direct declarations,
    ``b`` direct policyholder declarations, ``d_item`` interest margin,
    ``e`` gross technical provisions, ``f`` provisions where the policyholder
    carries the investment risk.  For ``nph`` the same letters follow the
    surplus-allocation table: ``a`` gross surplus, ``b`` allocation to the
    surplus fund, ``c`` direct declarations.
    """

    a: float
    b: float
    c: float = 0.0
    d_item: float = 0.0
    e: float = 0.0
    f: float = 0.0


@dataclass(frozen=True)
class TaxContext:
    tau: float = 0.299

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau < 1.0:
            raise CalibrationError(f"tax rate must lie in [0, 1), got {self.tau}")


def gamma_from_market(agg: MarketAggregates) -> float:
    denom = agg.e - agg.f
    if not denom > 0:
        raise CalibrationError(f"e - f must be positive, got {denom}")
    return (agg.a + agg.b - agg.d_item) / denom


def nph(agg: MarketAggregates) -> float:
    if not agg.a > 0:
        raise CalibrationError(f"gross surplus a must be positive, got {agg.a}")
    share = (agg.b + agg.c) / agg.a
    if share > 1.0:
        warnings.warn(f"net policyholder share {share:.4f} exceeds 1; capped at 1", RuntimeWarning, stacklevel=2)
        share = 1.0
    return share


def gph_from_nph(nph: float, tax: TaxContext = TaxContext()) -> float:
    if not 0.0 <= nph <= 1.0:
        raise CalibrationError(f"nph must lie in [0, 1], got {nph}")
    denom = 1.0 - tax.tau * nph
    if denom <= 0:
        raise CalibrationError("tau * nph must be below 1")
    return (1.0 - tax.tau) * nph / denom


def average_gph(values: Sequence[float]) -> float:
    if len(values) == 0:
        raise CalibrationError("need at least one gph value")
    return statistics.fmean(values)
