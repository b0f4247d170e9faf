"""Normal-model (Bachelier) caplets and floorlets on the one-year forward rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .curves import DiscountCurve
from .runoff import RunoffParams, l_factor

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class PricingError(ValueError):
    pass


@dataclass(frozen=True)
class OptionQuote:
    maturity: int
    forward: float
    strike: float
    vol: float
    discount: float
    price_call: float
    price_put: float


def strike(
    s: int,
    curve: DiscountCurve,
    runoff: RunoffParams,
    ug0: float,
    lp0: float,
    theta: float,
    rho_s: float,
    gamma_s: float,
) -> float:
    """Break-even forward rate of the simplified gross surplus in year ``s``.

    The simplified surplus is ``(F_{s-1} - k_s) * (1 + theta) * l_{s-1}^h * LP0``,
    so ``k_s`` collects the unrealized-gain release (which lowers the strike)
    and the technical interest net of technical gains (which raises it).
    """
    if not 1 <= s <= runoff.T:
        raise PricingError(f"s={s} outside 1..{runoff.T}")
    if lp0 <= 0:
        raise PricingError("lp0 must be positive")
    if theta < 0:
        raise PricingError("theta must be non-negative")
    lh_prev = l_factor(runoff, s - 1, "h")
    release = (l_factor(runoff, s - 1, "d") - l_factor(runoff, s, "d")) / lh_prev
    ug_term = release * ug0 / ((1.0 + theta) * lp0) / curve.P(s)
    return -ug_term + ((1.0 - runoff.sigma) * rho_s - gamma_s) / (1.0 + theta)


def strikes(
    curve: DiscountCurve,
    runoff: RunoffParams,
    ug0: float,
    lp0: float,
    theta: float,
    rho: np.ndarray,
    gamma: np.ndarray,
) -> np.ndarray:
    """Vectorized :func:`strike` for ``s = 1..T``; ``rho``/``gamma`` indexed by ``s - 1``."""
    T = runoff.T
    P = curve.array(T)
    lh = runoff.l_array("h")
    ld = runoff.l_array("d")
    s = np.arange(1, T + 1)
    release = (ld[s - 1] - ld[s]) / lh[s - 1]
    return -release * ug0 / ((1.0 + theta) * lp0) / P[s] + ((1.0 - runoff.sigma) * rho - gamma) / (1.0 + theta)


def caplet_floorlet(s, forward, strike, vol, discount):
    """Return ``(call, put)`` for payoff ``(F - k)^+`` and ``(k - F)^+`` paid at ``s``.

    The forward is normal with standard deviation ``vol * sqrt(s)``.  Inputs may
    be scalars or broadcastable arrays.  A zero vol gives the discounted
    intrinsic value without forming ``kappa``.
    """
    s_arr, f, k, v, p = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (s, forward, strike, vol, discount)))
    if np.any(v < 0):
        raise PricingError("vol must be non-negative")
    if np.any(p <= 0):
        raise PricingError("discount must be positive")
    if np.any(s_arr < 0):
        raise PricingError("time to fixing must be non-negative")

    moneyness = f - k
    std = v * np.sqrt(s_arr)
    live = std > 0
    safe_std = np.where(live, std, 1.0)
    with np.errstate(over="ignore"):
        # Subnormal vols overflow kappa to +-inf, which still gives the right limit.
        kappa = moneyness / safe_std
        density = np.exp(-0.5 * kappa * kappa) * _INV_SQRT_2PI
    call_live = moneyness * ndtr(kappa) + std * density
    put_live = -moneyness * ndtr(-kappa) + std * density

    call = p * np.where(live, call_live, np.maximum(moneyness, 0.0))
    put = p * np.where(live, put_live, np.maximum(-moneyness, 0.0))
    if call.ndim == 0:
        return float(call), float(put)
    return call, put


def quote(s: int, forward: float, strike_: float, vol: float, discount: float) -> OptionQuote:
    call, put = caplet_floorlet(s, forward, strike_, vol, discount)
    return OptionQuote(s, forward, strike_, vol, discount, call, put)
