"""Two-bond illustration of the book-return decomposition.

At ``t-1`` the company holds two identical bonds maturing at ``t+1``, each
with notional ``N/2`` and annual coupon ``K N/2``, booked at the lower of cost
or market value.  Book return over year ``t`` splits into

* the forward yield on book value, ``F_{t-1} BV_{t-1}``,
* the predicted realization of unrealized gains,
  ``F_{t-1} UG_{t-1} - E[UG_t - UG_{t-1}]``,
* the unpredicted return ``ROA_t - E[ROA_t]``.

Rates are deterministic here, so predictions are evaluated on the given
``F_t`` and the management default (hold to maturity).  Every term is
computed from the bookkeeping itself; the closed forms are left to the tests.
"""

from __future__ import annotations

DECISIONS = ("hold", "sell_a1")


class TwoBondError(ValueError):
    pass


def _book(K: float, N: float, F_prev: float, F_next: float, decision: str) -> tuple[float, float, float, float]:
    """``(MV_{t-1}, BV_{t-1}, cash flow at t, BV_t)`` under ``decision``."""
    mv_t = (1.0 + K) * N / (1.0 + F_next)
    mv_prev = (K * N + mv_t) / (1.0 + F_prev)
    bv_prev = min(N, mv_prev)
    if decision == "hold":
        return mv_prev, bv_prev, K * N, min(mv_t, N)
    # a1 is sold after its coupon; a2 stays on the books at lower of cost or market.
    return mv_prev, bv_prev, K * N + mv_t / 2.0, min(mv_t, N) / 2.0


def two_bond_example(K: float, N: float, F_series: tuple[float, float], decision: str = "hold") -> tuple[float, float, float]:
    """ROA decomposition ``(forward yield, UG realization, unpredicted return)``.

    ``F_series`` is ``(F_{t-1}, F_t)``.
    """
    if decision not in DECISIONS:
        raise TwoBondError(f"decision must be one of {DECISIONS}, got {decision!r}")
    F_prev, F_next = (float(x) for x in F_series)
    if K < 0 or N <= 0:
        raise TwoBondError("need K >= 0 and N > 0")
    if F_prev <= -1.0 or F_next <= -1.0:
        raise TwoBondError("forwards must exceed -100%")
    if K < F_prev:
        raise TwoBondError(f"coupon {K} below the forward {F_prev}")
    mv_prev, bv_prev, _, ebv_t = _book(K, N, F_prev, F_next, "hold")
    if mv_prev < N:
        raise TwoBondError(f"MV_(t-1) = {mv_prev} is below the notional; the bonds are not in the money")

    ug_prev = mv_prev - bv_prev
    mv_t = (1.0 + K) * N / (1.0 + F_next)
    eug_t = mv_t - ebv_t
    expected_roa = K * N + ebv_t - bv_prev

    _, _, cf, bv_t = _book(K, N, F_prev, F_next, decision)
    roa = cf + bv_t - bv_prev

    forward_yield = F_prev * bv_prev
    realization = F_prev * ug_prev - (eug_t - ug_prev)
    unpredicted = roa - expected_roa
    return forward_yield, realization, unpredicted
