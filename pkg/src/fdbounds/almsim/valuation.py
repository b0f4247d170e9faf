"""Monte Carlo valuation of simulated ledgers and the checks built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bounds import BalanceSheetInputs, BoundsReport, EstimationParams, bounds_report
from ..curves import DiscountCurve, VolCurve
from .ledger import LedgerConfig, LedgerState, run_on_rates
from .rates import RateModel, deterministic_rates


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float

    @classmethod
    def of(cls, samples: np.ndarray) -> "Estimate":
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        # Fixed-order reduction so results do not depend on how paths were produced.
        mean = math.fsum(samples.tolist()) / n
        se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(mean, se)

    def within(self, target: float, k: float = 3.0, atol: float = 1e-10) -> bool:
        return abs(self.mean - target) <= k * self.se + atol

    def __str__(self) -> str:
        return f"{self.mean:.6f} ± {self.se:.6f}"


def _discounted(L: LedgerState, flow: np.ndarray, start: int = 1) -> np.ndarray:
    return np.sum(L.rates.Binv[:, start:] * flow[:, start:], axis=1)


def path_values(L: LedgerState) -> dict[str, np.ndarray]:
    """Per-path discounted sums of every valuation quantity."""
    cfg, T = L.config, L.T
    Binv = L.rates.Binv
    gb = _discounted(L, L.gbf + L.gbf_le0 + L.co - L.pr)
    fdb = _discounted(L, L.ph)
    gs_neg = np.maximum(-L.gs, 0.0)
    carried = (L.DB + L.SF)[:, :-1]  # DB_{t-1} + SF_{t-1} for t = 1..T
    return {
        "FDB": fdb,
        "GB": gb,
        "BE": gb + fdb,
        "VIF": _discounted(L, L.sh),
        "TAX": _discounted(L, L.tax),
        "COG": _discounted(L, gs_neg),
        "PHstar": _discounted(L, L.ph_star),
        "I": Binv[:, T] * (L.DB[:, T] + L.SF[:, T] + cfg.gph * (L.UG[:, T] + L.V[:, T] + L.DBle0[:, T])),
        "II": (1.0 - cfg.gph) * _discounted(L, L.sg_star, start=2),
        "III": (1.0 - cfg.gph) * np.sum(L.rates.F * Binv[:, 1:] * carried, axis=1),
        "MVT": Binv[:, T] * L.MV[:, T],
    }


@dataclass(frozen=True)
class SimValuation:
    FDB_mc: Estimate
    BE_mc: Estimate
    GB_mc: Estimate
    VIF_mc: Estimate
    TAX_mc: Estimate
    COG_mc: Estimate
    PHstar_mc: Estimate
    term_I_mc: Estimate
    term_II_mc: Estimate
    term_III_mc: Estimate
    MVT_mc: Estimate
    paths: int


def value(L: LedgerState) -> SimValuation:
    v = path_values(L)
    e = {k: Estimate.of(x) for k, x in v.items()}
    return SimValuation(
        FDB_mc=e["FDB"], BE_mc=e["BE"], GB_mc=e["GB"], VIF_mc=e["VIF"], TAX_mc=e["TAX"],
        COG_mc=e["COG"], PHstar_mc=e["PHstar"], term_I_mc=e["I"], term_II_mc=e["II"],
        term_III_mc=e["III"], MVT_mc=e["MVT"], paths=L.paths,
    )


def _mv0(cfg: LedgerConfig) -> float:
    return cfg.lp0 + cfg.sf0 + cfg.ug0


def verify_representation(L: LedgerState) -> Estimate:
    """Residual of ``FDB = SF0 + gph(LP0+UG0-GB) + gph COG - I - II - III``."""
    cfg = L.config
    v = path_values(L)
    rhs = cfg.sf0 + cfg.gph * (cfg.lp0 + cfg.ug0 - v["GB"]) + cfg.gph * v["COG"] - v["I"] - v["II"] - v["III"]
    return Estimate.of(v["FDB"] - rhs)


def no_leakage(L: LedgerState) -> Estimate:
    """``BE + VIF + TAX + E[MV_T / B_T] - MV0``; zero in expectation."""
    v = path_values(L)
    return Estimate.of(v["BE"] + v["VIF"] + v["TAX"] + v["MVT"] - _mv0(L.config))


def ph_star_relation(L: LedgerState) -> Estimate:
    """``PH* - gph (VIF + PH* + TAX) - gph COG`` per path."""
    v = path_values(L)
    g = L.config.gph
    return Estimate.of(v["PHstar"] - g * (v["VIF"] + v["PHstar"] + v["TAX"]) - g * v["COG"])


def dbsf_evolution_error(L: LedgerState) -> float:
    """Largest path-wise gap in ``Delta(DB + SF) = ph* - ph - sg*``."""
    x = L.DB + L.SF
    lhs = np.diff(x, axis=1)
    rhs = (L.ph_star - L.ph - L.sg_star)[:, 1:]
    return float(np.max(np.abs(lhs - rhs)))


def integration_by_parts_error(L: LedgerState) -> float:
    Binv, F = L.rates.Binv, L.rates.F
    x = L.DB + L.SF
    lhs = np.sum(Binv[:, 1:] * np.diff(x, axis=1), axis=1)
    rhs = Binv[:, -1] * x[:, -1] - x[:, 0] + np.sum(x[:, :-1] * F * Binv[:, 1:], axis=1)
    return float(np.max(np.abs(lhs - rhs)))


def payout_pattern_error(L: LedgerState) -> float:
    """Largest gap between ``ph_t + sg*_t`` and ``sum_k mu_k^t decl_k`` (plus ``decl_T`` at ``T``)."""
    ro = L.config.runoff
    lh = ro.l_array("h")
    T = L.T
    decl = L.decl
    worst = 0.0
    for t in range(2, T + 1):
        k = np.arange(1, t)
        mu = (lh[t - 1] - lh[t]) / lh[k]
        paid = decl[:, k] @ mu
        if t == T:
            paid = paid + decl[:, T]  # the final declaration is paid at once
        worst = max(worst, float(np.max(np.abs(paid - (L.ph[:, t] + L.sg_star[:, t])))))
    return worst


def martingale_check(L: LedgerState, curve: DiscountCurve) -> list[tuple[int, Estimate, float]]:
    """``(t, mean of 1/B_t, P(0,t))`` for ``t = 1..T``."""
    P = curve.array(L.T)
    return [(t, Estimate.of(L.rates.Binv[:, t]), float(P[t])) for t in range(1, L.T + 1)]


def caplet_check(
    L: LedgerState, curve: DiscountCurve, years, strike: float | None = None
) -> list[tuple[int, Estimate, float]]:
    """Simulated caplets ``E[(F_{s-1} - k)^+ / B_s]`` against the normal-model price.

    The analytic price uses the simple forward ``P(0,s-1)/P(0,s) - 1`` and the
    fixing time ``s - 1`` at which the simulated forward is known.  With
    ``strike=None`` each caplet is struck at the money.
    """
    from ..bachelier import caplet_floorlet

    out = []
    P = curve.array(L.T)
    for s in years:
        fwd = P[s - 1] / P[s] - 1.0
        k = fwd if strike is None else strike
        payoff = L.rates.Binv[:, s] * np.maximum(L.rates.F[:, s - 1] - k, 0.0)
        call, _ = caplet_floorlet(s - 1, fwd, k, L.rates.vol, P[s])
        out.append((s, Estimate.of(payoff), call))
    return out


def deterministic_ledger(config: LedgerConfig, curve: DiscountCurve) -> LedgerState:
    return run_on_rates(config, deterministic_rates(curve, config.T))


# --------------------------------------------------------------------------
# Bracketing


def analytic_inputs(config: LedgerConfig, model: RateModel) -> tuple[BalanceSheetInputs, EstimationParams, VolCurve]:
    """Balance sheet and parameters that describe ``config`` to the closed-form bounds.

    GB is the discounted guaranteed cash flow, which is deterministic in this
    ledger.  Article 91 is off because the simulated FDB includes the surplus
    fund.
    """
    det = deterministic_ledger(config, model.curve)
    gb = float(path_values(det)["GB"][0])
    bs = BalanceSheetInputs(lp0=config.lp0, sf0=config.sf0, ug0=config.ug0, gb=gb, label="simulated")
    params = EstimationParams(
        gph=config.gph, rho=config.rho, gamma=config.gamma, theta=config.theta_target,
        sigma=config.sigma, nu=config.nu, d=config.d, h=config.h, T=config.T,
        article91=False, allow_fractional=True,
    )
    return bs, params, VolCurve.flat(model.vol)


@dataclass(frozen=True)
class BracketResult:
    inside: bool
    fdb_mc: Estimate
    lb: float
    ub: float

    @property
    def margin_lower(self) -> float:
        """``FDB_mc - LB`` (positive when the simulated value is above the lower bound)."""
        return self.fdb_mc.mean - self.lb

    @property
    def margin_upper(self) -> float:
        return self.ub - self.fdb_mc.mean


def verify_bracketing(L: LedgerState, report: BoundsReport, k: float = 3.0) -> BracketResult:
    fdb = value(L).FDB_mc
    lb, ub = report.lb_hat, report.ub_hat
    inside = lb - k * fdb.se <= fdb.mean <= ub + k * fdb.se
    return BracketResult(inside, fdb, lb, ub)


def bracket_run(config: LedgerConfig, model: RateModel, curve: DiscountCurve | None = None) -> tuple[LedgerState, BoundsReport, BracketResult]:
    from .ledger import simulate_paths

    L = simulate_paths(model, config)
    bs, params, vols = analytic_inputs(config, model)
    rep = bounds_report(bs, params, curve or model.curve, vols)
    return L, rep, verify_bracketing(L, rep)
