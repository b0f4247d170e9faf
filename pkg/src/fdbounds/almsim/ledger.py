"""Aggregated local-GAAP ledger of a with-profit portfolio in run-off.

Stocks at year end ``t`` (arrays of shape ``(paths, T+1)``):

* ``V``     mathematical reserve,
* ``DBle0`` bonuses declared before the valuation date,
* ``DB``    bonuses declared after the valuation date (``DB_0 = 0``),
* ``SF``    surplus fund,
* ``LP = V + DBle0 + DB`` and ``BV = LP + SF``,
* ``MV`` market value of assets and ``UG = MV - BV``.

Flows in year ``t`` (index 0 unused and zero): ``ROA`` book return, ``gs``
gross surplus and its split ``sh + ph_star + tax``, ``ph``/``sg_star`` bonus
payouts and surrender gains on ``DB``, guaranteed benefits ``gbf`` and
``gbf_le0``, premiums ``pr``, costs ``co`` and technical gains ``tg``.

Each year:

1. Assets earn the forward ``F_{t-1}`` plus a zero-mean market shock
   ``-duration * vol * Z_t``.  Book return is ``F_{t-1} BV_{t-1}`` plus the
   realized part of the unrealized gains (a fixed fraction of the start-of-year
   gains, or all of them in the final year).
2. Reserves run off with ``lambda_t = l_t^h / l_{t-1}^h``; declared bonuses pay
   out the same fraction, which is exactly the geometric payout pattern
   ``mu_k^t`` applied to each past declaration.
3. The gross surplus is split into shareholder, policyholder and tax shares; a
   negative surplus is covered by the shareholder.
4. A share ``nu`` of the policyholder share plus ``eta_t`` of the surplus fund
   is declared, with ``eta_t`` steering the surplus fund toward
   ``theta * LP_t``.  In year ``T`` everything is declared and paid, which
   leaves ``LP_T = SF_T = UG_T = 0``.
5. Benefits, costs net of premiums, shareholder flows and tax leave the
   company; market and book values fall by the same amount.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..runoff import RunoffParams
from .rates import RateModel, RatePaths, simulate_rates


class LedgerError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LedgerConfig:
    lp0: float = 179.4
    sf0: float = 10.4
    ug0: float = 41.4
    sigma: float = 0.2
    rho: float = 0.0263
    gamma: float = 0.0080
    gph: float = 0.75
    gtax: float = 0.075
    nu: float = 0.75
    h: float = 10
    d: float = 8
    T: int = 50
    theta: float | None = None  # surplus-fund target ratio; None uses sf0 / lp0
    premium_rate: float = 0.0
    cost_rate: float = 0.002
    chi_le0: float = 0.0
    chi: float | None = None  # surrender gain rate on DB; None uses gamma
    asset_duration: float = 6.0
    eta_rule: str = "target"  # "target" or "none"
    sf_loss_absorption: bool = False
    profile: str = "runoff"  # "runoff" or "geometric", see reserve_profiles
    pilot_iterations: int = 30

    def __post_init__(self) -> None:
        if not (0 < self.gph and self.gtax >= 0 and self.gph + self.gtax <= 1):
            raise LedgerError("need gph > 0 and gph + gtax <= 1")
        if self.profile not in ("runoff", "geometric"):
            raise LedgerError(f"unknown profile {self.profile!r}")
        if self.eta_rule not in ("target", "none"):
            raise LedgerError(f"unknown eta_rule {self.eta_rule!r}")
        if not 0.0 <= self.nu <= 1.0:
            raise LedgerError("nu must lie in [0, 1]")
        RunoffParams(h=self.h, d=self.d, T=self.T, sigma=self.sigma, allow_fractional=True)

    @property
    def gsh(self) -> float:
        return 1.0 - self.gph - self.gtax

    @property
    def theta_target(self) -> float:
        return self.sf0 / self.lp0 if self.theta is None else self.theta

    @property
    def chi_db(self) -> float:
        return self.gamma if self.chi is None else self.chi

    @property
    def runoff(self) -> RunoffParams:
        return RunoffParams(h=self.h, d=self.d, T=self.T, sigma=self.sigma, allow_fractional=True)

    def scaled(self, lam: float) -> "LedgerConfig":
        return replace(self, lp0=self.lp0 * lam, sf0=self.sf0 * lam, ug0=self.ug0 * lam)


_STOCKS = ("V", "DBle0", "DB", "SF", "LP", "BV", "MV", "UG", "C")
_FLOWS = ("ROA", "gs", "sh", "ph_star", "tax", "ph", "sg_star", "gbf", "gbf_le0", "pr", "co", "tg", "decl")
_CONTROLS = ("nu_t", "eta_t", "chi_t", "rho_t", "gamma_t")


@dataclass
class LedgerState:
    """Per-path trajectories plus the rate paths that generated them."""

    config: LedgerConfig
    rates: RatePaths
    arrays: dict[str, np.ndarray] = field(repr=False)

    def __getattr__(self, name: str) -> np.ndarray:
        arrays = self.__dict__.get("arrays", {})
        if name in arrays:
            return arrays[name]
        raise AttributeError(name)

    @property
    def paths(self) -> int:
        return self.rates.paths

    @property
    def T(self) -> int:
        return self.config.T


def _run(cfg: LedgerConfig, rates: RatePaths, profiles: tuple[np.ndarray, np.ndarray] | None = None) -> LedgerState:
    T, n = cfg.T, rates.paths
    lh = cfg.runoff.l_array("h")
    ld = cfg.runoff.l_array("d")
    lam = np.zeros(T + 1)
    lam[1:] = lh[1:] / lh[:-1]
    if profiles is None:
        profiles = (cfg.lp0 * (1.0 - cfg.sigma) * lh, cfg.lp0 * cfg.sigma * lh)
    v_path, d_path = profiles
    realize = np.ones(T + 1)
    realize[1:T] = 1.0 - ld[1:T] / ld[0 : T - 1]
    chi, chi0 = cfg.chi_db, cfg.chi_le0
    if np.any(1.0 - lam[1:] < chi - 1e-15):
        raise LedgerError("surrender gain rate on DB exceeds the run-off fraction; payouts would be negative")
    with np.errstate(divide="ignore", invalid="ignore"):
        d_release = np.where(d_path[:-1] > 0, 1.0 - d_path[1:] / d_path[:-1], 1.0)
    if np.any(d_release < chi0 - 1e-12):
        raise LedgerError("surrender gain rate on pre-valuation bonuses exceeds their run-off")

    a = {k: np.zeros((n, T + 1)) for k in _STOCKS + _FLOWS + _CONTROLS}
    a["V"][:, 0] = v_path[0]
    a["DBle0"][:, 0] = d_path[0]
    a["SF"][:, 0] = cfg.sf0
    a["LP"][:, 0] = cfg.lp0
    a["BV"][:, 0] = cfg.lp0 + cfg.sf0
    a["UG"][:, 0] = cfg.ug0
    a["MV"][:, 0] = cfg.lp0 + cfg.sf0 + cfg.ug0
    theta = cfg.theta_target

    for t in range(1, T + 1):
        F = rates.F[:, t - 1]
        eps = -cfg.asset_duration * rates.vol * rates.Z[:, t - 1]
        V0, D0, DB0, SF0 = a["V"][:, t - 1], a["DBle0"][:, t - 1], a["DB"][:, t - 1], a["SF"][:, t - 1]
        LP0, BV0, MV0, UG0 = a["LP"][:, t - 1], a["BV"][:, t - 1], a["MV"][:, t - 1], a["UG"][:, t - 1]

        # assets
        mv_pre = (1.0 + F) * MV0 * (1.0 + eps)
        if t < T:
            realized = realize[t] * (1.0 + F) * UG0
        else:
            realized = mv_pre - (1.0 + F) * BV0
        roa = F * BV0 + realized

        # liabilities
        V1 = np.full(n, v_path[t])
        D1 = np.full(n, d_path[t])
        pr = cfg.premium_rate * V0
        co = cfg.cost_rate * V0
        sg = chi * DB0
        ph = (1.0 - lam[t]) * DB0 - sg
        gbf_le0 = D0 - D1 - chi0 * D0
        tg = cfg.gamma * LP0 - chi0 * D0 - sg
        gbf = (1.0 + cfg.rho) * V0 - V1 + pr - co - tg
        db_pre = DB0 - ph - sg

        # gross surplus, by definition and in reduced form
        gs = roa - (V1 - V0) - (D1 - D0) - db_pre + DB0 + pr - gbf - gbf_le0 - ph - co
        gs_reduced = roa - cfg.rho * V0 + cfg.gamma * LP0
        if not np.allclose(gs, gs_reduced, rtol=0.0, atol=1e-9 * max(1.0, cfg.lp0)):
            raise LedgerError(f"year {t}: gross surplus identity failed")
        gs_pos, gs_neg = np.maximum(gs, 0.0), np.maximum(-gs, 0.0)
        ph_star = cfg.gph * gs_pos
        tax = cfg.gtax * gs_pos
        sh = cfg.gsh * gs_pos - gs_neg

        # declarations; in the final year the whole surplus fund and surplus share
        # are declared and paid out with the remaining bonuses, so the run-off
        # is complete at T
        final = t == T
        nu_t = np.full(n, 1.0 if final else cfg.nu)
        absorb = np.zeros(n)
        if cfg.sf_loss_absorption:
            absorb = np.minimum(gs_neg, SF0)
            sh = sh + absorb
        sf_avail = SF0 - absorb
        if final:
            eta = np.ones(n)
        elif cfg.eta_rule == "target":
            x = V1 + D1 + db_pre
            num = sf_avail + (1.0 - nu_t) * ph_star - theta * (x + nu_t * ph_star)
            den = (1.0 + theta) * sf_avail
            with np.errstate(divide="ignore", invalid="ignore"):
                eta = np.where(sf_avail > 0, np.clip(num / den, 0.0, 1.0), 0.0)
        else:
            eta = np.zeros(n)
        decl = eta * sf_avail + nu_t * ph_star
        SF1 = sf_avail + ph_star - decl
        DB1 = db_pre + decl
        if final:
            ph = ph + DB1
            DB1 = np.zeros(n)

        out = gbf + gbf_le0 + ph + co - pr + sh + tax
        MV1 = mv_pre - out
        BV1 = BV0 + roa - out
        LP1 = V1 + D1 + DB1

        if np.any(SF1 < -1e-9) or np.any(DB1 < -1e-9):
            bad = int(np.argmin(np.minimum(SF1, DB1)))
            raise LedgerError(f"path {bad}, year {t}: negative surplus fund or declared bonus")

        for k, v in (("V", V1), ("DBle0", D1), ("DB", DB1), ("SF", SF1), ("LP", LP1), ("BV", BV1),
                     ("MV", MV1), ("UG", MV1 - BV1), ("ROA", roa), ("gs", gs), ("sh", sh),
                     ("ph_star", ph_star), ("tax", tax), ("ph", ph), ("sg_star", sg), ("gbf", gbf),
                     ("gbf_le0", gbf_le0), ("pr", pr), ("co", co), ("tg", tg), ("decl", decl),
                     ("nu_t", nu_t), ("eta_t", eta), ("rho_t", np.full(n, cfg.rho)),
                     ("gamma_t", np.full(n, cfg.gamma))):
            a[k][:, t] = v
        with np.errstate(divide="ignore", invalid="ignore"):
            a["chi_t"][:, t] = np.where(DB0 > 0, sg / np.where(DB0 > 0, DB0, 1.0), 0.0)

    scale = max(1.0, cfg.lp0 + cfg.sf0 + cfg.ug0)
    if not np.allclose(a["BV"], a["LP"] + a["SF"], rtol=0.0, atol=1e-9 * scale):
        raise LedgerError("book value no longer equals LP + SF")
    return LedgerState(cfg, rates, a)


def reserve_profiles(config: LedgerConfig, pilot: RatePaths) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic run-off of the reserve ``V`` and the pre-valuation bonuses.

    ``geometric`` lets both decay like ``l_t^h``.  Declared bonuses then pile
    up on top, so the book runs off more slowly than ``l_t^h``.

    ``runoff`` instead chooses the two profiles so that, on the pilot paths,
    ``E[LP_t] = l_t^h LP0`` and ``E[DBle0_t + DB_t] = sigma E[LP_t]`` as far as
    non-negativity allows.  The pre-valuation bonuses make room for the
    expected post-valuation bonuses and the reserve takes the rest.  The
    profiles depend on the expected bonus path, which depends on the profiles;
    the fixed point is found by plain iteration.
    """
    lh = config.runoff.l_array("h")
    book = config.lp0 * lh
    v = book * (1.0 - config.sigma)
    d = book * config.sigma
    if config.profile == "geometric":
        return v, d
    for _ in range(config.pilot_iterations):
        db = _run(config, pilot, (v, d)).DB.mean(axis=0)
        d_new = np.minimum.accumulate(np.maximum(config.sigma * book - db, 0.0))
        v_new = np.minimum.accumulate(np.maximum(book - d_new - db, 0.0))
        d_new[0], v_new[0] = config.sigma * config.lp0, (1.0 - config.sigma) * config.lp0
        if np.allclose(v_new, v, atol=1e-12 * config.lp0) and np.allclose(d_new, d, atol=1e-12 * config.lp0):
            v, d = v_new, d_new
            break
        v, d = v_new, d_new
    return v, d


def simulate_paths(model: RateModel, config: LedgerConfig) -> LedgerState:
    rates = simulate_rates(model, config.T)
    pilot = simulate_rates(pilot_model(model), config.T)
    return _run(config, rates, reserve_profiles(config, pilot))


def pilot_model(model: RateModel) -> RateModel:
    """Rate model for the profile pilot: same drift, separate random stream, fewer paths."""
    return replace(model, seed=model.seed ^ 0x5A5A5A5A, paths=min(model.paths, 2_000))


def run_on_rates(config: LedgerConfig, rates: RatePaths) -> LedgerState:
    """Run the ledger on externally supplied rate paths (for example a single deterministic path)."""
    return _run(config, rates, reserve_profiles(config, rates))
