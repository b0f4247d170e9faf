"""Closed-form lower and upper bounds for future discretionary benefits.

The representation

    FDB = SF0 + gph (LP0 + UG0 - GB) + gph COG - I - II - III

is bounded term by term.  ``I`` is estimated by zero, ``II`` by ``ii_hat``,
``COG`` by a strip of floorlets and ``III`` from both sides by
``iii_lb_hat``/``iii_ub_hat``, each built from caplets on the simplified gross
surplus.  This gives

    LB = SF0 + gph (LP0 + UG0 - GB)            - II_hat - III_ub_hat
    UB = SF0 + gph (LP0 + UG0 - GB) + gph COG_hat       - III_lb_hat

and the midpoint estimator ``FDB_hat``.  When Article 91 applies the surplus
fund is reported separately and ``SF0`` is removed from both bounds.

Conventions
-----------
* Forward discounts ``P(s, t)`` are implied from the time-0 curve,
  ``P(0, t) / P(0, s)``.
* The caplet forward is the simple rate ``P(0,s-1)/P(0,s) - 1`` by default
  (``black_forward="simple"``).  ``black_forward="difference"`` uses
  ``P(0,s-1) - P(0,s)`` instead.
* ``F_0`` in ``iii_lb_hat`` is always the simple forward.
* ``rho`` and ``gamma`` may be scalars or schedules indexed by year ``1..T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Iterable, Literal, Sequence, Union

import numpy as np

from . import bachelier
from .curves import DiscountCurve, VolCurve
from .runoff import RunoffParams

Schedule = Union[float, Sequence[float]]


class BoundsError(ValueError):
    """Invalid inputs to the bound formulas."""


class BoundsInvariantError(ArithmeticError):
    """A computed report violates an ordering the formulas guarantee."""


@dataclass(frozen=True)
class BalanceSheetInputs:
    lp0: float
    sf0: float
    ug0: float
    gb: float
    fdb_reported: float | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if not self.lp0 > 0:
            raise BoundsError("lp0 must be positive")
        if self.sf0 < 0:
            raise BoundsError("sf0 must be non-negative")
        if self.gb < 0:
            raise BoundsError("gb must be non-negative")
        if not self.mv0 > 0:
            raise BoundsError("mv0 = lp0 + sf0 + ug0 must be positive")

    @property
    def mv0(self) -> float:
        return self.lp0 + self.sf0 + self.ug0

    def scaled(self, lam: float) -> "BalanceSheetInputs":
        fdb = None if self.fdb_reported is None else self.fdb_reported * lam
        return replace(self, lp0=self.lp0 * lam, sf0=self.sf0 * lam, ug0=self.ug0 * lam, gb=self.gb * lam, fdb_reported=fdb)


@dataclass(frozen=True)
class EstimationParams:
    gph: float
    rho: Schedule
    gamma: Schedule
    theta: float | None = None  # None: SF0 / LP0 of the balance sheet
    sigma: float = 0.2
    nu: float = 0.75
    d: float = 8
    h: float = 10
    T: int = 50
    cv_product: Union[float, np.ndarray] = 0.0
    article91: bool = True
    black_forward: Literal["simple", "difference"] = "simple"
    allow_fractional: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.gph < 1.0:
            raise BoundsError(f"gph must lie in (0, 1), got {self.gph}")
        if self.black_forward not in ("simple", "difference"):
            raise BoundsError(f"unknown black_forward {self.black_forward!r}")
        if np.any(np.asarray(self.cv_product) < 0):
            raise BoundsError("cv_product must be non-negative")
        if self.theta is not None and self.theta < 0:
            raise BoundsError("theta must be non-negative")

    @property
    def runoff(self) -> RunoffParams:
        return RunoffParams(h=self.h, d=self.d, T=self.T, sigma=self.sigma, allow_fractional=self.allow_fractional)

    def theta_for(self, bs: BalanceSheetInputs) -> float:
        return bs.sf0 / bs.lp0 if self.theta is None else self.theta

    def schedule(self, name: str) -> np.ndarray:
        """``rho`` or ``gamma`` as an array indexed ``t = 0..T`` (entry 0 unused)."""
        value = getattr(self, name)
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 0:
            return np.full(self.T + 1, float(arr))
        if arr.shape != (self.T,):
            raise BoundsError(f"{name} schedule needs {self.T} entries, got {arr.shape}")
        return np.concatenate([[np.nan], arr])

    def cv_matrix(self) -> np.ndarray:
        """``CV^1_{s,t} CV^2_s`` as a ``(T+1, T+1)`` array indexed ``[s, t]``."""
        cv = np.asarray(self.cv_product, dtype=float)
        if cv.ndim == 0:
            return np.full((self.T + 1, self.T + 1), float(cv))
        if cv.shape != (self.T + 1, self.T + 1):
            raise BoundsError(f"cv_product matrix must be ({self.T + 1}, {self.T + 1})")
        return cv


_MONEY_FIELDS = ("ii_hat", "iii_lb_hat", "iii_ub_hat", "cog_hat", "lb_hat", "ub_hat", "fdb_hat", "epsilon", "delta")


@dataclass(frozen=True)
class BoundsReport:
    label: str
    mv0: float
    ii_hat: float
    iii_lb_hat: float
    iii_ub_hat: float
    cog_hat: float
    lb_hat: float
    ub_hat: float
    fdb_hat: float
    epsilon: float
    delta: float | None
    fdb_reported: float | None
    article91_applied: bool
    lb_raw: float = field(repr=False, default=math.nan)
    ub_raw: float = field(repr=False, default=math.nan)

    def pct(self, name: str) -> float | None:
        value = getattr(self, name)
        return None if value is None else 100.0 * value / self.mv0

    @property
    def pct_of_mv0(self) -> dict[str, float | None]:
        return {name: self.pct(name) for name in _MONEY_FIELDS}

    def as_dict(self) -> dict[str, float | None]:
        return {name: getattr(self, name) for name in _MONEY_FIELDS}


@dataclass(frozen=True)
class _Terms:
    P: np.ndarray
    weight: np.ndarray  # (1 + theta) l_{t-1}^h LP0 at index t
    call: np.ndarray  # O_t^+ at index t
    put: np.ndarray  # O_t^- at index t


def _terms(bs: BalanceSheetInputs, p: EstimationParams, curve: DiscountCurve, vols: VolCurve) -> _Terms:
    T = p.T
    if curve.horizon < T:
        raise BoundsError(f"curve horizon {curve.horizon} is shorter than T={T}")
    ro = p.runoff
    theta = p.theta_for(bs)
    P = curve.array(T)
    lh = ro.l_array("h")
    s = np.arange(1, T + 1)
    k = bachelier.strikes(curve, ro, bs.ug0, bs.lp0, theta, p.schedule("rho")[s], p.schedule("gamma")[s])
    if p.black_forward == "simple":
        fwd = P[s - 1] / P[s] - 1.0
    else:
        fwd = P[s - 1] - P[s]
    call, put = bachelier.caplet_floorlet(s, fwd, k, vols.array(T), P[s])
    weight = np.concatenate([[np.nan], (1.0 + theta) * lh[s - 1] * bs.lp0])
    pad = lambda a: np.concatenate([[np.nan], a])  # noqa: E731
    return _Terms(P=P, weight=weight, call=pad(call), put=pad(put))


def ii_hat(bs: BalanceSheetInputs, p: EstimationParams, curve: DiscountCurve) -> float:
    """Shareholder and tax share of surrender gains on future declared bonuses."""
    T = p.T
    if curve.horizon < T:
        raise BoundsError(f"curve horizon {curve.horizon} is shorter than T={T}")
    ro = p.runoff
    P = curve.array(T)
    lh = ro.l_array("h")
    sig = ro.sigma_array()
    gam = p.schedule("gamma")
    t = np.arange(2, T + 1)
    return float((1.0 - p.gph) * np.sum(gam[t] * sig[t] * P[t] * lh[t - 1] * bs.lp0))


def cog_hat(bs: BalanceSheetInputs, p: EstimationParams, curve: DiscountCurve, vols: VolCurve) -> float:
    """Cost of guarantees as a strip of floorlets on the simplified surplus."""
    tm = _terms(bs, p, curve, vols)
    t = np.arange(1, p.T + 1)
    return float(np.sum(tm.put[t] * tm.weight[t]))


def _caplet_strip(tm: _Terms, p: EstimationParams, sign: float) -> float:
    T = p.T
    t = np.arange(1, T)
    cv = p.cv_matrix()[0, t]
    one_year = 1.0 - tm.P[t + 1] / tm.P[t]
    return float(p.gph * (1.0 - p.gph) * np.sum((1.0 + sign * cv) * one_year * tm.call[t] * tm.weight[t]))


def iii_lb_hat(bs: BalanceSheetInputs, p: EstimationParams, curve: DiscountCurve, vols: VolCurve) -> float:
    tm = _terms(bs, p, curve, vols)
    T, P = p.T, tm.P
    theta = p.theta_for(bs)
    lh = p.runoff.l_array("h")
    f0 = P[0] / P[1] - 1.0
    t = np.arange(1, T)
    fund = f0 / (1.0 + f0) * bs.sf0 + theta * np.sum((P[t] - P[t + 1]) * lh[t - 1] * bs.lp0)
    return float((1.0 - p.gph) * fund) + _caplet_strip(tm, p, -1.0)


def iii_ub_hat(bs: BalanceSheetInputs, p: EstimationParams, curve: DiscountCurve, vols: VolCurve) -> float:
    tm = _terms(bs, p, curve, vols)
    T, P = p.T, tm.P
    lh = p.runoff.l_array("h")
    cv = p.cv_matrix()

    # Double sum over settlement s < t <= T-1 of the return on the caplet
    # value carried from s to t+1.
    idx = np.arange(T + 1)
    S, Tt = np.meshgrid(idx, idx, indexing="ij")
    mask = (S >= 1) & (S < Tt) & (Tt >= 2) & (Tt <= T - 1)
    s_m, t_m = S[mask], Tt[mask]
    carry = 1.0 - p.nu * (1.0 - lh[t_m - s_m])
    fwd_disc = (P[t_m] - P[t_m + 1]) / P[s_m]
    double = np.sum(carry * (1.0 + cv[s_m, t_m]) * fwd_disc * tm.call[s_m] * tm.weight[s_m])

    fund = (1.0 - p.gph) * (1.0 - P[T]) * bs.sf0
    return float(fund + _caplet_strip(tm, p, +1.0) + (1.0 - p.gph) * p.gph * double)


def bounds_report(bs: BalanceSheetInputs, p: EstimationParams, curve: DiscountCurve, vols: VolCurve) -> BoundsReport:
    ii = ii_hat(bs, p, curve)
    cog = cog_hat(bs, p, curve, vols)
    lo3 = iii_lb_hat(bs, p, curve, vols)
    hi3 = iii_ub_hat(bs, p, curve, vols)
    if lo3 > hi3 + 1e-12 * max(1.0, abs(hi3)):
        raise BoundsInvariantError(f"{bs.label}: III lower estimate {lo3} exceeds upper estimate {hi3}")

    core = bs.sf0 + p.gph * (bs.lp0 + bs.ug0 - bs.gb)
    lb_raw = core - ii - hi3
    ub_raw = core + p.gph * cog - lo3
    shift = bs.sf0 if p.article91 else 0.0
    lb, ub = lb_raw - shift, ub_raw - shift
    if lb > ub:
        raise BoundsInvariantError(f"{bs.label}: lower bound {lb} exceeds upper bound {ub}")
    fdb = 0.5 * (lb + ub)
    delta = None if bs.fdb_reported is None else fdb - bs.fdb_reported
    return BoundsReport(
        label=bs.label,
        mv0=bs.mv0,
        ii_hat=ii,
        iii_lb_hat=lo3,
        iii_ub_hat=hi3,
        cog_hat=cog,
        lb_hat=lb,
        ub_hat=ub,
        fdb_hat=fdb,
        epsilon=0.5 * (ub - lb),
        delta=delta,
        fdb_reported=bs.fdb_reported,
        article91_applied=p.article91,
        lb_raw=lb_raw,
        ub_raw=ub_raw,
    )


# --------------------------------------------------------------------------
# Sensitivities


@dataclass(frozen=True)
class Scenario:
    """A named parameter transform.

    ``kind`` is one of ``vol``, ``rho``, ``gamma``, ``theta``, ``sigma``, ``nu``
    (multiply by ``value``), ``d``, ``h`` (set to ``value``) or ``identity``.
    """

    label: str
    kind: str
    value: float = 1.0

    def apply(
        self, bs: BalanceSheetInputs, p: EstimationParams, vols: VolCurve
    ) -> tuple[EstimationParams, VolCurve]:
        k, v = self.kind, self.value
        if k == "identity":
            return p, vols
        if k == "vol":
            return p, vols.scaled(v)
        if k in ("rho", "gamma"):
            sched = getattr(p, k)
            scaled = sched * v if np.ndim(sched) == 0 else tuple(np.asarray(sched) * v)
            return replace(p, **{k: scaled}), vols
        if k == "theta":
            return replace(p, theta=p.theta_for(bs) * v), vols
        if k in ("sigma", "nu"):
            return replace(p, **{k: getattr(p, k) * v}), vols
        if k in ("d", "h"):
            return replace(p, **{k: v}), vols
        raise BoundsError(f"unknown scenario kind {k!r}")


SCENARIO_KINDS = ("identity", "vol", "rho", "gamma", "theta", "sigma", "nu", "d", "h")

STANDARD_SCENARIOS: tuple[Scenario, ...] = (
    Scenario("vol_x0.5", "vol", 0.5),
    Scenario("vol_x1.5", "vol", 1.5),
    Scenario("rho_x0.75", "rho", 0.75),
    Scenario("rho_x1.25", "rho", 1.25),
    Scenario("gamma_x0.5", "gamma", 0.5),
    Scenario("gamma_x1.5", "gamma", 1.5),
    Scenario("theta_x0.5", "theta", 0.5),
    Scenario("theta_x1.5", "theta", 1.5),
    Scenario("sigma_x0.5", "sigma", 0.5),
    Scenario("sigma_x1.5", "sigma", 1.5),
    Scenario("nu_x0.75", "nu", 0.75),
    Scenario("nu_x1.25", "nu", 1.25),
    Scenario("d_eq10", "d", 10),
    Scenario("h_eq12", "h", 12),
)


def parse_scenario(text: str) -> Scenario:
    """Parse ``kind*factor`` or ``kind=value`` (``vol*0.5``, ``h=12``), or a standard label."""
    text = text.strip()
    for sc in STANDARD_SCENARIOS:
        if sc.label == text:
            return sc
    if text == "identity":
        return Scenario("identity", "identity")
    for sep in ("*", "="):
        if sep in text:
            kind, _, raw = text.partition(sep)
            kind = kind.strip()
            if kind not in SCENARIO_KINDS:
                break
            if (sep == "=") != (kind in ("d", "h")):
                raise BoundsError(f"scenario {text!r}: use '{kind}=' for d/h and '{kind}*' otherwise")
            return Scenario(text, kind, float(raw))
    raise BoundsError(f"unknown scenario {text!r}")


@dataclass(frozen=True)
class SensitivityRow:
    label: str
    report: BoundsReport
    d_fdb: float
    d_lb: float
    d_ub: float


def relative_delta(x: float, x_base: float, fdb_reported: float) -> float:
    """Difference to the base case in percent of the reported FDB."""
    return 100.0 * (x - x_base) / fdb_reported


def sensitivity_grid(
    bs: BalanceSheetInputs,
    p: EstimationParams,
    curve: DiscountCurve,
    vols: VolCurve,
    scenarios: Iterable[Scenario],
) -> list[SensitivityRow]:
    if bs.fdb_reported is None or bs.fdb_reported == 0:
        raise BoundsError("sensitivities are expressed relative to a non-zero reported FDB")
    base = bounds_report(bs, p, curve, vols)
    rows = []
    for sc in scenarios:
        p2, v2 = sc.apply(bs, p, vols)
        rep = bounds_report(bs, p2, curve, v2)
        rel: Callable[[str], float] = lambda n: relative_delta(getattr(rep, n), getattr(base, n), bs.fdb_reported)  # noqa: E731
        rows.append(SensitivityRow(sc.label, rep, rel("fdb_hat"), rel("lb_hat"), rel("ub_hat")))
    return rows


def report_fields() -> tuple[str, ...]:
    return tuple(f.name for f in fields(BoundsReport))
