from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdbounds import cases
from fdbounds.bachelier import caplet_floorlet
from fdbounds.bounds import (
    STANDARD_SCENARIOS,
    BalanceSheetInputs,
    BoundsError,
    BoundsInvariantError,
    EstimationParams,
    Scenario,
    bounds_report,
    cog_hat,
    ii_hat,
    iii_lb_hat,
    iii_ub_hat,
    parse_scenario,
    relative_delta,
    sensitivity_grid,
)
from fdbounds.curves import DiscountCurve, VolCurve
from fdbounds.runoff import l_factor, sigma_t


@pytest.fixture(scope="module")
def case2017():
    return cases.base_case(2017)


def _loop_terms(bs, p, curve, vols):
    """Term-by-term evaluation with scalar loops, independent of the vectorized code."""
    ro = p.runoff
    T, theta = p.T, p.theta_for(bs)
    P = [curve.P(t) for t in range(T + 1)]

    def k(s):
        rel = (l_factor(ro, s - 1, "d") - l_factor(ro, s, "d")) / l_factor(ro, s - 1)
        return -rel * bs.ug0 / ((1 + theta) * bs.lp0) / P[s] + ((1 - p.sigma) * p.rho - p.gamma) / (1 + theta)

    def opt(s):
        vol = float(np.interp(s, [t for t, _ in vols.pillars], [v for _, v in vols.pillars]))
        return caplet_floorlet(s, P[s - 1] / P[s] - 1, k(s), vol, P[s])

    w = lambda s: (1 + theta) * l_factor(ro, s - 1) * bs.lp0  # noqa: E731
    ii = (1 - p.gph) * sum(p.gamma * sigma_t(ro, t) * P[t] * l_factor(ro, t - 1) * bs.lp0 for t in range(2, T + 1))
    cog = sum(opt(t)[1] * w(t) for t in range(1, T + 1))
    f0 = P[0] / P[1] - 1
    lo = (1 - p.gph) * (f0 / (1 + f0) * bs.sf0 + theta * sum((P[t] - P[t + 1]) * l_factor(ro, t - 1) * bs.lp0 for t in range(1, T)))
    strip = p.gph * (1 - p.gph) * sum((1 - P[t + 1] / P[t]) * opt(t)[0] * w(t) for t in range(1, T))
    double = sum(
        (1 - p.nu * (1 - l_factor(ro, t - s))) * (P[t] - P[t + 1]) / P[s] * opt(s)[0] * w(s)
        for t in range(2, T) for s in range(1, t)
    )
    hi = (1 - p.gph) * (1 - P[T]) * bs.sf0 + strip + (1 - p.gph) * p.gph * double
    return ii, cog, lo + strip, hi


def test_terms_match_scalar_loops(case2017):
    c = case2017
    ii, cog, lo, hi = _loop_terms(c.bs, c.params, c.curve, c.vols)
    assert ii_hat(c.bs, c.params, c.curve) == pytest.approx(ii, rel=1e-12)
    assert cog_hat(c.bs, c.params, c.curve, c.vols) == pytest.approx(cog, rel=1e-12)
    assert iii_lb_hat(c.bs, c.params, c.curve, c.vols) == pytest.approx(lo, rel=1e-12)
    assert iii_ub_hat(c.bs, c.params, c.curve, c.vols) == pytest.approx(hi, rel=1e-12)


def test_report_structure(case2017):
    c = case2017
    rep = bounds_report(c.bs, c.params, c.curve, c.vols)
    assert rep.lb_hat <= rep.fdb_hat <= rep.ub_hat
    assert rep.fdb_hat - rep.lb_hat == pytest.approx(rep.epsilon, abs=1e-12)
    assert rep.ub_hat - rep.fdb_hat == pytest.approx(rep.epsilon, abs=1e-12)
    assert rep.delta == pytest.approx(rep.fdb_hat - c.bs.fdb_reported)
    assert rep.ii_hat >= 0 and rep.cog_hat >= 0
    assert rep.iii_lb_hat <= rep.iii_ub_hat
    assert rep.pct("lb_hat") == pytest.approx(100 * rep.lb_hat / c.bs.mv0)


def test_article91_shifts_both_bounds_by_sf0(case2017):
    c = case2017
    on = bounds_report(c.bs, c.params, c.curve, c.vols)
    off = bounds_report(c.bs, replace(c.params, article91=False), c.curve, c.vols)
    assert off.lb_hat - on.lb_hat == pytest.approx(c.bs.sf0)
    assert off.ub_hat - on.ub_hat == pytest.approx(c.bs.sf0)
    assert off.epsilon == pytest.approx(on.epsilon)


def test_zero_vol_has_no_option_value(case2017):
    c = case2017
    rep = bounds_report(c.bs, c.params, c.curve, VolCurve.flat(0.0))
    assert rep.cog_hat == 0.0


@pytest.mark.parametrize("year", cases.YEARS)
@pytest.mark.parametrize("lam", [0.1, 7.3])
def test_homogeneity(year, lam):
    c = cases.base_case(year)
    base = bounds_report(c.bs, c.params, c.curve, c.vols)
    scaled = bounds_report(c.bs.scaled(lam), c.params, c.curve, c.vols)
    for name, x in base.as_dict().items():
        assert abs(getattr(scaled, name) - lam * x) <= 1e-9 * max(1.0, abs(lam * x))
        assert abs(scaled.pct(name) - base.pct(name)) <= 1e-9


def test_nu_leaves_upper_bound_unchanged(case2017):
    c = case2017
    rows = sensitivity_grid(c.bs, c.params, c.curve, c.vols, [Scenario("a", "nu", 0.75), Scenario("b", "nu", 1.25)])
    assert all(r.d_ub == 0.0 for r in rows)
    assert rows[0].d_lb < 0 < rows[1].d_lb


def test_sensitivity_grid_order_and_identity(case2017):
    c = case2017
    rows = sensitivity_grid(c.bs, c.params, c.curve, c.vols, [Scenario("id", "identity"), *STANDARD_SCENARIOS[:2]])
    assert [r.label for r in rows] == ["id", "vol_x0.5", "vol_x1.5"]
    assert (rows[0].d_fdb, rows[0].d_lb, rows[0].d_ub) == (0.0, 0.0, 0.0)


def test_relative_delta():
    assert relative_delta(11.0, 10.0, 50.0) == pytest.approx(2.0)


def test_parse_scenario_forms():
    assert parse_scenario("vol*0.5") == Scenario("vol*0.5", "vol", 0.5)
    assert parse_scenario("h=12").value == 12.0
    assert parse_scenario("theta_x1.5").kind == "theta"
    for bad in ("h*12", "vol=0.5", "beta*2", "nonsense"):
        with pytest.raises(BoundsError):
            parse_scenario(bad)


def test_theta_scenario_keeps_surplus_fund(case2017):
    c = case2017
    p2, _ = Scenario("t", "theta", 2.0).apply(c.bs, c.params, c.vols)
    assert p2.theta == pytest.approx(2 * c.bs.sf0 / c.bs.lp0)


def test_validation():
    with pytest.raises(BoundsError):
        BalanceSheetInputs(lp0=0.0, sf0=1.0, ug0=1.0, gb=1.0)
    with pytest.raises(BoundsError):
        EstimationParams(gph=1.2, rho=0.01, gamma=0.0)
    with pytest.raises(BoundsError):
        EstimationParams(gph=0.7, rho=[0.01] * 3, gamma=0.0).schedule("rho")
    bs = BalanceSheetInputs(10, 1, 1, 5)
    with pytest.raises(BoundsError, match="horizon"):
        bounds_report(bs, EstimationParams(gph=0.7, rho=0.0, gamma=0.0), DiscountCurve.flat(20), VolCurve.flat(0.0))


def test_schedule_equals_scalar(case2017):
    c = case2017
    sched = replace(c.params, rho=[c.params.rho] * 50, gamma=[c.params.gamma] * 50)
    a = bounds_report(c.bs, c.params, c.curve, c.vols)
    b = bounds_report(c.bs, sched, c.curve, c.vols)
    assert b.as_dict() == pytest.approx(a.as_dict(), rel=1e-14)


def test_unordered_sandwich_is_a_hard_error(case2017, monkeypatch):
    import fdbounds.bounds as b

    c = case2017
    monkeypatch.setattr(b, "iii_lb_hat", lambda *a: 1e6)
    with pytest.raises(BoundsInvariantError, match="III lower"):
        b.bounds_report(c.bs, c.params, c.curve, c.vols)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(50, 500), st.floats(0, 40), st.floats(-20, 80), st.floats(0.5, 0.95),
    st.floats(0.0, 0.04), st.floats(0.0, 0.015), st.floats(0.0, 0.01),
)
def test_bounds_ordered_on_random_books(lp0, sf0, ug0, gb_share, rho, gamma, vol):
    if lp0 + sf0 + ug0 <= 0:
        return
    bs = BalanceSheetInputs(lp0, sf0, ug0, gb=gb_share * lp0)
    p = EstimationParams(gph=0.75, rho=rho, gamma=gamma)
    rep = bounds_report(bs, p, cases.bundled_curve(2019), VolCurve.flat(vol))
    assert rep.lb_hat <= rep.ub_hat
    assert rep.epsilon >= 0
