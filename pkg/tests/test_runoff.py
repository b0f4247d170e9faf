import numpy as np
import pytest
from hypothesis import given, strategies as st

from fdbounds.runoff import RunoffError, RunoffParams, l_factor, mu, sigma_t


def test_defaults_are_valid():
    p = RunoffParams()
    assert (p.h, p.d, p.T, p.sigma) == (10, 8, 50, 0.2)


@pytest.mark.parametrize("kw", [dict(h=0), dict(h=50), dict(d=1), dict(sigma=1.5), dict(h=9.5)])
def test_invalid_parameters(kw):
    with pytest.raises(RunoffError):
        RunoffParams(**kw)


def test_fractional_half_lives_need_opt_in():
    assert RunoffParams(h=9.5, allow_fractional=True).l_array()[1] == pytest.approx(2 ** (-1 / 9.5))


def test_l_factor_values():
    p = RunoffParams()
    assert l_factor(p, 0) == 1.0
    assert l_factor(p, 10) == 0.5
    assert l_factor(p, 16, "d") == 0.25
    assert l_factor(p, 50) == 0.0
    assert np.array_equal(p.l_array("h")[:50], [l_factor(p, t) for t in range(50)])


def test_l_factor_depends_on_t_over_h_only():
    assert l_factor(RunoffParams(h=10, T=50), 5) == l_factor(RunoffParams(h=20, T=50), 10)
    for m in (2, 3):
        base, scaled = RunoffParams(h=7, d=5, T=40), RunoffParams(h=7 * m, d=5 * m, T=40 * m)
        for t in range(base.T):
            assert l_factor(scaled, m * t) == l_factor(base, t)
            assert l_factor(scaled, m * t, "d") == l_factor(base, t, "d")


def test_l_factor_strictly_decreasing():
    lh = RunoffParams().l_array("h")
    assert np.all(np.diff(lh) < 0)


def test_sigma_ramp():
    p = RunoffParams(sigma=0.3, h=12)
    for t in range(p.T + 1):
        expected = t * 0.3 / 12 if t <= 12 else 0.3
        assert sigma_t(p, t) == expected
    assert np.array_equal(p.sigma_array(), [sigma_t(p, t) for t in range(p.T + 1)])


def test_mu_domain():
    p = RunoffParams()
    with pytest.raises(RunoffError):
        mu(p, 0, 2)
    with pytest.raises(RunoffError):
        mu(p, 5, 5)
    with pytest.raises(RunoffError):
        mu(p, 5, 51)


@given(st.integers(2, 30), st.integers(2, 30), st.integers(31, 80))
def test_payout_fractions_sum_to_one(h, d, T):
    p = RunoffParams(h=h, d=d, T=T)
    for k in range(1, T):
        total = sum(mu(p, k, s + 1) for s in range(k, T))
        assert abs(total - 1.0) <= 1e-12
