import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussunc.rates import (ChannelParams, Flag, PowerConstraint, SweepGrid, capacity_lower_bound,
                            capacity_lower_bound_raw, code_rate, commit_possible, commit_rate,
                            distance_for_rate, elasticity, limit_capacity_lb, p_min, rate_report,
                            sweep_rate_curves)

# frozen from a 40-digit mpmath evaluation
CL_10_1_15 = 0.43124823812503254584
CODE_RATE_1 = 0.20751874963942190927
CODE_RATE_05 = 0.59632253897119794628
CL_1E9_1_15 = 0.49999999927865247992

CH = ChannelParams(1.0, 1.5)


class TestChannelParams:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError, match="0 < gamma2 <= delta2"):
            ChannelParams(2.0, 1.0)
        with pytest.raises(ValueError, match="0 < gamma2 <= delta2"):
            ChannelParams(0.0, 1.0)

    def test_power_positive(self):
        with pytest.raises(ValueError):
            PowerConstraint(0.0)
        with pytest.raises(ValueError):
            PowerConstraint(float("inf"))

    @pytest.mark.parametrize("g,d,e", [(1, 1, 0), (1, 1.5, 0.5), (0.25, 0.5, 0.25)])
    def test_elasticity(self, g, d, e):
        assert elasticity(ChannelParams(g, d)) == e


class TestCommitPossible:
    def test_examples(self):
        assert commit_possible(10, CH)
        assert not commit_possible(1e9, ChannelParams(1.0, 2.0))
        assert not commit_possible(0.5, CH)

    def test_accepts_power_constraint(self):
        assert commit_possible(PowerConstraint(10.0), CH)


class TestCapacityLowerBound:
    def test_examples(self):
        assert capacity_lower_bound(10, CH) == pytest.approx(CL_10_1_15, abs=1e-12)
        assert capacity_lower_bound(1.0, CH) == pytest.approx(0.0, abs=1e-12)
        assert capacity_lower_bound(1e9, CH) == pytest.approx(CL_1E9_1_15, abs=1e-12)
        assert abs(capacity_lower_bound(1e9, CH) - 0.5) < 1e-3

    def test_zero_elasticity_flag(self):
        assert capacity_lower_bound(10, ChannelParams(1, 1)) is Flag.INFINITE

    def test_clamped_raw_exposed(self):
        raw = capacity_lower_bound_raw(0.5, CH)
        assert raw < 0
        assert capacity_lower_bound(0.5, CH) == 0.0

    def test_impossible_regime_is_zero(self):
        assert capacity_lower_bound(100, ChannelParams(1, 2.5)) == 0.0


class TestPmin:
    def test_examples(self):
        assert p_min(CH) == pytest.approx(1.0, abs=1e-15)
        assert p_min(ChannelParams(1, 2)) is Flag.NOT_DEFINED
        assert p_min(ChannelParams(1, 1)) == 0.0

    def test_boundary_positive_just_above(self):
        for ch in (CH, ChannelParams(0.7, 1.1), ChannelParams(2.0, 3.9)):
            assert capacity_lower_bound(p_min(ch) + 1e-6, ch) > 0


class TestLimit:
    def test_examples(self):
        assert limit_capacity_lb(CH) == pytest.approx(0.5, abs=1e-15)
        assert limit_capacity_lb(ChannelParams(1, 2)) == 0.0
        assert limit_capacity_lb(ChannelParams(1, 1)) is Flag.INFINITE

    @pytest.mark.parametrize("p,tol", [(1e6, 1e-3), (1e9, 1e-6)])
    def test_convergence(self, p, tol):
        for ch in (CH, ChannelParams(1, 1.2), ChannelParams(0.5, 0.9)):
            assert abs(limit_capacity_lb(ch) - capacity_lower_bound(p, ch)) < tol


class TestCodeRate:
    def test_examples(self):
        assert code_rate(1.0) == pytest.approx(CODE_RATE_1, abs=1e-12)
        assert code_rate(0.5) == pytest.approx(CODE_RATE_05, abs=1e-12)
        assert code_rate(2 - 1e-9) < 1e-8

    @pytest.mark.parametrize("d", [0.0, 2.0, -1.0, 3.0])
    def test_domain(self, d):
        with pytest.raises(ValueError):
            code_rate(d)

    @given(st.floats(0.01, 1.99))
    def test_distance_for_rate_inverts(self, d):
        assert distance_for_rate(code_rate(d)) == pytest.approx(d, rel=1e-9)


class TestCommitRate:
    def test_examples(self):
        assert commit_rate(10, CH, 0.1) == pytest.approx(CL_10_1_15 - 0.1, abs=1e-12)
        assert commit_rate(1.0, CH, 0.1) == pytest.approx(-0.1, abs=1e-12)
        assert abs(commit_rate(10, CH, 0.4313)) < 1e-4

    def test_zero_elasticity(self):
        assert commit_rate(10, ChannelParams(1, 1), 0.1) is Flag.INFINITE

    def test_beta3_positive(self):
        with pytest.raises(ValueError):
            commit_rate(10, CH, 0.0)


class TestSweep:
    def test_power_grid_shape(self):
        rows = sweep_rate_curves(SweepGrid.linear("power", 0.5, 100, 400, gamma2=1, delta2=1.5))
        ps = np.array([r[0] for r in rows])
        cl = np.array([r[1] for r in rows])
        assert np.all(np.diff(cl) >= -1e-15)
        assert np.all(cl[ps <= 1.0] == 0)
        assert np.all(cl[ps > 1.0] > 0)

    def test_gamma2_grid(self):
        rows = sweep_rate_curves(SweepGrid.linear("gamma2", 0.751, 1.499, 200, delta2=1.5))
        vals = np.array([r[1] for r in rows])
        assert np.all(np.diff(vals) > 0)
        low = sweep_rate_curves(SweepGrid("gamma2", (0.5, 0.6, 0.75), delta2=1.5))
        assert all(v == 0.0 for _, v in low)

    def test_singleton(self):
        rows = sweep_rate_curves(SweepGrid("power", (10.0,)))
        assert rows == [(10.0, capacity_lower_bound(10.0, CH))]

    def test_columns(self):
        assert SweepGrid("power", (1.0,)).columns == ("P", "C_L")
        assert SweepGrid("gamma2", (1.0,)).columns == ("gamma2", "C_L_inf")

    def test_rejects_bad_grid(self):
        with pytest.raises(ValueError):
            SweepGrid("power", ())
        with pytest.raises(ValueError):
            SweepGrid("nope", (1.0,))


def test_rate_report_invariants():
    r = rate_report(0.5, CH)
    assert not r.possible and r.c_lower == 0
    d = rate_report(10, ChannelParams(1, 2)).to_dict()
    assert d["p_min"] == "not-defined"


# properties

channels = st.tuples(st.floats(0.05, 10), st.floats(1e-3, 3)).map(
    lambda t: ChannelParams(t[0], t[0] * (1 + t[1])))
powers = st.floats(1e-3, 1e6)


@settings(max_examples=300)
@given(channels, powers)
def test_nonnegative_and_zero_iff_below_threshold(ch, p):
    c = capacity_lower_bound(p, ch)
    assert c >= 0
    pm = p_min(ch)
    if pm is Flag.NOT_DEFINED:
        assert c == 0
    elif abs(p - pm) > 1e-9 * max(1.0, pm):
        assert (c == 0) == (p < pm)


@settings(max_examples=200)
@given(channels, powers, st.floats(1.0, 100.0))
def test_commit_possible_monotone(ch, p, factor):
    if commit_possible(p, ch):
        assert commit_possible(p * factor, ch)


@settings(max_examples=200)
@given(channels)
def test_nondecreasing_and_concave_above_pmin(ch):
    pm = p_min(ch)
    if pm is Flag.NOT_DEFINED:
        return
    ps = pm * 1.001 + np.linspace(0.0, 10 * max(pm, ch.gamma2), 50)
    c = np.array([capacity_lower_bound(p, ch) for p in ps])
    assert np.all(np.diff(c) >= -1e-12)
    assert np.all(np.diff(c, 2) <= 1e-12)


@settings(max_examples=200)
@given(channels, powers, st.floats(1e-3, 0.3))
def test_commit_rate_is_bound_minus_beta3(ch, p, b3):
    c = capacity_lower_bound(p, ch)
    if c > 0:
        assert commit_rate(p, ch, b3) == pytest.approx(c - b3, abs=1e-12)


@settings(max_examples=200)
@given(channels, powers)
def test_matches_mpmath(ch, p):
    mp.mp.dps = 30
    g, d, P = mp.mpf(ch.gamma2), mp.mpf(ch.delta2), mp.mpf(p)
    raw = mp.log(P / (d - g), 2) / 2 - mp.log(1 + P / g, 2) / 2
    assert capacity_lower_bound_raw(p, ch) == pytest.approx(float(raw), abs=1e-9)
    assert math.isclose(float(capacity_lower_bound(p, ch)), max(0.0, float(raw)), abs_tol=1e-9)
