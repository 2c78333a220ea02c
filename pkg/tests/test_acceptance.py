"""Acceptance criteria 1-8, each reported as one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` and read the
"acceptance criteria" section at the end of the session output.
"""

import time

import mpmath as mp
import numpy as np
import pytest

from conftest import VERDICTS
from gaussunc import experiments as ex
from gaussunc import rates
from gaussunc.protocol import desk_params, shared_code
from gaussunc.rates import ChannelParams, Flag

mp.mp.dps = 40


def verdict(label, ok, detail=""):
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    VERDICTS.append(line)
    print(line)


@pytest.fixture(scope="module")
def binding_params():
    # smallest desk configuration whose hash layers are non-trivial; see the ledger
    return desk_params(n=16, beta1=0.05, beta2=0.3, beta3=0.4)


# ---------------------------------------------------------------- oracles

def mp_lower(P, g, d):
    # two-logarithm form, evaluated independently of the package's combined ratio
    P, g, d = mp.mpf(P), mp.mpf(g), mp.mpf(d)
    return mp.log(P / (d - g), 2) / 2 - mp.log(1 + P / g, 2) / 2


def mp_pmin(g, d):
    # root of the lower bound in P, found numerically
    f = lambda lp: mp_lower(mp.e ** lp, g, d)
    guess = mp.log(mp.mpf(g) * (d - g) / (2 * g - d))
    return mp.e ** mp.findroot(f, guess)


def mp_code_rate(dh):
    dh = mp.mpf(dh)
    return -mp.log(1 - (1 - dh / 2) ** 2, 2) / 2


def as_float(v):
    assert not isinstance(v, Flag), v
    return float(v)


# ---------------------------------------------------------------- criteria

def test_criterion_1_formulas():
    t0 = time.perf_counter()
    Ps = np.geomspace(0.05, 1e4, 10)
    gs = np.geomspace(0.2, 5.0, 10)
    ratios = np.linspace(1.01, 2.6, 10)
    worst = 0.0
    pmin_zero = 0.0
    seen = {}
    for P in Ps:
        for g in gs:
            for r in ratios:
                d = float(g * r)
                ch = ChannelParams(float(g), d)
                raw = mp_lower(P, g, d)
                want = max(mp.mpf(0), raw)
                worst = max(worst, abs(as_float(rates.capacity_lower_bound(float(P), ch)) - want))
                worst = max(worst, abs(as_float(rates.commit_rate(float(P), ch, 0.2))
                                       - (raw - mp.mpf("0.2"))))
                lim = max(mp.mpf(0), mp.log(mp.mpf(g) / (d - g), 2) / 2)
                worst = max(worst, abs(as_float(rates.limit_capacity_lb(ch)) - lim))
                if (g, d) in seen:
                    continue
                pm = rates.p_min(ch)
                if d >= 2 * g:
                    assert pm is Flag.NOT_DEFINED
                else:
                    ref = mp_pmin(g, d)
                    worst = max(worst, abs(as_float(pm) - ref) / max(1, ref))
                    pmin_zero = max(pmin_zero, abs(as_float(
                        rates.capacity_lower_bound_raw(float(pm), ch))))
                    pmin_zero = max(pmin_zero, as_float(rates.capacity_lower_bound(float(pm), ch)))
                seen[(g, d)] = True
    for dh in np.linspace(1e-3, 2 - 1e-3, 1000):
        worst = max(worst, abs(rates.code_rate(float(dh)) - mp_code_rate(dh))
                    / max(1, mp_code_rate(dh)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and pmin_zero <= 1e-9 and elapsed < 5
    verdict("1", ok, f"max err {float(worst):.2e}, C_L(P_min) {pmin_zero:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_2_threshold():
    t0 = time.perf_counter()
    bad = 0
    for g in np.geomspace(0.1, 10.0, 7):
        for k in range(0, 2001):
            r = 1.0 + k * 1e-3
            d = float(g * r)
            ch = ChannelParams(float(g), d)
            below = d < 2 * g
            bad += rates.commit_possible(1e9, ch) != below
            bad += (rates.p_min(ch) is Flag.NOT_DEFINED) != (not below)
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 5
    verdict("2", ok, f"{bad} mismatches over 7x2001 grid, {elapsed:.2f}s")
    assert ok


def test_criterion_3_elasticity():
    t0 = time.perf_counter()
    eps = [2.0 ** -21, 2.0 ** -22, 2.0 ** -23]
    vals = [as_float(rates.capacity_lower_bound(10.0, ChannelParams(1.0, 1.0 + e))) for e in eps]
    # threshold: 0.5 log2(10 / (11 eps)) >= 10 holds for eps <= (10/11) 2^-20
    ok = (all(v >= 10 for v in vals) and vals[0] < vals[1] < vals[2]
          and time.perf_counter() - t0 < 1)
    verdict("3", ok, "C_L = " + ", ".join(f"{v:.4f}" for v in vals))
    assert ok


def test_criterion_4_soundness():
    t0 = time.perf_counter()
    r = ex.suite_soundness(desk_params(), 10_000, seed=0)
    elapsed = time.perf_counter() - t0
    ok = r["pass"] and elapsed < 120
    detail = ", ".join(f"{row['rate']:.4f} [lo {row['ci_low']:.4f}]" for row in r["reports"])
    verdict("4", ok, f"{detail}, {elapsed:.1f}s")
    assert ok


class TestCriterion5:
    t_total = 0.0

    def _timed(self, fn):
        t0 = time.perf_counter()
        out = fn()
        TestCriterion5.t_total += time.perf_counter() - t0
        return out

    def test_5a_attack_success(self, binding_params):
        r = self._timed(lambda: ex.suite_binding(binding_params, 10_000, seed=0))
        worst = max(row["rate"] for row in r["reports"])
        ok = r["attack_pass"]
        verdict("5a", ok, f"max attack success {worst:.4f} over {len(r['reports'])} configs "
                          "of 10^4 trials")
        TestCriterion5.ablation = r["ablation"]
        assert ok

    @pytest.mark.xfail(strict=True, reason="measured spoof-set exponent exceeds the claimed "
                                           "slope bound; analysed in the decision ledger")
    def test_5b_exponent_fit(self):
        r = self._timed(lambda: ex.spoof_exponent_fit(ex.dense_spoof_params, list(range(8, 25, 2)),
                                                      None, 200, seed=1))
        ok = r["pass"]
        verdict("5b", ok, f"slope {r['slope']:.3f} +/- {r['slope_ci_halfwidth']:.3f} vs bound "
                          f"{r['bound']:.3f}; random-code prediction {r['random_code_slope']:.3f}")
        assert ok

    def test_5cd_spoof_levels(self, binding_params):
        code = shared_code(binding_params, 0)
        r = self._timed(lambda: ex.spoof_level_statistics(binding_params, code,
                                                          binding_params.gamma2, 10_000, seed=2))
        verdict("5c", r["level1_pass"], f"level-1 within {r['level1_bound']} in "
                                        f"{r['level1_within_bound']:.4f} of trials")
        verdict("5d", r["level2_pass"], f"level-2 collision rate {r['level2_collision_rate']:.4f}")
        assert r["level1_pass"] and r["level2_pass"] and r["nested"]

    def test_5e_ablation(self):
        a = TestCriterion5.ablation
        ok = a["pass"] and a["ablated"]["rate"] > a["base"]["rate"]
        verdict("5e", ok, f"success {a['base']['rate']:.4f} -> {a['ablated']['rate']:.4f} "
                          f"without g2, one-sided p={a['p_value']:.2e}")
        verdict("5 runtime", TestCriterion5.t_total < 600, f"{TestCriterion5.t_total:.1f}s")
        parts = [v for v in VERDICTS if v.startswith("criterion 5")]
        whole = all(": PASS" in v for v in parts)
        verdict("5", whole, f"{sum(': PASS' in v for v in parts)}/{len(parts)} parts pass")
        assert ok and TestCriterion5.t_total < 600


def test_criterion_6_concealment():
    t0 = time.perf_counter()
    c = ex.suite_concealment(10, (1, 2, 4))
    h = ex.suite_hashing()
    elapsed = time.perf_counter() - t0
    uni = h["universality"]
    ok = (c["pass"] and all(r["violations"] == 0 for r in c["reports"]) and h["pass"]
          and uni["min"] == uni["max"] == uni["target"] and elapsed < 120)
    detail = ", ".join(f"l={r['l']} sd {r['sd']:.2e}<={r['bound']:.3g}" for r in c["reports"])
    verdict("6", ok, f"{detail}; collisions exactly {uni['target']:.4f}; {elapsed:.1f}s")
    assert ok


def test_criterion_7_reduction():
    t0 = time.perf_counter()
    r = ex.suite_reduction(ChannelParams(1.0, 2.0), 100_000, seed=0, alpha=0.01)
    elapsed = time.perf_counter() - t0
    ok = r["pass"] and r["honest_refusal"] and elapsed < 60
    detail = ", ".join(f"{row['case']} p={row['p_value']:.3f}" for row in r["reports"]
                       if "p_value" in row)
    verdict("7", ok, f"{detail}; refusal {r['honest_refusal']}; {elapsed:.1f}s")
    assert ok


def test_criterion_8_impossibility():
    t0 = time.perf_counter()
    e = mp.mpf(2) ** -9
    direct = 3 * (1 - e - 8 * e) - 2 * mp.sqrt(e + 8 * e)
    v = ex.noiseless_impossibility_bound(3, 2.0 ** -9, 2.0 ** -9)
    ok = v > 0 and abs(v - direct) < 1e-12 and time.perf_counter() - t0 < 1
    verdict("8", ok, f"bound {v:.15f}, direct {mp.nstr(direct, 18)}")
    assert ok
