"""Monte Carlo estimators and exact oracles for soundness, binding,
concealment and the channel reduction.

Every estimator is deterministic given its seed: trial ``i`` draws from the
counter-based streams of :mod:`gaussunc.streams` for index ``i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from . import codes as _codes
from .adversary import (AliceBindingAttack, _Plan, binding_attack_run, reduction_attacks,
                        spoof_set, spoof_exponent_excess, transmit_vector)
from .channel import NoiseOracle, gauss_unc_round, sim_gauss_unc_round
from .errors import ParameterError, Refusal
from .hashing import GF2Field, HashFamilySpec, eval_keys, make_family, sample_key
from .protocol import ProtocolParams, honest_run, shared_code
from .rates import ChannelParams
from .streams import Streams, stream


# reports

def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval; ``(0, 1)`` when there are no trials."""
    if trials == 0:
        return 0.0, 1.0
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class TrialReport:
    """Counts, rate and 95% Wilson interval of a Monte Carlo estimate."""

    trials: int
    successes: int
    rate: float
    ci_low: float
    ci_high: float
    seed: int
    fingerprint: str
    label: str = ""
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, successes: int, trials: int, seed: int, fingerprint: str,
                    label: str = "", **extra) -> "TrialReport":
        lo, hi = wilson_interval(successes, trials)
        rate = successes / trials if trials else 0.0
        return cls(trials, successes, rate, min(lo, rate), max(hi, rate), seed, fingerprint,
                   label, extra)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("label", "trials", "successes", "rate", "ci_low", "ci_high", "seed", "fingerprint")}
        d.update(self.extra)
        return d


# soundness

def estimate_soundness(params: ProtocolParams, theta2: float, trials: int, seed: int,
                       code: Optional[_codes.SphericalCode] = None,
                       code_seed: int = 0) -> TrialReport:
    """Honest commit and reveal ``trials`` times at channel variance ``theta2``.

    ``successes`` counts accepted reveals; rejections are tallied by reason.
    """
    NoiseOracle(params.channel, theta2)
    if code is None:
        code = shared_code(params, code_seed)
    reasons: dict = {}
    ok = 0
    for i in range(trials):
        _, _, v = honest_run(params, code, theta2, seed, i)
        if v.accepted:
            ok += 1
        else:
            reasons[v.reason] = reasons.get(v.reason, 0) + 1
    return TrialReport.from_counts(ok, trials, seed, params.fingerprint(),
                                   label=f"soundness theta2={theta2:g}", theta2=theta2,
                                   rejections=dict(sorted(reasons.items())))


# binding

def estimate_binding(params: ProtocolParams, attack: AliceBindingAttack, trials: int,
                     seed: int, code: Optional[_codes.SphericalCode] = None,
                     code_seed: int = 0, outcomes: Optional[list] = None) -> TrialReport:
    """Success rate of ``attack``; a success is two accepted distinct openings."""
    if code is None:
        code = shared_code(params, code_seed)
    plan = _Plan(params, code, attack)
    wins = 0
    sizes = []
    for i in range(trials):
        o = binding_attack_run(params, code, attack, Streams(seed, i), plan)
        wins += o.success
        sizes.append(o.list_size)
        if outcomes is not None:
            outcomes.append(o.success)
    return TrialReport.from_counts(
        wins, trials, seed, params.fingerprint(),
        label=f"binding {attack.strategy} s2={attack.s2:g}", strategy=attack.strategy,
        s2=attack.s2, mean_list_size=float(np.mean(sizes)) if sizes else 0.0,
        l_g2=params.l_g2)


def binding_ablation(params: ProtocolParams, attack: AliceBindingAttack, trials: int,
                     seed: int, code: Optional[_codes.SphericalCode] = None,
                     code_seed: int = 0, level: float = 0.05) -> dict:
    """Paired comparison of ``attack`` with and without the second challenge.

    Both configurations replay the same per-trial streams. The one-sided
    exact McNemar test asks whether removing the second challenge makes
    success more likely.
    """
    if code is None:
        code = shared_code(params, code_seed)
    ablated = params.with_(beta2=0.0)
    a_out, b_out = [], []
    base = estimate_binding(params, attack, trials, seed, code, outcomes=a_out)
    abl = estimate_binding(ablated, attack, trials, seed, code, outcomes=b_out)
    a, b = np.array(a_out, bool), np.array(b_out, bool)
    only_base = int(np.count_nonzero(a & ~b))
    only_abl = int(np.count_nonzero(b & ~a))
    disc = only_base + only_abl
    p = float(stats.binomtest(only_abl, disc, 0.5, alternative="greater").pvalue) if disc else 1.0
    return {"base": base.to_dict(), "ablated": abl.to_dict(), "only_base": only_base,
            "only_ablated": only_abl, "p_value": p, "level": level,
            "pass": bool(p < level and abl.rate > base.rate)}


def spoof_level_statistics(params: ProtocolParams, code: _codes.SphericalCode, s2: float,
                           trials: int, seed: int, strategy: str = "midpoint") -> dict:
    """Sizes of the nested spoof sets over sampled ``(y, G1, G2)``.

    The hash filters keep the fullest bucket. The first-challenge bound is
    ``6 n R + 1`` with ``n R = m``, the number of message bits actually used.
    """
    sizes = np.zeros((trials, 3), dtype=np.int64)
    for i in range(trials):
        st = Streams(seed, i)
        x = transmit_vector(code, strategy, st.alice)
        y = x + math.sqrt(s2) * st.channel.standard_normal(code.n)
        g1 = sample_key(params.g1_spec, st.bob)
        g2 = sample_key(params.g2_spec, st.bob)
        sp = spoof_set(code, y, s2, params, 2, g1, g2)
        sizes[i] = (len(sp.level0), len(sp.level1), len(sp.level2))
    bound1 = 6 * params.m + 1
    ok1 = sizes[:, 1] <= bound1
    cond = sizes[ok1]
    coll = int(np.count_nonzero(cond[:, 2] > 1))
    frac1 = float(ok1.mean()) if trials else 0.0
    frac_coll = coll / len(cond) if len(cond) else float("nan")
    return {
        "trials": trials, "s2": s2, "strategy": strategy,
        "level0_mean": float(sizes[:, 0].mean()) if trials else 0.0,
        "level0_max": int(sizes[:, 0].max()) if trials else 0,
        "level1_max": int(sizes[:, 1].max()) if trials else 0,
        "level2_max": int(sizes[:, 2].max()) if trials else 0,
        "level1_bound": bound1, "level1_within_bound": frac1,
        "level1_pass": bool(frac1 >= 0.99),
        "level2_conditioned_trials": int(len(cond)),
        "level2_collision_rate": frac_coll,
        # an empty conditioning event cannot certify anything
        "level2_pass": bool(len(cond) > 0 and frac_coll <= 0.01),
        "nested": bool(np.all(sizes[:, 2] <= sizes[:, 1]) and np.all(sizes[:, 1] <= sizes[:, 0])),
    }


def level0_sizes(params: ProtocolParams, code: _codes.SphericalCode, s2: float,
                 trials: int, seed: int, strategy: str = "midpoint") -> np.ndarray:
    """List sizes ``|L(x + z)|`` for ``z ~ N(0, s2 I)``.

    The standard normal draws depend only on (seed, trial), so different
    ``s2`` values reuse the same noise directions.
    """
    out = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        st = Streams(seed, i)
        x = transmit_vector(code, strategy, st.alice)
        y = x + math.sqrt(s2) * st.channel.standard_normal(code.n)
        out[i] = len(_codes.list_decode(code, y, params.channel, params.alpha1))
    return out


def dense_spoof_params(n: int, **overrides) -> ProtocolParams:
    """Low-power family whose decoding lists are large enough to measure.

    ``P = 0.3``, ``gamma2 = 1``, ``E = P / 2.45`` and design rate ``2/3``, with
    ``m = floor(2n/3)`` message bits.
    """
    kw = dict(alpha1=0.02, beta1=0.03, beta2=0.4, beta3=0.44, eta=0.02, max_message_bits=16)
    kw.update(overrides)
    channel = ChannelParams(1.0, 1.0 + 0.3 / 2.45)
    return ProtocolParams.from_design_rate(n, 0.3, channel, 2.0 / 3.0, **kw)


def spoof_exponent_fit(make_params: Callable[[int], ProtocolParams], ns: Sequence[int],
                       s2: Optional[float], trials: int, seed: int, code_seed: int = 0,
                       confidence: float = 0.95) -> dict:
    """Least-squares slope of ``log2 E|L(Y)|`` against ``n``.

    The slope is compared with ``R_bar + 0.5 log2(E/P) + eta`` plus the
    half-width of its ``confidence`` interval.
    """
    ns = list(ns)
    logs, means = [], []
    ref = make_params(ns[-1])
    for n in ns:
        p = make_params(n)
        code = shared_code(p, code_seed)
        var = p.gamma2 if s2 is None else s2
        sz = level0_sizes(p, code, var, trials, seed)
        means.append(float(sz.mean()))
        logs.append(math.log2(max(sz.mean(), 1e-300)))
    fit = stats.linregress(ns, logs)
    dof = len(ns) - 2
    half = float(stats.t.ppf(0.5 + confidence / 2, dof) * fit.stderr) if dof > 0 else math.inf
    bound = ref.rate_bar + 0.5 * math.log2(ref.elasticity / ref.p) + ref.eta
    var = ref.gamma2 if s2 is None else s2
    return {
        "ns": ns, "mean_list_size": means, "log2_mean": logs,
        "slope": float(fit.slope), "slope_ci_halfwidth": half, "bound": bound,
        "random_code_slope": ref.rate_bar + 0.5 * math.log2(ref.elasticity / ref.p)
        + spoof_exponent_excess(ref, var),
        "pass": bool(fit.slope <= bound + half),
    }


# concealment: exact leftover-hash oracle

def exact_concealment_sd(m: int, l: int, k: Optional[int] = None,
                         width: Optional[int] = None) -> dict:
    """Exact distance of ``(Ext(U), Ext)`` from ``(uniform, Ext)``.

    ``U`` is uniform on ``m`` bits. When ``k < m`` the adversary also sees the
    top ``m - k`` bits of ``U``; each revealed value is a separate instance
    with min-entropy ``k``. The family is the 2-universal polynomial family
    over GF(2^w), with ``w = max(m, l)`` by default so that every key can be
    enumerated. The constant coefficient only permutes outputs, so only the
    linear coefficient is enumerated.

    Returns the worst instance distance, the bound ``0.5 * 2^((l - k)/2)``, the
    number of instances exceeding it, and ``pass``.
    """
    if m > 12:
        raise Refusal(f"exact enumeration refused for m={m} > 12")
    k = m if k is None else int(k)
    if not 0 <= k <= m:
        raise ParameterError(f"need 0 <= k <= m, got k={k}")
    if l < 0:
        raise ParameterError(f"l must be non-negative, got {l}")
    w = max(m, l, 1) if width is None else int(width)
    if w < max(m, l):
        raise ParameterError("field width must cover both input and output lengths")
    f = GF2Field(w)
    L = 1 << l
    K = 1 << w
    us = np.arange(1 << m, dtype=np.uint64)
    shown = 1 << (m - k)
    groups = (us >> np.uint64(k)).astype(np.int64)
    counts = np.empty((K, shown, L), dtype=np.int64)
    mask = np.uint64(L - 1)
    for start in range(0, K, 256):
        k1 = np.arange(start, min(K, start + 256), dtype=np.uint64)
        g = (f.mul_array(k1[:, None], us[None, :], m) & mask).astype(np.int64)
        idx = (np.arange(len(k1))[:, None] * shown + groups[None, :]) * L + g
        counts[start: start + len(k1)] = np.bincount(
            idx.ravel(), minlength=len(k1) * shown * L).reshape(len(k1), shown, L)
    probs = counts / float(1 << k)
    per_key = 0.5 * np.abs(probs - 1.0 / L).sum(axis=2)
    per_instance = per_key.mean(axis=0)
    bound = 0.5 * 2.0 ** ((l - k) / 2.0)
    # float summation noise is far below any meaningful gap
    viol = int(np.count_nonzero(per_instance > bound + 1e-12))
    return {"m": m, "l": l, "k": k, "width": w, "sd": float(per_instance.max()),
            "sd_mean": float(per_instance.mean()), "bound": bound, "instances": int(shown),
            "keys": K * K, "violations": viol, "pass": viol == 0}


def _all_keys(spec: HashFamilySpec) -> np.ndarray:
    K = 1 << spec.width
    grids = np.meshgrid(*([np.arange(K, dtype=np.uint64)] * spec.independence), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def digest_table(spec: HashFamilySpec) -> np.ndarray:
    """Digests of every input under every key, shape ``(keys, 2^m)``."""
    if spec.width * spec.independence > 20 or spec.input_bits > spec.width:
        raise Refusal("key space too large for exhaustive enumeration")
    keys = _all_keys(spec)
    return np.stack([eval_keys(spec, keys, u) for u in range(1 << spec.input_bits)], axis=1)


def exhaustive_universality(spec: HashFamilySpec) -> dict:
    """Exact collision frequency of every input pair over the full key space."""
    t = digest_table(spec).astype(np.int64)
    nkeys, M = t.shape
    freqs = []
    for a, b in itertools.combinations(range(M), 2):
        freqs.append(np.count_nonzero(t[:, a] == t[:, b]) / nkeys)
    freqs = np.array(freqs)
    target = 2.0 ** -spec.output_bits
    return {"pairs": len(freqs), "min": float(freqs.min()), "max": float(freqs.max()),
            "target": target, "exact": bool(np.all(freqs == target)),
            "pass": bool(np.all(freqs <= target))}


def exhaustive_independence(spec: HashFamilySpec, order: Optional[int] = None) -> dict:
    """Check that the digests of any ``order`` distinct inputs are jointly uniform."""
    order = spec.independence if order is None else order
    t = digest_table(spec).astype(np.int64)
    nkeys, M = t.shape
    L = 1 << spec.output_bits
    cells = L ** order
    expected = nkeys / cells
    worst = 0.0
    bad = 0
    subsets = 0
    weights = L ** np.arange(order)
    for combo in itertools.combinations(range(M), order):
        idx = t[:, combo] @ weights
        c = np.bincount(idx, minlength=cells)
        dev = float(np.abs(c - expected).max())
        worst = max(worst, dev)
        bad += dev != 0
        subsets += 1
    return {"order": order, "subsets": subsets, "keys": nkeys, "expected_count": expected,
            "max_deviation": worst, "pass": bad == 0}


# reduction equivalence

def _ensemble(round_fn, xs: np.ndarray, seed: int, offset: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.empty(len(xs))
    b = np.empty(len(xs))
    for i, x in enumerate(xs):
        out = round_fn(float(x), Streams(seed, offset + i))
        a[i], b[i] = out.alice_out, out.bob_out
    return a, b


def _moment_tests(a1, b1, a2, b2, alpha):
    rows = []
    series = [(f"alice_m{k}", a1 ** k, a2 ** k) for k in range(1, 5)]
    series += [(f"bob_m{k}", b1 ** k, b2 ** k) for k in range(1, 5)]
    series.append(("cross_ab", a1 * b1, a2 * b2))
    crit = alpha / len(series)
    for name, s1, s2 in series:
        d = float(s1.mean() - s2.mean())
        se = math.sqrt(s1.var(ddof=1) / len(s1) + s2.var(ddof=1) / len(s2))
        if se == 0:
            p = 1.0 if abs(d) <= 1e-12 * max(1.0, abs(float(s1.mean()))) else 0.0
        else:
            p = float(2 * stats.norm.sf(abs(d) / se))
        rows.append({"moment": name, "delta": d, "se": se, "p_value": p, "pass": p >= crit})
    return rows


def reduction_equivalence(case: str, channel: ChannelParams, samples: int, seed: int,
                          alpha: float = 0.01, bundle=None) -> dict:
    """Compare the unfair-channel round with its noiseless simulation.

    Inputs ``x`` are uniform on ``(-1, 1)``. The channel side uses the
    matched hooks from :func:`reduction_attacks`, the simulation side the
    original attack. Bob's outputs go through a two-sample Kolmogorov-Smirnov
    test; the first four raw moments of both outputs and the cross moment
    are compared by z-tests with a Bonferroni correction.

    Raises
    ------
    Refusal
        For the honest case when ``delta2 < 2 gamma2``: the oracle variance
        ``2 gamma2`` is then outside the channel's range.

    ``bundle`` overrides the matched hooks, e.g. to check that a mismatched
    pairing is detected.
    """
    if case == "honest" and channel.delta2 < 2 * channel.gamma2:
        raise Refusal(
            f"honest-case equivalence needs delta2 >= 2 gamma2 so that the oracle can pick "
            f"variance 2 gamma2 = {2 * channel.gamma2:g}; got delta2 = {channel.delta2:g}")
    if bundle is None:
        bundle = reduction_attacks(case, channel)
    theta2 = bundle.oracle_theta2 if bundle.oracle_theta2 is not None else channel.delta2
    oracle = NoiseOracle(channel, theta2)
    xs1 = stream(seed, 0, "aux", 1).uniform(-1.0, 1.0, samples)
    xs2 = stream(seed, 0, "aux", 2).uniform(-1.0, 1.0, samples)

    def unc(x, st):
        return gauss_unc_round(x, oracle, bundle.unc_alice, bundle.unc_bob, st)

    def sim(x, st):
        return sim_gauss_unc_round(x, channel.gamma2, bundle.sim_alice, bundle.sim_bob, st)

    a1, b1 = _ensemble(unc, xs1, seed, 0)
    a2, b2 = _ensemble(sim, xs2, seed, samples)
    ks = stats.ks_2samp(b1, b2)
    c_alpha = math.sqrt(-0.5 * math.log(alpha / 2))
    threshold = c_alpha * math.sqrt(2.0 / samples)
    moments = _moment_tests(a1, b1, a2, b2, alpha)
    ks_pass = bool(ks.pvalue >= alpha)
    return {
        "case": case, "samples": samples, "seed": seed, "alpha": alpha,
        "oracle_theta2": theta2,
        "statistic": float(ks.statistic), "threshold": threshold, "p_value": float(ks.pvalue),
        "ks_pass": ks_pass, "moments": moments,
        "pass": bool(ks_pass and all(r["pass"] for r in moments)),
    }


# noiseless impossibility

def noiseless_impossibility_bound(k: int, eps1: float, eps3: float) -> float:
    """``k (1 - eps1 - 2^k eps3) - 2 sqrt(eps1 + 2^k eps3)``.

    A positive value is a lower bound on the concealment error of any
    noiseless scheme committing ``k`` bits with soundness error ``eps1`` and
    binding error ``eps3``.
    """
    if k < 1:
        raise ParameterError(f"k must be at least 1, got {k}")
    for name, e in (("eps1", eps1), ("eps3", eps3)):
        if not 0 <= e <= 1:
            raise ParameterError(f"{name} must lie in [0, 1], got {e}")
    t = 2.0 ** k * eps3
    return k * (1.0 - eps1 - t) - 2.0 * math.sqrt(eps1 + t)


# suites: each returns a JSON-ready dict with an overall "pass"

def suite_soundness(params: ProtocolParams, trials: int, seed: int, theta2s=None,
                    code_seed: int = 0, min_rate: float = 0.99,
                    min_lower: float = 0.985) -> dict:
    """Honest acceptance at the channel's lower edge, midpoint and upper edge."""
    if theta2s is None:
        g, d = params.gamma2, params.delta2
        theta2s = (g, 0.5 * (g + d), d)
    code = shared_code(params, code_seed)
    rows = []
    for i, t in enumerate(theta2s):
        r = estimate_soundness(params, t, trials, seed + i, code)
        d = r.to_dict()
        d["pass"] = bool(r.rate >= min_rate and r.ci_low >= min_lower)
        rows.append(d)
    return {"suite": "soundness", "reports": rows, "pass": all(r["pass"] for r in rows)}


def suite_binding(params: ProtocolParams, trials: int, seed: int,
                  strategies: Sequence[str] = ("midpoint", "random", "codeword"),
                  s2s=None, code_seed: int = 0, max_rate: float = 0.01,
                  level: float = 0.05) -> dict:
    """Attack success for every strategy and ``s2``, plus the paired ablation."""
    if s2s is None:
        g, d = params.gamma2, params.delta2
        s2s = (g, 0.5 * (g + d), d)
    code = shared_code(params, code_seed)
    rows = []
    k = 0
    for strat in strategies:
        for s2 in s2s:
            r = estimate_binding(params, AliceBindingAttack(s2, strat), trials, seed + k, code)
            k += 1
            d = r.to_dict()
            d["pass"] = bool(r.rate <= max_rate)
            rows.append(d)
    abl = binding_ablation(params, AliceBindingAttack(params.gamma2, "midpoint"), trials,
                           seed + k, code, level=level)
    return {"suite": "binding", "reports": rows, "ablation": abl,
            "attack_pass": all(r["pass"] for r in rows), "ablation_pass": abl["pass"],
            "pass": bool(all(r["pass"] for r in rows) and abl["pass"])}


def suite_spoof(params: ProtocolParams, trials: int, seed: int, ns: Sequence[int],
                fit_trials: int, code_seed: int = 0) -> dict:
    """Nested spoof-set statistics and the level-0 exponent fit."""
    code = shared_code(params, code_seed)
    levels = spoof_level_statistics(params, code, params.gamma2, trials, seed)
    fit = spoof_exponent_fit(dense_spoof_params, ns, None, fit_trials, seed + 1, code_seed)
    return {"suite": "spoof", "levels": levels, "exponent_fit": fit,
            "pass": bool(levels["level1_pass"] and levels["level2_pass"] and fit["pass"])}


def suite_concealment(m: int = 10, ls: Sequence[int] = (1, 2, 4)) -> dict:
    rows = [exact_concealment_sd(m, l) for l in ls]
    return {"suite": "concealment", "reports": rows, "pass": all(r["pass"] for r in rows)}


def suite_hashing(width: int = 4, input_bits: int = 4, output_bits: int = 2) -> dict:
    """Exhaustive 2-universality and 4-wise independence over a tiny field."""
    uni = exhaustive_universality(make_family(input_bits, output_bits, 2, width))
    ind = exhaustive_independence(make_family(input_bits, output_bits, 4, width))
    return {"suite": "hashing", "universality": uni, "independence": ind,
            "pass": bool(uni["exact"] and ind["pass"])}


def suite_reduction(channel: ChannelParams, samples: int, seed: int,
                    alpha: float = 0.01) -> dict:
    """All three reduction cases, and the honest-case refusal when it applies."""
    from .adversary import CASES

    rows = []
    for i, case in enumerate(CASES):
        try:
            rows.append(reduction_equivalence(case, channel, samples, seed + i, alpha))
        except Refusal as exc:
            rows.append({"case": case, "refused": True, "reason": str(exc), "pass": False})
    narrow = ChannelParams(channel.gamma2, 1.5 * channel.gamma2)
    try:
        reduction_equivalence("honest", narrow, 2, seed)
        refuses = False
    except Refusal:
        refuses = True
    return {"suite": "reduction", "reports": rows, "honest_refusal": refuses,
            "pass": bool(refuses and all(r["pass"] for r in rows))}


def suite_impossibility(k: int = 3, eps1: float = 2.0 ** -9, eps3: float = 2.0 ** -9) -> dict:
    v = noiseless_impossibility_bound(k, eps1, eps3)
    return {"suite": "impossibility", "k": k, "eps1": eps1, "eps3": eps3, "bound": v,
            "pass": bool(v > 0)}


SUITES = ("hashing", "concealment", "impossibility", "soundness", "binding", "spoof",
          "reduction")
