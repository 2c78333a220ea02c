"""Cheating strategies against the protocol and the channel reduction.

* Binding attacks: a cheating Alice picks the channel variance and a
  transmit vector that is not a codeword, then tries to open two different
  messages consistently with Bob's view.
* Spoof sets: the codewords such an Alice could reveal, before and after the
  two hash filters.
* Concealment views: the exact distance between Bob's views of two committed
  values on a small circle code.
* Reduction attacks: the channel-side hooks that mirror an attack on the
  noiseless simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import stats

from . import codes as _codes
from .channel import HONEST, NoiseOracle, StrategyHooks, check_variance
from .errors import ParameterError, Refusal
from .hashing import GF2Field, eval_hash, eval_many, extract, make_family, sample_key
from .protocol import (HonestBob, NoiselessLink, ProtocolParams, RevealClaim, Transcript,
                       Verdict, reveal)
from .rates import ChannelParams
from .streams import Streams, random_bits

STRATEGIES = ("midpoint", "random", "codeword")


# binding

@dataclass(frozen=True)
class AliceBindingAttack:
    """A cheating Alice's plan for one commit phase.

    Parameters
    ----------
    s2 : float
        Channel variance she fixes, inside ``[gamma2, delta2]``.
    strategy : str
        ``"midpoint"``: the midpoint of the code's closest pair, pushed onto
        the power sphere. ``"random"``: a fresh uniform point on the sphere.
        ``"codeword"``: an honest codeword.
    min_probability : float
        Candidates whose chance of landing in Bob's list is below this are
        ignored.
    """

    s2: float
    strategy: str = "midpoint"
    min_probability: float = 1e-3

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"unknown attack strategy {self.strategy!r}; "
                                 f"choose from {', '.join(STRATEGIES)}")


def transmit_vector(code: _codes.SphericalCode, strategy: str,
                    rng: np.random.Generator) -> np.ndarray:
    """Alice's transmit vector; always obeys ``|x|^2 <= n P``."""
    r = math.sqrt(code.radius2)
    if strategy == "midpoint":
        i, j = code.closest_pair
        v = code.codewords[i] + code.codewords[j]
    elif strategy == "random":
        v = rng.standard_normal(code.n)
    elif strategy == "codeword":
        return code.codewords[int(rng.integers(0, code.size))].copy()
    else:
        raise ParameterError(f"unknown attack strategy {strategy!r}")
    return v * (r / np.linalg.norm(v)) * (1.0 - 1e-15)


def list_probabilities(code: _codes.SphericalCode, x: np.ndarray, s2: float,
                       params: ProtocolParams) -> np.ndarray:
    """Chance that each codeword lands in Bob's list when ``y = x + N(0, s2 I)``.

    ``|c - y|^2 / s2`` is noncentral chi-square with ``n`` degrees of freedom
    and noncentrality ``|c - x|^2 / s2``.
    """
    lo, hi = _codes.annulus_bounds(code.n, params.channel, params.alpha1)
    n = code.n
    d2 = np.maximum(_codes.distances2(code, x), 0.0)
    # |c - y|^2 has mean d2 + n s2 and variance 2 n s2^2 + 4 s2 d2; codewords
    # more than 8 standard deviations outside the annulus are dropped
    sd = np.sqrt(2 * n * s2 * s2 + 4 * s2 * d2)
    mean = d2 + n * s2
    near = np.flatnonzero((mean - 8 * sd <= hi) & (mean + 8 * sd >= lo))
    out = np.zeros(code.size)
    lam = d2[near] / s2
    upper = stats.ncx2.cdf(hi / s2, n, lam)
    lower = stats.ncx2.cdf(lo / s2, n, lam) if lo > 0 else 0.0
    out[near] = np.clip(upper - lower, 0.0, 1.0)
    return out


def _best_bucket(digests: np.ndarray, weights: np.ndarray) -> int:
    """Digest value whose bucket gives Alice the best chance of two openings.

    Buckets are scored by total weight minus the heaviest member, which
    rewards having a second plausible candidate.
    """
    if digests.size == 0:
        return 0
    keys, inv = np.unique(digests, return_inverse=True)
    tot = np.bincount(inv, weights=weights)
    top = np.zeros(len(keys))
    np.maximum.at(top, inv, weights)
    score = tot - top
    # ties go to the bucket with the heaviest member
    best = np.lexsort((-top, -score))[0]
    return int(keys[best])


@dataclass
class BindingOutcome:
    claims: list
    verdicts: list
    success: bool
    n_candidates: int
    list_size: int
    level1_size: int
    level2_size: int


def is_binding_break(claims, verdicts) -> bool:
    """Two accepted claims with different messages from one view."""
    opened = {c.u for c, v in zip(claims, verdicts) if v.accepted}
    return len(opened) >= 2


class _Plan:
    """Per-(code, attack) precomputation for deterministic transmit vectors."""

    def __init__(self, params, code, attack):
        self.x = None
        self.cand = None
        self.prob = None
        if attack.strategy == "midpoint":
            self.x = transmit_vector(code, "midpoint", None)
            self._score(params, code, attack, self.x)

    def _score(self, params, code, attack, x):
        p = list_probabilities(code, x, attack.s2, params)
        self.cand = np.flatnonzero(p >= attack.min_probability)
        self.prob = p[self.cand]


def binding_attack_run(params: ProtocolParams, code: _codes.SphericalCode,
                       attack: AliceBindingAttack, rng, plan: Optional[_Plan] = None
                       ) -> BindingOutcome:
    """One commit phase against honest Bob followed by every opening attempt.

    Alice keeps the candidates most likely to land in Bob's list, answers each
    hash challenge with the digest that keeps the best candidate bucket, and
    then claims every message left in that bucket, each with the committed
    value forced by the one-time pad. The run succeeds if Bob would accept
    two of those claims.
    """
    streams = rng if isinstance(rng, Streams) else Streams(int(rng))
    check_variance(params.channel, attack.s2)
    oracle = NoiseOracle(params.channel, attack.s2)
    rng_a = streams.alice
    if plan is None:
        plan = _Plan(params, code, attack)
    if plan.x is not None:
        x, cand, prob = plan.x, plan.cand, plan.prob
    else:
        x = transmit_vector(code, attack.strategy, rng_a)
        p = list_probabilities(code, x, attack.s2, params)
        cand = np.flatnonzero(p >= attack.min_probability)
        prob = p[cand]

    link = NoiselessLink()
    bob = HonestBob(params, code, streams.bob, link)
    y = x + math.sqrt(oracle.theta2) * streams.channel.standard_normal(code.n)
    bob.receive(y)

    g1 = bob.challenge1()
    d1 = eval_many(params.g1_spec, g1, cand) if cand.size else np.zeros(0, np.uint64)
    h1 = _best_bucket(d1, prob)
    link.send("alice", "h1", h1)
    keep = d1 == np.uint64(h1)
    cand1, prob1 = cand[keep], prob[keep]

    g2 = bob.challenge2()
    d2 = eval_many(params.g2_spec, g2, cand1) if cand1.size else np.zeros(0, np.uint64)
    h2 = _best_bucket(d2, prob1)
    link.send("alice", "h2", h2)
    final = cand1[d2 == np.uint64(h2)]

    ext_key = sample_key(params.ext_spec, rng_a)
    link.send("alice", "ext_key", ext_key)
    c_fake = random_bits(rng_a, params.l_ext)
    u0 = int(final[0]) if final.size else 0
    q = c_fake ^ extract(params.ext_spec, ext_key, u0)
    link.send("alice", "otp", q)

    view_b = bob.view()
    t = view_b.transcript
    claims, verdicts = [], []
    for u in final:
        u = int(u)
        claim = RevealClaim(q ^ extract(params.ext_spec, ext_key, u), u)
        claims.append(claim)
        verdicts.append(reveal(view_b, t, claim))

    dl = view_b.decode_list
    lvl1 = int(np.count_nonzero(eval_many(params.g1_spec, g1, dl.members) == np.uint64(h1))) \
        if len(dl) else 0
    return BindingOutcome(claims, verdicts, is_binding_break(claims, verdicts),
                          int(cand.size), len(dl), lvl1,
                          sum(1 for c in claims if c.u in dl))


# spoof sets

@dataclass(frozen=True, eq=False)
class SpoofSet:
    """Nested spoof sets: annulus, then first-hash, then second-hash filter.

    The hash filters keep the fullest bucket, so each level is the
    worst case over the digest Alice could have announced.
    """

    level0: np.ndarray
    level1: np.ndarray
    level2: np.ndarray
    h1: int
    h2: int
    s2: float

    def level(self, k: int) -> np.ndarray:
        return (self.level0, self.level1, self.level2)[k]


def _fullest(digests: np.ndarray) -> tuple[int, np.ndarray]:
    if digests.size == 0:
        return 0, np.zeros(0, dtype=bool)
    vals, counts = np.unique(digests, return_counts=True)
    h = int(vals[np.argmax(counts)])
    return h, digests == np.uint64(h)


def spoof_set(code: _codes.SphericalCode, y, s2: float, params: ProtocolParams,
              level: int = 2, g1_key=None, g2_key=None) -> SpoofSet:
    """Spoof set of ``y`` up to filter ``level`` (0, 1 or 2).

    ``s2`` is only recorded; membership depends on ``y`` and the keys.
    """
    if level not in (0, 1, 2):
        raise ParameterError(f"filter level must be 0, 1 or 2, got {level}")
    l0 = _codes.list_decode(code, y, params.channel, params.alpha1).members
    if level == 0:
        return SpoofSet(l0, l0, l0, 0, 0, s2)
    if g1_key is None:
        raise ParameterError("level 1 needs a first-challenge key")
    h1, keep = _fullest(eval_many(params.g1_spec, g1_key, l0) if l0.size else np.zeros(0, np.uint64))
    l1 = l0[keep]
    if level == 1:
        return SpoofSet(l0, l1, l1, h1, 0, s2)
    if g2_key is None:
        raise ParameterError("level 2 needs a second-challenge key")
    h2, keep2 = _fullest(eval_many(params.g2_spec, g2_key, l1) if l1.size else np.zeros(0, np.uint64))
    return SpoofSet(l0, l1, l1[keep2], h1, h2, s2)


def cap_fraction(n: int, r2: float, rho2: float, lo: float, hi: float) -> float:
    """Fraction of the radius-``sqrt(r2)`` sphere within squared distance
    ``[lo, hi]`` of a point at squared norm ``rho2``.

    For a uniform point on the sphere, ``(1 + cos angle) / 2`` follows
    ``Beta((n-1)/2, (n-1)/2)``.
    """
    r, rho = math.sqrt(r2), math.sqrt(rho2)
    if rho == 0:
        return float(lo <= r2 <= hi)
    a = (n - 1) / 2.0

    def cdf_at(dist2):
        t = (r2 + rho2 - dist2) / (2 * r * rho)
        return stats.beta.cdf((1 + np.clip(t, -1, 1)) / 2, a, a)

    # squared distance decreases as the cosine grows
    return float(max(0.0, cdf_at(lo) - cdf_at(hi)))


def random_code_list_size(params: ProtocolParams, s2: float, x_norm2: Optional[float] = None,
                          samples: int = 4000, seed: int = 0) -> float:
    """Expected ``|L(Y)|`` for a code of independent uniform codewords.

    Averages the exact cap fraction over the law of ``|Y|^2`` when
    ``Y = x + N(0, s2 I)``; the geometry reference for list-size tests.
    """
    n = params.n
    if x_norm2 is None:
        x_norm2 = n * params.p
    rng = np.random.default_rng(seed)
    rho2 = stats.ncx2.rvs(n, x_norm2 / s2, size=samples, random_state=rng) * s2
    lo, hi = _codes.annulus_bounds(n, params.channel, params.alpha1)
    fr = [cap_fraction(n, n * params.p, float(r), lo, hi) for r in rho2]
    return float(np.mean(fr) * (1 << params.m))


def spoof_exponent_excess(params: ProtocolParams, s2: float) -> float:
    """Large-``n`` exponent of ``|L(Y)|`` for a random code minus the
    ``R_bar + 0.5 log2(E/P)`` rate, using only the upper annulus edge.

    Positive values mean list sizes outgrow the counting bound.
    """
    P = params.p
    d2 = params.delta2 + params.alpha1
    e2 = d2 - s2
    sin2 = (4 * d2 * P - e2 * e2) / (4 * P * (P + s2))
    return 0.5 * math.log2(min(1.0, sin2)) - 0.5 * math.log2(params.elasticity / P)


# concealment

@dataclass
class ConcealmentSummary:
    m: int
    l: int
    s2: float
    key_sd: float
    view_sd: float
    min_entropy: float
    bound: float
    mi_proxy: float
    bound_mi: float
    grid_points: int

    @property
    def passed(self) -> bool:
        return self.key_sd <= self.bound

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["pass"] = self.passed
        return d


def concealment_attack_views(m: int, l: int, s2: float, c0: int = 0, c1: int = 1,
                             p: float = 1.0, d_hat: float = 1e-3, code_seed: int = 0,
                             step: float = 0.25, extent: float = 7.0,
                             gamma2: Optional[float] = None) -> ConcealmentSummary:
    """Exact distance between Bob's views under commitments ``c0`` and ``c1``.

    The codebook is ``2^m`` points on a circle (``n = 2``). Bob's view is
    ``(Y, extractor key, Q)``; the hash challenges are not part of this exact
    oracle. Every message and every extractor key is enumerated and the
    Gaussian likelihood of ``Y`` is integrated on a square grid of spacing
    ``step * s`` extending ``extent * s`` beyond the codebook.

    The extractor lives in GF(2^w) with ``w = max(m, l)``. The constant key
    coefficient only relabels ``Q``, so only the linear coefficient is
    enumerated.

    Returns the distance of the extractor output from uniform given Bob's
    view (``key_sd``), the distance between the two committed-value views
    (``view_sd <= 2 key_sd``), the average conditional min-entropy ``k`` of
    ``U`` given ``Y``, and the leftover-hash bound ``0.5 * 2^((l - k)/2)``.
    """
    if m > 12:
        raise Refusal(f"exact enumeration refused for m={m} > 12")
    if not 0 <= l <= m:
        raise ParameterError(f"need 0 <= l <= m, got l={l}, m={m}")
    M = 1 << m
    n = 2
    r = math.sqrt(n * p)
    # equally spaced points on the circle, rotated by a seeded offset
    phase = np.random.default_rng(code_seed).uniform(0, 2 * np.pi / M)
    ang = phase + 2 * np.pi * np.arange(M) / M
    cw = r * np.stack([np.cos(ang), np.sin(ang)], axis=1)

    s = math.sqrt(s2)
    h = step * s
    half = r + extent * s
    axis = np.arange(-half, half + h / 2, h)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    d2 = ((pts[:, None, :] - cw[None, :, :]) ** 2).sum(-1)
    # f(y, u) on the grid, including the 2^-m prior and the cell area
    like = np.exp(-d2 / (2 * s2)) / (2 * np.pi * s2) * (h * h) / M

    min_entropy = -math.log2(like.max(axis=1).sum())
    marg = like.sum(axis=1)

    w = max(m, l, 1)
    field = GF2Field(w)
    us = np.arange(M, dtype=np.uint64)
    L = 1 << l
    key_sd = 0.0
    view_sd = 0.0
    shift = (c0 ^ c1) & (L - 1)
    for k1 in range(1 << w):
        g = field.mul_array(np.uint64(k1), us, m) & np.uint64(L - 1)
        onehot = np.zeros((M, L))
        onehot[np.arange(M), g.astype(np.int64)] = 1.0
        F = like @ onehot
        key_sd += 0.5 * np.abs(F - marg[:, None] / L).sum()
        view_sd += 0.5 * np.abs(F - F[:, np.arange(L) ^ shift]).sum()
    key_sd /= 1 << w
    view_sd /= 1 << w

    g2 = s2 if gamma2 is None else gamma2
    mi = n * 0.5 * math.log2(1.0 + p / g2)
    k_mi = m - mi
    return ConcealmentSummary(m=m, l=l, s2=s2, key_sd=float(key_sd), view_sd=float(view_sd),
                              min_entropy=float(min_entropy),
                              bound=0.5 * 2.0 ** ((l - min_entropy) / 2.0),
                              mi_proxy=float(k_mi), bound_mi=0.5 * 2.0 ** ((l - k_mi) / 2.0),
                              grid_points=len(pts))


# reduction attacks

CASES = ("honest", "alice-cheats", "bob-cheats")


def default_sim_attack(case: str) -> tuple[StrategyHooks, StrategyHooks]:
    """A concrete, randomized attack on the noiseless simulation.

    Alice sends ``W = 2x + 0.5 N(0,1)`` and outputs ``W - x``. Bob outputs
    ``2W + W^3 / 4``.
    """
    if case == "alice-cheats":
        a = StrategyHooks(
            transmit=lambda x, t2, view, rng: 2.0 * x + 0.5 * rng.standard_normal(),
            output=lambda w, t2, x, view, rng: w - x,
        )
        return a, HONEST
    if case == "bob-cheats":
        b = StrategyHooks(output=lambda w, t2, view, rng: 2.0 * w + 0.25 * w ** 3)
        return HONEST, b
    if case == "honest":
        return HONEST, HONEST
    raise ParameterError(f"unknown reduction case {case!r}; choose from {', '.join(CASES)}")


@dataclass(frozen=True)
class ReductionBundle:
    """Matched hooks: an attack on the simulation and its channel-side mirror."""

    case: str
    sim_alice: StrategyHooks
    sim_bob: StrategyHooks
    unc_alice: StrategyHooks
    unc_bob: StrategyHooks
    oracle_theta2: Optional[float]


def reduction_attacks(case: str, channel: ChannelParams,
                      sim_alice: Optional[StrategyHooks] = None,
                      sim_bob: Optional[StrategyHooks] = None) -> ReductionBundle:
    """Channel-side hooks reproducing an attack on the noiseless simulation.

    Cheating Alice fixes the variance to ``gamma2``, sends what she would
    have sent as ``W`` and outputs what she would have output. Cheating Bob
    fixes the variance to ``gamma2`` and applies his output map to ``Y``.
    The honest case uses no hooks and the oracle variance ``2 gamma2``.
    """
    if case not in CASES:
        raise ParameterError(f"unknown reduction case {case!r}; choose from {', '.join(CASES)}")
    da, db = default_sim_attack(case)
    sim_alice = da if sim_alice is None else sim_alice
    sim_bob = db if sim_bob is None else sim_bob
    g2 = channel.gamma2
    if case == "honest":
        return ReductionBundle(case, HONEST, HONEST, HONEST, HONEST, 2.0 * g2)
    if case == "alice-cheats":
        a1, a3 = sim_alice.transmit, sim_alice.output
        unc_a = StrategyHooks(
            variance=lambda view, rng: g2,
            transmit=None if a1 is None else (lambda x, t2, view, rng: a1(x, None, view, rng)),
            output=None if a3 is None else (lambda xt, t2, x, view, rng: a3(xt, None, x, view, rng)),
            view=sim_alice.view,
        )
        return ReductionBundle(case, sim_alice, HONEST, unc_a, HONEST, None)
    b3 = sim_bob.output
    unc_b = StrategyHooks(
        variance=lambda view, rng: g2,
        output=None if b3 is None else (lambda y, t2, view, rng: b3(y, None, view, rng)),
        view=sim_bob.view,
    )
    return ReductionBundle(case, HONEST, sim_bob, HONEST, unc_b, None)
