"""Commit and reveal phases of the spherical-code / hash-challenge protocol.

Commit phase, in order:

1. Alice draws a uniform ``m``-bit string ``U``.
2. Alice sends the codeword ``psi(U)`` over the unfair channel; Bob gets ``y``.
3. Bob forms the annulus list ``L(y)``.
4. Bob sends a key of the first challenge family ``G1``.
5. Alice answers ``h1 = G1(U)``.
6. Bob sends a key of the second challenge family ``G2``.
7. Alice answers ``h2 = G2(U)``.
8. Alice draws an extractor key and sends it with ``Q = c XOR Ext(U)``.

Reveal: Alice announces ``(c~, u~)``. Bob accepts iff ``u~`` is in his list,
both hash answers match, and ``c~ = Q XOR Ext(u~)``.

Messages and committed values are integers holding bit strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from . import codes as _codes
from .channel import NoiseOracle, transmit
from .errors import ParameterError, ProtocolViolation
from .hashing import HashFamilySpec, HashKey, eval_hash, extract, make_family, sample_key
from .rates import ChannelParams, code_rate, commit_rate, distance_for_rate, elasticity
from .streams import Streams, random_bits, stream

_EPS = 1e-9


def ceil_bits(x: float) -> int:
    """Ceiling that ignores floating noise just above an integer."""
    return max(0, math.ceil(x - _EPS))


@dataclass(frozen=True)
class ProtocolParams:
    """Blocklength, code and slack parameters of one protocol instance.

    Parameters
    ----------
    n : int
        Number of channel uses.
    p : float
        Power constraint ``P``.
    channel : ChannelParams
        Variance range.
    d_hat : float
        Normalized code distance; the codebook satisfies
        ``d_min^2 >= n d_hat^2 P``.
    alpha1 : float
        Annulus slack of Bob's list decoder.
    beta1, beta2, beta3, eta : float
        Hash-length and rate slacks. ``beta2 = 0`` removes the second
        challenge (zero-length digests) and is meant for ablations.
    beta_tilde : float
        Slack between the code-rate formula and the design rate
        ``R_bar = code_rate(d_hat) - beta_tilde``.
    max_message_bits : int
        Cap on ``m``; the effective rate ``m / n`` is reported separately.
    g1_max_independence : int
        Cap on the independence of the first challenge family.
    """

    n: int
    p: float
    channel: ChannelParams
    d_hat: float
    alpha1: float = 0.6
    beta1: float = 0.05
    beta2: float = 0.1
    beta3: float = 0.2
    eta: float = 0.04
    beta_tilde: float = 0.05
    max_message_bits: int = 12
    g1_max_independence: int = 16
    hash_width: int = 64

    def __post_init__(self) -> None:
        errs = self.violations()
        if errs:
            exc = ParameterError("; ".join(errs))
            exc.errors = errs
            raise exc

    # validation

    def violations(self) -> list[str]:
        """Every violated constraint, each naming its reason."""
        errs = []
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            errs.append(f"n must be a positive integer, got {self.n!r}")
        if not self.p > 0:
            errs.append(f"power P must be positive, got {self.p!r}")
        if elasticity(self.channel) <= 0:
            errs.append("elasticity E = delta2 - gamma2 must be positive; at E = 0 the "
                        "capacity is unbounded and the list-size exponent is undefined")
        if not 0 < self.d_hat < 2:
            errs.append(f"d_hat must lie in (0, 2), got {self.d_hat!r}")
        if self.alpha1 < 0:
            errs.append(f"alpha1 must be non-negative, got {self.alpha1!r}")
        for name in ("beta1", "beta3", "eta", "beta_tilde"):
            if not getattr(self, name) > 0:
                errs.append(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.beta2 < 0:
            errs.append(f"beta2 must be non-negative, got {self.beta2!r}")
        if not self.beta3 > self.beta1 + self.beta2:
            errs.append(f"need beta3 > beta1 + beta2 (the extractor output must leave room "
                        f"for both hash challenges); got beta3={self.beta3}, "
                        f"beta1 + beta2={self.beta1 + self.beta2}")
        if not self.eta < self.beta1:
            errs.append(f"need eta < beta1 (the first challenge must be longer than the "
                        f"spoof-set exponent slack); got eta={self.eta}, beta1={self.beta1}")
        if self.max_message_bits < 1 or self.max_message_bits > _codes.MAX_MESSAGE_BITS:
            errs.append(f"max_message_bits must be in [1, {_codes.MAX_MESSAGE_BITS}]")
        if errs:
            return errs
        lower = self.list_rate_floor
        if not self.rate_bar > lower:
            errs.append(f"need R_bar > 0.5 log2(P/E) = {lower:.6g} (the code must be "
                        f"denser than the spoof-set exponent); got R_bar={self.rate_bar:.6g}")
        if self.m < 1:
            errs.append(f"message length floor(n R_bar) must be at least 1, got {self.m}")
        if not errs:
            for label, bits in (("G1", self.l_g1), ("G2", self.l_g2), ("Ext", self.l_ext)):
                if bits > self.hash_width:
                    errs.append(f"{label} output of {bits} bits exceeds the "
                                f"{self.hash_width}-bit hash field")
        return errs

    @property
    def instantiable(self) -> bool:
        return self.commit_rate > 0 and self.l_ext >= 1

    # derived quantities

    @property
    def gamma2(self) -> float:
        return self.channel.gamma2

    @property
    def delta2(self) -> float:
        return self.channel.delta2

    @property
    def elasticity(self) -> float:
        return elasticity(self.channel)

    @property
    def list_rate_floor(self) -> float:
        """``0.5 log2(P/E)``, the rate the code must exceed."""
        return 0.5 * math.log2(self.p / self.elasticity)

    @property
    def rate_bar(self) -> float:
        """Design code rate ``R_bar``."""
        return code_rate(self.d_hat) - self.beta_tilde

    @property
    def m_uncapped(self) -> int:
        return int(math.floor(self.n * self.rate_bar + _EPS))

    @property
    def m(self) -> int:
        return min(self.m_uncapped, self.max_message_bits)

    @property
    def message_bits_capped(self) -> bool:
        return self.m < self.m_uncapped

    @property
    def rate_bar_effective(self) -> float:
        return self.m / self.n

    @property
    def commit_rate(self) -> float:
        return float(commit_rate(self.p, self.channel, self.beta3))

    @property
    def l_g1(self) -> int:
        return ceil_bits(self.n * (self.rate_bar - self.list_rate_floor + self.beta1))

    @property
    def l_g2(self) -> int:
        return ceil_bits(self.n * self.beta2)

    @property
    def l_ext(self) -> int:
        return ceil_bits(self.n * self.commit_rate)

    @property
    def xi_g1_uncapped(self) -> int:
        return max(2, ceil_bits(3 * self.n * self.rate_bar))

    @property
    def xi_g1(self) -> int:
        return min(self.xi_g1_uncapped, self.g1_max_independence)

    @property
    def g1_spec(self) -> HashFamilySpec:
        return make_family(self.m, self.l_g1, self.xi_g1, self.hash_width)

    @property
    def g2_spec(self) -> HashFamilySpec:
        return make_family(self.m, self.l_g2, 2, self.hash_width)

    @property
    def ext_spec(self) -> HashFamilySpec:
        return make_family(self.m, self.l_ext, 2, self.hash_width)

    def with_(self, **changes) -> "ProtocolParams":
        return replace(self, **changes)

    @classmethod
    def from_design_rate(cls, n: int, p: float, channel: ChannelParams, rate_bar: float,
                         **kw) -> "ProtocolParams":
        """Pick ``d_hat`` so that the design rate equals ``rate_bar``."""
        bt = kw.get("beta_tilde", cls.__dataclass_fields__["beta_tilde"].default)
        return cls(n=n, p=p, channel=channel, d_hat=distance_for_rate(rate_bar + bt), **kw)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "p": self.p, "gamma2": self.gamma2, "delta2": self.delta2,
            "d_hat": self.d_hat, "alpha1": self.alpha1, "beta1": self.beta1,
            "beta2": self.beta2, "beta3": self.beta3, "eta": self.eta,
            "beta_tilde": self.beta_tilde, "max_message_bits": self.max_message_bits,
            "g1_max_independence": self.g1_max_independence, "hash_width": self.hash_width,
        }

    def derived(self) -> dict:
        return {
            "rate_bar": self.rate_bar, "rate_bar_effective": self.rate_bar_effective,
            "m": self.m, "m_uncapped": self.m_uncapped,
            "message_bits_capped": self.message_bits_capped,
            "commit_rate": self.commit_rate, "l_g1": self.l_g1, "xi_g1": self.xi_g1,
            "xi_g1_uncapped": self.xi_g1_uncapped, "l_g2": self.l_g2, "l_ext": self.l_ext,
        }

    def fingerprint(self) -> str:
        items = sorted(self.to_dict().items())
        return ",".join(f"{k}={v!r}" for k, v in items)

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolParams":
        d = dict(d)
        ch = ChannelParams(float(d.pop("gamma2")), float(d.pop("delta2")))
        return cls(channel=ch, **d)


def desk_params(**overrides) -> ProtocolParams:
    """Default desk-scale instance: gamma2=1, delta2=1.5, P=10, n=128.

    The design rate sits 0.25 bit above ``0.5 log2(P/E)``.
    """
    ch = ChannelParams(overrides.pop("gamma2", 1.0), overrides.pop("delta2", 1.5))
    n = overrides.pop("n", 128)
    p = overrides.pop("p", 10.0)
    margin = overrides.pop("rate_margin", 0.25)
    floor = 0.5 * math.log2(p / (ch.delta2 - ch.gamma2))
    return ProtocolParams.from_design_rate(n, p, ch, floor + margin, **overrides)


@lru_cache(maxsize=16)
def _cached_code(n: int, m: int, p: float, d_hat: float, seed: int) -> _codes.SphericalCode:
    return _codes.build_spherical_code(n, m, p, d_hat, stream(seed, 0, "code"))


def shared_code(params: ProtocolParams, seed: int = 0) -> _codes.SphericalCode:
    """The codebook both parties agree on for ``params`` (cached per seed)."""
    return _cached_code(params.n, params.m, params.p, params.d_hat, int(seed))


# noiseless link and transcripts

_STEPS = (
    ("C4", "bob", "g1_key"),
    ("C5", "alice", "h1"),
    ("C6", "bob", "g2_key"),
    ("C7", "alice", "h2"),
    ("C8", "alice", "ext_key"),
    ("C8", "alice", "otp"),
)


class NoiselessLink:
    """Authenticated in-memory link enforcing the commit-phase message order."""

    def __init__(self):
        self.log: list[tuple[str, str, str, object]] = []

    def send(self, sender: str, name: str, value) -> None:
        i = len(self.log)
        if i >= len(_STEPS):
            raise ProtocolViolation(f"unexpected extra message {name!r}; the commit phase is over")
        step, who, expected = _STEPS[i]
        if (sender, name) != (who, expected):
            raise ProtocolViolation(
                f"step {step} expects {expected!r} from {who}, got {name!r} from {sender}")
        self.log.append((step, sender, name, value))

    def value(self, name: str):
        for _, _, k, v in self.log:
            if k == name:
                return v
        raise KeyError(name)

    def transcript(self) -> "Transcript":
        if len(self.log) != len(_STEPS):
            raise ProtocolViolation("commit phase incomplete")
        d = {k: v for _, _, k, v in self.log}
        return Transcript(**d)


@dataclass(frozen=True)
class Transcript:
    """Everything exchanged on the noiseless link during the commit phase."""

    g1_key: HashKey
    h1: int
    g2_key: HashKey
    h2: int
    ext_key: HashKey
    otp: int

    def to_dict(self) -> dict:
        return {
            "g1_key": self.g1_key.to_hex(), "h1": format(self.h1, "x"),
            "g2_key": self.g2_key.to_hex(), "h2": format(self.h2, "x"),
            "ext_key": self.ext_key.to_hex(), "otp": format(self.otp, "x"),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Transcript":
        return cls(HashKey.from_hex(d["g1_key"]), int(d["h1"], 16),
                   HashKey.from_hex(d["g2_key"]), int(d["h2"], 16),
                   HashKey.from_hex(d["ext_key"]), int(d["otp"], 16))


@dataclass(frozen=True, eq=False)
class ViewA:
    c: int
    u: int
    x: np.ndarray
    transcript: Transcript


@dataclass(frozen=True, eq=False)
class ViewB:
    y: np.ndarray
    decode_list: _codes.DecodeList
    transcript: Transcript
    params: ProtocolParams = field(repr=False)


@dataclass(frozen=True)
class RevealClaim:
    c: int
    u: int


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Optional[str] = None

    def __str__(self) -> str:
        return "accept" if self.accepted else f"reject({self.reason})"


ACCEPT = Verdict(True)


class HonestBob:
    """Bob's side of the commit phase; holds only Bob's view."""

    def __init__(self, params: ProtocolParams, code: _codes.SphericalCode,
                 rng: np.random.Generator, link: NoiselessLink):
        self.params, self.code, self.rng, self.link = params, code, rng, link
        self.y = None
        self.decode_list = None

    def receive(self, y) -> None:
        self.y = np.asarray(y, dtype=float)
        self.decode_list = _codes.list_decode(self.code, self.y, self.params.channel,
                                              self.params.alpha1)

    def challenge1(self) -> HashKey:
        key = sample_key(self.params.g1_spec, self.rng)
        self.link.send("bob", "g1_key", key)
        return key

    def challenge2(self) -> HashKey:
        key = sample_key(self.params.g2_spec, self.rng)
        self.link.send("bob", "g2_key", key)
        return key

    def view(self) -> ViewB:
        return ViewB(self.y, self.decode_list, self.link.transcript(), self.params)


def commit(params: ProtocolParams, code: _codes.SphericalCode, c: int, oracle: NoiseOracle,
           rng_a: np.random.Generator, rng_b: np.random.Generator,
           rng_channel: np.random.Generator) -> tuple[ViewA, ViewB, Transcript]:
    """Run the honest commit phase for the ``l_ext``-bit value ``c``."""
    if not params.instantiable:
        raise ParameterError(f"protocol not instantiable: commit rate R={params.commit_rate:.6g}")
    if code.n != params.n or code.m != params.m:
        raise ParameterError("codebook dimensions do not match the protocol parameters")
    if oracle.params != params.channel:
        raise ProtocolViolation("oracle belongs to a different channel")
    c = int(c)
    if c < 0 or c >> params.l_ext:
        raise ParameterError(f"committed value must fit in {params.l_ext} bits")

    link = NoiselessLink()
    bob = HonestBob(params, code, rng_b, link)

    u = int(rng_a.integers(0, 1 << params.m))
    x = _codes.encode(code, u)
    bob.receive(transmit(x, oracle, rng_channel).y)

    g1 = bob.challenge1()
    link.send("alice", "h1", eval_hash(params.g1_spec, g1, u))
    g2 = bob.challenge2()
    link.send("alice", "h2", eval_hash(params.g2_spec, g2, u))
    ext_key = sample_key(params.ext_spec, rng_a)
    link.send("alice", "ext_key", ext_key)
    link.send("alice", "otp", c ^ extract(params.ext_spec, ext_key, u))

    t = link.transcript()
    return ViewA(c, u, x, t), bob.view(), t


def reveal(view_b: ViewB, transcript: Transcript, claim: RevealClaim) -> Verdict:
    """Bob's verdict on a claim; a rejection names the first failed test."""
    params = view_b.params
    c, u = claim.c, claim.u
    if not isinstance(c, (int, np.integer)) or not isinstance(u, (int, np.integer)):
        return Verdict(False, "malformed")
    c, u = int(c), int(u)
    if c < 0 or c >> params.l_ext or u < 0 or u >> params.m:
        return Verdict(False, "malformed")
    if u not in view_b.decode_list:
        return Verdict(False, "list")
    if eval_hash(params.g1_spec, transcript.g1_key, u) != transcript.h1:
        return Verdict(False, "hash1")
    if eval_hash(params.g2_spec, transcript.g2_key, u) != transcript.h2:
        return Verdict(False, "hash2")
    if c != transcript.otp ^ extract(params.ext_spec, transcript.ext_key, u):
        return Verdict(False, "otp")
    return ACCEPT


def honest_run(params: ProtocolParams, code: _codes.SphericalCode, theta2: float,
               seed: int, trial: int, c: Optional[int] = None):
    """Commit and reveal honestly in one trial; returns ``(view_a, view_b, verdict)``."""
    s = Streams(seed, trial)
    if c is None:
        c = random_bits(s.get("aux"), params.l_ext)
    oracle = NoiseOracle(params.channel, theta2)
    va, vb, t = commit(params, code, c, oracle, s.alice, s.bob, s.channel)
    return va, vb, reveal(vb, t, RevealClaim(va.c, va.u))


def replay(params: ProtocolParams, code: _codes.SphericalCode, y, transcript: Transcript,
           claim: RevealClaim) -> Verdict:
    """Re-verify an exported transcript from Bob's received vector."""
    dl = _codes.list_decode(code, y, params.channel, params.alpha1)
    return reveal(ViewB(np.asarray(y, dtype=float), dl, transcript, params), transcript, claim)
