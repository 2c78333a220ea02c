"""Gaussian unfair noisy channel and its noiseless simulation.

:func:`gauss_unc_round` is one scalar use of the unfair channel: an oracle
fixes the noise variance, Alice sends a real value and Bob receives it with
additive Gaussian noise. :func:`sim_gauss_unc_round` replaces the channel by
two local Gaussian draws and a noiseless message.

Cheating behaviour is injected through :class:`StrategyHooks`. A hook left as
``None`` means the party follows the prescription for that step. Hooks see
only their own party's view and a hook-local generator.

Hook signatures
---------------
``variance(view, rng) -> float``
    Step 1 of the channel round: a cheating party fixes the variance.
``transmit(x, theta2, view, rng) -> float``
    Alice's transmitted value. In the simulation ``theta2`` is ``None`` and
    the return value is the noiseless message ``W``.
``output(value, theta2, view, rng) -> float``
    What Bob writes to his view; ``value`` is the received value (``W`` in
    the simulation).
``output(value, theta2, x, view, rng) -> float``
    What Alice writes to her view; ``value`` is what she sent and ``x`` is
    her prescribed input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from .errors import ProtocolViolation
from .rates import ChannelParams
from .streams import as_streams


@dataclass(frozen=True)
class NoiseOracle:
    """The variance ``theta2`` instantiated for one protocol run.

    Immutable, so the variance cannot drift between channel uses.
    """

    params: ChannelParams
    theta2: float

    def __post_init__(self) -> None:
        check_variance(self.params, self.theta2)


def check_variance(params: ChannelParams, theta2: float) -> float:
    theta2 = float(theta2)
    if not (params.gamma2 <= theta2 <= params.delta2):
        raise ProtocolViolation(
            f"noise variance {theta2!r} outside the admissible range "
            f"[{params.gamma2}, {params.delta2}]"
        )
    return theta2


@dataclass(frozen=True)
class StrategyHooks:
    """Per-step deviations for one party; all ``None`` is the honest party."""

    variance: Optional[Callable] = None
    transmit: Optional[Callable] = None
    output: Optional[Callable] = None
    view: Any = None

    @property
    def honest(self) -> bool:
        return self.variance is None and self.transmit is None and self.output is None


HONEST = StrategyHooks()


@dataclass(frozen=True)
class ChannelSample:
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class RoundOutput:
    alice_out: float
    bob_out: float


def sample_awgn(x, theta2: float, rng: np.random.Generator) -> np.ndarray:
    """Return ``x + z`` with ``z ~ N(0, theta2 I)``.

    ``theta2 = 0`` returns ``x`` unchanged without consuming randomness.
    """
    x = np.asarray(x, dtype=float)
    if theta2 < 0:
        raise ValueError(f"variance must be non-negative, got {theta2!r}")
    if theta2 == 0:
        return x.copy()
    return x + np.sqrt(theta2) * rng.standard_normal(x.shape)


def transmit(x, oracle: NoiseOracle, rng: np.random.Generator) -> ChannelSample:
    """Send an ``n``-vector through ``n`` uses of the channel at one variance."""
    x = np.asarray(x, dtype=float)
    return ChannelSample(x=x, y=sample_awgn(x, oracle.theta2, rng))


def _hook_rng(streams, party: str) -> np.random.Generator:
    return streams.get(f"{party}_hook")


def gauss_unc_round(x: float, oracle: NoiseOracle, alice: StrategyHooks = HONEST,
                    bob: StrategyHooks = HONEST, rng=0) -> RoundOutput:
    """One use of the unfair channel with optional cheating hooks.

    Steps: (1) the variance is fixed by the oracle, or by the single cheating
    party holding a ``variance`` hook; (2) Alice sends ``x`` or
    ``transmit(...)``; (3) Bob receives the sent value plus ``N(0, theta2)``;
    (4) both parties write their outputs.
    """
    streams = as_streams(rng)
    params = oracle.params
    if alice.variance is not None and bob.variance is not None:
        raise ProtocolViolation("at most one party can control the channel variance")

    theta2 = oracle.theta2
    if alice.variance is not None:
        theta2 = check_variance(params, alice.variance(alice.view, _hook_rng(streams, "alice")))
    elif bob.variance is not None:
        theta2 = check_variance(params, bob.variance(bob.view, _hook_rng(streams, "bob")))

    if alice.transmit is None:
        sent = float(x)
    else:
        sent = float(alice.transmit(x, theta2, alice.view, _hook_rng(streams, "alice")))

    y = sent + np.sqrt(theta2) * streams.channel.standard_normal()

    if alice.output is None:
        a_out = float(x)
    else:
        a_out = alice.output(sent, theta2, x, alice.view, _hook_rng(streams, "alice"))
    if bob.output is None:
        b_out = float(y)
    else:
        b_out = bob.output(float(y), theta2, bob.view, _hook_rng(streams, "bob"))
    return RoundOutput(alice_out=a_out, bob_out=b_out)


def sim_gauss_unc_round(x: float, gamma2: float, alice: StrategyHooks = HONEST,
                        bob: StrategyHooks = HONEST, rng=0) -> RoundOutput:
    """Noiseless simulation of one channel use.

    Alice sends ``W = x + Z1`` (or ``transmit(...)``), Bob forms
    ``Y = W + Z2`` with ``Z1, Z2 ~ N(0, gamma2)`` drawn locally, then both
    write outputs. Variance hooks are meaningless here and are ignored.
    """
    streams = as_streams(rng)
    sd = np.sqrt(gamma2)
    if alice.transmit is None:
        w = float(x) + sd * streams.alice.standard_normal()
    else:
        w = float(alice.transmit(x, None, alice.view, _hook_rng(streams, "alice")))

    if alice.output is None:
        a_out = float(x)
    else:
        a_out = alice.output(w, None, x, alice.view, _hook_rng(streams, "alice"))
    if bob.output is None:
        b_out = w + sd * streams.bob.standard_normal()
    else:
        b_out = bob.output(w, None, bob.view, _hook_rng(streams, "bob"))
    return RoundOutput(alice_out=a_out, bob_out=b_out)
