"""Closed-form rate, threshold and limit evaluators for the Gaussian UNC.

All logarithms are base 2, so every rate is in bits per channel use.
Results that are not finite numbers are returned as :class:`Flag` members
rather than sentinel floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union


class Flag(Enum):
    """Tagged non-numeric outcomes of the rate evaluators."""

    INFINITE = "infinite"
    NOT_DEFINED = "not-defined"

    def __str__(self) -> str:
        return self.value


RateValue = Union[float, Flag]


@dataclass(frozen=True)
class ChannelParams:
    """Noise-variance range ``[gamma2, delta2]`` of an unfair Gaussian channel.

    Parameters
    ----------
    gamma2 : float
        Lowest variance a dishonest party may select. Must be positive.
    delta2 : float
        Highest variance. Must satisfy ``delta2 >= gamma2``.
    """

    gamma2: float
    delta2: float

    def __post_init__(self) -> None:
        for name in ("gamma2", "delta2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite real, got {value!r}")
        if self.gamma2 <= 0:
            raise ValueError("channel ordering requires 0 < gamma2 <= delta2; gamma2 must be positive")
        if self.delta2 < self.gamma2:
            raise ValueError("channel ordering requires 0 < gamma2 <= delta2; got delta2 < gamma2")

    @property
    def elasticity(self) -> float:
        return self.delta2 - self.gamma2

    def to_dict(self) -> dict:
        return {"gamma2": self.gamma2, "delta2": self.delta2}


@dataclass(frozen=True)
class PowerConstraint:
    """Per-symbol average power bound; vectors obey ``|x|^2 <= n p``."""

    p: float

    def __post_init__(self) -> None:
        if not isinstance(self.p, (int, float)) or not math.isfinite(self.p) or self.p <= 0:
            raise ValueError(f"power must be finite and strictly positive, got {self.p!r}")


@dataclass(frozen=True)
class RateReport:
    """Summary of the achievable-rate formulas at one operating point."""

    c_lower: RateValue
    p_min: RateValue
    possible: bool
    c_lower_limit: RateValue

    def to_dict(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, Flag) else v

        return {
            "c_lower": enc(self.c_lower),
            "p_min": enc(self.p_min),
            "possible": self.possible,
            "c_lower_limit": enc(self.c_lower_limit),
        }


def _power(p) -> float:
    if isinstance(p, PowerConstraint):
        return float(p.p)
    return float(PowerConstraint(p).p)


def elasticity(params: ChannelParams) -> float:
    """Return ``delta2 - gamma2``."""
    return params.delta2 - params.gamma2


def commit_possible(p, params: ChannelParams) -> bool:
    """Whether positive-rate commitment is achievable at power ``p``.

    True iff ``delta2 < (1 + P / (P + gamma2)) * gamma2``.
    """
    P = _power(p)
    g = params.gamma2
    return params.delta2 < (1.0 + P / (P + g)) * g


def capacity_lower_bound_raw(p, params: ChannelParams) -> RateValue:
    """Unclamped lower bound ``0.5 log2(P/E) - 0.5 log2(1 + P/gamma2)``.

    Returns ``Flag.INFINITE`` when the elasticity is zero.
    """
    P = _power(p)
    E = elasticity(params)
    if E == 0:
        return Flag.INFINITE
    g = params.gamma2
    # single log of the combined ratio keeps cancellation out
    return 0.5 * math.log2(P * g / ((P + g) * E))


def capacity_lower_bound(p, params: ChannelParams) -> RateValue:
    """Commitment-capacity lower bound, clamped at zero."""
    raw = capacity_lower_bound_raw(p, params)
    if isinstance(raw, Flag):
        return raw
    if not commit_possible(p, params):
        return 0.0
    return max(0.0, raw)


def p_min(params: ChannelParams) -> RateValue:
    """Power threshold above which the lower bound becomes positive.

    Returns ``0.0`` when ``E = 0`` and ``Flag.NOT_DEFINED`` when
    ``delta2 >= 2 gamma2`` (no finite power suffices).
    """
    g, d = params.gamma2, params.delta2
    E = d - g
    if E == 0:
        return 0.0
    if d >= 2.0 * g:
        return Flag.NOT_DEFINED
    return g * E / (2.0 * g - d)


def limit_capacity_lb(params: ChannelParams) -> RateValue:
    """Limit of the lower bound as ``P -> inf``: ``max(0, 0.5 log2(gamma2/E))``."""
    E = elasticity(params)
    if E == 0:
        return Flag.INFINITE
    return max(0.0, 0.5 * math.log2(params.gamma2 / E))


def code_rate(d_hat: float) -> float:
    """Spherical-code rate ``-0.5 log2(1 - (1 - d_hat/2)^2)`` for ``d_hat`` in (0, 2)."""
    if not (0.0 < d_hat < 2.0):
        raise ValueError(f"d_hat must lie in the open interval (0, 2), got {d_hat!r}")
    t = 1.0 - d_hat / 2.0
    return -0.5 * math.log2(1.0 - t * t)


def distance_for_rate(rate: float) -> float:
    """Inverse of :func:`code_rate`: the ``d_hat`` whose code rate equals ``rate``."""
    if not rate > 0:
        raise ValueError(f"rate must be positive, got {rate!r}")
    return 2.0 * (1.0 - math.sqrt(1.0 - 2.0 ** (-2.0 * rate)))


def commit_rate(p, params: ChannelParams, beta3: float) -> RateValue:
    """Protocol commitment rate ``R = C_L(raw) - beta3``; may be non-positive."""
    if not beta3 > 0:
        raise ValueError(f"beta3 must be positive, got {beta3!r}")
    raw = capacity_lower_bound_raw(p, params)
    if isinstance(raw, Flag):
        return raw
    return raw - beta3


def rate_report(p, params: ChannelParams) -> RateReport:
    possible = commit_possible(p, params)
    c = capacity_lower_bound(p, params)
    if not possible and not isinstance(c, Flag):
        c = 0.0
    return RateReport(c_lower=c, p_min=p_min(params), possible=possible,
                      c_lower_limit=limit_capacity_lb(params))


@dataclass(frozen=True)
class SweepGrid:
    """Grid for :func:`sweep_rate_curves`.

    ``kind="power"`` sweeps ``P`` over ``values`` at fixed ``(gamma2, delta2)``
    and yields ``(P, C_L)`` rows. ``kind="gamma2"`` sweeps ``gamma2`` at fixed
    ``delta2`` and yields ``(gamma2, C_L_inf)`` rows.
    """

    kind: str
    values: tuple
    gamma2: float = 1.0
    delta2: float = 1.5

    def __post_init__(self) -> None:
        if self.kind not in ("power", "gamma2"):
            raise ValueError(f"sweep kind must be 'power' or 'gamma2', got {self.kind!r}")
        if len(self.values) == 0:
            raise ValueError("sweep grid must be non-empty")

    @classmethod
    def linear(cls, kind: str, lo: float, hi: float, num: int, **fixed) -> "SweepGrid":
        if num < 1:
            raise ValueError("num must be at least 1")
        if num == 1:
            vals = (float(lo),)
        else:
            step = (hi - lo) / (num - 1)
            vals = tuple(lo + i * step for i in range(num))
        return cls(kind=kind, values=vals, **fixed)

    @property
    def columns(self) -> tuple[str, str]:
        return ("P", "C_L") if self.kind == "power" else ("gamma2", "C_L_inf")


def sweep_rate_curves(grid: SweepGrid) -> list[tuple[float, RateValue]]:
    """Evaluate the lower bound (or its limit) pointwise over a grid."""
    rows = []
    if grid.kind == "power":
        params = ChannelParams(grid.gamma2, grid.delta2)
        for P in grid.values:
            rows.append((float(P), capacity_lower_bound(P, params)))
    else:
        for g in grid.values:
            rows.append((float(g), limit_capacity_lb(ChannelParams(g, grid.delta2))))
    return rows


def sweep_power(powers: Sequence[float], params: ChannelParams) -> list[tuple[float, RateValue]]:
    return sweep_rate_curves(SweepGrid("power", tuple(powers), params.gamma2, params.delta2))


def sweep_gamma2(gamma2_values: Sequence[float], delta2: float) -> list[tuple[float, RateValue]]:
    return sweep_rate_curves(SweepGrid("gamma2", tuple(gamma2_values), delta2=delta2))
