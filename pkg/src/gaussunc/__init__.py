"""Commitment over Gaussian unfair noisy channels: rate formulas, spherical
codes, polynomial hash families, the commit/reveal protocol, attacks and a
Monte Carlo harness.
"""

from .errors import ConstructionError, ParameterError, ProtocolViolation, Refusal
from .rates import (ChannelParams, Flag, PowerConstraint, capacity_lower_bound, commit_possible,
                    commit_rate, limit_capacity_lb, p_min, rate_report)
from .protocol import ProtocolParams, commit, desk_params, honest_run, reveal, shared_code

__version__ = "0.1.0"

__all__ = [
    "ChannelParams", "ConstructionError", "Flag", "ParameterError", "PowerConstraint",
    "ProtocolParams", "ProtocolViolation", "Refusal", "capacity_lower_bound", "commit",
    "commit_possible", "commit_rate", "desk_params", "honest_run", "limit_capacity_lb",
    "p_min", "rate_report", "reveal", "shared_code",
]
