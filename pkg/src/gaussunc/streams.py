"""Counter-based random streams, one independent stream per (seed, trial, role).

Each stream is a Philox generator keyed by the seed whose counter starts at a
block reserved for the trial and role. Draws advance only the lowest counter
word, so streams for different trials or roles never overlap.
"""

from __future__ import annotations

import numpy as np

ROLES = {
    "channel": 0,
    "alice": 1,
    "bob": 2,
    "alice_hook": 3,
    "bob_hook": 4,
    "code": 5,
    "attack": 6,
    "aux": 7,
}

_MASK64 = (1 << 64) - 1


def stream(seed: int, trial: int = 0, role: str | int = "aux", sub: int = 0) -> np.random.Generator:
    """Return the generator for ``(seed, trial, role, sub)``."""
    r = ROLES[role] if isinstance(role, str) else int(role)
    counter = np.array([0, int(sub) & _MASK64, r, int(trial) & _MASK64], dtype=np.uint64)
    bg = np.random.Philox(key=int(seed) & _MASK64, counter=counter)
    return np.random.Generator(bg)


class Streams:
    """Lazily created per-role generators for one trial.

    Generators are built on first access, so roles that draw nothing cost
    nothing.
    """

    __slots__ = ("seed", "trial", "_cache")

    def __init__(self, seed: int, trial: int = 0):
        self.seed = int(seed)
        self.trial = int(trial)
        self._cache: dict = {}

    def get(self, role: str, sub: int = 0) -> np.random.Generator:
        key = (role, sub)
        g = self._cache.get(key)
        if g is None:
            g = stream(self.seed, self.trial, role, sub)
            self._cache[key] = g
        return g

    @property
    def channel(self) -> np.random.Generator:
        return self.get("channel")

    @property
    def alice(self) -> np.random.Generator:
        return self.get("alice")

    @property
    def bob(self) -> np.random.Generator:
        return self.get("bob")


class SharedStreams:
    """Adapter exposing a single generator under every role name."""

    __slots__ = ("_g",)

    def __init__(self, g: np.random.Generator):
        self._g = g

    def get(self, role: str, sub: int = 0) -> np.random.Generator:
        return self._g

    channel = property(lambda self: self._g)
    alice = property(lambda self: self._g)
    bob = property(lambda self: self._g)


def as_streams(rng) -> "Streams | SharedStreams":
    """Accept a :class:`Streams`, a ``Generator`` or an integer seed."""
    if isinstance(rng, (Streams, SharedStreams)):
        return rng
    if isinstance(rng, np.random.Generator):
        return SharedStreams(rng)
    if isinstance(rng, (int, np.integer)):
        return Streams(int(rng))
    raise TypeError(f"cannot build random streams from {type(rng).__name__}")


def random_bits(rng: np.random.Generator, bits: int) -> int:
    """Uniform ``bits``-bit integer (``0 <= bits <= 64``)."""
    if bits == 0:
        return 0
    if bits == 64:
        return int(rng.integers(0, 2 ** 64, dtype=np.uint64))
    return int(rng.integers(0, 1 << bits, dtype=np.uint64))
