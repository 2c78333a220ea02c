"""Polynomial hash families over GF(2^w).

A member of the ``xi``-wise independent family is a polynomial of degree
``xi - 1`` with uniformly random coefficients ``k_0 .. k_{xi-1}`` in
GF(2^w). The digest of an input ``u`` (read as a field element) is

    h(u) = k_0 + k_1 u + ... + k_{xi-1} u^{xi-1}

truncated to its low ``output_bits`` bits. Field elements are non-negative
Python ints / numpy ``uint64`` whose bit ``i`` is the coefficient of ``x^i``;
addition is XOR and multiplication is carry-less multiplication reduced by a
fixed irreducible polynomial.

Inputs wider than the field are supported only for ``xi = 2``. They are split
into ``w``-bit blocks (most significant first) and folded by Horner's rule in
``k_1``: ``h(u) = k_0 + sum_i b_i k_1^(t-i)``. Two distinct ``t``-block inputs
then collide with probability at most ``2^-l + (t-1) 2^-w``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError

FAMILY_VERSION = "gf2w-poly-v1"
DEFAULT_WIDTH = 64


# GF(2)[x] arithmetic on Python ints

def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials."""
    if a < b:
        a, b = b, a
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _prime_factors(k: int) -> list[int]:
    out, p = [], 2
    while p * p <= k:
        if k % p == 0:
            out.append(p)
            while k % p == 0:
                k //= p
        p += 1
    if k > 1:
        out.append(k)
    return out


def is_irreducible(f: int) -> bool:
    """Rabin's irreducibility test for a GF(2)[x] polynomial ``f``."""
    w = f.bit_length() - 1
    if w < 1:
        return False
    if w == 1:
        return True

    def x_pow_2k(k: int) -> int:
        r = 2  # the polynomial x
        for _ in range(k):
            r = poly_mod(clmul(r, r), f)
        return r

    if x_pow_2k(w) != 2:
        return False
    for q in _prime_factors(w):
        g = poly_gcd(f, x_pow_2k(w // q) ^ 2)
        if g != 1:
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_poly(width: int) -> int:
    """Smallest irreducible polynomial ``x^w + c`` in integer order of ``c``."""
    if not 1 <= width <= 64:
        raise ParameterError(f"field width must be in [1, 64], got {width}")
    base = 1 << width
    c = 1
    while True:
        if is_irreducible(base | c):
            return base | c
        c += 2 if width > 1 else 1


@dataclass(frozen=True)
class GF2Field:
    """GF(2^w) with a fixed irreducible modulus."""

    width: int

    @property
    def modulus(self) -> int:
        return irreducible_poly(self.width)

    @property
    def order(self) -> int:
        return 1 << self.width

    def mul(self, a: int, b: int) -> int:
        return poly_mod(clmul(a, b), self.modulus)

    # vectorized arithmetic on uint64 arrays

    def xtime(self, t: np.ndarray) -> np.ndarray:
        """Multiply every element by ``x``."""
        w = self.width
        low = np.uint64(self.modulus & ((1 << w) - 1))
        hi = (t >> np.uint64(w - 1)) & np.uint64(1)
        t = t << np.uint64(1)
        if w < 64:
            t &= np.uint64((1 << w) - 1)
        return t ^ (hi * low)

    def mul_array(self, a, b, b_bits: int | None = None) -> np.ndarray:
        """Elementwise product; loops over the ``b_bits`` low bits of ``b``."""
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        a, b = np.broadcast_arrays(a, b)
        if b_bits is None:
            b_bits = self.width
        out = np.zeros(a.shape, dtype=np.uint64)
        t = a.copy()
        one = np.uint64(1)
        for i in range(b_bits):
            bit = (b >> np.uint64(i)) & one
            out ^= t * bit
            if i + 1 < b_bits:
                t = self.xtime(t)
        return out


@dataclass(frozen=True)
class HashFamilySpec:
    """Polynomial hash family description.

    Parameters
    ----------
    input_bits : int
        Length ``m`` of hashed strings.
    output_bits : int
        Digest length ``l``. Zero gives the constant family.
    independence : int
        ``xi``; members are degree ``xi - 1`` polynomials.
    width : int
        Field width ``w``.
    """

    input_bits: int
    output_bits: int
    independence: int
    width: int = DEFAULT_WIDTH

    def __post_init__(self) -> None:
        if self.input_bits < 1:
            raise ParameterError(f"input_bits must be at least 1, got {self.input_bits}")
        if self.output_bits < 0:
            raise ParameterError(f"output_bits must be non-negative, got {self.output_bits}")
        if self.independence < 2:
            raise ParameterError(f"independence must be at least 2, got {self.independence}")
        if not 1 <= self.width <= 64:
            raise ParameterError(f"field width must be in [1, 64], got {self.width}")
        if self.output_bits > self.width:
            raise ParameterError(
                f"output_bits={self.output_bits} exceeds the field width {self.width}")
        if self.independence > 2 and self.input_bits > self.width:
            raise ParameterError(
                "inputs wider than the field are only supported for 2-universal families")

    @property
    def field(self) -> GF2Field:
        return GF2Field(self.width)

    @property
    def blocks(self) -> int:
        return -(-self.input_bits // self.width)

    def to_dict(self) -> dict:
        return {"input_bits": self.input_bits, "output_bits": self.output_bits,
                "independence": self.independence, "width": self.width,
                "version": FAMILY_VERSION}


def make_family(input_bits: int, output_bits: int, independence: int,
                width: int = DEFAULT_WIDTH) -> HashFamilySpec:
    return HashFamilySpec(int(input_bits), int(output_bits), int(independence), int(width))


@dataclass(frozen=True)
class HashKey:
    """Coefficients ``(k_0, ..., k_{xi-1})`` of one family member."""

    coeffs: tuple

    def to_hex(self) -> list[str]:
        return [format(int(c), "x") for c in self.coeffs]

    @classmethod
    def from_hex(cls, items) -> "HashKey":
        return cls(tuple(int(s, 16) for s in items))


def sample_key(spec: HashFamilySpec, rng: np.random.Generator) -> HashKey:
    """Draw a uniform member of the family."""
    c = rng.integers(0, 1 << spec.width, size=spec.independence, dtype=np.uint64,
                     endpoint=False) if spec.width < 64 else \
        rng.integers(0, 2 ** 64, size=spec.independence, dtype=np.uint64)
    return HashKey(tuple(int(v) for v in c))


def _check_key(spec: HashFamilySpec, key: HashKey) -> None:
    if len(key.coeffs) != spec.independence:
        raise ParameterError(
            f"key has {len(key.coeffs)} coefficients, family needs {spec.independence}")


def _truncate(v: int, l: int) -> int:
    return v & ((1 << l) - 1)


def eval_hash(spec: HashFamilySpec, key: HashKey, u: int) -> int:
    """Digest of the ``input_bits``-bit string ``u`` as an ``output_bits``-bit int."""
    _check_key(spec, key)
    u = int(u)
    if u < 0 or u >> spec.input_bits:
        raise ParameterError(f"input {u} does not fit in {spec.input_bits} bits")
    f = spec.field
    k = key.coeffs
    if spec.blocks == 1:
        acc = int(k[-1])
        for c in reversed(k[:-1]):
            acc = f.mul(acc, u) ^ int(c)
    else:
        w = spec.width
        mask = (1 << w) - 1
        acc = 0
        for i in reversed(range(spec.blocks)):
            acc = f.mul(acc ^ ((u >> (i * w)) & mask), int(k[1]))
        acc ^= int(k[0])
    return _truncate(acc, spec.output_bits)


def eval_many(spec: HashFamilySpec, key: HashKey, us) -> np.ndarray:
    """Vectorized :func:`eval_hash` for inputs that fit one field element."""
    _check_key(spec, key)
    if spec.blocks != 1 or np.size(us) <= 8:
        # per-element Python arithmetic beats numpy call overhead on tiny inputs
        return np.array([eval_hash(spec, key, int(u)) for u in np.asarray(us).ravel()],
                        dtype=np.uint64).reshape(np.shape(us))
    u = np.asarray(us, dtype=np.uint64)
    f = spec.field
    k = key.coeffs
    acc = np.full(u.shape, np.uint64(k[-1]), dtype=np.uint64)
    for c in reversed(k[:-1]):
        acc = f.mul_array(acc, u, spec.input_bits) ^ np.uint64(c)
    if spec.output_bits < 64:
        acc &= np.uint64((1 << spec.output_bits) - 1)
    return acc


def eval_keys(spec: HashFamilySpec, coeffs: np.ndarray, u: int) -> np.ndarray:
    """Digest of one input under many keys; ``coeffs`` has shape ``(keys, xi)``."""
    coeffs = np.asarray(coeffs, dtype=np.uint64)
    if spec.blocks != 1:
        raise ParameterError("eval_keys requires inputs that fit one field element")
    f = spec.field
    uu = np.uint64(u)
    acc = coeffs[:, -1].copy()
    for j in range(spec.independence - 2, -1, -1):
        acc = f.mul_array(acc, uu, spec.input_bits) ^ coeffs[:, j]
    if spec.output_bits < 64:
        acc &= np.uint64((1 << spec.output_bits) - 1)
    return acc


def extract(spec: HashFamilySpec, key: HashKey, u: int) -> int:
    """Extractor output: the 2-universal digest used as the one-time-pad key."""
    if spec.independence != 2:
        raise ParameterError("the extractor family must be 2-universal (independence 2)")
    return eval_hash(spec, key, u)
