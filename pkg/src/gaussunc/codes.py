"""Spherical codes on the radius-sqrt(nP) sphere and annulus list decoding.

Messages are ``m``-bit strings represented as integers in ``[0, 2^m)``; the
encoder maps message ``u`` to row ``u`` of the codeword matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConstructionError, ParameterError
from .rates import ChannelParams

CODE_FORMAT = "gaussunc-spherical-code"
CODE_VERSION = 1
NORM_RTOL = 1e-9
MAX_MESSAGE_BITS = 16


def norm_tolerance(n: int, p: float) -> float:
    """Absolute tolerance on squared norms, ``1e-9 n P``."""
    return NORM_RTOL * n * p


@dataclass(frozen=True, eq=False)
class SphericalCode:
    """Codebook of ``2^m`` vectors with squared norm ``n p`` each.

    Attributes
    ----------
    codewords : ndarray, shape (2^m, n)
        Row ``u`` is the codeword of message ``u``. Read-only.
    d_min : float
        Certified minimum pairwise Euclidean distance.
    closest_pair : tuple of int
        Messages achieving ``d_min``.
    """

    n: int
    m: int
    p: float
    d_hat: float
    codewords: np.ndarray
    d_min: float
    closest_pair: tuple
    seed: int | None = None
    construction: str = "greedy"
    norms2: np.ndarray = field(repr=False, default=None)

    def __post_init__(self) -> None:
        self.codewords.setflags(write=False)
        if self.norms2 is None:
            nn = np.einsum("ij,ij->i", self.codewords, self.codewords)
            nn.setflags(write=False)
            object.__setattr__(self, "norms2", nn)

    @property
    def size(self) -> int:
        return self.codewords.shape[0]

    @property
    def target_distance2(self) -> float:
        return self.n * self.d_hat ** 2 * self.p

    @property
    def radius2(self) -> float:
        return self.n * self.p


@dataclass(frozen=True, eq=False)
class DecodeList:
    """Messages whose codeword lies in the decoding annulus around ``center``."""

    members: np.ndarray
    center: np.ndarray

    def __contains__(self, u) -> bool:
        u = int(u)
        i = np.searchsorted(self.members, u)
        return bool(i < len(self.members) and self.members[i] == u)

    def __len__(self) -> int:
        return len(self.members)


def _random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))


def _simplex(n: int, M: int, rng: np.random.Generator) -> np.ndarray:
    """``M <= n + 1`` unit vectors forming a randomly rotated regular simplex."""
    if M == 1:
        v = rng.standard_normal(n)
        return (v / np.linalg.norm(v))[None, :]
    centred = np.eye(M) - 1.0 / M
    _, _, vt = np.linalg.svd(centred)
    coords = centred @ vt[: M - 1].T
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    full = np.zeros((M, n))
    full[:, : M - 1] = coords
    return full @ _random_orthogonal(n, rng).T


def _unit_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _normalize_to_sphere(x: np.ndarray, radius: float) -> np.ndarray:
    out = _unit_rows(x) * radius
    # one refinement step pulls the squared norm to within an ulp of n p
    out *= radius / np.sqrt(np.einsum("ij,ij->i", out, out))[:, None]
    return out


def build_spherical_code(n: int, m: int, p: float, d_hat: float, rng=0,
                         budget_factor: int = 200, batch: int = 512,
                         max_message_bits: int = MAX_MESSAGE_BITS) -> SphericalCode:
    """Construct a spherical code with certified ``d_min^2 >= n d_hat^2 p``.

    When ``2^m <= n + 1`` the codewords are a randomly rotated regular
    simplex, which is the optimal configuration of that many points. Otherwise
    candidates are drawn uniformly on the sphere and accepted greedily while
    they keep every pairwise distance at or above the target, with a budget
    of ``budget_factor * 2^m`` candidates.

    Raises
    ------
    ConstructionError
        If the budget runs out, or the simplex cannot meet the target.
    """
    if n < 1 or m < 1:
        raise ParameterError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if m > max_message_bits:
        raise ParameterError(
            f"m={m} exceeds the exhaustive-certification bound of {max_message_bits} bits")
    if not p > 0:
        raise ParameterError(f"power must be positive, got {p}")
    if not 0 < d_hat < 2:
        raise ParameterError(f"d_hat must lie in (0, 2), got {d_hat}")
    seed = int(rng) if isinstance(rng, (int, np.integer)) else None
    gen = np.random.default_rng(rng) if seed is not None else rng

    M = 1 << m
    radius = math.sqrt(n * p)
    target2 = n * d_hat ** 2 * p
    tol = norm_tolerance(n, p)

    if M <= n + 1:
        cw = _normalize_to_sphere(_simplex(n, M, gen), radius)
        d2, pair = min_distance2(cw)
        if d2 < target2 - tol:
            raise ConstructionError(
                f"no {M}-point code in dimension {n} reaches d_min^2={target2:.6g}; "
                f"the optimal simplex achieves {d2:.6g}")
        return SphericalCode(n, m, float(p), float(d_hat), cw, math.sqrt(max(d2, 0.0)),
                             pair, seed, "simplex")

    # dot-product threshold equivalent to the squared-distance target
    dot_max = n * p - (target2 - tol) / 2.0
    cw = np.empty((M, n))
    count = 0
    drawn = 0
    budget = budget_factor * M
    best_dot = -np.inf
    best_pair = (0, 0)
    while count < M:
        if drawn >= budget:
            achieved = math.sqrt(max(0.0, 2 * n * p - 2 * best_dot)) if count > 1 else float("nan")
            raise ConstructionError(
                f"retry budget of {budget} candidates exhausted with {count}/{M} codewords "
                f"accepted; target d_min={math.sqrt(target2):.6g}, achieved d_min={achieved:.6g}")
        b = min(batch, budget - drawn)
        cand = _normalize_to_sphere(gen.standard_normal((b, n)), radius)
        drawn += b
        if count:
            g = cand @ cw[:count].T
            worst = g.max(axis=1)
            arg = g.argmax(axis=1)
            ok = np.flatnonzero(worst <= dot_max)
        else:
            worst = np.full(b, -np.inf)
            arg = np.zeros(b, dtype=int)
            ok = np.arange(b)
        if ok.size == 0:
            continue
        sub = cand[ok]
        gi = sub @ sub.T
        chosen: list[int] = []
        for j in range(len(ok)):
            if count + len(chosen) >= M:
                break
            if chosen:
                row = gi[j, chosen]
                k = int(np.argmax(row))
                if row[k] > dot_max:
                    continue
                if row[k] > best_dot:
                    best_dot = float(row[k])
                    best_pair = (count + k, count + len(chosen))
            if worst[ok[j]] > best_dot:
                best_dot = float(worst[ok[j]])
                best_pair = (int(arg[ok[j]]), count + len(chosen))
            chosen.append(j)
        cw[count: count + len(chosen)] = sub[chosen]
        count += len(chosen)

    norms2 = np.einsum("ij,ij->i", cw, cw)
    i, j = best_pair
    d2 = float(norms2[i] + norms2[j] - 2.0 * (cw[i] @ cw[j]))
    return SphericalCode(n, m, float(p), float(d_hat), cw, math.sqrt(max(d2, 0.0)),
                         (min(i, j), max(i, j)), seed, "greedy", norms2)


def min_distance2(codewords: np.ndarray, block: int | None = None) -> tuple[float, tuple]:
    """Exhaustive minimum squared pairwise distance and the achieving pair."""
    cw = np.asarray(codewords, dtype=float)
    M = cw.shape[0]
    if M < 2:
        return math.inf, (0, 0)
    if block is None:
        block = max(1, min(M, (1 << 22) // M))
    nn = np.einsum("ij,ij->i", cw, cw)
    best = math.inf
    pair = (0, 1)
    for s in range(0, M, block):
        e = min(M, s + block)
        # rows s..e against columns s..M-1; only the upper triangle counts
        d2 = cw[s:e] @ cw[s:].T
        d2 *= -2.0
        d2 += nn[s:e, None]
        d2 += nn[None, s:]
        b = e - s
        d2[:, :b][np.tril_indices(b)] = np.inf
        k = int(np.argmin(d2))
        r, c = divmod(k, d2.shape[1])
        if d2[r, c] < best:
            best = float(d2[r, c])
            pair = (s + r, s + c)
    return best, pair


def certify(code: SphericalCode) -> float:
    """Re-check sphere membership and the distance target; return ``d_min``.

    Raises
    ------
    ConstructionError
        If any norm or the minimum distance violates the code's invariants.
    """
    tol = norm_tolerance(code.n, code.p)
    cw = code.codewords
    if cw.shape != (1 << code.m, code.n):
        raise ConstructionError(f"codeword matrix has shape {cw.shape}, expected "
                                f"({1 << code.m}, {code.n})")
    nn = np.einsum("ij,ij->i", cw, cw)
    bad = np.flatnonzero(np.abs(nn - code.radius2) > tol)
    if bad.size:
        raise ConstructionError(f"codeword {int(bad[0])} is off the sphere: "
                                f"norm^2={nn[bad[0]]!r}, expected {code.radius2!r}")
    d2, _ = min_distance2(cw)
    if d2 < code.target_distance2 - tol:
        raise ConstructionError(
            f"certified d_min^2={d2:.9g} is below the target {code.target_distance2:.9g}")
    return math.sqrt(d2)


def encode(code: SphericalCode, u: int) -> np.ndarray:
    """Codeword of message ``u``."""
    u = int(u)
    if not 0 <= u < code.size:
        raise ParameterError(f"message {u} outside [0, 2^{code.m})")
    return code.codewords[u].copy()


def annulus_bounds(n: int, params: ChannelParams, alpha1: float) -> tuple[float, float]:
    """Squared-distance limits ``[n(gamma2 - alpha1), n(delta2 + alpha1)]``."""
    return n * (params.gamma2 - alpha1), n * (params.delta2 + alpha1)


def distances2(code: SphericalCode, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return code.norms2 + float(y @ y) - 2.0 * (code.codewords @ y)


def list_decode(code: SphericalCode, y, params: ChannelParams, alpha1: float) -> DecodeList:
    """All messages whose codeword lies in the annulus around ``y``.

    Membership is decided on squared distances with absolute tolerance
    ``1e-9 n P`` at both edges.
    """
    if alpha1 < 0:
        raise ParameterError(f"alpha1 must be non-negative, got {alpha1}")
    lo, hi = annulus_bounds(code.n, params, alpha1)
    tol = norm_tolerance(code.n, code.p)
    d2 = distances2(code, y)
    members = np.flatnonzero((d2 >= lo - tol) & (d2 <= hi + tol))
    return DecodeList(members=members, center=np.asarray(y, dtype=float).copy())


def decode_nearest(code: SphericalCode, y) -> int:
    """Nearest-codeword decoder; provided for completeness, unused by the protocol."""
    return int(np.argmin(distances2(code, y)))


# serialization

def code_to_dict(code: SphericalCode) -> dict:
    return {
        "format": CODE_FORMAT,
        "version": CODE_VERSION,
        "n": code.n,
        "m": code.m,
        "p": code.p,
        "d_hat": code.d_hat,
        "seed": code.seed,
        "construction": code.construction,
        "d_min": code.d_min,
        "codewords": code.codewords.ravel().tolist(),
    }


def code_from_dict(data: dict) -> SphericalCode:
    """Rebuild a code from :func:`code_to_dict` output and re-certify it."""
    if data.get("format") != CODE_FORMAT:
        raise ValueError(f"not a spherical-code file (format={data.get('format')!r})")
    if data.get("version") != CODE_VERSION:
        raise ValueError(f"unsupported spherical-code version {data.get('version')!r}")
    n, m = int(data["n"]), int(data["m"])
    cw = np.asarray(data["codewords"], dtype=float).reshape(1 << m, n)
    d2, pair = min_distance2(cw)
    code = SphericalCode(n, m, float(data["p"]), float(data["d_hat"]), cw,
                         math.sqrt(d2), pair, data.get("seed"),
                         data.get("construction", "greedy"))
    certify(code)
    return code


def save_code(code: SphericalCode, path) -> None:
    """Write JSON (``.json``) or numpy archive (``.npz``) by file suffix."""
    path = Path(path)
    if path.suffix == ".npz":
        d = code_to_dict(code)
        d["codewords"] = code.codewords
        d["seed"] = -1 if code.seed is None else code.seed
        np.savez(path, **{k: np.asarray(v) for k, v in d.items()})
    else:
        path.write_text(json.dumps(code_to_dict(code)))


def load_code(path) -> SphericalCode:
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path, allow_pickle=False) as z:
            d = {k: z[k] for k in z.files}
        data = {k: v.item() if v.ndim == 0 else v for k, v in d.items()}
        data["format"] = str(data["format"])
        data["construction"] = str(data["construction"])
        data["seed"] = None if data["seed"] == -1 else int(data["seed"])
        return code_from_dict(data)
    return code_from_dict(json.loads(path.read_text()))
