"""Self-contained unconstrained test problems and variable permutations.

Every objective is written with an explicit ascending-index loop; that
summation order is part of the problem definition, so permuted replicas of
the same problem perform genuinely different floating-point arithmetic.
Pairing that with deterministic permutations (a seeded xorshift64* driving
Fisher-Yates) makes solver runs reproducible bit for bit while exposing
their sensitivity to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

_MASK64 = 0xFFFFFFFFFFFFFFFF
_SEED_MIX = 0x9E3779B97F4A7C15
_XS_MULT = 2685821657736338717


@dataclass(frozen=True)
class ProblemDef:
    """One test problem: objective, start point, optimum when known."""

    name: str
    n: int
    objective: object
    start: np.ndarray
    known_fmin: float | None = None

    def __post_init__(self):
        start = np.asarray(self.start, dtype=float)
        if start.shape != (self.n,):
            raise DimensionMismatchError("start point dimension mismatch")
        object.__setattr__(self, "start", start)


@dataclass(frozen=True)
class Permutation:
    """A permutation of variable indices plus the seed it was drawn from."""

    perm: np.ndarray
    seed: int

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(perm.size)):
            raise ValueError("not a permutation of 0..n-1")
        object.__setattr__(self, "perm", perm)

    @property
    def n(self) -> int:
        return self.perm.size

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.perm.size)
        return Permutation(inv, self.seed)


class _XorShift64Star:
    """xorshift64* with the standard 12/25/27 shifts; used only for permutations."""

    def __init__(self, seed: int):
        self.state = (int(seed) ^ _SEED_MIX) & _MASK64

    def next(self) -> int:
        s = self.state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK64
        s ^= s >> 27
        self.state = s
        return (s * _XS_MULT) & _MASK64


def random_permutation(n: int, seed: int) -> Permutation:
    """Deterministic permutation of ``0..n-1``.

    Fisher-Yates over descending positions, each swap index drawn as the
    next xorshift64* output modulo the remaining range; identical output
    for identical ``(n, seed)`` on every platform.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = _XorShift64Star(seed)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = gen.next() % (i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return Permutation(np.array(perm, dtype=np.int64), int(seed))


def permute_problem(p: ProblemDef, perm: Permutation) -> ProblemDef:
    """Replica of ``p`` with relabeled variables.

    The new objective evaluates the original at the permuted argument and
    the start point is inversely permuted, so the replica traces the same
    mathematical run while exercising different rounding.
    """
    if perm.n != p.n:
        raise DimensionMismatchError("permutation size does not match problem")
    idx = perm.perm
    base = p.objective

    def permuted_objective(x):
        return base(np.asarray(x, dtype=float)[idx])

    new_start = np.empty(p.n)
    new_start[idx] = p.start
    return ProblemDef(
        name=p.name,
        n=p.n,
        objective=permuted_objective,
        start=new_start,
        known_fmin=p.known_fmin,
    )


# --- the problem suite -------------------------------------------------
#
# Formulas are adapted from the classical unconstrained testing literature
# (sphere, chained Rosenbrock, ARWHEAD, DQRTIC, VARDIM, BDQRTIC, a weighted
# quartic, and a cosine chain).  The ascending loop order in each is
# normative, not incidental.


def _sphere(x) -> float:
    # Exactly-rounded sum: the sphere is the suite's symmetry reference, and
    # an order-invariant reduction is what makes its permuted replicas run
    # bit-for-bit identically (the remaining objectives sum in ascending
    # order on purpose, to expose rounding effects).
    return math.fsum(v * v for v in x.tolist())


def _chrosen(x) -> float:
    xs = x.tolist()
    total = 0.0
    for i in range(1, len(xs)):
        t1 = xs[i - 1] - xs[i] * xs[i]
        t2 = 1.0 - xs[i]
        total += 4.0 * t1 * t1 + t2 * t2
    return total


def _arwhead(x) -> float:
    xs = x.tolist()
    n = len(xs)
    last_sq = xs[n - 1] * xs[n - 1]
    total = 0.0
    for i in range(n - 1):
        t = xs[i] * xs[i] + last_sq
        total += t * t - 4.0 * xs[i] + 3.0
    return total


def _dqrtic(x) -> float:
    xs = x.tolist()
    total = 0.0
    for i, v in enumerate(xs):
        t = v - (i + 1.0)
        t2 = t * t
        total += t2 * t2
    return total


def _vardim(x) -> float:
    xs = x.tolist()
    total = 0.0
    for v in xs:
        t = v - 1.0
        total += t * t
    lin = 0.0
    for i, v in enumerate(xs):
        lin += (i + 1.0) * (v - 1.0)
    lin2 = lin * lin
    return total + lin2 + lin2 * lin2


def _bdqrtic(x) -> float:
    xs = x.tolist()
    n = len(xs)
    last_sq = xs[n - 1] * xs[n - 1]
    total = 0.0
    for i in range(n - 4):
        a = -4.0 * xs[i] + 3.0
        b = (
            xs[i] * xs[i]
            + 2.0 * xs[i + 1] * xs[i + 1]
            + 3.0 * xs[i + 2] * xs[i + 2]
            + 4.0 * xs[i + 3] * xs[i + 3]
            + 5.0 * last_sq
        )
        total += a * a + b * b
    return total


def _sumpow(x) -> float:
    xs = x.tolist()
    total = 0.0
    for i, v in enumerate(xs):
        v2 = v * v
        total += (i + 1.0) * v2 * v2
    return total


def _cosmix(x) -> float:
    xs = x.tolist()
    total = 0.0
    for i in range(len(xs) - 1):
        total += math.cos(-0.5 * xs[i + 1] - xs[i] * xs[i])
    return total


def _vardim_start(n: int) -> np.ndarray:
    return np.array([1.0 - (i + 1.0) / n for i in range(n)])


_SUITE = {
    "sphere": (_sphere, 2, lambda n: np.ones(n), 0.0),
    "chrosen": (_chrosen, 2, lambda n: -np.ones(n), 0.0),
    "arwhead": (_arwhead, 2, lambda n: np.ones(n), 0.0),
    "dqrtic": (_dqrtic, 2, lambda n: np.full(n, 2.0), 0.0),
    "vardim": (_vardim, 2, _vardim_start, 0.0),
    "bdqrtic": (_bdqrtic, 5, lambda n: np.ones(n), None),
    "sumpow": (_sumpow, 2, lambda n: np.ones(n), 0.0),
    "cosmix": (_cosmix, 2, lambda n: np.ones(n), None),
}

PROBLEM_NAMES = tuple(_SUITE)


def get_problem(name: str, n: int) -> ProblemDef:
    """Instantiate a suite problem at dimension ``n``."""
    key = name.lower()
    if key not in _SUITE:
        raise KeyError(f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}")
    fn, min_n, start_fn, fmin = _SUITE[key]
    n = int(n)
    if n < min_n:
        raise ValueError(f"{key} needs n >= {min_n}, got {n}")
    return ProblemDef(name=key, n=n, objective=fn, start=start_fn(n), known_fmin=fmin)
