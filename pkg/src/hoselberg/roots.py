"""Root and weight data of type A_n realized in R^{n+1}, and the Weyl group S_{n+1}.

Roots and fundamental weights are exact (``int`` / ``Fraction``); spectral
parameters are plain sequences or numpy arrays of floats or complex numbers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidRankError

MAX_RANK = 8


@dataclass(frozen=True)
class RootSystem:
    """Root system of type A_n; positive roots e_i - e_j (i < j) in lexicographic order."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= MAX_RANK:
            raise InvalidRankError(f"rank must be an integer in 1..{MAX_RANK}, got {self.n!r}")

    @property
    def dim(self) -> int:
        return self.n + 1

    @cached_property
    def simple_roots(self) -> tuple[tuple[int, ...], ...]:
        return tuple(_e_diff(i, i + 1, self.dim) for i in range(self.n))

    @cached_property
    def positive_root_pairs(self) -> tuple[tuple[int, int], ...]:
        """Index pairs (i, j), 0-based with i < j, of the positive roots e_i - e_j."""
        return tuple(itertools.combinations(range(self.dim), 2))

    @cached_property
    def positive_roots(self) -> tuple[tuple[int, ...], ...]:
        return tuple(_e_diff(i, j, self.dim) for i, j in self.positive_root_pairs)

    @cached_property
    def fundamental_weights(self) -> tuple[tuple[Fraction, ...], ...]:
        # Lambda_j = e_1 + ... + e_j - j/(n+1) (1, ..., 1)
        d = self.dim
        return tuple(
            tuple(Fraction(int(i < j), 1) - Fraction(j, d) for i in range(d))
            for j in range(1, self.n + 1)
        )

    @property
    def num_positive(self) -> int:
        return self.n * (self.n + 1) // 2

    def root_height(self, i: int, j: int) -> int:
        return j - i

    def simple_coordinates(self, i: int, j: int) -> tuple[int, ...]:
        """Coefficients of e_i - e_j in the basis of simple roots."""
        return tuple(int(i <= m < j) for m in range(self.n))

    def coroot(self, root):
        # (alpha, alpha) = 2 for every root of A_n
        return tuple(root)

    def weyl_group(self) -> list["WeylElement"]:
        return weyl_group(self.n)


def _e_diff(i: int, j: int, d: int) -> tuple[int, ...]:
    v = [0] * d
    v[i] = 1
    v[j] = -1
    return tuple(v)


@lru_cache(maxsize=None)
def build_root_system(n: int) -> RootSystem:
    return RootSystem(n)


def weighted_half_sum(R: RootSystem, c=1):
    """(c/2) * sum of positive roots. c = 1 gives delta, c = k gives rho(k).

    Exact ``Fraction`` coordinates when ``c`` is rational, otherwise complex or float.
    """
    d = R.dim
    # coordinate i of the root sum is n - 2i
    if isinstance(c, (int, Fraction)):
        return tuple(Fraction(c) * Fraction(R.n - 2 * i, 2) for i in range(d))
    return np.array([c * (R.n - 2 * i) / 2 for i in range(d)])


def delta(R: RootSystem) -> np.ndarray:
    return np.array([(R.n - 2 * i) / 2 for i in range(R.dim)], dtype=float)


def rho(R: RootSystem, k) -> np.ndarray:
    return k * delta(R)


def pairing(u, v):
    """Euclidean inner product sum_i u_i v_i (bilinear, no conjugation)."""
    if len(u) != len(v):
        raise DimensionMismatchError(f"cannot pair vectors of length {len(u)} and {len(v)}")
    if isinstance(u, np.ndarray) or isinstance(v, np.ndarray):
        return np.asarray(u) @ np.asarray(v)
    return sum(a * b for a, b in zip(u, v))


def check_weight(lam, R: RootSystem, atol: float = 1e-12) -> np.ndarray:
    """Validate a spectral parameter: length n+1 and zero coordinate sum."""
    lam = np.asarray(lam)
    if lam.shape != (R.dim,):
        raise DimensionMismatchError(f"weight must have {R.dim} coordinates, got shape {lam.shape}")
    if abs(lam.sum()) > atol * max(1.0, float(np.abs(lam).max())):
        raise ValueError(f"weight coordinates must sum to zero, sum = {lam.sum()}")
    return lam


def root_pairings(mu, R: RootSystem) -> np.ndarray:
    """Array of (mu, alpha^vee) over the positive roots, in ``R.positive_root_pairs`` order."""
    mu = np.asarray(mu)
    return np.array([mu[i] - mu[j] for i, j in R.positive_root_pairs])


@dataclass(frozen=True)
class WeylElement:
    """Permutation w of {0..n}, stored as the images (w(0), ..., w(n))."""

    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"not a permutation: {self.perm}")

    @classmethod
    def identity(cls, n: int) -> "WeylElement":
        return cls(tuple(range(n + 1)))

    @classmethod
    def longest(cls, n: int) -> "WeylElement":
        return cls(tuple(range(n, -1, -1)))

    @classmethod
    def simple_reflection(cls, i: int, n: int) -> "WeylElement":
        """s_i swapping positions i-1 and i (1-based simple root index i)."""
        p = list(range(n + 1))
        p[i - 1], p[i] = p[i], p[i - 1]
        return cls(tuple(p))

    @classmethod
    def from_one_based(cls, images: Sequence[int]) -> "WeylElement":
        return cls(tuple(int(x) - 1 for x in images))

    @property
    def rank(self) -> int:
        return len(self.perm) - 1

    def length(self) -> int:
        return weyl_length(self)

    def inverse(self) -> "WeylElement":
        inv = [0] * len(self.perm)
        for i, wi in enumerate(self.perm):
            inv[wi] = i
        return WeylElement(tuple(inv))

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        # (self * other)(i) = self(other(i))
        return WeylElement(tuple(self.perm[o] for o in other.perm))

    def act(self, lam):
        return weyl_act(self, lam)

    def __str__(self):
        return "".join(str(p + 1) for p in self.perm) if len(self.perm) < 10 else str(self.perm)


def weyl_act(w: WeylElement, lam):
    """(w lam)_i = lam_{w^{-1}(i)}, i.e. coordinate i of lam moves to position w(i)."""
    if len(w.perm) != len(lam):
        raise DimensionMismatchError(f"Weyl element of rank {w.rank} cannot act on {len(lam)} coordinates")
    if isinstance(lam, np.ndarray):
        out = np.empty_like(lam)
        out[list(w.perm)] = lam
        return out
    out = [None] * len(lam)
    for i, wi in enumerate(w.perm):
        out[wi] = lam[i]
    return tuple(out)


def weyl_length(w: WeylElement) -> int:
    p = w.perm
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


def weyl_group(n: int) -> list[WeylElement]:
    return [WeylElement(p) for p in itertools.permutations(range(n + 1))]


def row_root(j: int, n: int) -> int:
    """1-based index of the simple root attached to every variable of pattern row j."""
    if not 1 <= j <= n:
        raise ValueError(f"row index must lie in 1..{n}, got {j}")
    return n + 1 - j
