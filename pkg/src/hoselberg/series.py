"""Truncated Harish-Chandra series for the radial operator L(k) of type A_n.

The series phi(lam + rho(k), k, z) = z^{lam + rho} sum_mu c_mu z^mu runs over
mu in the cone spanned by the simple roots, in the chamber
|z_1| < |z_2| < ... < |z_{n+1}| where every z^alpha (alpha > 0) is small.
Substituting it into L(k) phi = ((lam, lam) - (rho, rho)) phi and expanding
(z_j + z_i)/(z_j - z_i) = 1 + 2 sum_{m >= 1} z^{m alpha} for alpha = e_i - e_j
gives the triangular recursion

    (mu, mu + 2 lam) c_mu = 2k sum_{alpha > 0} sum_{m >= 1} (lam + rho + mu - m alpha, alpha) c_{mu - m alpha}.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import ConvergenceError, OutsideChamberError, ResonanceError
from .extrapolate import Extrapolated, richardson, wynn_epsilon
from .roots import RootSystem, check_weight, delta, pairing, rho

RESONANCE_GUARD = 1e-10
DEFAULT_ORDER = 6


def height(m) -> int:
    return int(sum(m))


@dataclass(frozen=True)
class RadialOperatorParams:
    k: complex
    n: int


@dataclass(frozen=True, eq=False)
class FormalSeries:
    """Coefficients c_mu for all mu of height <= ``order``, stored as a dense cube.

    ``data[m_1, ..., m_n]`` is the coefficient of z^{m_1 alpha_1 + ... + m_n alpha_n};
    entries above the truncation height are zero.  ``exponent`` is the leading
    exponent carried by the series (the series represents z^exponent * sum).
    """

    n: int
    order: int
    data: np.ndarray
    exponent: np.ndarray | None = None
    min_denominator: float | None = None
    min_denominator_index: tuple | None = None
    prefactor_constant: complex | None = None
    meta: dict = field(default_factory=dict)

    def __getitem__(self, m) -> complex:
        m = tuple(m)
        if len(m) != self.n or min(m) < 0:
            raise IndexError(f"bad multi-index {m}")
        if sum(m) > self.order:
            return 0j
        return complex(self.data[m])

    def heights(self) -> np.ndarray:
        return height_grid(self.n, self.order)

    def indices(self):
        """Multi-indices of height <= order, in increasing height."""
        hgrid = self.heights()
        idx = np.argwhere(hgrid <= self.order)
        order = np.argsort(idx.sum(axis=1), kind="stable")
        return [tuple(int(v) for v in row) for row in idx[order]]

    def items(self):
        for m in self.indices():
            yield m, complex(self.data[m])

    def as_dict(self) -> dict:
        return dict(self.items())

    def layer_sums(self) -> np.ndarray:
        h = self.heights()
        return np.array([self.data[h == j].sum() for j in range(self.order + 1)])

    def _like(self, data):
        return replace(self, data=data, min_denominator=None, min_denominator_index=None,
                       prefactor_constant=None, meta={})

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        _check_compatible(self, other)
        return self._like(self.data + other.data)

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        _check_compatible(self, other)
        return self._like(self.data - other.data)

    def __rmul__(self, c) -> "FormalSeries":
        return self._like(complex(c) * self.data)

    __mul__ = __rmul__


def _check_compatible(a: FormalSeries, b: FormalSeries):
    if a.n != b.n or a.order != b.order:
        raise ValueError("series differ in rank or truncation order")


def height_grid(n: int, order: int) -> np.ndarray:
    grids = np.meshgrid(*([np.arange(order + 1)] * n), indexing="ij")
    return np.sum(grids, axis=0)


def _e_coords(n: int, order: int) -> np.ndarray:
    """e-basis coordinates of every grid multi-index, shape (n+1, *cube)."""
    grids = np.meshgrid(*([np.arange(order + 1)] * n), indexing="ij")
    shape = grids[0].shape
    e = np.zeros((n + 1,) + shape)
    for q in range(n):
        e[q] += grids[q]
        e[q + 1] -= grids[q]
    return e


def _shift(a: np.ndarray, step) -> np.ndarray:
    """b[nu] = a[nu - step] (zero where nu - step leaves the cube)."""
    out = np.zeros_like(a)
    src = tuple(slice(0, a.shape[q] - s) for q, s in enumerate(step))
    dst = tuple(slice(s, a.shape[q]) for q, s in enumerate(step))
    if all(a.shape[q] - s > 0 for q, s in enumerate(step)):
        out[dst] = a[src]
    return out


def eigenvalue(lam, k, R: RootSystem) -> complex:
    lam = np.asarray(lam)
    r = rho(R, k)
    return complex(pairing(lam, lam) - pairing(r, r))


def _run_recursion(lam, k, R: RootSystem, H: int, store_full: bool):
    lam = check_weight(np.asarray(lam, dtype=complex), R, atol=1e-9)
    p = lam + rho(R, complex(k))
    sums, full, status, min_den, min_flat, min_h = _kernels.hc_stream(
        lam, p, k, R.n, H, store_full=store_full, guard=RESONANCE_GUARD)
    n = R.n
    mu = []
    rest = int(min_flat)
    for _ in range(n - 1):
        mu.append(rest % (H + 1))
        rest //= H + 1
    mu.append(int(min_h) - sum(mu))
    mu = tuple(mu)
    if status == _kernels.RESONANCE_HIT:
        raise ResonanceError(
            f"resonant parameter: (mu, mu + 2 lambda) = {min_den:.3g} vanishes at mu = {mu}",
            index=mu, denominator=float(min_den))
    return sums, full, float(min_den), mu


def hc_coefficients(lam, k, N: int, R: RootSystem) -> FormalSeries:
    """Normalized series coefficients (c_0 = 1) up to height N."""
    if N < 0:
        raise ValueError("truncation order must be nonnegative")
    _, full, min_den, mu = _run_recursion(lam, k, R, N, store_full=True)
    data = full.reshape((N + 1,) * R.n, order="F").copy()
    data[height_grid(R.n, N) > N] = 0.0
    exp = np.asarray(lam, dtype=complex) + rho(R, complex(k))
    return FormalSeries(R.n, N, data, exponent=exp, min_denominator=min_den,
                        min_denominator_index=mu, meta={"k": complex(k)})


def apply_radial_operator(s: FormalSeries, lam, params: RadialOperatorParams) -> FormalSeries:
    """Formal image of L(k) on z^{lam + rho(k)} * s, truncated at s.order, prefactor stripped."""
    n, N = s.n, s.order
    R = RootSystem(n)
    k = complex(params.k)
    lam = np.asarray(lam, dtype=complex)
    r = rho(R, k)
    p = lam + r
    e = _e_coords(n, N)
    pe = p.reshape((-1,) + (1,) * n) + e
    diag = np.sum(pe * pe, axis=0) - 2.0 * np.tensordot(r, pe, axes=(0, 0))
    out = diag * s.data
    for i, j in R.positive_root_pairs:
        a = np.array(R.simple_coordinates(i, j))
        base = p[i] - p[j] + e[i] - e[j]
        for m in range(1, N // (j - i) + 1):
            out = out - 2.0 * k * (base - 2.0 * m) * _shift(s.data, m * a)
    out[height_grid(n, N) > N] = 0.0
    return replace(s._like(out), exponent=s.exponent)


def binomial_series(c, M: int) -> np.ndarray:
    """Coefficients of (1 - x)^c up to x^M."""
    b = np.empty(M + 1, dtype=complex)
    b[0] = 1.0
    for m in range(1, M + 1):
        b[m] = b[m - 1] * (m - 1 - c) / m
    return b


def transformation_image(s: FormalSeries, k, lam, N: int | None = None, R: RootSystem | None = None) -> FormalSeries:
    """Multiply a normalized series for L(k) by prod_{i<j} (z_i - z_j)^{2k-1} prod z_i^{(1-2k) n/2}.

    In the chamber the monomial part equals z^{-(2k-1) delta} up to the branch
    constant prod (-1)^{2k-1}, which moves the leading exponent from
    lam + rho(k) to lam + rho(1-k); the rest is prod_alpha (1 - z^alpha)^{2k-1},
    expanded binomially.  The branch constant is returned in
    ``prefactor_constant`` and not applied.
    """
    R = R or RootSystem(s.n)
    N = s.order if N is None else N
    if N != s.order:
        raise ValueError("truncation order must match the input series")
    k = complex(k)
    c = 2 * k - 1
    b = binomial_series(c, N)
    data = s.data.copy()
    for i, j in R.positive_root_pairs:
        a = np.array(R.simple_coordinates(i, j))
        acc = np.zeros_like(data)
        for m in range(0, N // (j - i) + 1):
            acc += b[m] * _shift(data, m * a)
        data = acc
    data[height_grid(s.n, N) > N] = 0.0
    lam = np.asarray(lam, dtype=complex)
    const = cmath.exp(1j * math.pi * c * R.num_positive)
    return FormalSeries(s.n, N, data, exponent=lam + rho(R, 1 - k), prefactor_constant=const,
                        meta={"k": 1 - k})


def _check_chamber(z: np.ndarray):
    if np.any(z == 0):
        raise OutsideChamberError("z has a zero coordinate")
    mod = np.abs(z)
    if np.any(mod[:-1] >= mod[1:]):
        raise OutsideChamberError(f"z is outside the chamber |z_1| < ... < |z_(n+1)|: {z}")


def evaluate_phi(lam, k, z, N: int = DEFAULT_ORDER, R: RootSystem | None = None,
                 series: FormalSeries | None = None) -> complex:
    """z^{lam + rho} * sum_{height <= N} c_mu z^mu with principal branches."""
    z = np.asarray(z, dtype=complex)
    R = R or RootSystem(len(z) - 1)
    _check_chamber(z)
    if series is None:
        series = hc_coefficients(lam, k, N, R)
    x = z[:-1] / z[1:]
    logx = np.log(x)
    grids = np.meshgrid(*([np.arange(series.order + 1)] * R.n), indexing="ij")
    logmono = sum(g * lx for g, lx in zip(grids, logx))
    total = np.sum(series.data * np.exp(logmono))
    p = np.asarray(lam, dtype=complex) + rho(R, complex(k))
    return complex(np.exp(np.sum(p * np.log(z))) * total)


@dataclass(frozen=True)
class AtOneResult:
    value: complex
    error: float
    method: str
    heights: tuple
    partial_sums: tuple


DEFAULT_AT_ONE_HEIGHT = {1: 1 << 15, 2: 2048, 3: 128, 4: 48}


def in_convergence_window(lam, k, R: RootSystem) -> str | None:
    """None when the z -> 1 limit is inside the verified window, else the reason it is not."""
    k = complex(k)
    lam = np.asarray(lam)
    if R.n > 2:
        return f"rank {R.n} > 2: z -> 1 convergence not verified"
    # k = 0 is included: the series is identically 1 there
    if k.imag != 0 or not -0.5 < k.real <= 0:
        return f"k = {k} outside (-1/2, 0]"
    if np.iscomplexobj(lam) and np.any(np.asarray(lam).imag != 0):
        return "complex lambda"
    gaps = np.real(lam[:-1] - lam[1:])
    if np.any(gaps <= 1) or np.any(gaps >= 3):
        return f"simple-root pairings {gaps.tolist()} outside (1, 3)"
    return None


def evaluate_at_one(lam, k, N: int | None = None, R: RootSystem | None = None,
                    acceleration: str = "richardson", tol: float | None = None,
                    start: int = 16) -> AtOneResult:
    """Limit of phi(lam + rho, k, z) as z -> (1, ..., 1) along z = (s^n, ..., s, 1).

    On that path z^mu = s^{height(mu)}, so the limit is the sum over heights of
    the layer sums; partial sums at heights start * 2^j are accelerated.
    ``N`` is the largest height used.
    """
    lam = np.asarray(lam, dtype=complex)
    R = R or RootSystem(len(lam) - 1)
    H = N or DEFAULT_AT_ONE_HEIGHT.get(R.n, 32)
    k = complex(k)
    sums, _, _, _ = _run_recursion(lam, k, R, H, store_full=False)
    partial = np.cumsum(sums)
    ladder = []
    h = start
    while h <= H:
        ladder.append(h)
        h *= 2
    if not ladder or ladder[-1] != H:
        ladder.append(H)
    seq = [partial[h] for h in ladder]
    geometric = all(b == 2 * a for a, b in zip(ladder, ladder[1:]))
    if acceleration == "none":
        ex = Extrapolated(seq[-1], abs(seq[-1] - seq[-2]) if len(seq) > 1 else math.inf)
    elif acceleration == "richardson":
        if not geometric:
            seq, ladder = seq[:-1], ladder[:-1]
        exps = None
        if R.n == 1:
            # tail of the rank-one sum decays like H^{-(1 - 2k) - j}
            exps = [(1 - 2 * k).real + j for j in range(len(seq) - 1)]
        ex = richardson(seq, exps)
    elif acceleration == "epsilon":
        if not geometric:
            seq, ladder = seq[:-1], ladder[:-1]
        ex = wynn_epsilon(seq)
    else:
        raise ValueError(f"unknown acceleration {acceleration!r}")
    # rounding in the partial sums bounds what any tableau can resolve
    floor = np.finfo(float).eps * math.sqrt(H) * max(1.0, abs(ex.value))
    res = AtOneResult(complex(ex.value), max(float(ex.error), floor), acceleration, tuple(ladder),
                      tuple(complex(v) for v in seq))
    if tol is not None and not res.error <= tol:
        raise ConvergenceError(
            f"z -> 1 limit not converged: error estimate {res.error:.3g} > {tol:.3g}",
            value=res.value, error=res.error)
    return res


def _layer_max(data: np.ndarray, heights: np.ndarray, order: int) -> np.ndarray:
    """Array of the same shape holding max |data| over each entry's height layer."""
    out = np.zeros(data.shape)
    mag = np.abs(data)
    for h in range(order + 1):
        layer = heights == h
        if layer.any():
            out[layer] = mag[layer].max()
    return out


def coefficient_deviation(a: FormalSeries, b: FormalSeries) -> float:
    """max_mu |a_mu - b_mu| / max over mu's height layer of max(|a|, |b|).

    Normalizing by the layer keeps coefficients that nearly cancel from
    inflating the figure; a layer that is zero in both series counts as exact.
    """
    _check_compatible(a, b)
    h = a.heights()
    keep = h <= a.order
    scale = np.maximum(_layer_max(a.data, h, a.order), _layer_max(b.data, h, b.order))
    diff = np.abs(a.data - b.data)
    ratio = np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), diff)
    return float(ratio[keep].max())


def eigen_defect(s: FormalSeries, lam, k, R: RootSystem | None = None) -> float:
    """max_mu |(L s - eigenvalue s)_mu| / (1 + max |c| over mu's height layer)."""
    R = R or RootSystem(s.n)
    res = apply_radial_operator(s, lam, RadialOperatorParams(complex(k), s.n)) - eigenvalue(lam, k, R) * s
    h = s.heights()
    keep = h <= s.order
    scale = 1.0 + _layer_max(s.data, h, s.order)
    return float((np.abs(res.data) / scale)[keep].max())
