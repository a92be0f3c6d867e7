"""Quadrature with algebraic endpoint singularities.

* :func:`gauss_jacobi` builds rules for int_0^1 (1-t)^alpha t^beta f(t) dt by the
  Golub-Welsch eigenvalue method.
* :func:`integrate_interval` is a 1-d adaptive bisection integrator whose edge
  panels carry the declared endpoint weights.
* :func:`integrate_iterated` integrates over a nested domain where each
  variable ranges between anchors or earlier variables.  Every variable is
  mapped to [0, 1] by its conditional interval, so every singular face sits at
  a cube face; a graded composite rule per coordinate is refined level by level
  until two successive levels agree.
"""
from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _kernels
from .errors import AccuracyError, DivergentIntegralError, DivergentWeightError, EmptyDomainError

GRADING_RATIO = 0.15
MAX_POINTS_PER_CHUNK = 250_000


@dataclass(frozen=True)
class JacobiRule:
    """Nodes and weights on [0, 1] for the weight (1 - t)^alpha t^beta."""

    alpha: float
    beta: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def m(self) -> int:
        return len(self.nodes)

    def integrate(self, f: Callable) -> complex:
        return np.dot(self.weights, f(self.nodes))


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 12
    nodes: int = 10
    jobs: int = 1
    max_points: int = 50_000_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if not 1 <= self.max_depth <= 30:
            raise ValueError("max_depth must lie in 1..30")
        if self.nodes < 2:
            raise ValueError("need at least two nodes per panel")

    def target(self, value) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    evaluations: int
    level: int = 0

    def __complex__(self):
        return complex(self.value)


@lru_cache(maxsize=256)
def _gauss_jacobi_cached(alpha: float, beta: float, m: int):
    # monic Jacobi recurrence on [-1, 1] for (1 - x)^alpha (1 + x)^beta
    ab = alpha + beta
    j = np.arange(m, dtype=float)
    diag = np.empty(m)
    diag[0] = (beta - alpha) / (ab + 2.0)
    if m > 1:
        jj = j[1:]
        diag[1:] = (beta**2 - alpha**2) / ((2 * jj + ab) * (2 * jj + ab + 2))
    off = np.empty(max(m - 1, 0))
    if m > 1:
        off[0] = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        if m > 2:
            jj = j[2:]
            off[1:] = (4 * jj * (jj + alpha) * (jj + beta) * (jj + ab)
                       / ((2 * jj + ab) ** 2 * (2 * jj + ab + 1) * (2 * jj + ab - 1)))
    x, vec = eigh_tridiagonal(diag, np.sqrt(off))
    mass = math.exp(math.lgamma(alpha + 1) + math.lgamma(beta + 1) - math.lgamma(ab + 2))
    w = mass * vec[0, :] ** 2
    t = (1.0 + x) / 2.0
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def gauss_jacobi(alpha: float, beta: float, m: int) -> JacobiRule:
    """m-point rule exact for polynomials of degree 2m - 1 times (1 - t)^alpha t^beta on [0, 1]."""
    alpha = float(alpha)
    beta = float(beta)
    if alpha <= -1 or beta <= -1:
        raise DivergentWeightError(f"weight (1-t)^{alpha} t^{beta} is not integrable on [0, 1]")
    if m < 1:
        raise ValueError("need at least one node")
    t, w = _gauss_jacobi_cached(alpha, beta, int(m))
    return JacobiRule(alpha, beta, t, w)


def _panel_rule(lo: float, hi: float, left: float, right: float, m: int, hi_comp: float | None = None):
    """Nodes, complements 1 - node, and effective weights on [lo, hi] within [0, 1].

    ``left``/``right`` are the exponents built into the Jacobi weight; the
    returned weights divide them back out so callers evaluate the full
    integrand.  ``hi_comp`` is 1 - hi when it is known more accurately than
    the subtraction gives.
    """
    rule = gauss_jacobi(right, left, m)
    v = rule.nodes
    h = hi - lo
    w = h * rule.weights
    if left != 0.0:
        w = w / v**left
    if right != 0.0:
        w = w / (1.0 - v) ** right
    comp = (1.0 - hi if hi_comp is None else hi_comp) + h * (1.0 - v)
    return lo + h * v, comp, w


def integrate_interval(f: Callable, a: float, b: float, left_exp: float = 0.0, right_exp: float = 0.0,
                       spec: QuadratureSpec = QuadratureSpec()) -> QuadResult:
    """int_a^b (t - a)^left_exp (b - t)^right_exp f(t) dt by adaptive bisection.

    ``f`` is the regular part and is called with a numpy array of nodes.
    Panels touching a or b use Gauss-Jacobi rules for the endpoint power; each
    panel's error is the difference between its own rule and its two halves.
    """
    if not b > a:
        raise EmptyDomainError(f"empty interval [{a}, {b}]")
    if left_exp <= -1 or right_exp <= -1:
        raise DivergentWeightError(f"endpoint exponents ({left_exp}, {right_exp}) are not integrable")
    m = spec.nodes
    evals = 0

    def panel(lo, hi):
        nonlocal evals
        le = left_exp if lo == a else 0.0
        re = right_exp if hi == b else 0.0
        rule = gauss_jacobi(re, le, m)
        t = lo + (hi - lo) * rule.nodes
        g = np.asarray(f(t), dtype=complex)
        if lo != a and left_exp != 0.0:
            g = g * (t - a) ** left_exp
        if hi != b and right_exp != 0.0:
            g = g * (b - t) ** right_exp
        evals += m
        return (hi - lo) ** (1.0 + le + re) * np.dot(rule.weights, g)

    def split(lo, hi, whole, depth):
        mid = 0.5 * (lo + hi)
        ql, qr = panel(lo, mid), panel(mid, hi)
        return (abs(whole - ql - qr), lo, hi, depth, ql, qr)

    root = split(a, b, panel(a, b), 0)
    heap = [(-root[0], 0, root)]
    counter = 1
    total = root[4] + root[5]
    err = root[0]
    while err > spec.target(total):
        neg, _, item = heapq.heappop(heap)
        e, lo, hi, depth, ql, qr = item
        if depth + 1 > spec.max_depth:
            heapq.heappush(heap, (neg, counter, item))
            raise AccuracyError(
                f"tolerance {spec.target(total):.3g} not met at depth {spec.max_depth}: estimate {err:.3g}",
                value=total, error=err)
        mid = 0.5 * (lo + hi)
        left = split(lo, mid, ql, depth + 1)
        right = split(mid, hi, qr, depth + 1)
        for child in (left, right):
            heapq.heappush(heap, (-child[0], counter, child))
            counter += 1
        total = sum(it[4] + it[5] for _, _, it in heap)
        err = sum(it[0] for _, _, it in heap)
    return QuadResult(complex(total), float(err), evals)


# ---------------------------------------------------------------------------
# Iterated integration over nested domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IteratedDomain:
    """Nested integration domain.

    Variables 0..V-1 are integrated outermost first.  ``lower[v]`` and
    ``upper[v]`` index the extended vector ``[t_0, ..., t_{V-1}, *anchors]``;
    a bound is either an anchor or a variable with a smaller index.
    """

    anchors: tuple[float, ...]
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    names: tuple[str, ...] = ()
    tag: str = ""

    def __post_init__(self):
        V = len(self.lower)
        if len(self.upper) != V:
            raise ValueError("lower and upper bound lists differ in length")
        for v in range(V):
            for b in (self.lower[v], self.upper[v]):
                if not (b < v or V <= b < V + len(self.anchors)):
                    raise ValueError(f"bound {b} of variable {v} is neither an earlier variable nor an anchor")
        with np.errstate(divide="ignore"):
            empty = V and not np.all(self.widths(np.full((1, V), 0.5)) > 0)
        if empty:
            raise EmptyDomainError("integration domain has empty interior")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def widths(self, U: np.ndarray) -> np.ndarray:
        X = self.to_extended(U)
        V = self.dim
        return np.stack([X[:, self.upper[v]] - X[:, self.lower[v]] for v in range(V)], axis=1)

    def to_extended(self, U: np.ndarray) -> np.ndarray:
        """Map cube points (P, V) to extended points (P, V + anchors)."""
        return self.positions(U)[0]

    def log_jacobian(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros(X.shape[0])
        for v in range(self.dim):
            out += np.log(X[:, self.upper[v]] - X[:, self.lower[v]])
        return out

    def positions(self, U: np.ndarray, Uc: np.ndarray | None = None):
        """Double-double extended points and the log Jacobian of the cube map.

        Returns (X, X_lo, log_jacobian).  Each variable is placed from the
        nearer bound, width * u above the lower one or width * (1 - u) below
        the upper one, so differences to either bound stay relatively accurate
        even when the slice is much narrower than the coordinates' magnitude.
        """
        U = np.atleast_2d(U)
        Uc = 1.0 - U if Uc is None else np.atleast_2d(Uc)
        P, V = U.shape
        X = np.empty((P, V + len(self.anchors)))
        XL = np.zeros_like(X)
        X[:, V:] = self.anchors
        logjac = np.zeros(P)
        for v in range(V):
            lo, hi = self.lower[v], self.upper[v]
            width = _dd_diff(X[:, hi], XL[:, hi], X[:, lo], XL[:, lo])
            logjac += np.log(width)
            near_lo = U[:, v] <= 0.5
            base_h = np.where(near_lo, X[:, lo], X[:, hi])
            base_l = np.where(near_lo, XL[:, lo], XL[:, hi])
            step = np.where(near_lo, width * U[:, v], -width * Uc[:, v])
            X[:, v], XL[:, v] = _dd_add(base_h, base_l, step)
        return X, XL, logjac


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _dd_add(xh, xl, y):
    s, e = _two_sum(xh, y)
    e = e + xl
    hi = s + e
    return hi, e - (hi - s)


def _dd_diff(xh, xl, yh, yl):
    s, e = _two_sum(xh, -yh)
    return s + (e + (xl - yl))


class ProductIntegrand:
    """prod_f |x_a - x_b|^{e_f} over the extended vector, times exp(log_const).

    Factors are (a, b, exponent) triples with complex exponents; bases are
    taken in absolute value so the principal branch of every power is real-positive.
    """

    def __init__(self, factors: Sequence[tuple[int, int, complex]], log_const: complex = 0.0, labels=None):
        self.factors = tuple((int(a), int(b), complex(e)) for a, b, e in factors)
        self.log_const = complex(log_const)
        self.labels = tuple(labels) if labels is not None else None
        self._fa = np.array([f[0] for f in self.factors], dtype=np.int64)
        self._fb = np.array([f[1] for f in self.factors], dtype=np.int64)
        self._fe = np.array([f[2] for f in self.factors], dtype=complex)

    def log_evaluate(self, X: np.ndarray, X_lo: np.ndarray | None = None) -> np.ndarray:
        return _kernels.log_product(X, self._fa, self._fb, self._fe, X_lo) + self.log_const

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return np.exp(self.log_evaluate(X))

    def face_exponent(self, v: int, other: int) -> complex:
        return sum((e for a, b, e in self.factors if {a, b} == {v, other}), 0j)

    def edge_exponents(self, domain: IteratedDomain) -> list[tuple[float, float]]:
        out = []
        for v in range(domain.dim):
            le = self.face_exponent(v, domain.lower[v])
            re = self.face_exponent(v, domain.upper[v])
            for face, e in (("lower", le), ("upper", re)):
                if e.real <= -1:
                    raise DivergentIntegralError(
                        f"exponent {e} at the {face} face of variable {v} is not integrable", face=(v, face))
            out.append((le.real, re.real))
        return out


def graded_rule(left: float, right: float, level: int, m: int):
    """Composite rule on [0, 1] graded geometrically toward both ends.

    Level 0 is a single Gauss-Jacobi panel; level g has 2g + 1 panels with
    edge panels of width GRADING_RATIO^g carrying the endpoint exponents.
    Returns (nodes, 1 - nodes, weights) with the complements computed
    without cancellation near t = 1.
    """
    if level == 0:
        return _panel_rule(0.0, 1.0, left, right, m, 0.0)
    s = GRADING_RATIO ** np.arange(level, 0, -1)
    breaks = np.concatenate([[0.0], s, 1.0 - s[::-1], [1.0]])
    comps = np.concatenate([[1.0], 1.0 - s, s[::-1], [0.0]])
    nodes, comp, weights = [], [], []
    last = len(breaks) - 2
    for p in range(len(breaks) - 1):
        le = left if p == 0 else 0.0
        re = right if p == last else 0.0
        x, c, w = _panel_rule(breaks[p], breaks[p + 1], le, re, m, comps[p + 1])
        nodes.append(x)
        comp.append(c)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(comp), np.concatenate(weights)


def _tensor_sum(integrand, domain: IteratedDomain, rules, jobs: int) -> tuple[complex, int]:
    V = domain.dim
    sizes = tuple(len(r[0]) for r in rules)
    total_points = math.prod(sizes)
    chunks = [(a, min(a + MAX_POINTS_PER_CHUNK, total_points))
              for a in range(0, total_points, MAX_POINTS_PER_CHUNK)]

    if isinstance(integrand, ProductIntegrand):
        scale = np.exp(integrand.log_const)

        def run(bounds):
            return scale * _kernels.tensor_chunk(bounds[0], bounds[1], rules, domain.lower, domain.upper,
                                                 domain.anchors, integrand._fa, integrand._fb, integrand._fe)
    else:
        def run(bounds):
            idx = np.unravel_index(np.arange(*bounds), sizes)
            U = np.empty((len(idx[0]), V))
            W = np.ones(len(idx[0]))
            Uc = np.empty_like(U)
            for v, (x, c, w) in enumerate(rules):
                U[:, v] = x[idx[v]]
                Uc[:, v] = c[idx[v]]
                W *= w[idx[v]]
            X, XL, logjac = domain.positions(U, Uc)
            logf = integrand.log_evaluate(X, XL) + logjac
            return np.dot(W, np.exp(logf))

    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    # fixed summation order keeps sequential and parallel runs identical
    total = 0j
    for part in parts:
        total += part
    return complex(total), total_points


def _level_rules(exps, level: int, spec: QuadratureSpec):
    m = spec.nodes + 2 * level
    rules = [graded_rule(le, re, level, m) for le, re in exps]
    if math.prod(len(r[0]) for r in rules) > spec.max_points:
        return None
    return rules


def integrate_iterated(integrand, domain: IteratedDomain, spec: QuadratureSpec = QuadratureSpec(),
                       start_level: int = 1) -> QuadResult:
    """Integrate ``integrand`` (a :class:`ProductIntegrand` or compatible object) over ``domain``.

    Each level uses the graded composite rule of that level in every
    coordinate with ``spec.nodes + 2 * level`` nodes per panel; the error
    estimate is the change from the previous level.  Level 0 (one Jacobi
    panel) converges differently from the graded levels and can be far more
    accurate than level 1 by accident, so it is skipped by default: a
    difference involving it does not bound the error of the finer level.
    """
    if domain.dim == 0:
        raise EmptyDomainError("no integration variables")
    exps = integrand.edge_exponents(domain)
    prev = None
    err = math.inf
    evals = 0
    level = start_level
    while True:
        rules = _level_rules(exps, level, spec)
        if rules is None:
            raise AccuracyError(
                f"level {level} exceeds the budget of {spec.max_points} points; last estimate "
                f"{'unavailable' if prev is None else format(err, '.3g')}",
                value=prev, error=err if prev is not None else math.inf)
        q, ne = _tensor_sum(integrand, domain, rules, spec.jobs)
        evals += ne
        if prev is not None:
            err = abs(q - prev)
            if err <= spec.target(q):
                return QuadResult(q, float(err), evals, level)
            if level >= spec.max_depth:
                raise AccuracyError(
                    f"tolerance {spec.target(q):.3g} not met after {level} levels: estimate {err:.3g}",
                    value=q, error=err)
        prev = q
        level += 1


def integrate_at_level(integrand, domain: IteratedDomain, level: int, spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """Single evaluation with the level-``level`` rule.

    Using one fixed rule for nearby parameter values makes the quadrature
    error a smooth function of those parameters, which finite differences need.
    """
    rules = _level_rules(integrand.edge_exponents(domain), level, spec)
    if rules is None:
        raise AccuracyError(f"level {level} exceeds the budget of {spec.max_points} points")
    return _tensor_sum(integrand, domain, rules, spec.jobs)[0]
