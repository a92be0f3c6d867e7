"""Triangular-pattern integrals for type A_n.

Variables t_ij (row j = 1..n holds t_1j..t_jj) sit under the points z_1..z_{n+1}
and interlace row by row.  Three integrands are supported:

* ``thm32``: coupling exponents -k (row to row and to z), 2k within a row,
  row powers lam_{n-j+2} - lam_{n-j+1} + k - 1, prefactor prod z_i^{lam_1 + kn/2};
* ``thm31``: the same shape with k - 1, k - 1, 2 - 2k, powers ... - k, and an
  extra prod_{i1 > i2} (z_i1 - z_i2)^{1 - 2k};
* ``thm41``: z collapsed to 1, top row weighted by (1 - t)^{-(n+1)k}.

All are integrated over one real cycle, the interlacing polytope
("identity-chamber"), where every difference base is positive.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DivergentIntegralError, OutsideChamberError
from .extrapolate import richardson, wynn_epsilon
from .quadrature import (IteratedDomain, ProductIntegrand, QuadratureSpec, QuadResult, integrate_at_level,
                         integrate_iterated)
from .roots import RootSystem, check_weight, pairing, rho, row_root
from .series import eigenvalue
from .special import log_beta

VARIANTS = ("thm31", "thm32", "thm41")
CYCLE_TAG = "identity-chamber"


def pattern_variables(n: int) -> list[tuple[int, int]]:
    """1-based (i, j) labels in integration order: top row first, left to right."""
    return [(i, j) for j in range(n, 0, -1) for i in range(1, j + 1)]


def _var_index(n: int) -> dict[tuple[int, int], int]:
    return {ij: v for v, ij in enumerate(pattern_variables(n))}


@dataclass(frozen=True)
class Pattern:
    """Triangular array; ``rows[j - 1]`` holds t_1j, ..., t_jj."""

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        for j, row in enumerate(self.rows, start=1):
            if len(row) != j:
                raise ValueError(f"row {j} must have {j} entries, got {len(row)}")

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[j - 1][i - 1]

    def to_vector(self) -> np.ndarray:
        return np.array([self[ij] for ij in pattern_variables(self.n)])

    @classmethod
    def from_vector(cls, n: int, vec) -> "Pattern":
        idx = _var_index(n)
        return cls(tuple(tuple(float(vec[idx[(i, j)]]) for i in range(1, j + 1)) for j in range(1, n + 1)))


@dataclass(frozen=True)
class PatternDomain:
    """Interlacing polytope for a pattern of rank n.

    ``mode`` is ``"points"`` (top row between consecutive z) or ``"unit"``
    (ordered top row in [0, 1]).  ``iterated`` is the nested description used
    by the integrator; anchors are z_1..z_{n+1}, 0 in points mode and 0, 1 in
    unit mode.
    """

    n: int
    mode: str
    z: tuple[float, ...] | None
    iterated: IteratedDomain
    cycle: str = CYCLE_TAG

    @property
    def num_vars(self) -> int:
        return self.n * (self.n + 1) // 2

    def anchor(self, name) -> int:
        V = self.num_vars
        if self.mode == "points":
            return V + (self.n + 1 if name == 0 else name - 1)
        return V + {0: 0, 1: 1}[name]

    def contains(self, p: Pattern, strict: bool = False) -> bool:
        x = np.concatenate([p.to_vector(), self.iterated.anchors])
        lt = (lambda a, b: a < b) if strict else (lambda a, b: a <= b)
        d = self.iterated
        return all(lt(x[d.lower[v]], x[v]) and lt(x[v], x[d.upper[v]]) for v in range(d.dim))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Uniform cube points pushed through the nested map (interior points, not uniform in volume)."""
        U = rng.uniform(0.0, 1.0, size=(count, self.num_vars))
        return self.iterated.to_extended(U)


def identity_cycle(variant: str, z, n: int) -> PatternDomain:
    """The interlacing polytope used as integration cycle for ``variant``."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if n < 1:
        raise ValueError("rank must be positive")
    idx = _var_index(n)
    V = len(idx)
    lower, upper, names = [], [], []
    if variant == "thm41":
        anchors = (0.0, 1.0)
        zero, one = V, V + 1
        for i, j in pattern_variables(n):
            if j == n:
                lower.append(zero if i == 1 else idx[(i - 1, n)])
                upper.append(one)
            else:
                lower.append(idx[(i, j + 1)])
                upper.append(idx[(i + 1, j + 1)])
            names.append(f"t{i}{j}")
        mode, zt = "unit", None
    else:
        if z is None:
            raise ValueError("points z are required")
        zt = tuple(float(x) for x in z)
        if len(zt) != n + 1:
            raise ValueError(f"need {n + 1} points, got {len(zt)}")
        if zt[0] <= 0 or any(a >= b for a, b in zip(zt, zt[1:])):
            raise OutsideChamberError(f"points must be positive and strictly increasing: {zt}")
        anchors = zt + (0.0,)
        for i, j in pattern_variables(n):
            if j == n:
                lower.append(V + i - 1)
                upper.append(V + i)
            else:
                lower.append(idx[(i, j + 1)])
                upper.append(idx[(i + 1, j + 1)])
            names.append(f"t{i}{j}")
        mode = "points"
    dom = IteratedDomain(anchors, tuple(lower), tuple(upper), tuple(names), CYCLE_TAG)
    return PatternDomain(n, mode, zt, dom)


@dataclass(frozen=True)
class Factor:
    kind: str  # "outer", "top", "adjacent", "coincidence", "power"
    a: int
    b: int
    exponent: complex


@dataclass(frozen=True)
class IntegrandSpec:
    variant: str
    lam: np.ndarray
    k: complex
    z: tuple[float, ...] | None
    n: int
    factors: tuple[Factor, ...]
    log_prefactor: complex
    domain: PatternDomain
    meta: dict = field(default_factory=dict)

    def product(self) -> ProductIntegrand:
        return ProductIntegrand([(f.a, f.b, f.exponent) for f in self.factors],
                                log_const=self.log_prefactor, labels=[f.kind for f in self.factors])

    def evaluate(self, p: Pattern | np.ndarray) -> complex | np.ndarray:
        """Integrand value, prefactor included, at a pattern or at extended points (P, V + anchors)."""
        if isinstance(p, Pattern):
            X = np.concatenate([p.to_vector(), self.domain.iterated.anchors])[None, :]
            return complex(self.product()(X)[0])
        return self.product()(np.atleast_2d(p))

    def class_counts(self) -> Counter:
        return Counter(f.kind for f in self.factors)

    def exponent_table(self) -> dict:
        """{(label_a, label_b): exponent} with labels like 't12', 'z3', '0', '1'."""
        names = list(self.domain.iterated.names)
        if self.domain.mode == "points":
            names += [f"z{i}" for i in range(1, self.n + 2)] + ["0"]
        else:
            names += ["0", "1"]
        return {(names[f.a], names[f.b]): f.exponent for f in self.factors}

    def row_power(self, j: int) -> complex:
        idx = _var_index(self.n)
        zero = self.domain.anchor(0)
        v = idx[(1, j)]
        return sum((f.exponent for f in self.factors if f.kind == "power" and f.a == v and f.b == zero), 0j)

    def scaling_degree(self) -> complex:
        """Degree d with F(c z) = c^d F(z) (points mode), from t -> c t in the integral."""
        if self.domain.mode != "points":
            raise ValueError("scaling is defined for the points mode only")
        z_pref = (self.n + 1) * (self.lam[0] + self.k * self.n / 2)
        if self.variant == "thm31":
            z_pref += (1 - 2 * self.k) * self.n * (self.n + 1) / 2
        return z_pref + sum(f.exponent for f in self.factors) + self.domain.num_vars


def _expected_counts(variant: str, n: int) -> dict:
    counts = {
        "adjacent": sum(j * (j + 1) for j in range(1, n)),
        "coincidence": sum(j * (j - 1) // 2 for j in range(2, n + 1)),
        "power": n * (n + 1) // 2,
    }
    if variant == "thm41":
        counts["top"] = n
    else:
        counts["outer"] = n * (n + 1)
    return {key: c for key, c in counts.items() if c}


def row_exponent(lam, k, n: int, j: int) -> complex:
    """Power of every t_ij in row j for the thm32/thm41 integrands."""
    return lam[n - j + 1] - lam[n - j] + k - 1


def root_assignment_exponents(lam, k, R: RootSystem) -> dict:
    """thm41 exponents rebuilt from root data, one simple root per row.

    Row j carries alpha(j) = alpha_{n+1-j}.  Then

    * t_ij^{(lam - rho, -alpha(j)) - 1} (the -1 absorbs dt/t),
    * (1 - t_ij)^{k ((n+1) Lambda_1, -alpha(j))},
    * (t_ij - t_i'j')^{k (alpha(j), alpha(j'))}.

    Keys are ("power", (i, j)), ("top", (i, j)) and ("pair", (i, j), (i', j')).
    Zero exponents are omitted.
    """
    n = R.n
    lam = np.asarray(lam, dtype=complex)
    k = complex(k)
    simple = [np.array(r, dtype=float) for r in R.simple_roots]
    alpha = {j: simple[row_root(j, n) - 1] for j in range(1, n + 1)}
    lam1 = np.array([float(x) for x in R.fundamental_weights[0]])
    r = rho(R, k)
    out = {}
    labels = pattern_variables(n)
    for i, j in labels:
        out[("power", (i, j))] = pairing(lam - r, -alpha[j]) - 1
        top = k * pairing((n + 1) * lam1, -alpha[j])
        if abs(top) > 0:
            out[("top", (i, j))] = top
    for s, (i, j) in enumerate(labels):
        for i2, j2 in labels[s + 1:]:
            e = k * pairing(alpha[j], alpha[j2])
            if abs(e) > 0:
                out[("pair", (i, j), (i2, j2))] = e
    return out


def _audit(spec: IntegrandSpec, R: RootSystem):
    n = spec.n
    counts = dict(spec.class_counts())
    expected = _expected_counts(spec.variant, n)
    if counts != expected:
        raise RuntimeError(f"{spec.variant} factor classes {counts} differ from {expected}")
    pairs = [frozenset((f.a, f.b)) for f in spec.factors]
    if len(set(pairs)) != len(pairs):
        raise RuntimeError("a pair of variables carries two factors")
    # sum_j j * row gap = ((n+1) Lambda_1, -lambda) for homogeneous lambda
    lam = spec.lam
    gaps = sum(j * (lam[n - j + 1] - lam[n - j]) for j in range(1, n + 1))
    if abs(gaps + (n + 1) * lam[0]) > 1e-9 * (1 + np.abs(lam).max()):
        raise RuntimeError("row exponents do not telescope to -(n+1) lambda_1")
    if spec.variant == "thm41":
        idx = _var_index(n)
        table = {}
        zero, one = spec.domain.anchor(0), spec.domain.anchor(1)
        inv = {v: ij for ij, v in idx.items()}
        for f in spec.factors:
            if f.b == zero:
                table[("power", inv[f.a])] = f.exponent
            elif f.b == one:
                table[("top", inv[f.a])] = f.exponent
            else:
                a, b = sorted((f.a, f.b))
                table[("pair", inv[a], inv[b])] = f.exponent
        # vanishing exponents (all couplings at k = 0) carry no information
        table = {key: e for key, e in table.items() if e != 0}
        ref = {key: e for key, e in root_assignment_exponents(lam, spec.k, R).items() if e != 0}
        if table.keys() != ref.keys() or any(abs(table[key] - ref[key]) > 1e-12 for key in ref):
            raise RuntimeError("thm41 exponent table disagrees with the root-assignment form")


def build_integrand(variant: str, lam, k, z=None, R: RootSystem | None = None) -> IntegrandSpec:
    """Exponent table, prefactor and cycle for one of the three pattern integrands.

    Raises :class:`DivergentIntegralError` naming the face when a declared face
    exponent has real part <= -1.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    lam = np.asarray(lam, dtype=complex)
    R = R or RootSystem(len(lam) - 1)
    lam = check_weight(lam, R, atol=1e-9)
    n = R.n
    k = complex(k)
    dom = identity_cycle(variant, z, n)
    idx = _var_index(n)
    zero = dom.anchor(0)
    if variant == "thm31":
        e_couple, e_same, e_shift = k - 1, 2 - 2 * k, -k
    else:
        e_couple, e_same, e_shift = -k, 2 * k, k - 1
    factors = []
    if variant == "thm41":
        for i in range(1, n + 1):
            factors.append(Factor("top", idx[(i, n)], dom.anchor(1), -(n + 1) * k))
    else:
        for i in range(1, n + 2):
            for i1 in range(1, n + 1):
                factors.append(Factor("outer", idx[(i1, n)], dom.anchor(i), e_couple))
    for j in range(1, n):
        for i in range(1, j + 1):
            for i1 in range(1, j + 2):
                factors.append(Factor("adjacent", idx[(i, j)], idx[(i1, j + 1)], e_couple))
    for j in range(2, n + 1):
        for i2 in range(1, j + 1):
            for i1 in range(i2 + 1, j + 1):
                factors.append(Factor("coincidence", idx[(i1, j)], idx[(i2, j)], e_same))
    for j in range(1, n + 1):
        power = lam[n - j + 1] - lam[n - j] + e_shift
        for i in range(1, j + 1):
            factors.append(Factor("power", idx[(i, j)], zero, power))
    log_pref = 0j
    if variant != "thm41":
        zz = np.array(dom.z)
        log_pref = (lam[0] + k * n / 2) * np.log(zz).sum()
        if variant == "thm31":
            log_pref += (1 - 2 * k) * sum(math.log(zz[b] - zz[a]) for a in range(n + 1) for b in range(a + 1, n + 1))
    spec = IntegrandSpec(variant, lam, k, dom.z, n, tuple(factors), complex(log_pref), dom)
    _audit(spec, R)
    spec.product().edge_exponents(dom.iterated)
    return spec


def integral(spec: IntegrandSpec, qspec: QuadratureSpec = QuadratureSpec()) -> QuadResult:
    return integrate_iterated(spec.product(), spec.domain.iterated, qspec)


def integration_window(lam, k, n: int) -> str | None:
    """None when (lam, k) lies in the absolute-convergence window of the pattern integrals.

    The window is k real in (-1/2, 0] and real row gaps lam_{n-j+2} - lam_{n-j+1}
    in (1/2, 3) for every row.
    """
    k = complex(k)
    lam = np.asarray(lam)
    if k.imag != 0 or not -0.5 < k.real <= 0:
        return f"k = {k} outside (-1/2, 0]"
    if np.iscomplexobj(lam) and np.any(lam.imag != 0):
        return "complex lambda"
    gaps = np.real(lam[1:] - lam[:-1])
    if np.any(gaps <= 0.5) or np.any(gaps >= 3):
        return f"row gaps {gaps.tolist()} outside (1/2, 3)"
    return None


def selberg_lhs(lam, k, n: int | None = None, spec: QuadratureSpec = QuadratureSpec()) -> QuadResult:
    """Pattern integral of the thm41 integrand over the ordered unit polytope."""
    lam = np.asarray(lam, dtype=complex)
    R = RootSystem(n if n is not None else len(lam) - 1)
    return integral(build_integrand("thm41", lam, k, None, R), spec)


def selberg_lhs_rank_one(lam, k) -> complex:
    """B(lam_2 - lam_1 + k, 1 - 2k), the n = 1 value of :func:`selberg_lhs`."""
    a = complex(lam[1] - lam[0])
    return complex(np.exp(log_beta(a + k, 1 - 2 * complex(k))))


def asymptotic_solution_numeric(lam, k, z, spec: QuadratureSpec = QuadratureSpec()) -> QuadResult:
    """thm32 integral over the interlacing polytope under z, prefactor included."""
    z = np.asarray(z, dtype=float)
    return integral(build_integrand("thm32", lam, k, z, RootSystem(len(z) - 1)), spec)


@dataclass(frozen=True)
class EigenResidual:
    residual: float
    value: complex
    operator_value: complex
    eigenvalue: complex
    quadrature_error: float
    noise_bound: float
    level: int
    inconclusive: bool


def _stencil_values(lam, k, x0, offsets, level, qspec):
    out = {}
    for off in offsets:
        spec = build_integrand("thm32", lam, k, np.exp(x0 + off))
        out[tuple(off)] = integrate_at_level(spec.product(), spec.domain.iterated, level, qspec)
    return out


def _apply_operator_fd(F, x0, h, k):
    """L(k) F at exp(x0) from a 2(n+1)+1 point stencil in log coordinates."""
    d = len(x0)
    z = np.exp(x0)
    f0 = F[(0.0,) * d]
    first = np.empty(d, dtype=complex)
    second = np.empty(d, dtype=complex)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        fp, fm = F[tuple(e)], F[tuple(-e)]
        first[i] = (fp - fm) / (2 * h)
        second[i] = (fp - 2 * f0 + fm) / h**2
    out = second.sum()
    for i in range(d):
        for j in range(i + 1, d):
            out -= k * (z[j] + z[i]) / (z[j] - z[i]) * (first[i] - first[j])
    return out


def eigen_residual(lam, k, z0, h: float = 1e-2, spec: QuadratureSpec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-8)):
    """|L(k) F - ((lam, lam) - (rho, rho)) F| / |F| for the thm32 integral F at z0.

    Derivatives are central differences in log z with steps h and h/2,
    combined by Richardson extrapolation.  All stencil points use the rule
    level that met the tolerance at z0, so the quadrature error varies
    smoothly across the stencil.
    """
    z0 = np.asarray(z0, dtype=float)
    R = RootSystem(len(z0) - 1)
    lam = np.asarray(lam, dtype=complex)
    k = complex(k)
    x0 = np.log(z0)
    if np.any(np.diff(x0) < 10 * h):
        raise ValueError(f"z0 needs log-spacing >= 10h = {10 * h}")
    centre = build_integrand("thm32", lam, k, z0, R)
    res = integrate_iterated(centre.product(), centre.domain.iterated, spec)
    d = len(z0)
    ops = []
    for step in (h, h / 2):
        offsets = [np.zeros(d)]
        for i in range(d):
            for sgn in (1, -1):
                e = np.zeros(d)
                e[i] = sgn * step
                offsets.append(e)
        F = _stencil_values(lam, k, x0, offsets, res.level, spec)
        F[(0.0,) * d] = res.value
        ops.append(_apply_operator_fd(F, x0, step, k))
    lf = (4 * ops[1] - ops[0]) / 3
    ev = eigenvalue(lam, k, R)
    f = res.value
    residual = abs(lf - ev * f) / abs(f)
    rel_q = res.error / abs(f)
    # worst case: independent errors through the h/2 second difference, Richardson weight 4/3
    noise = rel_q * (4 / 3) * (4 * d / (h / 2) ** 2 + 2 * abs(k) * d * d / h)
    return EigenResidual(float(residual), complex(f), complex(lf), complex(ev), float(res.error),
                         float(noise), res.level, bool(noise > 1.0))


@dataclass(frozen=True)
class LeadingExponent:
    value: float
    error: float
    expected: float
    direction: tuple
    scales: tuple
    slopes: tuple
    inconclusive: bool


def leading_exponent_numeric(lam, k, direction: Sequence[float], z0=None, s0: float = 0.25, steps: int = 11,
                             spec: QuadratureSpec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-10),
                             tol: float = 1e-3, acceleration: str = "epsilon") -> LeadingExponent:
    """Slope of log|F(z(s))| in log s along z(s) = (s^{c_1} z0_1, ..., s^{c_{n+1}} z0_{n+1}).

    F is the thm32 integral, s runs over s0 * 2^{-j}; the local slopes are
    extrapolated to s -> 0 by Wynn's epsilon algorithm (``acceleration="epsilon"``)
    or iterated Aitken (``"richardson"``).  Subleading terms mix several
    non-integer powers of s, which the epsilon algorithm handles better.  The estimate approximates (lam + rho(k), c).
    """
    lam = np.asarray(lam, dtype=complex)
    n = len(lam) - 1
    R = RootSystem(n)
    c = np.asarray(direction, dtype=float)
    if c.shape != (n + 1,):
        raise ValueError(f"direction needs {n + 1} entries")
    if np.any(np.diff(c) > 0):
        raise ValueError("direction must be non-increasing so z(s) stays ordered")
    if z0 is None:
        z0 = np.arange(1, n + 2, dtype=float)
    z0 = np.asarray(z0, dtype=float)
    scales = s0 * 2.0 ** -np.arange(steps)
    logs = []
    for s in scales:
        val = asymptotic_solution_numeric(lam, k, z0 * s**c, spec).value
        logs.append(math.log(abs(val)))
    slopes = [(logs[j + 1] - logs[j]) / math.log(0.5) for j in range(steps - 1)]
    if acceleration == "epsilon":
        ex = wynn_epsilon(slopes)
    elif acceleration == "richardson":
        ex = richardson(slopes)
    else:
        raise ValueError(f"unknown acceleration {acceleration!r}")
    expected = float(np.real(pairing(lam + rho(R, complex(k)), c)))
    return LeadingExponent(float(np.real(ex.value)), float(ex.error), expected, tuple(c), tuple(scales),
                           tuple(slopes), bool(ex.error > tol))
