"""Named verification checks.  Each returns a :class:`Report`."""
from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import HoselbergError
from .patterns import (eigen_residual, integration_window, leading_exponent_numeric, selberg_lhs,
                       selberg_lhs_rank_one)
from .quadrature import QuadratureSpec
from .report import Report
from .roots import RootSystem, WeylElement, delta, weyl_act, weyl_length
from .series import (coefficient_deviation, eigen_defect, eigenvalue, evaluate_at_one, hc_coefficients,
                     in_convergence_window, transformation_image)
from .special import ClosedFormValue, a_coefficient, opdam_value, rank_one_conversion_factor, selberg_rhs

CHECKS = ("roots", "series-check", "transform-check", "opdam-check", "coeff", "rhs", "selberg",
          "eigen-check", "exponent-check")

DEFAULT_K = {
    "series-check": 0.3, "transform-check": 0.3, "opdam-check": -0.25, "coeff": -0.25, "rhs": -0.25,
    "selberg": -0.25, "eigen-check": -0.3, "exponent-check": -0.3,
}

DEFAULT_TOL = {
    "roots": 0.0, "series-check": 1e-10, "transform-check": 1e-9, "coeff": 1e-12, "rhs": 1e-12,
    "selberg": 1e-8, "exponent-check": 1e-3,
}


class UsageError(HoselbergError):
    pass


@dataclass(frozen=True)
class CheckRequest:
    check: str
    n: int = 1
    k: complex | None = None
    lam: tuple | None = None
    order: int = 6
    tol: float | None = None
    quad_tol: float = 1e-9
    h: float = 1e-2
    seed: int = 0
    jobs: int = 1
    fmt: str = "text"
    w: str = "e"

    def __post_init__(self):
        if self.check not in CHECKS:
            raise UsageError(f"unknown check {self.check!r}; choose from {', '.join(CHECKS)} or 'all'")
        if not 1 <= self.n <= 8:
            raise UsageError(f"rank n must lie in 1..8, got {self.n}")
        if self.order < 0:
            raise UsageError("order must be nonnegative")
        if self.lam is not None and len(self.lam) != self.n + 1:
            raise UsageError(f"--lambda needs {self.n + 1} values for n = {self.n}, got {len(self.lam)}")
        if self.quad_tol <= 0 or self.h <= 0 or (self.tol is not None and self.tol < 0):
            raise UsageError("tolerances and step must be positive")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")


def centered(lam, warn: bool = True) -> np.ndarray:
    """Shift lam to coordinate sum zero, warning when the shift exceeds 1e-9."""
    lam = np.asarray(lam, dtype=float)
    s = lam.sum()
    if abs(s) > 1e-9 and warn:
        warnings.warn(f"lambda sums to {s:g}; subtracting the mean to make it homogeneous", stacklevel=3)
    return lam - lam.mean()


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def generic_weight(n: int, seed: int) -> np.ndarray:
    """Seeded weight in [-2, 2]^(n+1), centered, with every root pairing at least 0.05 from an integer."""
    rng = _rng(seed)
    R = RootSystem(n)
    while True:
        lam = rng.uniform(-2.0, 2.0, n + 1)
        lam -= lam.mean()
        x = np.array([lam[i] - lam[j] for i, j in R.positive_root_pairs])
        if np.all(np.abs(x - np.round(x)) > 0.05):
            return lam


def default_weight(check: str, n: int, seed: int) -> np.ndarray:
    if check == "opdam-check":
        # decreasing, simple-root gaps 1.7: inside the z -> 1 window
        return 1.7 * (n / 2 - np.arange(n + 1))
    if check in ("selberg", "eigen-check", "exponent-check"):
        # increasing, row gaps 2/n: inside the pattern-integral window
        return (2.0 / n) * (np.arange(n + 1) - n / 2)
    return generic_weight(n, seed)


def parse_weyl(spec: str, n: int) -> list[WeylElement]:
    if spec == "e":
        return [WeylElement.identity(n)]
    if spec == "w0":
        return [WeylElement.longest(n)]
    if spec == "all":
        return RootSystem(n).weyl_group()
    digits = spec.replace(",", " ").split() if ("," in spec or " " in spec) else list(spec)
    try:
        images = [int(d) for d in digits]
        w = WeylElement.from_one_based(images)
    except (ValueError, HoselbergError) as exc:
        raise UsageError(f"--w must be 'e', 'w0', 'all' or a permutation like 213: {exc}") from None
    if w.rank != n:
        raise UsageError(f"permutation {spec!r} does not act on {n + 1} letters")
    return [w]


# ---------------------------------------------------------------------------
# individual checks: each returns (values, metrics, skip_reason)
# ---------------------------------------------------------------------------

def _check_roots(req, lam, k, tol):
    n = req.n
    R = RootSystem(n)
    pos = R.positive_roots
    dev_delta = max(abs(float(sum(Fraction(a[i]) for a in pos) / 2) - delta(R)[i]) for i in range(n + 1))
    cartan = max(abs(sum(w * a for w, a in zip(R.fundamental_weights[i], R.simple_roots[j])) - (i == j))
                 for i in range(n) for j in range(n))
    metrics = {
        "positive_root_count_error": (abs(len(pos) - n * (n + 1) // 2), tol),
        "fundamental_weight_pairing_error": (float(cartan), tol),
        "half_sum_error": (dev_delta, tol),
    }
    values = {"num_positive": len(pos), "delta": delta(R)}
    if n <= 5:
        W = R.weyl_group()
        longest = max(weyl_length(w) for w in W)
        metrics["weyl_order_error"] = (abs(len(W) - math.factorial(n + 1)), tol)
        metrics["longest_length_error"] = (abs(longest - len(pos)), tol)
        values["weyl_order"] = len(W)
    return values, metrics, None


def _check_series(req, lam, k, tol):
    R = RootSystem(req.n)
    s = hc_coefficients(lam, k, req.order, R)
    metrics = {"eigen_defect": (eigen_defect(s, lam, k, R), tol),
               "normalization_error": (abs(s[(0,) * req.n] - 1), tol)}
    values = {"eigenvalue": eigenvalue(lam, k, R), "min_denominator": s.min_denominator,
              "min_denominator_index": s.min_denominator_index, "layer_sums": s.layer_sums()}
    if req.n == 1:
        a = lam[0] - lam[1]
        closed = k * (a + k) / (1 + a)
        metrics["first_coefficient_error"] = (abs(s[(1,)] - closed) / max(1.0, abs(closed)), tol)
    return values, metrics, None


def _check_transform(req, lam, k, tol):
    R = RootSystem(req.n)
    N = req.order
    s = hc_coefficients(lam, k, N, R)
    target = hc_coefficients(lam, 1 - k, N, R)
    img = transformation_image(s, k, lam, N, R)
    back = transformation_image(img, 1 - k, lam, N, R)
    metrics = {"max_coeff_dev": (coefficient_deviation(img, target), tol),
               "involution_dev": (coefficient_deviation(back, s), tol)}
    values = {"prefactor_constant": img.prefactor_constant, "exponent": img.exponent}
    return values, metrics, None


def _check_opdam(req, lam, k, tol):
    R = RootSystem(req.n)
    reason = in_convergence_window(lam, k, R)
    if reason is not None:
        return {}, {}, reason
    method = "richardson" if req.n == 1 else "epsilon"
    res = evaluate_at_one(lam, k, R=R, acceleration=method)
    closed = opdam_value(lam, k, R).value
    values = {"value": res.value, "closed_form": closed, "method": method, "heights": res.heights}
    metrics = {"abs_err": (abs(res.value - closed), tol), "extrapolation_error_estimate": (res.error, tol)}
    return values, metrics, None


def _check_coeff(req, lam, k, tol):
    R = RootSystem(req.n)
    table = []
    worst = 0.0
    for w in parse_weyl(req.w, req.n):
        a32 = a_coefficient("thm32", w, lam, k, R)
        a31 = a_coefficient("thm31", w, lam, 1 - k, R)
        worst = max(worst, a32.relative_difference(a31))
        table.append({"w": str(w), "length": weyl_length(w), "a_thm32": a32.value,
                      "log_abs": a32.log_magnitude, "phase": a32.phase})
    return {"coefficients": table}, {"duality_rel_diff": (worst, tol)}, None


def _check_rhs(req, lam, k, tol):
    R = RootSystem(req.n)
    elements = parse_weyl(req.w, req.n)
    table = []
    worst_fact = 0.0
    normalized = []
    for w in elements:
        r = selberg_rhs(w, lam, k, R)
        prod = a_coefficient("thm32", w, lam, k, R) * opdam_value(weyl_act(w, np.asarray(lam, dtype=complex)), k, R)
        worst_fact = max(worst_fact, r.relative_difference(prod))
        norm = ClosedFormValue.from_log(r.log - 1j * math.pi * k * weyl_length(w))
        normalized.append(norm)
        table.append({"w": str(w), "length": weyl_length(w), "rhs": r.value, "log_abs": r.log_magnitude,
                      "phase": r.phase, "rhs_without_length_phase": norm.value})
    metrics = {"factorization_rel_diff": (worst_fact, tol)}
    if len(normalized) > 1:
        spread = max(x.relative_difference(normalized[0]) for x in normalized)
        metrics["phase_only_spread"] = (spread, tol)
    return {"table": table}, metrics, None


def _quad_spec(req) -> QuadratureSpec:
    return QuadratureSpec(abs_tol=1e-3 * req.quad_tol, rel_tol=req.quad_tol, jobs=req.jobs)


def _integral_skip(req, lam, k):
    if req.n > 2:
        return f"rank {req.n} > 2: pattern integrals are run at n <= 2 only"
    return integration_window(lam, k, req.n)


def _check_selberg(req, lam, k, tol):
    reason = _integral_skip(req, lam, k)
    if reason is not None:
        return {}, {}, reason
    R = RootSystem(req.n)
    res = selberg_lhs(lam, k, req.n, replace(_quad_spec(req), rel_tol=min(req.quad_tol, 1e-2 * tol)))
    e = WeylElement.identity(req.n)
    rhs = selberg_rhs(e, lam, k, R).value
    values = {"lhs": res.value, "rhs_identity": rhs, "lhs_over_rhs": res.value / rhs, "level": res.level}
    metrics = {"quadrature_rel_error_estimate": (res.error / abs(res.value), tol)}
    if req.n == 1:
        beta = selberg_lhs_rank_one(lam, k)
        conv = rank_one_conversion_factor(lam, k)
        values.update(beta_closed_form=beta, conversion_factor=conv)
        metrics["beta_rel_err"] = (abs(res.value - beta) / abs(beta), tol)
        metrics["rhs_conversion_rel_err"] = (abs(res.value - rhs * conv) / abs(res.value), tol)
    return values, metrics, None


def _eigen_point(n: int) -> np.ndarray:
    return 2.5 ** np.arange(n + 1) if n > 1 else np.array([1.0, 3.0])


def _check_eigen(req, lam, k, tol):
    reason = _integral_skip(req, lam, k)
    if reason is not None:
        return {}, {}, reason
    z0 = _eigen_point(req.n)
    qs = QuadratureSpec(abs_tol=1e-14, rel_tol=req.quad_tol, jobs=req.jobs)
    res = eigen_residual(lam, k, z0, req.h, qs)
    values = {"z0": z0, "F": res.value, "LF": res.operator_value, "eigenvalue": res.eigenvalue,
              "quadrature_error": res.quadrature_error, "noise_bound": res.noise_bound,
              "inconclusive": res.inconclusive}
    metrics = {"residual": (res.residual, tol), "noise_bound": (res.noise_bound, 1.0)}
    return values, metrics, None


def exponent_directions(n: int) -> list[tuple]:
    if n == 1:
        return [(1.0, 0.0), (0.0, -1.0)]
    first = tuple([1.0] + [0.0] * n)
    upto = tuple([1.0] * n + [0.0])
    return [first, upto]


def _check_exponent(req, lam, k, tol):
    reason = _integral_skip(req, lam, k)
    if reason is not None:
        return {}, {}, reason
    values, metrics = {}, {}
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=min(req.quad_tol, 1e-10), jobs=req.jobs)
    for c in exponent_directions(req.n):
        res = leading_exponent_numeric(lam, k, c, spec=spec, tol=tol)
        label = "c=(" + ",".join(f"{x:g}" for x in c) + ")"
        values[label] = {"estimate": res.value, "expected": res.expected, "extrapolation_error": res.error}
        metrics[f"exponent_err_{label}"] = (abs(res.value - res.expected), tol)
    return values, metrics, None


_RUNNERS = {
    "roots": _check_roots, "series-check": _check_series, "transform-check": _check_transform,
    "opdam-check": _check_opdam, "coeff": _check_coeff, "rhs": _check_rhs, "selberg": _check_selberg,
    "eigen-check": _check_eigen, "exponent-check": _check_exponent,
}


def default_tolerance(check: str, n: int) -> float:
    if check == "opdam-check":
        return 1e-6 if n == 1 else 1e-4
    if check == "eigen-check":
        return 1e-4 if n == 1 else 1e-3
    return DEFAULT_TOL[check]


def run_check(req: CheckRequest) -> Report:
    """Run one named check; library errors become a failing report carrying the message."""
    t0 = time.perf_counter()
    lam = centered(req.lam) if req.lam is not None else default_weight(req.check, req.n, req.seed)
    k = complex(DEFAULT_K.get(req.check, 0.0) if req.k is None else req.k)
    tol = default_tolerance(req.check, req.n) if req.tol is None else req.tol
    params = {"n": req.n, "k": k, "lambda": lam, "order": req.order, "tol": tol, "quad_tol": req.quad_tol,
              "h": req.h, "w": req.w}
    if req.check == "roots":
        params = {"n": req.n, "tol": tol}
    try:
        values, metrics, skip = _RUNNERS[req.check](req, lam, k, tol)
    except UsageError:
        raise
    except HoselbergError as exc:
        values, metrics, skip = {"error": f"{type(exc).__name__}: {exc}"}, {}, None
    elapsed = (time.perf_counter() - t0) * 1000
    return Report.build(req.check, params, values, metrics, skip, elapsed, __version__, req.seed)


def expand_names(names) -> list[str]:
    """Split comma lists, expand 'all', drop duplicates with a warning."""
    flat = [x.strip() for name in names for x in str(name).split(",") if x.strip()]
    if not flat:
        raise UsageError("no checks named")
    out = []
    for name in flat:
        for item in (CHECKS if name == "all" else (name,)):
            if item not in CHECKS:
                raise UsageError(f"unknown check {item!r}; choose from {', '.join(CHECKS)} or 'all'")
            if item in out:
                if name != "all":
                    warnings.warn(f"check {item!r} listed more than once; running it once", stacklevel=2)
                continue
            out.append(item)
    return out


def run_suite(names, base: CheckRequest | dict) -> tuple[list[Report], dict]:
    """Run several checks with shared flags; reports come back in request order."""
    from .report import summarize

    checks = expand_names(names)
    shared = base if isinstance(base, dict) else {f: getattr(base, f) for f in base.__dataclass_fields__}
    shared = {key: v for key, v in shared.items() if key != "check"}
    if shared.get("lam") is not None:
        shared["lam"] = tuple(centered(shared["lam"]))
    requests = [CheckRequest(check=c, **shared) for c in checks]
    jobs = shared.get("jobs", 1)
    if jobs > 1 and len(requests) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run_check, requests))
    else:
        reports = [run_check(r) for r in requests]
    return reports, summarize(reports)
