"""Complex log-gamma and the closed-form Gamma-product constants.

All products are accumulated as sums of logarithms and exponentiated once,
so values far outside double range still carry an exact log-magnitude and
phase.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameterError, PoleError
from .roots import RootSystem, WeylElement, check_weight, delta, root_pairings, weyl_act, weyl_length

# Godfrey's coefficients for g = 607/128, 15 terms.
LANCZOS_G = 607 / 128
LANCZOS_COEFFS = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)
_LOG_PI = math.log(math.pi)

GENERIC_TOL = 1e-8
# exp() of a real part beyond this over/underflows double precision
_EXP_LIMIT = 709.0


def _lanczos(z: np.ndarray) -> np.ndarray:
    """log Gamma(z) for Re z >= 1/2."""
    x = z - 1.0
    a = np.full(x.shape, LANCZOS_COEFFS[0], dtype=complex)
    for i in range(1, len(LANCZOS_COEFFS)):
        a = a + LANCZOS_COEFFS[i] / (x + i)
    t = x + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * np.log(t) - t + np.log(a)


def log_sin_pi(z):
    """Principal log of sin(pi z), stable for large |Im z|."""
    z = np.asarray(z, dtype=complex)
    # z = m + f with |Re f| <= 1/2, sin(pi z) = (-1)^m sin(pi f)
    m = np.round(z.real)
    f = z - m
    # sin(pi f) = (i/2) e^{-i pi f} (1 - e^{2 pi i f}); mirror the lower half-plane
    upper = f.imag >= 0
    fu = np.where(upper, f, np.conj(f))
    val = -1j * np.pi * fu + np.log(0.5j) + np.log(-np.expm1(2j * np.pi * fu))
    val = np.where(upper, val, np.conj(val)) + 1j * np.pi * m
    im = np.angle(np.exp(1j * val.imag))
    out = val.real + 1j * im
    return out[()] if out.ndim == 0 else out


def _nearest_nonpositive_int(z: np.ndarray, tol: float):
    """Boolean mask of entries within ``tol`` of 0, -1, -2, ..."""
    r = np.round(z.real)
    return (r <= 0) & (np.abs(z - r) <= tol)


def log_gamma(z):
    """log Gamma(z) on the branch continuous off the negative real axis.

    Lanczos approximation for Re z >= 1/2, reflection formula below that.
    Raises :class:`PoleError` at nonpositive integers.
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    poles = _nearest_nonpositive_int(arr, 1e-14)
    if poles.any():
        raise PoleError(int(np.round(arr[poles][0].real)))
    out = np.empty(arr.shape, dtype=complex)
    refl = arr.real < 0.5
    out[~refl] = _lanczos(arr[~refl])
    if refl.any():
        zr = arr[refl]
        # branch correction keeps the result continuous across Re z = 1/2
        turn = np.copysign(2 * np.pi, zr.imag) * np.floor(0.5 * zr.real + 0.25)
        out[refl] = _LOG_PI + 1j * turn - log_sin_pi(zr) - _lanczos(1.0 - zr)
    return out[0] if scalar else out


def gamma(z):
    return np.exp(log_gamma(z))


def log_beta(a, b):
    return log_gamma(a) + log_gamma(b) - log_gamma(np.asarray(a) + b)


@dataclass(frozen=True)
class ClosedFormValue:
    """A complex constant kept in log form."""

    log: complex
    flag: str | None = None  # "overflow" / "underflow" when exp(log) leaves double range

    @classmethod
    def from_log(cls, log):
        log = complex(log)
        if log.real > _EXP_LIMIT:
            return cls(log, "overflow")
        if log.real < -_EXP_LIMIT:
            return cls(log, "underflow")
        return cls(log)

    @property
    def log_magnitude(self) -> float:
        return self.log.real

    @property
    def phase(self) -> float:
        ph = math.atan2(math.sin(self.log.imag), math.cos(self.log.imag))
        return math.pi if ph == -math.pi else ph

    @property
    def value(self) -> complex:
        if self.flag == "overflow":
            return complex(math.inf, math.inf)
        return cmath.exp(self.log)

    def __complex__(self):
        return self.value

    def __mul__(self, other: "ClosedFormValue") -> "ClosedFormValue":
        return ClosedFormValue.from_log(self.log + other.log)

    def relative_difference(self, other: "ClosedFormValue") -> float:
        """|self/other - 1| computed from the logs, valid at any magnitude."""
        d = self.log - other.log
        d = complex(d.real, math.remainder(d.imag, 2 * math.pi))
        return abs(cmath.exp(d) - 1.0)


def _guarded_log_gamma(args, labels, what: str):
    args = np.asarray(args, dtype=complex)
    bad = _nearest_nonpositive_int(args, GENERIC_TOL)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise DegenerateParameterError(
            f"{what}: Gamma argument {args[i]:.6g} at root {labels[i]} is a pole", root=labels[i])
    return log_gamma(args)


def _root_labels(R: RootSystem):
    return [f"e{i + 1}-e{j + 1}" for i, j in R.positive_root_pairs]


def _check_sine(x, labels, what):
    r = np.round(x.real)
    bad = np.abs(x - r) <= GENERIC_TOL
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise DegenerateParameterError(
            f"{what}: (w lambda, alpha) = {-x[i]:.6g} is an integer at root {labels[i]}", root=labels[i])


def a_coefficient(variant: str, w: WeylElement, lam, k, R: RootSystem) -> ClosedFormValue:
    """Leading coefficient a(w) of the pattern integral representations.

    ``variant`` is ``"thm31"`` (exponents k - 1) or ``"thm32"`` (exponents -k).
    """
    lam = check_weight(np.asarray(lam, dtype=complex), R, atol=1e-9)
    k = complex(k)
    N = R.num_positive
    labels = _root_labels(R)
    x = -root_pairings(weyl_act(w, lam), R)
    _check_sine(x, labels, "a_coefficient")
    length = weyl_length(w)
    log = -2j * np.pi * (lam @ delta(R)) + N * cmath.log(2j)
    if variant == "thm31":
        log += -1j * np.pi * (k - 1) * length
        log += N * _guarded_log_gamma([k], ["k"], "a_coefficient")[0]
        log += np.sum(_guarded_log_gamma(x, labels, "a_coefficient") + log_sin_pi(x)
                      - _guarded_log_gamma(x + k, labels, "a_coefficient"))
    elif variant == "thm32":
        log += 1j * np.pi * k * length
        log += N * _guarded_log_gamma([1 - k], ["k"], "a_coefficient")[0]
        log += np.sum(_guarded_log_gamma(x, labels, "a_coefficient") + log_sin_pi(x)
                      - _guarded_log_gamma(x - k + 1, labels, "a_coefficient"))
    else:
        raise ValueError(f"unknown variant {variant!r}; expected 'thm31' or 'thm32'")
    return ClosedFormValue.from_log(log)


def opdam_value(mu, k, R: RootSystem) -> ClosedFormValue:
    """Value at z = 1 of the normalized series with leading exponent mu + rho(k)."""
    mu = np.asarray(mu, dtype=complex)
    k = complex(k)
    labels = _root_labels(R)
    y = root_pairings(mu, R)
    r = k * np.array([j - i for i, j in R.positive_root_pairs])
    log = np.sum(_guarded_log_gamma(y + 1, labels, "opdam_value")
                 - _guarded_log_gamma(y - k + 1, labels, "opdam_value"))
    log -= np.sum(_guarded_log_gamma(-r + 1, labels, "opdam_value")
                  - _guarded_log_gamma(-r - k + 1, labels, "opdam_value"))
    return ClosedFormValue.from_log(log)


def selberg_rhs(w: WeylElement, lam, k, R: RootSystem) -> ClosedFormValue:
    """Closed form of the generalized Selberg integral over the cycle attached to w."""
    lam = check_weight(np.asarray(lam, dtype=complex), R, atol=1e-9)
    k = complex(k)
    N = R.num_positive
    labels = _root_labels(R)
    y = root_pairings(weyl_act(w, lam), R)
    r = k * np.array([j - i for i, j in R.positive_root_pairs])
    log = N * cmath.log(2j * np.pi) - 2j * np.pi * (lam @ delta(R)) + 1j * np.pi * k * weyl_length(w)
    log += N * _guarded_log_gamma([1 - k], ["k"], "selberg_rhs")[0]
    log -= np.sum(_guarded_log_gamma(y - k + 1, labels, "selberg_rhs")
                  + _guarded_log_gamma(-y - k + 1, labels, "selberg_rhs"))
    log += np.sum(_guarded_log_gamma(-r - k + 1, labels, "selberg_rhs")
                  - _guarded_log_gamma(-r + 1, labels, "selberg_rhs"))
    return ClosedFormValue.from_log(log)


def rank_one_conversion_factor(lam, k) -> complex:
    """Ratio between the real-interval Selberg integral and the identity-cycle closed form at n = 1.

    With a = lambda_1 - lambda_2 the Beta integral over [0, 1] equals
    ``selberg_rhs(e) * exp(i pi a) / (2i sin(pi (k - a)))``, by the reflection
    formula Gamma(s) Gamma(1 - s) = pi / sin(pi s) applied with s = k - a.
    """
    a = complex(lam[0] - lam[1])
    return cmath.exp(1j * np.pi * a) / (2j * cmath.sin(np.pi * (complex(k) - a)))
