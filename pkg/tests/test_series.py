import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, strategies as st

from hoselberg import (ConvergenceError, FormalSeries, OutsideChamberError, RadialOperatorParams, ResonanceError,
                       RootSystem, apply_radial_operator, coefficient_deviation, eigen_defect, eigenvalue,
                       evaluate_at_one, evaluate_phi, hc_coefficients, opdam_value, transformation_image)
from hoselberg.extrapolate import richardson, wynn_epsilon
from hoselberg.roots import rho
from hoselberg.series import height_grid, in_convergence_window

from conftest import random_weight
from grids import transform_grid


def _direct_operator(s: FormalSeries, lam, k, z):
    """L(k) applied to z^{lam + rho} sum_mu s_mu z^mu at a point, without expanding the rational factors."""
    n = s.n
    R = RootSystem(n)
    p = np.asarray(lam, dtype=complex) + rho(R, k)
    f = lf = 0j
    for mu, c in s.items():
        e = p.copy()
        for q, m in enumerate(mu):
            e[q] += m
            e[q + 1] -= m
        mono = np.prod(z ** e)
        act = np.sum(e * e)
        for i, j in R.positive_root_pairs:
            act -= k * (z[j] + z[i]) / (z[j] - z[i]) * (e[i] - e[j])
        f += c * mono
        lf += c * act * mono
    return f, lf


def _evaluate(s: FormalSeries, z):
    R = RootSystem(s.n)
    x = z[:-1] / z[1:]
    total = sum(c * np.prod(x ** np.array(mu)) for mu, c in s.items())
    return total * np.prod(z ** s.exponent)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_eigen_equation_against_unexpanded_operator(n):
    # deep in the chamber the truncation error is O(x^(N+1)) with x = 1e-2
    z = 100.0 ** np.arange(n + 1)
    lam = np.linspace(1.1, -1.1, n + 1) + 0.07 * np.arange(n + 1) - 0.07 * n / 2
    k = 0.35
    s = hc_coefficients(lam, k, 5, RootSystem(n))
    f, lf = _direct_operator(s, lam, k, z.astype(complex))
    assert abs(lf - eigenvalue(lam, k, RootSystem(n)) * f) < 1e-10 * abs(f)
    # the formal image agrees with the unexpanded operator to the same order
    image = apply_radial_operator(s, lam, RadialOperatorParams(k, n))
    assert abs(_evaluate(image, z.astype(complex)) - lf) < 1e-10 * abs(lf)


def test_rank_one_coefficients_are_hypergeometric():
    for a, k in [(0.4, 0.3), (1.7, -0.37 + 0.11j), (2.3, 1.6)]:
        s = hc_coefficients([a / 2, -a / 2], k, 12, RootSystem(1))
        m = np.arange(13)
        want = sp.poch(k, m) * sp.poch(a + k, m) / (sp.poch(a + 1, m) * sp.factorial(m)) if np.isreal(k) else None
        if want is None:
            # complex k: check the first coefficient and the two-term ratio instead
            assert s[(1,)] == pytest.approx(k * (a + k) / (1 + a), rel=1e-14)
            for j in range(1, 12):
                ratio = (k + j) * (a + k + j) / ((a + 1 + j) * (j + 1))
                assert s[(j + 1,)] == pytest.approx(s[(j,)] * ratio, rel=1e-12)
        else:
            np.testing.assert_allclose([s[(j,)] for j in m], want, rtol=1e-12)


def test_rank_one_phi_matches_gauss_function():
    a, k = 1.3, 0.25
    z = np.array([0.3, 1.1])
    got = evaluate_phi([a / 2, -a / 2], k, z, N=60)
    x = z[0] / z[1]
    lead = z[0] ** (a / 2 + k / 2) * z[1] ** (-a / 2 - k / 2)
    assert got == pytest.approx(lead * sp.hyp2f1(k, a + k, a + 1, x), rel=1e-13)


def test_phi_truncation_error_decays_geometrically():
    lam = [0.9, 0.1, -1.0]
    z = np.array([0.2, 0.9, 3.0])
    exact = evaluate_phi(lam, 0.4, z, N=40)
    errs = [abs(evaluate_phi(lam, 0.4, z, N=N) - exact) for N in (4, 8, 12)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5 * abs(exact)


def test_phi_rejects_points_outside_chamber():
    with pytest.raises(OutsideChamberError):
        evaluate_phi([0.3, -0.3], 0.2, [2.0, 1.0])
    with pytest.raises(OutsideChamberError):
        evaluate_phi([0.3, -0.3], 0.2, [0.0, 1.0])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_transformation_law_small_grid(n):
    R = RootSystem(n)
    for lam, k in transform_grid(n, count=6, seed=11):
        img = transformation_image(hc_coefficients(lam, k, 6, R), k, lam)
        other = hc_coefficients(lam, 1 - k, 6, R)
        assert coefficient_deviation(img, other) < 1e-9
        np.testing.assert_allclose(img.exponent, other.exponent, atol=1e-14)


def test_transformation_at_half_is_identity():
    R = RootSystem(2)
    lam = np.array([1.2, -0.1, -1.1])
    s = hc_coefficients(lam, 0.5, 6, R)
    img = transformation_image(s, 0.5, lam)
    np.testing.assert_allclose(img.data, s.data, atol=1e-15)
    assert img.prefactor_constant == pytest.approx(1.0)


@given(seed=st.integers(0, 10_000), n=st.integers(1, 3), kr=st.floats(-1, 2), ki=st.floats(-1, 1))
def test_transformation_is_an_involution(seed, n, kr, ki):
    rng = np.random.Generator(np.random.PCG64(seed))
    k = complex(kr, ki)
    lam = random_weight(rng, n)
    s = FormalSeries(n, 5, rng.normal(size=(6,) * n) + 1j * rng.normal(size=(6,) * n))
    s.data[height_grid(n, 5) > 5] = 0
    back = transformation_image(transformation_image(s, k, lam), 1 - k, lam)
    assert np.max(np.abs(back.data - s.data)) < 1e-9 * max(1.0, np.max(np.abs(s.data)))


@given(seed=st.integers(0, 10_000), n=st.integers(1, 3))
def test_radial_operator_is_linear_and_triangular(seed, n):
    rng = np.random.Generator(np.random.PCG64(seed))
    lam = random_weight(rng, n)
    params = RadialOperatorParams(complex(rng.uniform(-1, 2), rng.uniform(-1, 1)), n)
    shape = (5,) * n
    h = height_grid(n, 4)

    def series():
        d = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        d[h > 4] = 0
        return FormalSeries(n, 4, d)

    a, b = series(), series()
    c = complex(rng.normal(), rng.normal())
    lhs = apply_radial_operator(c * a + b, lam, params).data
    rhs = c * apply_radial_operator(a, lam, params).data + apply_radial_operator(b, lam, params).data
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * max(1.0, np.max(np.abs(rhs)))
    # changing a coefficient of height 3 leaves every lower height untouched
    bumped = a.data.copy()
    idx = tuple(np.argwhere(h == 3)[0])
    bumped[idx] += 1.0
    diff = apply_radial_operator(FormalSeries(n, 4, bumped), lam, params).data - apply_radial_operator(a, lam, params).data
    assert np.all(diff[h < 3] == 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_eigen_defect_small_for_generated_series(n):
    for lam, k in transform_grid(n, count=4, seed=5):
        assert eigen_defect(hc_coefficients(lam, k, 6, RootSystem(n)), lam, k) < 1e-10


def test_resonance_is_reported_with_its_index():
    # (m alpha, m alpha + 2 lam) = 2 m (m + a) vanishes at m = 2 for a = -2
    with pytest.raises(ResonanceError) as info:
        hc_coefficients([-1.0, 1.0], 0.3, 4, RootSystem(1))
    assert info.value.index == (2,)
    assert abs(info.value.denominator) < 1e-10


def test_series_container_behaviour():
    s = hc_coefficients([0.8, 0.1, -0.9], 0.3, 3, RootSystem(2))
    assert s[(0, 0)] == 1
    assert s[(3, 1)] == 0
    assert [sum(m) for m in s.indices()] == sorted(sum(m) for m in s.indices())
    assert len(s.as_dict()) == 10
    with pytest.raises(IndexError):
        s[(1,)]
    with pytest.raises(ValueError):
        s + hc_coefficients([0.8, 0.1, -0.9], 0.3, 4, RootSystem(2))
    assert coefficient_deviation(s, s) == 0.0
    np.testing.assert_allclose(s.layer_sums().sum(), np.sum(s.data))


def test_evaluate_at_one_rank_one_matches_gauss_sum():
    for a, k in [(1.5, -0.25), (2.4, -0.1), (1.2, -0.4), (2.0, 0.0)]:
        lam = np.array([a / 2, -a / 2])
        assert in_convergence_window(lam, k, RootSystem(1)) is None
        res = evaluate_at_one(lam, k)
        want = sp.hyp2f1(k, a + k, a + 1, 1.0)
        assert abs(res.value - want) < 1e-8
        assert abs(res.value - want) <= max(res.error, 1e-12) * 10


def test_evaluate_at_one_error_handling():
    lam = np.array([0.45, -0.45])
    assert "outside" in in_convergence_window(lam, -0.2, RootSystem(1))
    assert in_convergence_window([1.0, 0, -1.0], 0.2, RootSystem(2)) is not None
    assert "rank" in in_convergence_window([1.5, 0.5, -0.5, -1.5], -0.2, RootSystem(3))
    with pytest.raises(ConvergenceError):
        evaluate_at_one([0.75, -0.75], -0.25, N=64, acceleration="none", tol=1e-14)
    with pytest.raises(ValueError):
        evaluate_at_one([0.75, -0.75], -0.25, acceleration="magic")


def test_richardson_and_epsilon_on_model_sequences():
    h = 0.5 ** np.arange(8)
    seq = math.pi + 0.3 * h ** 1.5 - 0.2 * h ** 2.5
    assert abs(richardson(seq, [1.5, 2.5]).value - math.pi) < 1e-13
    # unknown exponents: slower, but the error estimate stays conservative
    blind = richardson(seq)
    assert abs(blind.value - math.pi) < 1e-7
    assert blind.error >= abs(blind.value - math.pi)
    partial = np.cumsum([(-1) ** j / (j + 1) for j in range(14)])
    ex = wynn_epsilon(partial)
    assert abs(ex.value - math.log(2)) < 1e-10
    assert ex.error >= abs(ex.value - math.log(2))
    with pytest.raises(ValueError):
        wynn_epsilon([])


def test_opdam_value_is_the_rank_two_limit():
    lam = np.array([1.8, 0.0, -1.8])
    res = evaluate_at_one(lam, -0.2, acceleration="epsilon")
    want = opdam_value(lam, -0.2, RootSystem(2)).value
    assert abs(res.value - want) < 1e-4
