import math

import numpy as np
import pytest
import scipy.special as sp
from scipy.stats import qmc

from hoselberg import (DivergentIntegralError, OutsideChamberError, Pattern, QuadratureSpec, RootSystem,
                       asymptotic_solution_numeric, build_integrand, eigen_residual, identity_cycle,
                       integrate_interval, leading_exponent_numeric, selberg_lhs)
from hoselberg.patterns import (_apply_operator_fd, integration_window, pattern_variables,
                                root_assignment_exponents, selberg_lhs_rank_one)

LAM1 = np.array([-1.0, 1.0])
LAM2 = np.array([-1.0, 0.0, 1.0])


def _expected(variant, n):
    counts = {"adjacent": sum(j * (j + 1) for j in range(1, n)),
              "coincidence": sum(j * (j - 1) // 2 for j in range(1, n + 1)),
              "power": n * (n + 1) // 2}
    counts["top" if variant == "thm41" else "outer"] = n if variant == "thm41" else n * (n + 1)
    return {key: c for key, c in counts.items() if c}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("variant,k", [("thm31", 0.3), ("thm32", -0.2), ("thm41", -0.2)])
def test_factor_class_counts(variant, k, n):
    lam = np.linspace(-0.9 * n, 0.9 * n, n + 1)
    z = np.arange(1.0, n + 2.0) if variant != "thm41" else None
    spec = build_integrand(variant, lam, k, z)
    assert dict(spec.class_counts()) == _expected(variant, n)
    assert spec.domain.num_vars == len(pattern_variables(n)) == n * (n + 1) // 2


def test_rank_one_integrands_by_hand():
    k, z, t = -0.3, (1.0, 2.0), 1.4
    p = Pattern(((t,),))
    a = LAM1[1] - LAM1[0]
    pref = (z[0] * z[1]) ** (LAM1[0] + k / 2)
    got = build_integrand("thm32", LAM1, k, z).evaluate(p)
    assert got == pytest.approx(pref * abs(t - 1) ** -k * abs(t - 2) ** -k * t ** (a + k - 1), rel=1e-14)
    k31 = 0.4
    got = build_integrand("thm31", LAM1, k31, z).evaluate(p)
    want = ((z[0] * z[1]) ** (LAM1[0] + k31 / 2) * (z[1] - z[0]) ** (1 - 2 * k31)
            * abs(t - 1) ** (k31 - 1) * abs(t - 2) ** (k31 - 1) * t ** (a - k31))
    assert got == pytest.approx(want, rel=1e-14)
    got = build_integrand("thm41", LAM1, k).evaluate(Pattern(((0.3,),)))
    assert got == pytest.approx(0.3 ** (a + k - 1) * 0.7 ** (-2 * k), rel=1e-14)


def test_rank_two_thm32_integrand_by_hand():
    lam = np.array([1.2, 0.1, -1.3])
    k = 0.15 + 0.05j
    z = np.array([0.5, 1.5, 4.0])
    t11, t12, t22 = 1.9, 0.8, 2.7
    p = Pattern(((t11,), (t12, t22)))
    want = np.prod(z.astype(complex) ** (lam[0] + k))
    for t in (t12, t22):
        want *= np.prod(np.abs(t - z) ** -k) * t ** (lam[1] - lam[0] + k - 1)
    want *= abs(t11 - t12) ** -k * abs(t11 - t22) ** -k * t11 ** (lam[2] - lam[1] + k - 1)
    want *= abs(t12 - t22) ** (2 * k)
    assert build_integrand("thm32", lam, k, z).evaluate(p) == pytest.approx(want, rel=1e-13)


def test_thm41_table_matches_root_assignment():
    lam = np.array([-1.4, -0.3, 0.5, 1.2])
    spec = build_integrand("thm41", lam, -0.15)
    table = spec.exponent_table()
    ref = root_assignment_exponents(lam, -0.15, RootSystem(3))
    for (i, j) in pattern_variables(3):
        name = f"t{i}{j}"
        assert table[(name, "0")] == pytest.approx(ref[("power", (i, j))])
    assert table[("t13", "1")] == pytest.approx(-4 * -0.15)
    assert spec.row_power(3) == pytest.approx(lam[1] - lam[0] - 0.15 - 1)


def test_identity_cycle_examples():
    dom = identity_cycle("thm32", (1.0, 2.0, 4.0), 2)
    assert dom.contains(Pattern(((2.5,), (1.5, 3.0))), strict=True)
    assert not dom.contains(Pattern(((1.2,), (1.5, 3.0))))
    assert dom.contains(Pattern(((2.0,), (1.0, 2.0))))
    unit = identity_cycle("thm41", None, 2)
    assert unit.contains(Pattern(((0.5,), (0.2, 0.9))), strict=True)
    assert not unit.contains(Pattern(((0.5,), (0.9, 0.2))))
    with pytest.raises(OutsideChamberError):
        identity_cycle("thm32", (2.0, 1.0, 4.0), 2)
    with pytest.raises(OutsideChamberError):
        identity_cycle("thm32", (0.0, 1.0), 1)
    with pytest.raises(ValueError):
        identity_cycle("thm32", (1.0, 2.0), 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_integrand_positive_on_the_cycle(rng, n):
    lam = np.linspace(-1.5, 1.5, n + 1)
    spec = build_integrand("thm32", lam, -0.25, 1.7 ** np.arange(n + 1))
    X = spec.domain.sample(rng, 1000)
    for row in X[:50]:
        assert spec.domain.contains(Pattern.from_vector(n, row[: spec.domain.num_vars]), strict=True)
    vals = spec.evaluate(X)
    assert np.all(np.isfinite(vals)) and np.all(vals.real > 0) and np.all(vals.imag == 0)


def test_pattern_round_trip():
    p = Pattern(((1.0,), (2.0, 3.0), (4.0, 5.0, 6.0)))
    assert Pattern.from_vector(3, p.to_vector()) == p
    assert p[(2, 3)] == 5.0
    with pytest.raises(ValueError):
        Pattern(((1.0, 2.0),))


def test_rank_one_selberg_on_a_small_grid():
    for gap, k in [(0.6, -0.4), (1.7, -0.2), (2.8, 0.0)]:
        lam = np.array([-gap / 2, gap / 2])
        assert integration_window(lam, k, 1) is None
        res = selberg_lhs(lam, k)
        want = sp.beta(gap + k, 1 - 2 * k)
        assert abs(res.value - want) <= 1e-9 * want
        assert selberg_lhs_rank_one(lam, k) == pytest.approx(want, rel=1e-13)


def test_rank_two_selberg_against_quasi_monte_carlo():
    k = -0.2
    lam = LAM2
    res = selberg_lhs(lam, k, spec=QuadratureSpec(1e-12, 1e-9))
    # hand-written map of the cube onto 0 < a < b < 1, a < c < b
    u = qmc.Sobol(3, scramble=True, seed=11).random_base2(18)
    a = u[:, 0]
    b = a + (1 - a) * u[:, 1]
    c = a + (b - a) * u[:, 2]
    jac = (1 - a) * (b - a)
    g_top, g_low = lam[1] - lam[0] + k - 1, lam[2] - lam[1] + k - 1
    f = ((1 - a) * (1 - b)) ** (-3 * k) * (a * b) ** g_top * c ** g_low
    f *= ((c - a) * (b - c)) ** -k * (b - a) ** (2 * k)
    mc = np.mean(f * jac)
    assert abs(res.value - mc) < 5e-4 * mc


def test_scaling_covariance():
    spec = QuadratureSpec(1e-13, 1e-11)
    for lam, k, z in [(LAM1, -0.3, np.array([1.0, 2.0])), (np.array([-1.1, 0.2, 0.9]), -0.2, np.array([1.0, 2.0, 3.5]))]:
        d = build_integrand("thm32", lam, k, z).scaling_degree()
        assert abs(d) < 1e-12
        f1 = asymptotic_solution_numeric(lam, k, z, spec).value
        f2 = asymptotic_solution_numeric(lam, k, 2 * z, spec).value
        assert abs(f2 / f1 * 2.0 ** -d - 1) < 1e-9


def test_rank_one_integral_against_plain_interval_rule():
    k, z = -0.3, (1.0, 2.0)
    a = LAM1[1] - LAM1[0]
    got = asymptotic_solution_numeric(LAM1, k, z, QuadratureSpec(1e-14, 1e-13)).value
    res = integrate_interval(lambda t: t ** (a + k - 1), z[0], z[1], -k, -k, QuadratureSpec(1e-15, 1e-14))
    want = (z[0] * z[1]) ** (LAM1[0] + k / 2) * res.value
    assert abs(got - want) < 1e-10 * abs(want)


def test_eigen_residual_at_k_zero():
    # at k = 0 the integral is (z1 z2)^lam1 (z2^a - z1^a) / a, an exact eigenfunction
    out = eigen_residual(LAM1, 0.0, (1.0, 3.0))
    assert out.residual <= 1e-8 and not out.inconclusive
    a = LAM1[1] - LAM1[0]
    assert out.value == pytest.approx(3.0 ** LAM1[0] * (3.0 ** a - 1) / a, rel=1e-10)


def test_eigen_residual_rank_one_and_scale_invariance():
    out = eigen_residual(LAM1, -0.3, (1.0, 3.0))
    assert out.residual <= 1e-6
    assert out.eigenvalue == pytest.approx(2.0 - 0.5 * 0.09)
    # the finite-difference operator is linear in F
    x0 = np.log([1.0, 3.0])
    rng = np.random.Generator(np.random.PCG64(2))
    offsets = [(0.0, 0.0), (0.01, 0.0), (-0.01, 0.0), (0.0, 0.01), (0.0, -0.01)]
    F = {o: complex(rng.normal(), rng.normal()) for o in offsets}
    c = 3.7 - 1.2j
    scaled = {o: c * v for o, v in F.items()}
    assert _apply_operator_fd(scaled, x0, 0.01, -0.3) == pytest.approx(c * _apply_operator_fd(F, x0, 0.01, -0.3))
    with pytest.raises(ValueError, match="log-spacing"):
        eigen_residual(LAM1, -0.3, (1.0, 1.05))


def test_leading_exponent_tracks_the_spectral_parameter():
    k = -0.3
    dirs = [(1.0, 0.0), (0.0, -1.0)]
    for lam in (LAM1, np.array([-0.8, 0.8])):
        for c in dirs:
            out = leading_exponent_numeric(lam, k, c)
            assert abs(out.value - out.expected) < 1e-6
    # shifting lambda moves the exponent by exactly (shift, c)
    a = leading_exponent_numeric(LAM1, k, dirs[0]).value
    b = leading_exponent_numeric(np.array([-0.8, 0.8]), k, dirs[0]).value
    assert b - a == pytest.approx(0.2, abs=1e-6)
    with pytest.raises(ValueError, match="non-increasing"):
        leading_exponent_numeric(LAM1, k, (0.0, 1.0))


def test_divergent_faces_are_named():
    with pytest.raises(DivergentIntegralError) as info:
        build_integrand("thm31", LAM1, -0.2, (1.0, 2.0))
    assert info.value.face is not None
    with pytest.raises(DivergentIntegralError) as info:
        # power exponent (lam2 - lam1) + k - 1 = -1.1 at t = 0
        build_integrand("thm41", np.array([0.05, -0.05]), 0.0)
    assert info.value.face == (0, "lower")
    with pytest.raises(ValueError):
        build_integrand("thm99", LAM1, 0.1)


def test_integration_window():
    assert integration_window(LAM2, -0.2, 2) is None
    assert "outside" in integration_window(LAM2, 0.2, 2)
    assert "row gaps" in integration_window(np.array([-1.0, 1.0, 0.0]), -0.2, 2)
    assert integration_window(LAM2, complex(-0.2, 0.1), 2) is not None
