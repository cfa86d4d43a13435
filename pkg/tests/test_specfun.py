import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special as sp

from fraccasimir.errors import DomainError, PoleError
from fraccasimir.series import SeriesControl
from fraccasimir.specfun import (
    EULER_GAMMA,
    ZETA_DERIV_0,
    _zeta_em,
    _zeta_reflect,
    bessel_k,
    digamma,
    gamma,
    log_bessel_k,
    log_gamma,
    rgamma,
    riemann_zeta,
    sinpi,
    zeta_deriv_neg_even,
)

mp.mp.dps = 30


def k_half(z):
    return math.sqrt(math.pi / (2 * z)) * math.exp(-z)


@pytest.mark.parametrize("z", [1e-3, 0.1, 1.0, 7.5, 40.0, 300.0])
def test_half_integer_closed_forms(z):
    k12 = k_half(z)
    assert bessel_k(0.5, z) == pytest.approx(k12, rel=1e-12)
    assert bessel_k(1.5, z) == pytest.approx(k12 * (1 + 1 / z), rel=1e-12)
    assert bessel_k(2.5, z) == pytest.approx(k12 * (1 + 3 / z + 3 / z**2), rel=1e-12)


@pytest.mark.parametrize("nu", [0.0, 0.3, 1.0, 2.7, 11.0, 45.5])
@pytest.mark.parametrize("z", [2e-3, 0.05, 0.9, 6.0, 55.0])
def test_bessel_k_against_mpmath(nu, z):
    ref = float(mp.besselk(nu, z))
    assert bessel_k(nu, z) == pytest.approx(ref, rel=1e-12)


def test_bessel_k_even_in_order():
    z = np.geomspace(1e-2, 50, 30)
    assert np.allclose(bessel_k(-1.7, z), bessel_k(1.7, z), rtol=1e-14, atol=0)


def test_log_bessel_k_far_beyond_double_range():
    # K_0(2000) ~ e^-2000 underflows; its logarithm does not
    ref = float(mp.log(mp.besselk(0, 2000)))
    assert log_bessel_k(0.0, 2000.0) == pytest.approx(ref, rel=1e-13)


@given(nu=st.floats(0.0, 30.0), z=st.floats(1e-2, 80.0))
def test_bessel_recurrence(nu, z):
    # K_{nu+1} = K_{nu-1} + (2 nu / z) K_nu
    lhs = bessel_k(nu + 1, z)
    rhs = bessel_k(nu - 1, z) + 2 * nu / z * bessel_k(nu, z)
    assert lhs == pytest.approx(rhs, rel=1e-10)


@given(nu=st.floats(0.0, 20.0), z=st.floats(1e-3, 200.0))
def test_bessel_matches_scipy(nu, z):
    assert bessel_k(nu, z) == pytest.approx(float(sp.kv(nu, z)), rel=1e-11)


def test_bessel_k_array_shape_and_domain():
    z = np.linspace(0.5, 3, 6).reshape(2, 3)
    assert bessel_k(1.0, z).shape == (2, 3)
    with pytest.raises(DomainError):
        bessel_k(1.0, 0.0)
    with pytest.raises(DomainError):
        bessel_k(1.0, np.array([1.0, -2.0]))


def test_zeta_special_values():
    assert riemann_zeta(2.0) == pytest.approx(math.pi**2 / 6, rel=1e-14)
    assert riemann_zeta(4.0) == pytest.approx(math.pi**4 / 90, rel=1e-14)
    assert riemann_zeta(0.0) == -0.5
    assert riemann_zeta(-1.0) == pytest.approx(-1 / 12, rel=1e-14)
    assert riemann_zeta(-3.0) == pytest.approx(1 / 120, rel=1e-13)
    for n in (2, 4, 10):
        assert riemann_zeta(-float(n)) == 0.0
    with pytest.raises(PoleError):
        riemann_zeta(1.0)


@pytest.mark.parametrize("s", [-15.3, -4.5, -0.7, -1e-6, 1e-7, 0.25, 0.5, 0.9, 1 - 1e-7,
                               1 + 1e-7, 1.5, 3.3, 12.0, 60.0])
def test_zeta_against_mpmath(s):
    assert riemann_zeta(s) == pytest.approx(float(mp.zeta(s)), rel=1e-13)


@given(st.floats(0.3, 0.7))
def test_zeta_branches_agree_on_overlap(s):
    assert _zeta_em(s) == pytest.approx(_zeta_reflect(s), rel=1e-13)


def test_zeta_derivatives():
    assert ZETA_DERIV_0 == pytest.approx(float(mp.zeta(0, derivative=1)), rel=1e-15)
    for n in (1, 2, 5):
        assert zeta_deriv_neg_even(n) == pytest.approx(
            float(mp.zeta(-2 * n, derivative=1)), rel=1e-13)
    with pytest.raises(DomainError):
        zeta_deriv_neg_even(0)


def test_gamma_family():
    assert gamma(5.0) == 24.0
    assert gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-15)
    assert log_gamma(100.0) == pytest.approx(math.lgamma(100.0))
    assert rgamma(-3.0) == 0.0
    assert rgamma(200.0) == pytest.approx(float(1 / mp.gamma(200)), rel=1e-12)
    for bad in (0.0, -2.0):
        with pytest.raises(PoleError):
            gamma(bad)
        with pytest.raises(PoleError):
            digamma(bad)
    with pytest.raises(DomainError):
        log_gamma(-1.0)


def test_digamma_values():
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, rel=1e-15)
    assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2 * math.log(2), rel=1e-15)


@given(st.floats(-30.0, 50.0).filter(lambda x: abs(x - round(x)) > 1e-6))
def test_digamma_recurrence(x):
    # psi(x + 1) = psi(x) + 1/x
    assert digamma(x + 1) == pytest.approx(digamma(x) + 1 / x, rel=1e-10, abs=1e-12)


@given(st.integers(-50, 50))
def test_sinpi_exact_zeros(k):
    assert sinpi(float(k)) == 0.0
    assert sinpi(k + 0.5) == pytest.approx((-1) ** (k % 2), abs=1e-15)


def test_quadrature_budget_exhaustion_reports():
    from fraccasimir.errors import ConvergenceError

    ctl = SeriesControl(quadrature_levels=1, rel_tol=1e-15)
    with pytest.raises(ConvergenceError) as exc:
        bessel_k(20.0, 1e-3, ctl)
    assert exc.value.diagnostics["quadrature_levels"] == 1
