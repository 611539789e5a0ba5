import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from oracles import WarpedOracle, lambdify, t as T
from warpband import (DomainError, ParameterRangeError, PowerProfile, SingularSliceError,
                      SymmetricBand, WarpingProfile, model_band, ModelSpec, radial_laplacian,
                      scalar_curvature, sigma_identity_sides, sigma_reduced_exponent,
                      sigma_reduction, slice_geometry, spectral_scalar_curvature, sphere_area)

ONE = WarpingProfile.constant(1.0)


def band(n, rho, u=ONE, gamma=0.0, **kw):
    return SymmetricBand(n, rho, u, gamma, **kw)


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    assert sphere_area(3) == pytest.approx(2 * math.pi**2)


@pytest.mark.parametrize("n,rho,rho_sym", [
    (3, WarpingProfile("sin"), sp.sin(T)),
    (4, WarpingProfile("cosh", a=0.5, b=1.3), sp.cosh(1.3 * T) / 2),
    (3, WarpingProfile("exp", b=0.4, offset=1.0), sp.exp(0.4 * T) + 1),
    (4, WarpingProfile("power", b=1.7), T**1.7),
])
def test_scalar_curvature_against_symbolic_metric(n, rho, rho_sym):
    ref = lambdify(WarpedOracle(n, rho_sym).scalar())
    b = band(n, rho.with_domain((0.3, 1.4)))
    t = np.linspace(0.3, 1.4, 9)
    assert_allclose(scalar_curvature(b, t), ref(t), rtol=1e-12, atol=1e-12)


def test_round_sphere_curvature_is_six():
    b = band(3, WarpingProfile("sin", domain=(0.1, 3.0)))
    assert_allclose(scalar_curvature(b, b.grid(50)), 6.0, rtol=1e-13)


def test_unit_cylinder_n4():
    b = band(4, WarpingProfile("linear", a=0.0, offset=1.0, domain=(0, 1)))
    assert_allclose(scalar_curvature(b, b.grid(5)), 6.0)


def test_flat_cone():
    b = band(4, WarpingProfile("linear", domain=(0.5, 2)))
    assert_allclose(scalar_curvature(b, b.grid(5)), 0.0, atol=1e-15)


def test_singular_slice():
    b = band(3, WarpingProfile("linear", domain=(0, 1)), conical=True)
    with pytest.raises(SingularSliceError):
        scalar_curvature(b, 0.0)


def test_band_rejects_nonpositive_profile():
    with pytest.raises(DomainError):
        band(3, WarpingProfile("sin", domain=(-0.5, 1)))


def test_band_rejects_gamma_two():
    with pytest.raises(ParameterRangeError):
        band(3, WarpingProfile("sin", domain=(0.5, 1)), gamma=2.0)


def test_slice_geometry_examples():
    b = band(3, WarpingProfile("sin", domain=(0.1, 3)))
    sg = slice_geometry(b, math.pi / 4, 2.0)
    assert (sg.H, sg.R_slice, sg.eta) == pytest.approx((2.0, 4.0, 0.0))
    sg = slice_geometry(b, math.pi / 2, 0.0)
    assert sg.H == pytest.approx(0, abs=1e-15) and sg.eta == pytest.approx(0, abs=1e-15)
    assert sg.A0_norm2 == 0


def test_model_band_eta_vanishes():
    spec = ModelSpec(3, 1.0, 2.0)
    mb = model_band(spec)
    from warpband import build_model_profile
    m = build_model_profile(spec).m
    t = mb.grid(101)
    assert_allclose(slice_geometry(mb, t, m(t)).eta, 0.0, atol=1e-12)


def test_spectral_constant_weight_is_half_scalar():
    b = band(4, WarpingProfile("sinh", b=0.8, domain=(0.2, 2)), ONE * 3.0, gamma=1.3)
    t = b.grid(11)
    assert_allclose(spectral_scalar_curvature(b, t), 0.5 * scalar_curvature(b, t), rtol=1e-14)


def test_spectral_cylinder_exp_weight():
    b = band(3, WarpingProfile("linear", a=0.0, offset=1.0, domain=(0, 1)),
             WarpingProfile("exp", domain=(0, 1)), gamma=1.0)
    assert_allclose(spectral_scalar_curvature(b, b.grid(7)), 0.0, atol=1e-14)


def test_spectral_against_symbolic():
    rho, u = sp.sin(T) + 0.5, sp.exp(sp.cos(T))
    ref = lambdify(WarpedOracle(4, rho, u).spectral(0.7))
    b = band(4, WarpingProfile("sin", offset=0.5, domain=(0.2, 2.5)),
             WarpingProfile("exp").compose(WarpingProfile("cos", domain=(0.2, 2.5))), 0.7)
    t = np.linspace(0.2, 2.5, 9)
    assert_allclose(spectral_scalar_curvature(b, t), ref(t), rtol=1e-12)


def test_radial_laplacian_against_symbolic():
    o = WarpedOracle(3, sp.cosh(T), T**2 + 1)
    ref = lambdify(o.laplacian(T**2 + 1))
    b = band(3, WarpingProfile("cosh", domain=(0, 2)),
             WarpingProfile("power", b=2.0, domain=(0, 2)) + 1.0)
    t = np.linspace(0, 2, 5)
    assert_allclose(radial_laplacian(b, t), ref(t), rtol=1e-13)


@given(st.floats(0.1, 5.0), st.floats(-1.5, 1.5), st.floats(0.2, 1.2))
def test_spectral_invariant_under_weight_scaling(c, gamma, t):
    rho = WarpingProfile("sin", domain=(0.1, 3))
    u = WarpingProfile("exp", b=0.3, domain=(0.1, 3))
    b1 = band(3, rho, u, gamma)
    b2 = band(3, rho, u * c, gamma)
    assert spectral_scalar_curvature(b2, t) == pytest.approx(
        spectral_scalar_curvature(b1, t), rel=1e-12, abs=1e-12)


def test_sigma_cylinder_example():
    b = band(3, WarpingProfile("linear", a=0.0, offset=1.0, domain=(0, 1)),
             WarpingProfile("exp", domain=(0, 1)))
    lhs, rhs = sigma_identity_sides(b, 0.5, 0.5)
    assert (lhs, rhs) == pytest.approx((-0.5, -0.5), abs=1e-14)


def test_sigma_constant_weight():
    b = band(3, WarpingProfile("sin", domain=(0.2, 2)), ONE * 2.0)
    assert sigma_identity_sides(b, 1.0, 0.3) == pytest.approx((0.0, 0.0), abs=1e-15)


def test_sigma_zero_is_identity():
    u = WarpingProfile("power", b=1.5, domain=(0.1, 2))
    assert sigma_reduction(u, 0.0) is u
    assert sigma_reduced_exponent(1.2, 0.0) == 1.2
    with pytest.raises(ParameterRangeError):
        sigma_reduction(u, 1.0)


@given(st.floats(-2.0, 0.9), st.floats(0.3, 2.0))
def test_sigma_identity_property(sigma, t):
    b = band(4, WarpingProfile("sinh", domain=(0.3, 2)),
             WarpingProfile("cosh", b=0.7, domain=(0.3, 2)))
    lhs, rhs = sigma_identity_sides(b, t, sigma)
    assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)
