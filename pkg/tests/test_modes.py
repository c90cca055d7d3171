import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from qspp.coupling import optimize_thickness
from qspp.dispersion import matching_angle, max_matchable_frequency, spp_wavevector_lossless
from qspp.errors import DomainError, NoBoundModeError
from qspp.materials import SILVER, Geometry, LayerStack, PermittivityModel
from qspp.modes import (
    INF, ModeProfile, Term, overlap, solve_three_layer, spp_norm_closed_form, spp_profile,
    term_product_integral, three_layer_profile,
)

LOSSLESS_SILVER = PermittivityModel(SILVER.omega_p, 0.0, SILVER.bg_real_coeff, 0.0)
W_MAX = max_matchable_frequency(SILVER, 1.51)


def quad_norm2(profile, edges):
    """|profile|^2 integrated numerically, split at the given interfaces."""
    def f(z):
        ex, ez = profile.evaluate(np.array([z]))
        return float(abs(ex[0]) ** 2 + abs(ez[0]) ** 2)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += quad(f, a, b, epsabs=0, epsrel=1e-12, limit=400)[0]
    return total


def test_spp_profile_continuity_and_amplitudes():
    p = spp_profile(SILVER, 1e15, Geometry.OTTO, d=1e-6)
    below, above = p.terms
    assert below.ax == above.ax == 1j
    w = spp_wavevector_lossless(SILVER, 1e15)
    assert below.az == pytest.approx(w.k / w.nu0)
    assert above.az == pytest.approx(-w.k / w.nu)
    assert abs(below.az) > 5 * abs(below.ax)
    assert below.rate.real > 0 and above.rate.real < 0


def test_spp_profile_kr_swaps_decays():
    w = spp_wavevector_lossless(SILVER, 2e15)
    below, above = spp_profile(SILVER, 2e15, "kr", d=5e-8).terms
    assert below.rate == pytest.approx(w.nu) and above.rate == pytest.approx(-w.nu0)


@pytest.mark.parametrize("omega", [1e15, 3e15, 5e15])
@pytest.mark.parametrize("geometry", ["otto", "kr"])
def test_spp_norm_closed_form_and_quadrature(omega, geometry):
    w = spp_wavevector_lossless(SILVER, omega)
    p = spp_profile(SILVER, omega, geometry, d=0.0)
    closed = spp_norm_closed_form(w.k, w.nu, w.nu0)
    assert p.norm == pytest.approx(closed, rel=1e-12)
    edges = [-60 / min(w.nu, w.nu0), 0.0, 60 / min(w.nu, w.nu0)]
    assert quad_norm2(p, edges) == pytest.approx(closed**2, rel=1e-8)


def test_spp_profile_requires_bound_mode():
    with pytest.raises(NoBoundModeError):
        spp_profile(SILVER, 5.7e15)


def rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def boundary_residuals(sol):
    e1, e2, e3 = sol.eps
    out = []
    for z in (0.0, sol.d):
        (H_lo, Ex_lo, Ez_lo), (H_hi, Ex_hi, Ez_hi) = sol.fields([z], side=-1), sol.fields([z], side=+1)
        eps_lo, eps_hi = (e1, e2) if z == 0 else (e2, e3)
        out += [rel(H_lo[0], H_hi[0]), rel(Ex_lo[0], Ex_hi[0]), rel(eps_lo * Ez_lo[0], eps_hi * Ez_hi[0])]
    return out


@settings(max_examples=200, deadline=None)
@given(st.floats(0.5e15, 5.0e15), st.floats(-8.5, -4.5), st.floats(0.05, 1.5), st.sampled_from(["otto", "kr"]))
def test_boundary_conditions(omega, logd, theta, geometry):
    stack = LayerStack(geometry, 1.51, 10**logd, SILVER)
    sol = solve_three_layer(stack, omega, theta)
    assert sol.gamma2.real >= 0 and sol.gamma3.real >= 0
    assert max(boundary_residuals(sol)) < 1e-10


@settings(max_examples=200, deadline=None)
@given(st.floats(0.5e15, 5.0e15), st.floats(-8.5, -4.5), st.floats(0.05, 1.5), st.sampled_from(["otto", "kr"]))
def test_fresnel_pair_unit(omega, logd, theta, geometry):
    _, fp = three_layer_profile(LayerStack(geometry, 1.51, 10**logd, SILVER), omega, theta)
    assert abs(fp.r) ** 2 + abs(fp.tau) ** 2 == pytest.approx(1.0, abs=1e-12)
    if abs(fp.tau_raw) > 1e-250:
        assert fp.r / fp.tau == pytest.approx(fp.r_raw / fp.tau_raw, rel=1e-12)


def test_three_layer_coefficients():
    psi, _ = three_layer_profile(LayerStack("otto", 1.51, 1e-6, SILVER), 2e15, 1.0)
    assert len(psi.coefficients) == 6
    assert psi.terms[-1].rate.real < 0


def test_decoupled_limit():
    omega = 3e15
    theta = matching_angle(SILVER, 1.51, omega).theta
    stack = LayerStack("otto", 1.51, 1e-4, SILVER)
    sol = solve_three_layer(stack, omega, theta)
    psi, fp = three_layer_profile(stack, omega, theta)
    assert abs(sol.B) < 1e-90
    assert abs(fp.r) == pytest.approx(1.0, abs=1e-12)
    # total internal reflection phase at the prism/air interface
    k0 = omega / 2.99792458e8
    q1 = 1j * math.sqrt(1.51 * k0**2 - sol.kappa**2) / 1.51
    p2 = math.sqrt(sol.kappa**2 - k0**2)
    assert fp.r == pytest.approx((q1 + p2) / (q1 - p2), abs=1e-12)
    phi = spp_profile(SILVER, omega, "otto", stack.d)
    assert abs(fp.tau * overlap(phi, psi)) < 1e-12


def test_matched_layer_three_decay_is_spp_decay():
    omega = 2e15
    m = matching_angle(LOSSLESS_SILVER, 1.51, omega)
    sol = solve_three_layer(LayerStack("otto", 1.51, 1e-6, LOSSLESS_SILVER), omega, m.theta)
    nu = spp_wavevector_lossless(LOSSLESS_SILVER, omega).nu
    assert sol.gamma3.real == pytest.approx(nu, rel=1e-8)
    assert abs(sol.gamma3.imag) < 1e-8 * nu
    z = 1e-6 + np.array([0.0, 1e-8, 3e-8])
    H, _, _ = sol.fields(z)
    assert H[1:] / H[0] == pytest.approx(np.exp(-nu * (z[1:] - 1e-6)), rel=1e-8)


def test_theta_zero_warns():
    with pytest.warns(RuntimeWarning):
        solve_three_layer(LayerStack("otto", 1.51, 1e-6, SILVER), 2e15, 0.0)


def test_theta_out_of_range():
    with pytest.raises(DomainError):
        solve_three_layer(LayerStack("otto", 1.51, 1e-6, SILVER), 2e15, 2.0)


def test_self_overlap():
    phi = spp_profile(SILVER, 2e15, "kr", 4e-8)
    assert overlap(phi, phi) == pytest.approx(1.0, abs=1e-14)


def test_disjoint_support():
    a = ModeProfile((Term(-INF, 0.0, 0.0, 1j, 1.0, 1e7),))
    b = ModeProfile((Term(0.0, INF, 0.0, 1.0, 0.0, -1e7),))
    assert overlap(a, b) == 0


def test_term_product_integral_finite_interval():
    a = Term(0.0, 2.0, 0.0, 1.0, 0.0, 0.3 + 0.2j)
    b = Term(0.0, 2.0, 1.0, 0.0, 0.0, -1.0)
    assert term_product_integral(a, b) == 0
    b = Term(0.5, 3.0, 1.0, 2.0, 0.0, -0.7 + 1j)
    f = lambda z: np.conj(a.ax * np.exp(a.rate * (z - a.ref))) * b.ax * np.exp(b.rate * (z - b.ref))
    re = quad(lambda z: f(z).real, 0.5, 2.0, epsabs=0, epsrel=1e-13)[0]
    im = quad(lambda z: f(z).imag, 0.5, 2.0, epsabs=0, epsrel=1e-13)[0]
    assert term_product_integral(a, b) == pytest.approx(re + 1j * im, rel=1e-12)


def test_term_product_integral_tiny_rate():
    a = Term(0.0, 1e-9, 0.0, 1.0, 0.0, 1e-3)
    b = Term(0.0, 1e-9, 0.0, 1.0, 0.0, -1e-3 + 1e-6j)
    assert term_product_integral(a, b) == pytest.approx(1e-9, rel=1e-12)


def test_overlap_against_quadrature():
    omega = 3e15
    opt = optimize_thickness(LayerStack("otto", 1.51, 1e-8, SILVER), omega)
    d = opt.d
    theta = matching_angle(SILVER, 1.51, omega).theta
    psi, _ = three_layer_profile(LayerStack("otto", 1.51, d, SILVER), omega, theta)
    phi = spp_profile(SILVER, omega, "otto", d)
    w = spp_wavevector_lossless(SILVER, omega)

    def integrand(z, part):
        px, pz = phi.evaluate(np.array([z]))
        qx, qz = psi.evaluate(np.array([z]))
        v = np.conj(px[0]) * qx[0] + np.conj(pz[0]) * qz[0]
        return v.real if part == 0 else v.imag

    def by_quad(tol, limit):
        edges = [0.0, d, d + 80 / w.nu]
        tot = 0j
        for a, b in zip(edges[:-1], edges[1:]):
            re = quad(integrand, a, b, args=(0,), epsabs=0, epsrel=tol, limit=limit)[0]
            im = quad(integrand, a, b, args=(1,), epsabs=0, epsrel=tol, limit=limit)[0]
            tot += re + 1j * im
        return tot / (phi.norm * psi.norm)

    coarse, fine = by_quad(1e-9, 200), by_quad(1e-12, 400)
    assert abs(coarse - fine) < 1e-6
    assert abs(abs(overlap(phi, psi)) - abs(fine)) < 1e-6


def test_analytic_norm_against_quadrature():
    omega, d = 2e15, 1e-6
    theta = matching_angle(SILVER, 1.51, omega).theta
    psi, _ = three_layer_profile(LayerStack("otto", 1.51, d, SILVER), omega, theta)
    nu = spp_wavevector_lossless(SILVER, omega).nu
    assert quad_norm2(psi, [0.0, d, d + 80 / nu]) == pytest.approx(psi.norm**2, rel=1e-8)
