import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from qspp.dispersion import (
    bound_wavevector, complex_wavevector, group_velocity, light_line, matching_angle,
    max_matchable_frequency, prism_line, spp_wavevector_lossless, spp_wavevector_lossy,
)
from qspp.errors import DomainError, NoBoundModeError, UnmatchableError
from qspp.materials import C_LIGHT, SILVER, PermittivityModel, eval_lossless, eval_lossy, surface_plasma_frequency

W_SP = surface_plasma_frequency(SILVER)
W_MAX = max_matchable_frequency(SILVER, 1.51)


def test_k_silver_1e15():
    ref = 1e15 / C_LIGHT * math.sqrt(1.005144)
    w = spp_wavevector_lossless(SILVER, 1e15)
    assert w.k == pytest.approx(ref, rel=1e-6)
    assert w.k == pytest.approx(3.342e6, rel=1e-3)
    assert w.kappa == 0


def test_k_synthetic():
    k, nu, nu0 = bound_wavevector(-2.0, C_LIGHT)
    assert k == pytest.approx(math.sqrt(2), rel=1e-15)
    # nu0^2 = k^2 - k0^2 and nu^2 = k^2 - eps k0^2
    assert nu0**2 == pytest.approx(k**2 - 1)
    assert nu**2 == pytest.approx(k**2 + 2)


@given(st.floats(-1e6, -1.0001))
def test_decay_constants_against_direct_forms(eps):
    k, nu, nu0 = bound_wavevector(eps, C_LIGHT)
    mp = mpmath.mpf
    with mpmath.workdps(40):
        kk = mpmath.sqrt(mp(eps) / (1 + mp(eps)))
        assert float(kk) == pytest.approx(k, rel=1e-13)
        assert float(mpmath.sqrt(kk**2 - 1)) == pytest.approx(nu0, rel=1e-12)
        assert float(mpmath.sqrt(kk**2 - mp(eps))) == pytest.approx(nu, rel=1e-12)


def test_divergence_toward_surface_plasma_frequency():
    k1 = spp_wavevector_lossless(SILVER, 1e15).k
    k2 = spp_wavevector_lossless(SILVER, W_SP * (1 - 1e-6)).k
    assert k2 > 10 * k1
    ws = np.linspace(1e14, W_SP * 0.999, 300)
    k, _, _ = bound_wavevector(eval_lossless(SILVER, ws), ws)
    assert np.all(np.diff(k) > 0)
    assert np.all(k > light_line(ws))


def test_no_bound_mode_above_wsp():
    with pytest.raises(NoBoundModeError):
        spp_wavevector_lossless(SILVER, 5.6e15)


def test_lossy_kappa_silver():
    eps = eval_lossy(SILVER, 1e15)
    with mpmath.workdps(40):
        K = mpmath.mpf(1e15) / C_LIGHT * mpmath.sqrt(mpmath.mpc(eps) / (1 + mpmath.mpc(eps)))
    w = spp_wavevector_lossy(SILVER, 1e15)
    assert w.kappa == pytest.approx(float(abs(K.imag)), rel=1e-10)
    assert w.kappa == pytest.approx(5.5e2, rel=0.01)
    assert w.k == pytest.approx(float(K.real), rel=1e-13)


def test_lossy_reduces_to_lossless():
    m = PermittivityModel(SILVER.omega_p, 0.0, SILVER.bg_real_coeff, 0.0)
    lossy = spp_wavevector_lossy(m, 2e15)
    lossless = spp_wavevector_lossless(m, 2e15)
    assert lossy.kappa == 0
    assert lossy.k == pytest.approx(lossless.k, rel=1e-14)


def test_kappa_first_order_in_loss():
    er = -150.0
    k1 = complex_wavevector(complex(er, 0.5), 2e15).imag
    k2 = complex_wavevector(complex(er, 1.0), 2e15).imag
    assert k2 / k1 == pytest.approx(2.0, rel=0.05)


@given(st.floats(-500, -1.01), st.floats(0, 50))
def test_branch_forward_and_decaying(er, ei):
    K = complex_wavevector(complex(er, ei), 1e15)
    assert K.imag >= 0 and K.real > 0


def test_matching_angle_silver():
    ref = math.degrees(math.asin(math.sqrt(1.005144 / 1.51)))
    m = matching_angle(SILVER, 1.51, 1e15)
    assert m.theta_deg == pytest.approx(ref, abs=1e-3)
    assert m.theta_deg == pytest.approx(54.7, abs=0.05)


def test_matching_angle_ninety_at_limit():
    eps = -3.0
    eps1 = eps / (1 + eps)
    m = PermittivityModel(1.0)
    w = math.sqrt(1 / (1 - eps))  # bare Drude with eps = -3
    assert eval_lossless(m, w) == pytest.approx(eps)
    assert matching_angle(m, eps1 * (1 + 1e-15), w).theta_deg == pytest.approx(90, abs=1e-5)


def test_unmatchable_near_wsp():
    with pytest.raises(UnmatchableError):
        matching_angle(SILVER, 1.51, 0.5 * (W_MAX + W_SP))
    assert matching_angle(SILVER, 1.51, W_MAX * (1 - 1e-9)).theta_deg > 89.9


def test_matching_round_trip():
    ws = np.linspace(1e14, W_MAX * (1 - 1e-9), 200)
    for w in ws:
        m = matching_angle(SILVER, 1.51, w)
        k = spp_wavevector_lossless(SILVER, w).k
        assert prism_line(1.51, w, m.theta) == pytest.approx(k, rel=1e-10)


def test_group_velocity_silver():
    vg = group_velocity(SILVER, 1e15)
    assert abs(vg - C_LIGHT) < 0.01 * C_LIGHT
    # oracle: derivative of the closed form in arbitrary precision
    with mpmath.workdps(40):
        def k(w):
            e = 1 - mpmath.mpf(SILVER.omega_p)**2 / w**2 + 29 * w**2 / mpmath.mpf(SILVER.omega_p)**2
            return w / C_LIGHT * mpmath.sqrt(e / (1 + e))
        ref = 1 / mpmath.diff(k, mpmath.mpf(1e15))
    assert vg == pytest.approx(float(ref), rel=1e-8)


def test_group_velocity_limits():
    big = PermittivityModel(1e19)
    assert abs(group_velocity(big, 1e15) - C_LIGHT) < 1e-3 * C_LIGHT
    assert group_velocity(SILVER, 0.99 * W_SP) < 0.5 * C_LIGHT
    with pytest.raises(DomainError):
        group_velocity(SILVER, W_SP * (1 - 1e-7))


@given(st.floats(1e14, 5.5e15))
def test_dispersion_relation_forms_agree(omega):
    eps = eval_lossless(SILVER, omega)
    if not eps < -1:
        return
    k = spp_wavevector_lossless(SILVER, omega).k
    # omega^2 = c^2 k^2 (eps + 1) / eps
    assert (C_LIGHT * k) ** 2 * (eps + 1) / eps == pytest.approx(omega**2, rel=1e-12)
