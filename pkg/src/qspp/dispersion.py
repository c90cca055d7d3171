"""SPP and photon dispersion, decay constants, mode-matching and group velocity."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, InternalError, NoBoundModeError, UnmatchableError
from .materials import C_LIGHT, PermittivityModel, eval_lossless, eval_lossy, surface_plasma_frequency


@dataclass(frozen=True)
class SppWavevector:
    k: float
    kappa: float
    nu: float
    nu0: float


@dataclass(frozen=True)
class MatchCondition:
    theta: float
    omega: float
    kappa_parallel: float

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)


def bound_wavevector(eps_m, omega):
    """k, nu, nu0 for real eps_m < -1, written without cancellation.

    k = (w/c) sqrt(eps/(1+eps)), nu0 = (w/c)/sqrt(-(1+eps)),
    nu = (w/c)(-eps)/sqrt(-(1+eps)). Works elementwise on arrays.
    """
    k0 = np.asarray(omega, dtype=float) / C_LIGHT
    eps = np.asarray(eps_m, dtype=float)
    s = np.sqrt(-(1.0 + eps))
    return k0 * np.sqrt(-eps) / s, k0 * (-eps) / s, k0 / s


def spp_wavevector_lossless(metal: PermittivityModel, omega: float) -> SppWavevector:
    eps = eval_lossless(metal, omega)
    if not eps < -1:
        raise NoBoundModeError(f"no bound SPP at omega={omega:.6g}: eps_m={eps:.6g} is not below -1")
    k, nu, nu0 = bound_wavevector(eps, omega)
    return SppWavevector(float(k), 0.0, float(nu), float(nu0))


def complex_wavevector(eps, omega) -> complex:
    """K = (w/c) sqrt(eps/(1+eps)) on the branch with Im K >= 0."""
    K = (omega / C_LIGHT) * cmath.sqrt(eps / (1 + eps))
    if K.imag < 0:
        K = -K
    if K.real < 0:
        raise InternalError(f"branch selection produced a backward wave K={K}")
    return K


def spp_wavevector_lossy(metal: PermittivityModel, omega: float) -> SppWavevector:
    eps = eval_lossy(metal, omega)
    if not eps.real < -1:
        raise NoBoundModeError(f"no bound SPP at omega={omega:.6g}: Re eps_m={eps.real:.6g}")
    K = complex_wavevector(eps, omega)
    k0 = omega / C_LIGHT
    nu = cmath.sqrt(K * K - eps * k0 * k0)
    nu0 = cmath.sqrt(K * K - k0 * k0)
    return SppWavevector(K.real, K.imag, nu.real, nu0.real)


def light_line(omega):
    return np.asarray(omega, dtype=float) / C_LIGHT


def prism_line(eps1: float, omega, theta: float):
    """In-plane photon wavevector sqrt(eps1) (w/c) sin(theta) inside the prism."""
    return math.sqrt(eps1) * np.asarray(omega, dtype=float) / C_LIGHT * np.sin(theta)


def matching_angle(metal: PermittivityModel, eps1: float, omega: float) -> MatchCondition:
    """Incidence angle at which the prism line crosses the lossless SPP curve."""
    eps = eval_lossless(metal, omega)
    if not eps < -1:
        raise NoBoundModeError(f"no bound SPP at omega={omega:.6g}")
    arg = eps / (eps1 * (1 + eps))
    if arg > 1:
        raise UnmatchableError(
            f"omega={omega:.6g}: sin^2(theta)={arg:.6g} > 1, prism eps1={eps1} too low")
    theta = math.asin(math.sqrt(arg))
    return MatchCondition(theta, omega, math.sqrt(eps1) * omega / C_LIGHT * math.sin(theta))


def max_matchable_frequency(metal: PermittivityModel, eps1: float) -> float:
    """Frequency at which the matching angle reaches 90 degrees.

    Below it every bound mode can be matched by the prism; above it (up to
    the surface plasma frequency) none can.
    """
    wsp = surface_plasma_frequency(metal)
    f = lambda w: eval_lossless(metal, w) / (1 + eval_lossless(metal, w)) - eps1
    lo = 1e-4 * wsp
    if f(lo) > 0:
        raise UnmatchableError("prism cannot match even low-frequency SPPs")
    hi = wsp * (1 - 1e-12)
    return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def group_velocity(metal: PermittivityModel, omega0: float) -> float:
    """v_G = 1/(dk/dw) from a central difference of the lossless dispersion."""
    h = 1e-6 * omega0
    try:
        kp = spp_wavevector_lossless(metal, omega0 + h).k
        km = spp_wavevector_lossless(metal, omega0 - h).k
    except NoBoundModeError:
        raise DomainError(f"omega0 +/- h leaves the bound-mode range at {omega0:.6g}") from None
    return 2 * h / (kp - km)
