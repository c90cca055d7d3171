"""Damped propagation of the excited SPP wavepacket.

Loss is modelled by a continuum of vacuum bath modes coupled along the
surface. Only its consequences are implemented: the SPP flux decays as
exp(-2 kappa0 x) and is retarded by x / v_G.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .dispersion import group_velocity, spp_wavevector_lossy
from .errors import DomainError
from .materials import PermittivityModel


@dataclass(frozen=True)
class WavepacketSpec:
    omega0: float
    sigma: float
    n: int = 1
    t0: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not self.sigma < self.omega0 / 50:
            raise DomainError("narrow-band wavepacket required: sigma < omega0/50")
        if int(self.n) != self.n or self.n < 0:
            raise DomainError("n must be a non-negative integer")

    @classmethod
    def from_bandwidth(cls, omega0: float, delta_omega: float, n: int = 1) -> "WavepacketSpec":
        """Build from the FWHM bandwidth, delta_omega = 2 sigma sqrt(2 ln 2)."""
        return cls(omega0, delta_omega / (2 * math.sqrt(2 * math.log(2))), n)

    @property
    def fwhm(self) -> float:
        return 2 * self.sigma * math.sqrt(2 * math.log(2))


@dataclass(frozen=True)
class PropagationResult:
    x: float
    kappa0: float
    retarded_time_offset: float
    mean_count: float
    windowed_count: float
    expected_count: float
    expected_windowed_count: float
    integrated_flux: float
    flux_times: np.ndarray = field(repr=False)
    flux_profile: np.ndarray = field(repr=False)


def spectral_amplitude(wp: WavepacketSpec, omega):
    """Gaussian xi(omega) with |xi|^2 of standard deviation sigma, unit L2 norm."""
    w = np.asarray(omega, dtype=float)
    amp = (2 * math.pi * wp.sigma**2) ** -0.25 * np.exp(-((w - wp.omega0) ** 2) / (4 * wp.sigma**2))
    return amp * np.exp(1j * w * wp.t0)


def temporal_profile(wp: WavepacketSpec, t):
    """Fourier transform of xi: (2 sigma^2/pi)^(1/4) exp(-sigma^2 t^2 - i omega0 t)."""
    tt = np.asarray(t, dtype=float) - wp.t0
    return (2 * wp.sigma**2 / math.pi) ** 0.25 * np.exp(-(wp.sigma * tt) ** 2 - 1j * wp.omega0 * tt)


def flux(wp: WavepacketSpec, kappa0: float, vg: float, x: float, t):
    """SPP number flux at distance x: n exp(-2 kappa0 x) |xi~(t - x/vg)|^2."""
    if x < 0:
        raise DomainError("propagation distance must be non-negative")
    return math.exp(-2 * kappa0 * x) * wp.n * np.abs(temporal_profile(wp, np.asarray(t, dtype=float) - x / vg)) ** 2


def _integrate_flux(wp, kappa0, vg, x, a, b):
    f = lambda t: float(flux(wp, kappa0, vg, x, t))
    val, _ = quad(f, a, b, points=[x / vg] if a < x / vg < b else None,
                  epsabs=0.0, epsrel=1e-12, limit=200)
    return val


def detector_counts(wp: WavepacketSpec, beta0: complex, mu: float, kappa0: float, vg: float, x: float,
                    samples: int = 401) -> PropagationResult:
    """Mean and expected SPP counts for a detector centred on the retarded peak.

    ``mean_count`` uses the whole pulse (mu n exp(-2 kappa0 x)); the
    windowed counts integrate over x/vg -/+ 1/sigma only.
    """
    if not 0 <= mu <= 1:
        raise DomainError(f"detector efficiency must lie in [0, 1], got {mu}")
    if abs(beta0) > 1 + 1e-12:
        raise DomainError(f"|beta0| must not exceed 1, got {abs(beta0)}")
    if x < 0:
        raise DomainError("propagation distance must be non-negative")
    t_r = x / vg
    w = 1 / wp.sigma
    windowed = mu * _integrate_flux(wp, kappa0, vg, x, t_r - w, t_r + w)
    total_numeric = _integrate_flux(wp, kappa0, vg, x, t_r - 12 * w, t_r + 12 * w)
    mean = mu * wp.n * math.exp(-2 * kappa0 * x)
    transfer = abs(beta0) ** 2
    times = np.linspace(t_r - 4 * w, t_r + 4 * w, samples)
    return PropagationResult(
        x=x,
        kappa0=kappa0,
        retarded_time_offset=t_r,
        mean_count=mean,
        windowed_count=windowed,
        expected_count=transfer * mean,
        expected_windowed_count=transfer * windowed,
        integrated_flux=total_numeric,
        flux_times=times,
        flux_profile=flux(wp, kappa0, vg, x, times),
    )


def loss_parameters(metal: PermittivityModel, omega0: float) -> tuple[float, float]:
    """(kappa0, v_G) at the carrier frequency."""
    return spp_wavevector_lossy(metal, omega0).kappa, group_velocity(metal, omega0)


def expected_count_ratio(beta0: complex, mu: float, kappa0: float, x):
    """<m_e>/n = mu |beta0|^2 exp(-2 kappa0 x)."""
    return mu * abs(beta0) ** 2 * np.exp(-2 * kappa0 * np.asarray(x, dtype=float))


def commutator_check(kappa0: float, x: float) -> float:
    """[b_D, b_D^dagger] after propagating a distance x; equals 1 when the
    bath restores exactly what the damping removes."""
    if x < 0 or kappa0 < 0:
        raise DomainError("kappa0 and x must be non-negative")
    # bath contribution: integral over x' in [0, x] of 2 kappa0 exp(-2 kappa0 (x - x')),
    # taken in s = 2 kappa0 (x - x') so the integrand stays smooth for strong damping
    s_max = 2 * kappa0 * x
    bath = 0.0
    if s_max > 0:
        bath = quad(lambda s: math.exp(-s), 0.0, min(s_max, 800.0), epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return math.exp(-s_max) + bath


def discrete_array_transmission(kappa0: float, x: float, n_segments: int) -> float:
    """Surviving fraction after n beamsplitters, each removing 2 kappa0 dx."""
    dx = x / n_segments
    t = 1 - 2 * kappa0 * dx
    if t < 0:
        raise DomainError("segments too coarse: 2 kappa0 dx exceeds 1")
    return t**n_segments
