"""Photon-to-SPP transfer coefficients, thickness optimization and
wavepacket deformation metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _core
from .dispersion import matching_angle, max_matchable_frequency, spp_wavevector_lossless
from .errors import (
    DomainError,
    InfeasibleError,
    InternalError,
    NumericalSingularityError,
    PartialBandError,
    UnmatchableError,
)
from .materials import C_LIGHT, Geometry, LayerStack, PermittivityModel, eval_lossless, eval_lossy
from .modes import overlap, spp_profile, three_layer_profile

DEFAULT_D_RANGE = (1e-9, 1e-4)
_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class TransferCoefficients:
    alpha: complex
    beta: complex
    theta_mix: float
    phi_mix: float
    g: complex
    g_tilde: float
    penetration: float

    @property
    def transfer_probability(self) -> float:
        return abs(self.beta) ** 2


@dataclass(frozen=True)
class OptimumResult:
    d: float
    coefficients: TransferCoefficients


@dataclass(frozen=True)
class DeformationReport:
    delta_theta: float  # degrees
    delta_g_mag: float
    bandwidth_lambda: float
    omega0: float
    d_opt: float
    band: tuple[float, float]


def from_beta(beta: complex, penetration: float = math.nan) -> TransferCoefficients:
    """Build the unitary transfer matrix with alpha = cos(Theta) real."""
    mag = abs(beta)
    if mag > 1 + 1e-9:
        raise InternalError(f"|beta| = {mag} exceeds 1")
    theta_mix = math.asin(min(mag, 1.0))
    phi_mix = math.atan2(beta.imag, beta.real) % (2 * math.pi) if mag > 0 else 0.0
    return TransferCoefficients(
        alpha=complex(math.cos(theta_mix)),
        beta=complex(beta),
        theta_mix=theta_mix,
        phi_mix=phi_mix,
        g=complex(math.cos(phi_mix), math.sin(phi_mix)) * theta_mix,
        g_tilde=2 * theta_mix / math.pi,
        penetration=penetration,
    )


def _decay_toward_prism(geometry: Geometry, omega, eps_ll):
    """nu0 for Otto, nu for Kretschmann-Raether (the SPP decay across layer II)."""
    k0 = np.asarray(omega, dtype=float) / C_LIGHT
    with np.errstate(invalid="ignore"):
        s = np.sqrt(-(1.0 + np.asarray(eps_ll, dtype=float)))
        return k0 / s if geometry is Geometry.OTTO else k0 * (-np.asarray(eps_ll)) / s


def penetration_factor(stack: LayerStack, omega: float) -> float:
    w = spp_wavevector_lossless(stack.metal, omega)
    decay = w.nu0 if stack.geometry is Geometry.OTTO else w.nu
    return 2.0 / (decay * stack.d)


def coupling_grid(geometry, eps1: float, metal: PermittivityModel, omega, d):
    """|beta|, g_tilde and the penetration factor on broadcast (omega, d) arrays.

    Points without a matchable bound mode come back as NaN.
    """
    geometry = Geometry.parse(geometry)
    omega, d = np.broadcast_arrays(np.asarray(omega, dtype=float), np.asarray(d, dtype=float))
    shape = omega.shape
    w, dd = omega.ravel(), d.ravel()
    ell = eval_lossless(metal, w)
    ely = eval_lossy(metal, w)
    code = _core.OTTO if geometry is Geometry.OTTO else _core.KRETSCHMANN
    beta, r, tau, ov = _core.coupling_kernel(code, float(eps1), w, dd, np.atleast_1d(ell), np.atleast_1d(ely))
    mag = np.abs(beta)
    if np.any(mag > 1 + 1e-9):
        raise InternalError("|beta| exceeds 1 on the grid")
    theta_mix = np.arcsin(np.minimum(mag, 1.0))
    pen = 2.0 / (_decay_toward_prism(geometry, w, ell) * dd)
    return {
        "beta": beta.reshape(shape),
        "r": r.reshape(shape),
        "tau": tau.reshape(shape),
        "overlap": ov.reshape(shape),
        "theta_mix": theta_mix.reshape(shape),
        "g_tilde": (2 / math.pi * theta_mix).reshape(shape),
        "penetration": pen.reshape(shape),
    }


def transfer_coefficients(stack: LayerStack, omega: float, method: str = "kernel") -> TransferCoefficients:
    """Transfer matrix at the mode-matching angle.

    beta* = -tau * overlap(phi, psi), with the SPP mode phi lossless and the
    three-layer field psi computed with the lossy metal.
    ``method="profile"`` takes the slower route through explicit mode
    profiles and a linear solve of the boundary conditions.
    """
    match = matching_angle(stack.metal, stack.eps1, omega)
    pen = penetration_factor(stack, omega)
    if method == "profile":
        phi = spp_profile(stack.metal, omega, stack.geometry, stack.d)
        psi, fresnel = three_layer_profile(stack, omega, match.theta)
        beta = (-fresnel.tau * overlap(phi, psi)).conjugate()
    elif method == "kernel":
        beta = complex(coupling_grid(stack.geometry, stack.eps1, stack.metal, omega, stack.d)["beta"])
        if not math.isfinite(abs(beta)):
            raise NumericalSingularityError(f"coupling kernel failed at omega={omega:.6g}, d={stack.d:.6g}")
    else:
        raise ValueError(f"unknown method {method!r}")
    return from_beta(beta, pen)


def golden_section_max(f, a: float, b: float, tol: float = 1e-10, max_iter: int = 200):
    """Maximize a unimodal f on [a, b]; returns (x, f(x))."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def feasible_thickness_range(stack: LayerStack, omega: float, d_range=DEFAULT_D_RANGE):
    """Sub-interval of d_range where the penetration factor is at most 1."""
    lo, hi = d_range
    if not 0 < lo < hi:
        raise DomainError(f"invalid thickness range {d_range}")
    w = spp_wavevector_lossless(stack.metal, omega)
    decay = w.nu0 if stack.geometry is Geometry.OTTO else w.nu
    # the margin keeps P(lo) <= 1 after rounding in the other decay formula
    lo = max(lo, 2.0 / decay * (1 + 1e-12))
    if lo > hi:
        raise InfeasibleError(f"no d in {d_range} has penetration factor <= 1 at omega={omega:.6g}")
    return lo, hi


def optimize_thickness(stack: LayerStack, omega: float, d_range=DEFAULT_D_RANGE,
                       coarse: int = 32, tol: float = 1e-12) -> OptimumResult:
    """Maximize |g~| over the layer-II thickness subject to P <= 1.

    A coarse log-spaced scan brackets the maximum, then a golden-section
    search in log10(d) refines it. Ties go to the smaller d.
    """
    matching_angle(stack.metal, stack.eps1, omega)
    lo, hi = feasible_thickness_range(stack, omega, d_range)
    if hi == lo:
        return OptimumResult(lo, transfer_coefficients(stack.with_d(lo), omega))
    geo, eps1, metal = stack.geometry, stack.eps1, stack.metal
    llo, lhi = math.log10(lo), math.log10(hi)
    grid = np.linspace(llo, lhi, coarse)
    vals = coupling_grid(geo, eps1, metal, omega, 10.0 ** grid)["g_tilde"]
    if not np.all(np.isfinite(vals)):
        raise NumericalSingularityError(f"coupling undefined on the thickness scan at omega={omega:.6g}")
    i = int(np.argmax(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, coarse - 1)]

    def f(logd):
        return float(coupling_grid(geo, eps1, metal, omega, 10.0 ** logd)["g_tilde"])

    x, fx = golden_section_max(f, a, b, tol=tol)
    if vals[i] > fx:
        x = grid[i]
    d_opt = 10.0 ** x
    return OptimumResult(d_opt, transfer_coefficients(stack.with_d(d_opt), omega))


def optimal_coupling_curve(geometry, eps1: float, metal: PermittivityModel, omegas, d_range=DEFAULT_D_RANGE):
    """(d_opt, g_tilde_opt) per frequency; NaN where no feasible matched mode exists."""
    d_opt = np.full(len(omegas), np.nan)
    g_opt = np.full(len(omegas), np.nan)
    for j, w in enumerate(omegas):
        stack = LayerStack(geometry, eps1, d_range[0], metal)
        try:
            res = optimize_thickness(stack, float(w), d_range)
        except (UnmatchableError, InfeasibleError, DomainError):
            continue
        d_opt[j] = res.d
        g_opt[j] = res.coefficients.g_tilde
    return d_opt, g_opt


def wavelength_band(omega0: float, delta_lambda: float) -> tuple[float, float]:
    """Frequencies of the wavelength window lambda0 -/+ delta_lambda."""
    lam0 = 2 * math.pi * C_LIGHT / omega0
    if not 0 < delta_lambda < lam0:
        raise DomainError(f"delta_lambda must lie in (0, {lam0:.6g})")
    return 2 * math.pi * C_LIGHT / (lam0 + delta_lambda), 2 * math.pi * C_LIGHT / (lam0 - delta_lambda)


def matching_angles(metal: PermittivityModel, eps1: float, omegas):
    eps = eval_lossless(metal, np.asarray(omegas, dtype=float))
    arg = np.clip(eps / (eps1 * (1 + eps)), 0.0, 1.0)
    return np.arcsin(np.sqrt(arg))


def deformation_metrics(stack: LayerStack, omega0: float, delta_lambda: float,
                        d_range=DEFAULT_D_RANGE, samples: int = 201) -> DeformationReport:
    """Spread of matching angle and |g| across the wavelength window
    lambda0 +/- delta_lambda, with d fixed at the optimum for omega0.

    If part of the window lies above the highest matchable frequency a
    PartialBandError is raised carrying the report for the matchable part.
    """
    opt = optimize_thickness(stack, omega0, d_range)
    w_lo, w_hi = wavelength_band(omega0, delta_lambda)
    w_max = max_matchable_frequency(stack.metal, stack.eps1)
    partial = w_hi >= w_max
    if partial:
        w_hi = w_max * (1 - 1e-10)
    ws = np.linspace(w_lo, w_hi, samples)
    theta = np.degrees(matching_angles(stack.metal, stack.eps1, ws))
    g = coupling_grid(stack.geometry, stack.eps1, stack.metal, ws, opt.d)["theta_mix"]
    if not np.all(np.isfinite(g)):
        raise NumericalSingularityError("coupling undefined inside the band")
    report = DeformationReport(
        delta_theta=float(theta.max() - theta.min()),
        delta_g_mag=float(g.max() - g.min()),
        bandwidth_lambda=delta_lambda,
        omega0=omega0,
        d_opt=opt.d,
        band=(w_lo, w_hi),
    )
    if partial:
        raise PartialBandError(
            f"band above {w_max:.6g} rad/s cannot be mode-matched; metrics cover the matchable part",
            report, (w_lo, w_hi))
    return report
