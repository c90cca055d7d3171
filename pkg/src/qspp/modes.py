"""Piecewise-exponential TM mode profiles and their overlaps.

A profile is a sum of terms ``(ax, az) * exp(rate * (z - ref))``, each
supported on an interval ``[lo, hi]`` of the z axis. Vectors are the x and
z components of the electric field; the common factor ``1/(omega eps0)``
is dropped since profiles are only compared after normalization.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dispersion import spp_wavevector_lossless
from .errors import DomainError, InternalError, NumericalSingularityError
from .materials import C_LIGHT, Geometry, LayerStack, PermittivityModel, eval_lossy

INF = math.inf


@dataclass(frozen=True)
class Term:
    lo: float
    hi: float
    ref: float
    ax: complex
    az: complex
    rate: complex

    def __call__(self, z):
        f = np.exp(self.rate * (np.asarray(z, dtype=float) - self.ref))
        return self.ax * f, self.az * f


def _exprel(z: complex) -> complex:
    if abs(z) < 1e-3:
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    x, y = z.real, z.imag
    s = math.sin(0.5 * y)
    em1 = complex(math.expm1(x) * math.cos(y) - 2.0 * s * s, math.exp(x) * math.sin(y))
    return em1 / z


def term_product_integral(a: Term, b: Term) -> complex:
    """Integral over the common support of conj(a(z)) . b(z)."""
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if not hi > lo:
        return 0j
    amp = a.ax.conjugate() * b.ax + a.az.conjugate() * b.az
    if amp == 0:
        return 0j
    ra = a.rate.conjugate()
    S = ra + b.rate

    def expo(z):
        return ra * (z - a.ref) + b.rate * (z - b.ref)

    if hi == INF and lo == -INF:
        raise DomainError("product of exponentials is not integrable on the whole line")
    if hi == INF:
        if not S.real < 0:
            raise DomainError("term product does not decay at +infinity")
        return amp * cmath.exp(expo(lo)) * (-1.0 / S)
    if lo == -INF:
        if not S.real > 0:
            raise DomainError("term product does not decay at -infinity")
        return amp * cmath.exp(expo(hi)) / S
    L = hi - lo
    if S.real > 0:
        return amp * cmath.exp(expo(hi)) * L * _exprel(-S * L)
    return amp * cmath.exp(expo(lo)) * L * _exprel(S * L)


@dataclass(frozen=True)
class ModeProfile:
    terms: tuple[Term, ...]
    coefficients: tuple[complex, ...] | None = None
    label: str = ""

    def inner(self, other: "ModeProfile") -> complex:
        """Unnormalized integral of conj(self) . other over z."""
        return sum((term_product_integral(a, b) for a in self.terms for b in other.terms), 0j)

    @property
    def norm(self) -> float:
        n2 = self.inner(self).real
        if not (n2 > 0 and math.isfinite(n2)):
            raise InternalError(f"profile norm^2 = {n2} is not positive and finite")
        return math.sqrt(n2)

    def evaluate(self, z, side: int = 0):
        """Field (Ex, Ez) at z. At an interface, ``side=-1`` takes the limit
        from below and ``side=+1`` from above; ``side=0`` uses half-open
        intervals [lo, hi)."""
        z = np.asarray(z, dtype=float)
        ex = np.zeros(z.shape, dtype=complex)
        ez = np.zeros(z.shape, dtype=complex)
        for t in self.terms:
            if side < 0:
                mask = (z > t.lo) & (z <= t.hi)
            else:
                mask = (z >= t.lo) & (z < t.hi)
            if np.any(mask):
                fx, fz = t(z[mask])
                ex[mask] += fx
                ez[mask] += fz
        return ex, ez


@dataclass(frozen=True)
class FresnelPair:
    r: complex
    tau: complex
    r_raw: complex
    tau_raw: complex


def spp_norm_closed_form(k: float, rate_below: float, rate_above: float) -> float:
    """L2 norm of the two-sided SPP profile with unit x amplitude."""
    n2 = (1 + (k / rate_below) ** 2) / (2 * rate_below) + (1 + (k / rate_above) ** 2) / (2 * rate_above)
    return math.sqrt(n2)


def spp_profile(metal: PermittivityModel, omega: float, geometry=Geometry.OTTO, d: float = 0.0) -> ModeProfile:
    """Lossless SPP mode bound to the interface at z = d.

    Otto has air below the interface (decay nu0) and metal above (decay nu);
    Kretschmann-Raether swaps the two.
    """
    geometry = Geometry.parse(geometry)
    w = spp_wavevector_lossless(metal, omega)
    k, nu, nu0 = w.k, w.nu, w.nu0
    below, above = (nu0, nu) if geometry is Geometry.OTTO else (nu, nu0)
    terms = (
        Term(-INF, d, d, 1j, complex(k / below), complex(below)),
        Term(d, INF, d, 1j, complex(-k / above), complex(-above)),
    )
    return ModeProfile(terms, label=f"spp/{geometry.value}")


@dataclass(frozen=True)
class ThreeLayerSolution:
    """H-field amplitudes of the prism / layer II / layer III problem.

    H = exp(i kz1 z) + r exp(-i kz1 z)              z < 0
        A exp(-g2 z) + B exp(g2 (z - d))             0 < z < d
        C exp(-g3 (z - d))                           z > d
    """

    kappa: float
    kz1: complex
    eps: tuple[complex, complex, complex]
    gamma2: complex
    gamma3: complex
    d: float
    r: complex
    A: complex
    B: complex
    C: complex

    def fields(self, z, side: int = 0):
        """(H, Ex, Ez) at z including the prism region."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        e1, e2, e3 = self.eps
        H = np.zeros(z.shape, complex)
        dH = np.zeros(z.shape, complex)
        eps = np.zeros(z.shape, complex)
        if side < 0:
            m1, m3 = z <= 0, z > self.d
        elif side > 0:
            m1, m3 = z < 0, z >= self.d
        else:
            m1, m3 = z < 0, z > self.d
        m2 = ~m1 & ~m3
        zz = z[m1]
        H[m1] = np.exp(1j * self.kz1 * zz) + self.r * np.exp(-1j * self.kz1 * zz)
        dH[m1] = 1j * self.kz1 * (np.exp(1j * self.kz1 * zz) - self.r * np.exp(-1j * self.kz1 * zz))
        eps[m1] = e1
        zz = z[m2]
        a = self.A * np.exp(-self.gamma2 * zz)
        b = self.B * np.exp(self.gamma2 * (zz - self.d))
        H[m2] = a + b
        dH[m2] = self.gamma2 * (b - a)
        eps[m2] = e2
        zz = z[m3]
        c = self.C * np.exp(-self.gamma3 * (zz - self.d))
        H[m3] = c
        dH[m3] = -self.gamma3 * c
        eps[m3] = e3
        return H, -1j * dH / eps, -self.kappa * H / eps


def _principal_sqrt(x: complex) -> complex:
    s = cmath.sqrt(x)
    return -s if s.real < 0 else s


def solve_three_layer(stack: LayerStack, omega: float, theta: float) -> ThreeLayerSolution:
    """Solve the TM boundary conditions for a plane wave incident from the prism."""
    if not 0 <= theta < math.pi / 2 + 1e-15:
        raise DomainError(f"incidence angle must lie in [0, pi/2], got {theta}")
    if theta == 0:
        warnings.warn("theta = 0: no in-plane momentum, mode matching impossible", RuntimeWarning, stacklevel=2)
    k0 = omega / C_LIGHT
    e1 = complex(stack.eps1)
    e2, e3, _ = stack.layer_permittivities(omega)
    kappa = math.sqrt(stack.eps1) * k0 * math.sin(theta)
    kz1 = complex(math.sqrt(max(stack.eps1 * k0 * k0 - kappa * kappa, 0.0)))
    g2 = _principal_sqrt(kappa * kappa - e2 * k0 * k0)
    g3 = _principal_sqrt(kappa * kappa - e3 * k0 * k0)
    d = stack.d
    E = cmath.exp(-g2 * d)
    q1 = 1j * kz1 / e1
    # unknowns (r, A, B, C); rows: H and H'/eps at z = 0, then at z = d
    M = np.array([
        [-1, 1, E, 0],
        [q1, -g2 / e2, g2 * E / e2, 0],
        [0, E, 1, -1],
        [0, -g2 * E / e2, g2 / e2, g3 / e3],
    ], dtype=complex)
    rhs = np.array([1, q1, 0, 0], dtype=complex)
    scale = np.abs(M).max(axis=1)
    M, rhs = M / scale[:, None], rhs / scale
    if not np.all(np.isfinite(M)) or np.linalg.cond(M) > 1e14:
        raise NumericalSingularityError(f"singular boundary system at omega={omega:.6g}, theta={theta:.6g}")
    r, A, B, C = np.linalg.solve(M, rhs)
    return ThreeLayerSolution(kappa, kz1, (e1, e2, e3), g2, g3, d, complex(r), complex(A), complex(B), complex(C))


def three_layer_profile(stack: LayerStack, omega: float, theta: float) -> tuple[ModeProfile, FresnelPair]:
    """Field in layers II and III and the renormalized Fresnel pair.

    ``tau`` is the H amplitude transmitted into layer III at z = d; (r, tau)
    are scaled jointly so that |r|^2 + |tau|^2 = 1.
    """
    sol = solve_three_layer(stack, omega, theta)
    _, e2, e3 = sol.eps
    g2, g3, d, kap = sol.gamma2, sol.gamma3, sol.d, sol.kappa
    A, B, C = sol.A, sol.B, sol.C
    terms = (
        Term(0.0, d, 0.0, 1j * g2 * A / e2, -kap * A / e2, -g2),
        Term(0.0, d, d, -1j * g2 * B / e2, -kap * B / e2, g2),
        Term(d, INF, d, 1j * g3 * C / e3, -kap * C / e3, -g3),
    )
    with np.errstate(over="ignore", invalid="ignore"):
        eB = complex(np.exp(-g2 * d))
        eC = complex(np.exp(g3 * d))
    coeffs = (
        terms[0].ax, terms[1].ax * eB, terms[0].az, terms[1].az * eB,
        terms[2].ax * eC, terms[2].az * eC,
    )
    n = math.hypot(abs(sol.r), abs(C))
    fresnel = FresnelPair(sol.r / n, C / n, sol.r, C)
    return ModeProfile(terms, coeffs, label=f"3L/{stack.geometry.value}"), fresnel


def overlap(phi: ModeProfile, psi: ModeProfile) -> complex:
    """Inner product of the two profiles after normalizing each to unit norm."""
    val = phi.inner(psi) / (phi.norm * psi.norm)
    if abs(val) > 1 + 1e-9:
        raise InternalError(f"|overlap| = {abs(val)} exceeds 1")
    return val
