"""Pure numpy implementation of the photon-to-SPP coupling kernel.

Mirrors ``_kernel.pyx`` line for line; used when the compiled extension is
unavailable or ``QSPP_PURE_PYTHON`` is set.
"""
import numpy as np

C_LIGHT = 2.99792458e8

OTTO = 0
KRETSCHMANN = 1


def expm1c(z):
    """exp(z) - 1 for complex z without cancellation near zero."""
    x, y = z.real, z.imag
    s = np.sin(0.5 * y)
    return (np.expm1(x) * np.cos(y) - 2.0 * s * s) + 1j * np.exp(x) * np.sin(y)


def exprel(z):
    """(exp(z) - 1)/z, equal to 1 at z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    series = 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    return np.where(small, series, expm1c(zs) / zs)


def coupling_kernel(geometry, eps1, omega, d, eps_ll, eps_ly):
    """Evaluate the mode-matched coupling at each (omega, d) point.

    Parameters are 1-D arrays of equal length (``geometry`` and ``eps1`` are
    scalars). ``eps_ll`` is the lossless metal permittivity that fixes the
    SPP mode and the incidence angle; ``eps_ly`` is the lossy permittivity
    used inside the three-layer stack.

    Returns ``(beta, r, tau, overlap)``; points with no bound or matchable
    mode are NaN.
    """
    omega = np.asarray(omega, dtype=float)
    d = np.asarray(d, dtype=float)
    eps_ll = np.asarray(eps_ll, dtype=float)
    eps_ly = np.asarray(eps_ly, dtype=complex)

    with np.errstate(invalid="ignore", divide="ignore", over="ignore", under="ignore"):
        k0 = omega / C_LIGHT
        s = np.sqrt(-(1.0 + eps_ll))
        k = k0 * np.sqrt(-eps_ll) / s
        nu = k0 * (-eps_ll) / s
        nu0 = k0 / s
        kz1sq = eps1 * k0 * k0 - k * k
        bad = ~(eps_ll < -1.0) | ~(kz1sq >= 0.0)
        kz1 = np.sqrt(np.where(bad, 0.0, kz1sq))

        if geometry == OTTO:
            e2 = np.ones_like(eps_ly)
            e3 = eps_ly
            ra, rb = nu0, nu
        else:
            e2 = eps_ly
            e3 = np.ones_like(eps_ly)
            ra, rb = nu, nu0
        za = k / ra
        zb = -k / rb

        g2 = np.sqrt(k * k - e2 * k0 * k0 + 0j)
        g3 = np.sqrt(k * k - e3 * k0 * k0 + 0j)
        q1 = 1j * kz1 / eps1
        p2 = g2 / e2
        p3 = g3 / e3
        E = np.exp(-g2 * d)
        E2 = E * E

        den = (q1 - p2) * (p2 + p3) + E2 * (p2 - p3) * (q1 + p2)
        A = 2.0 * q1 * (p2 + p3) / den
        B = 2.0 * q1 * E * (p2 - p3) / den
        C = 4.0 * q1 * E * p2 / den
        r = 2.0 * q1 * ((p2 + p3) + E2 * (p2 - p3)) / den - 1.0

        nrm = np.sqrt(np.abs(r) ** 2 + np.abs(C) ** 2)
        tau = C / nrm
        r = r / nrm

        ax_A, az_A = 1j * g2 * A / e2, -k * A / e2
        ax_B, az_B = -1j * g2 * B / e2, -k * B / e2
        ax_C, az_C = 1j * g3 * C / e3, -k * C / e3

        S = ra - g2
        pos = S.real > 0
        I_A = np.where(pos, E * d * exprel(-S * d), np.exp(-ra * d) * d * exprel(S * d))
        I_B = d * exprel(-(ra + g2) * d)
        I_C = 1.0 / (rb + g3)
        num = ((-1j * ax_A + za * az_A) * I_A
               + (-1j * ax_B + za * az_B) * I_B
               + (-1j * ax_C + zb * az_C) * I_C)

        g2r = g2.real
        I_AA = d * exprel(-2.0 * g2r * d)
        cross = (np.conj(ax_A) * ax_B + np.conj(az_A) * az_B) * E * d * exprel(2j * g2.imag * d)
        psi2 = ((np.abs(ax_A) ** 2 + np.abs(az_A) ** 2) * I_AA.real
                + (np.abs(ax_B) ** 2 + np.abs(az_B) ** 2) * I_AA.real
                + 2.0 * cross.real
                + (np.abs(ax_C) ** 2 + np.abs(az_C) ** 2) / (2.0 * g3.real))
        phi2 = (1.0 + za * za) / (2.0 * ra) + (1.0 + zb * zb) / (2.0 * rb)
        ov = num / np.sqrt(phi2 * psi2)

        beta = np.conj(-tau * ov)

    nan = complex(np.nan, np.nan)
    beta = np.where(bad, nan, beta)
    r = np.where(bad, nan, r)
    tau = np.where(bad, nan, tau)
    ov = np.where(bad, nan, ov)
    return beta, r, tau, ov
