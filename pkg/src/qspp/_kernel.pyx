# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled photon-to-SPP coupling kernel; see ``_kernel_py`` for the reference."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, expm1, sin, cos, fabs, NAN
from libc.complex cimport csqrt, cexp, conj, creal, cimag, cabs

cnp.import_array()

cdef double C_LIGHT = 2.99792458e8


cdef inline double complex expm1c(double complex z) noexcept nogil:
    cdef double x = creal(z), y = cimag(z)
    cdef double s = sin(0.5 * y)
    cdef double complex out
    out.real = expm1(x) * cos(y) - 2.0 * s * s
    out.imag = exp(x) * sin(y)
    return out


cdef inline double complex exprel(double complex z) noexcept nogil:
    if cabs(z) < 1e-3:
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    return expm1c(z) / z


cdef inline double abs2(double complex z) noexcept nogil:
    return creal(z) * creal(z) + cimag(z) * cimag(z)


cdef void point(int geometry, double eps1, double omega, double d, double eps_ll,
                double complex eps_ly, double complex* out) noexcept nogil:
    cdef double k0, s, k, nu, nu0, kz1sq, kz1, ra, rb, za, zb, nrm, phi2, psi2, I_AA
    cdef double complex e2, e3, g2, g3, q1, p2, p3, E, E2, den, A, B, C, r, tau
    cdef double complex axA, azA, axB, azB, axC, azC, S, I_A, I_B, I_C, num, cross, ov
    cdef double complex cnan
    cnan.real = NAN
    cnan.imag = NAN

    k0 = omega / C_LIGHT
    if not (eps_ll < -1.0):
        out[0] = cnan; out[1] = cnan; out[2] = cnan; out[3] = cnan
        return
    s = sqrt(-(1.0 + eps_ll))
    k = k0 * sqrt(-eps_ll) / s
    nu = k0 * (-eps_ll) / s
    nu0 = k0 / s
    kz1sq = eps1 * k0 * k0 - k * k
    if not (kz1sq >= 0.0):
        out[0] = cnan; out[1] = cnan; out[2] = cnan; out[3] = cnan
        return
    kz1 = sqrt(kz1sq)

    if geometry == 0:
        e2 = 1.0
        e3 = eps_ly
        ra = nu0
        rb = nu
    else:
        e2 = eps_ly
        e3 = 1.0
        ra = nu
        rb = nu0
    za = k / ra
    zb = -k / rb

    g2 = csqrt(k * k - e2 * k0 * k0)
    g3 = csqrt(k * k - e3 * k0 * k0)
    q1 = 1j * kz1 / eps1
    p2 = g2 / e2
    p3 = g3 / e3
    E = cexp(-g2 * d)
    E2 = E * E

    den = (q1 - p2) * (p2 + p3) + E2 * (p2 - p3) * (q1 + p2)
    A = 2.0 * q1 * (p2 + p3) / den
    B = 2.0 * q1 * E * (p2 - p3) / den
    C = 4.0 * q1 * E * p2 / den
    r = 2.0 * q1 * ((p2 + p3) + E2 * (p2 - p3)) / den - 1.0

    nrm = sqrt(abs2(r) + abs2(C))
    tau = C / nrm
    r = r / nrm

    axA = 1j * g2 * A / e2
    azA = -k * A / e2
    axB = -1j * g2 * B / e2
    azB = -k * B / e2
    axC = 1j * g3 * C / e3
    azC = -k * C / e3

    S = ra - g2
    if creal(S) > 0:
        I_A = E * d * exprel(-S * d)
    else:
        I_A = exp(-ra * d) * d * exprel(S * d)
    I_B = d * exprel(-(ra + g2) * d)
    I_C = 1.0 / (rb + g3)
    num = ((-1j * axA + za * azA) * I_A
           + (-1j * axB + za * azB) * I_B
           + (-1j * axC + zb * azC) * I_C)

    I_AA = creal(d * exprel(-2.0 * creal(g2) * d))
    cross = (conj(axA) * axB + conj(azA) * azB) * E * d * exprel(2j * cimag(g2) * d)
    psi2 = ((abs2(axA) + abs2(azA)) * I_AA
            + (abs2(axB) + abs2(azB)) * I_AA
            + 2.0 * creal(cross)
            + (abs2(axC) + abs2(azC)) / (2.0 * creal(g3)))
    phi2 = (1.0 + za * za) / (2.0 * ra) + (1.0 + zb * zb) / (2.0 * rb)
    ov = num / sqrt(phi2 * psi2)

    out[0] = conj(-tau * ov)
    out[1] = r
    out[2] = tau
    out[3] = ov


def coupling_kernel(int geometry, double eps1, omega, d, eps_ll, eps_ly):
    cdef double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef double[::1] dd = np.ascontiguousarray(d, dtype=np.float64)
    cdef double[::1] ell = np.ascontiguousarray(eps_ll, dtype=np.float64)
    cdef double complex[::1] ely = np.ascontiguousarray(eps_ly, dtype=np.complex128)
    cdef Py_ssize_t n = w.shape[0], i
    if dd.shape[0] != n or ell.shape[0] != n or ely.shape[0] != n:
        raise ValueError("kernel inputs must have equal length")
    beta = np.empty(n, dtype=np.complex128)
    r = np.empty(n, dtype=np.complex128)
    tau = np.empty(n, dtype=np.complex128)
    ov = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] vb = beta, vr = r, vt = tau, vo = ov
    cdef double complex buf[4]
    with nogil:
        for i in range(n):
            point(geometry, eps1, w[i], dd[i], ell[i], ely[i], buf)
            vb[i] = buf[0]
            vr[i] = buf[1]
            vt[i] = buf[2]
            vo[i] = buf[3]
    return beta, r, tau, ov
