# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: Mobius column recurrence and orthonormal-basis Horner evaluation.

Complex products are spelled out in real arithmetic; C's complex multiply
routes through a slow Annex G helper that checks for infinities.
"""
import numpy as np

from libc.math cimport sqrt


def mobius_columns(double complex z, Py_ssize_t degree, Py_ssize_t ncols):
    """Leading ``ncols`` columns of the Mobius unitary in the basis e_0..e_degree."""
    cdef Py_ssize_t n, m
    cdef double zr = z.real, zi = z.imag
    cdef double pr, pi, tr, ti, gr, gi, hr, hi, ar, ai, s
    cdef double[::1] re = np.empty(degree + 1, dtype=np.float64)
    cdef double[::1] im = np.empty(degree + 1, dtype=np.float64)
    cdef double[::1] root = np.sqrt(np.arange(1, degree + 2, dtype=np.float64))
    out_arr = np.empty((degree + 1, ncols), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double scale = zr * zr + zi * zi - 1.0

    # column 0 in monomial coefficients: (|z|^2 - 1)(n + 1) conj(z)^n
    pr = 1.0
    pi = 0.0
    for n in range(degree + 1):
        re[n] = scale * (n + 1) * pr
        im[n] = scale * (n + 1) * pi
        tr = pr * zr + pi * zi  # times conj(z)
        pi = pi * zr - pr * zi
        pr = tr
    for m in range(ncols):
        if m > 0:
            # multiply by (z - w)/(1 - conj(z) w): h_n = conj(z) h_{n-1} + z g_n - g_{n-1}
            gr = 0.0
            gi = 0.0
            hr = 0.0
            hi = 0.0
            for n in range(degree + 1):
                ar = re[n]
                ai = im[n]
                tr = (zr * hr + zi * hi) + (zr * ar - zi * ai) - gr
                ti = (zr * hi - zi * hr) + (zr * ai + zi * ar) - gi
                re[n] = tr
                im[n] = ti
                gr = ar
                gi = ai
                hr = tr
                hi = ti
        for n in range(degree + 1):
            s = root[m] / root[n]
            out[n, m] = (re[n] * s) + 1j * (im[n] * s)
    return out_arr


def horner(const double complex[::1] coeffs, const double complex[::1] points):
    """Evaluate sum_n coeffs[n] * sqrt(n+1) * w**n at every point.

    The point loop is innermost: successive points are independent, so the
    compiler can vectorize it, whereas each point's Horner chain is serial.
    """
    cdef Py_ssize_t n, i
    cdef Py_ssize_t deg = coeffs.shape[0] - 1
    cdef Py_ssize_t npts = points.shape[0]
    cdef double t, cr, ci
    cdef double[::1] wr = np.ascontiguousarray(np.real(points), dtype=np.float64)
    cdef double[::1] wi = np.ascontiguousarray(np.imag(points), dtype=np.float64)
    cdef double[::1] accr = np.zeros(npts, dtype=np.float64)
    cdef double[::1] acci = np.zeros(npts, dtype=np.float64)
    for n in range(deg, -1, -1):
        t = sqrt(<double>(n + 1))
        cr = coeffs[n].real * t
        ci = coeffs[n].imag * t
        for i in range(npts):
            t = accr[i] * wr[i] - acci[i] * wi[i] + cr
            acci[i] = accr[i] * wi[i] + acci[i] * wr[i] + ci
            accr[i] = t
    return np.asarray(accr) + 1j * np.asarray(acci)
