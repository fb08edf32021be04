"""Numpy implementations of the compiled kernels, used when the extension is absent."""
import numpy as np
from scipy.signal import lfilter


def mobius_columns(z, degree, ncols):
    z = complex(z)
    zc = z.conjugate()
    n = np.arange(degree + 1)
    root = np.sqrt(n + 1.0)
    powers = np.empty(degree + 1, dtype=complex)
    powers[0] = 1.0
    if degree:
        powers[1:] = np.cumprod(np.full(degree, zc))
    mono = (abs(z) ** 2 - 1.0) * (n + 1) * powers
    out = np.empty((degree + 1, ncols), dtype=complex)
    for m in range(ncols):
        if m:
            mono = lfilter([z, -1.0], [1.0, -zc], mono)
        out[:, m] = mono * (root[m] / root)
    return out


def horner(coeffs, points):
    coeffs = np.asarray(coeffs, dtype=complex)
    points = np.asarray(points, dtype=complex)
    b = coeffs * np.sqrt(np.arange(1, coeffs.size + 1))
    acc = np.zeros(points.shape, dtype=complex)
    for bn in b[::-1]:
        acc *= points
        acc += bn
    return acc
