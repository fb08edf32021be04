"""Disk geometry: the involutive automorphisms phi_z and the Bergman kernels.

All functions accept scalars or numpy arrays for the second argument ``w``
and broadcast; the base point ``z`` may also be an array of the same shape.
"""
import numpy as np

from .errors import DiskDomainError

#: Points with modulus at or beyond this radius are rejected.
BOUNDARY_GUARD = 1.0 - 1e-12


def check_disk(*points):
    """Raise :class:`DiskDomainError` unless every point satisfies ``|p| < 1 - 1e-12``."""
    for p in points:
        a = np.abs(np.asarray(p, dtype=complex))
        if a.size and (not np.all(np.isfinite(a)) or a.max() >= BOUNDARY_GUARD):
            raise DiskDomainError(f"point outside the guarded disk (max |p| = {a.max():.17g})")


def _as_out(x):
    return complex(x) if np.ndim(x) == 0 else x


def mobius(z, w):
    """phi_z(w) = (z - w) / (1 - conj(z) w)."""
    check_disk(z, w)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return _as_out((z - w) / (1.0 - np.conj(z) * w))


def mobius_derivative(z, w):
    """phi_z'(w) = (|z|^2 - 1) / (1 - conj(z) w)^2."""
    check_disk(z, w)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return _as_out((np.abs(z) ** 2 - 1.0) / (1.0 - np.conj(z) * w) ** 2)


def kernel(z, w):
    """Reproducing kernel K_z(w) = 1 / (1 - conj(z) w)^2."""
    check_disk(z, w)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return _as_out(1.0 / (1.0 - np.conj(z) * w) ** 2)


def normalized_kernel(z, w):
    """k_z(w) = (1 - |z|^2) / (1 - conj(z) w)^2, a unit vector in L^2_a."""
    check_disk(z, w)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return _as_out((1.0 - np.abs(z) ** 2) / (1.0 - np.conj(z) * w) ** 2)


def kernel_coefficients(z, degree, normalized=True):
    """Coefficients of k_z (or K_z) in the orthonormal basis e_n = sqrt(n+1) w^n.

    Entry n is conj(e_n(z)), times (1 - |z|^2) when ``normalized``. Powers are
    formed in polar form, |z|^n e^(-i n arg z), so their rounding error does not
    accumulate with n the way a running product does.
    """
    check_disk(z)
    z = complex(z)
    n = np.arange(degree + 1)
    rho = abs(z)
    if rho == 0.0:
        powers = (n == 0).astype(complex)
    else:
        powers = rho ** n.astype(float) * np.exp(-1j * np.angle(z) * n)
    coeffs = np.sqrt(n + 1.0) * powers
    if normalized:
        # (1 - rho)(1 + rho) with the same rho as the powers keeps ||k_z|| <= 1 in rounding
        coeffs *= (1.0 - rho) * (1.0 + rho)
    return coeffs


def kernel_tail_mass(z, degree):
    """Squared L^2 norm of k_z minus its truncation to degree ``degree``.

    Closed form of sum_{n > N} (n+1) t^n (1-t)^2 with t = |z|^2.
    """
    check_disk(z)
    t = abs(complex(z)) ** 2
    if t == 0.0:
        return 0.0
    n1 = degree + 1
    return float(t ** n1 * (1.0 + n1 * (1.0 - t)))
