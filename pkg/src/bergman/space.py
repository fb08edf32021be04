"""Bergman-space functions in the orthonormal basis e_n(w) = sqrt(n+1) w^n."""
import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _backend
from .disk import check_disk
from .errors import QuadratureError
from .quadrature import integrate

#: Hard upper limit on truncation degrees; the BERGMAN_MAX_DEGREE env var may lower it.
DEFAULT_MAX_DEGREE = 1024


def max_degree():
    raw = os.environ.get("BERGMAN_MAX_DEGREE")
    return int(raw) if raw else DEFAULT_MAX_DEGREE


@dataclass(frozen=True, eq=False)
class BergmanFunction:
    """f = sum_n coeffs[n] e_n, truncated at degree len(coeffs) - 1."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex).ravel())

    @property
    def degree(self):
        return self.coeffs.size - 1

    @property
    def norm(self):
        """L^2 norm, by Parseval."""
        return float(scipy.linalg.norm(self.coeffs))

    def __call__(self, w):
        return evaluate(self, w)

    @classmethod
    def basis(cls, n, degree=None):
        c = np.zeros((degree if degree is not None else n) + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @classmethod
    def from_monomials(cls, monomial_coeffs):
        """From coefficients a_n of w^n (a_n = c_n sqrt(n+1))."""
        a = np.asarray(monomial_coeffs, dtype=complex)
        return cls(a / np.sqrt(np.arange(1, a.size + 1)))

    def monomial_coeffs(self):
        return self.coeffs * np.sqrt(np.arange(1, self.coeffs.size + 1))


def evaluate(f, w):
    """f(w) = sum_n c_n sqrt(n+1) w^n (Horner in the compiled kernel when available)."""
    check_disk(w)
    coeffs = f.coeffs if isinstance(f, BergmanFunction) else np.asarray(f, dtype=complex)
    out = _backend.horner(coeffs, np.asarray(w, dtype=complex))
    return complex(np.asarray(out).reshape(-1)[0]) if np.ndim(w) == 0 else out


def basis_matrix(points, degree):
    """E[i, n] = e_n(points[i]) for n = 0..degree."""
    p = np.asarray(points, dtype=complex).ravel()
    n = np.arange(degree + 1)
    E = np.empty((p.size, degree + 1), dtype=complex)
    E[:, 0] = 1.0
    for k in range(1, degree + 1):
        E[:, k] = E[:, k - 1] * p
    return E * np.sqrt(n + 1.0)


def bergman_project(v, rule, degree, margin=0):
    """Coefficients <v, e_n> for n <= degree, by quadrature of node samples ``v``.

    Requires the rule to be monomial-exact to 2*degree + margin so that the
    projection is exact on polynomials in w, conj(w) of that degree.
    """
    if rule.exact_degree < 2 * degree + margin:
        raise QuadratureError(
            f"projection to degree {degree} needs exactness {2 * degree + margin}, rule has {rule.exact_degree}"
        )
    values = v(rule.nodes) if callable(v) else np.asarray(v, dtype=complex)
    if values.shape != rule.nodes.shape:
        raise ValueError("sample count does not match the rule")
    E = basis_matrix(rule.nodes, degree)
    return BergmanFunction(np.sum(np.conj(E) * (rule.weights * values)[:, None], axis=0))


def lp_norm(v, p, rule):
    """(integral |v|^p dA)^(1/p) by quadrature of node samples (or a callable)."""
    if not p >= 1:
        raise ValueError("p must be >= 1")
    values = v(rule.nodes) if callable(v) else np.asarray(v)
    return float(integrate(np.abs(values) ** p, rule)) ** (1.0 / p)


def min_degree_for_kernel(z, eps):
    """Smallest N with ||k_z - (truncation of k_z to degree N)||_2 <= eps."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    check_disk(z)
    t = abs(complex(z)) ** 2
    if t == 0.0:
        return 0
    target = eps * eps

    def tail(N):
        n1 = N + 1
        return t**n1 * (1.0 + n1 * (1.0 - t))

    if tail(0) <= target:
        return 0
    lo, hi = 0, 1
    while tail(hi) > target:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def default_degree(points, eps=1e-8, cap=None):
    """max over ``points`` of min_degree_for_kernel, capped at BERGMAN_MAX_DEGREE."""
    cap = max_degree() if cap is None else cap
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    need = max((min_degree_for_kernel(p, eps) for p in pts), default=0)
    return int(min(need, cap))
