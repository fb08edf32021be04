"""Closed-form witnesses and the curated operator library.

Two diagonal operators separate the conditions of the compactness theorem
once the Toeplitz-algebra hypothesis is dropped:

* the projection onto the lacunary coefficients {1, 2, 4, 8, ...};
* the unitary that flips the sign of every odd coefficient.

Both have Berezin transforms tending to 0 at the boundary but are not compact.
"""
import math
from dataclasses import dataclass

import numpy as np

from .disk import check_disk, kernel_coefficients, kernel_tail_mass, mobius
from .errors import ConfigError, DiskDomainError, FeasibilityError
from .operators import diagonal_operator, hankel_gram, toeplitz_expression
from .quadrature import build_rule, integrate, mobius_pullback
from .symbols import (
    Constant,
    IndicatorAnnulus,
    IndicatorDisk,
    Monomial,
    Polynomial,
    PolynomialSymbol,
    SumOfProducts,
    Term,
)

LACUNARY_TERM_CAP = 2**20


def _is_power_of_two(n):
    n = np.asarray(n)
    return (n > 0) & ((n & (n - 1)) == 0)


def lacunary_projection(degree):
    """Diagonal projection keeping e_n for n in {1, 2, 4, 8, ...}; e_0 is discarded."""
    if int(degree) < 1:
        raise ConfigError("degree must be at least 1")
    return diagonal_operator(lambda n: _is_power_of_two(n).astype(float), int(degree), "lacunary-projection")


def alternating_unitary(degree):
    """Diagonal unitary with entry (-1)^n on e_n."""
    if int(degree) < 1:
        raise ConfigError("degree must be at least 1")
    return diagonal_operator(lambda n: np.where(n % 2 == 0, 1.0, -1.0), int(degree), "alternating-unitary")


# ------------------------------------------------------ closed-form Berezin


@dataclass(frozen=True)
class ClosedFormBerezin:
    """Evaluator for the Berezin transform of a counterexample as a function of t = |z|^2.

    ``kind`` is "lacunary" (series (1 - t)^2 sum (2^n + 1) t^(2^n)) or
    "alternating" (rational (1 - t)^2 / (1 + t)^2). ``tol`` bounds the relative
    truncation error of the series; ``cap`` is the largest exponent 2^n used.
    """

    kind: str
    tol: float = 1e-17
    cap: int = LACUNARY_TERM_CAP

    def __post_init__(self):
        if self.kind not in ("lacunary", "alternating"):
            raise ConfigError(f"unknown closed form {self.kind!r}")


LACUNARY = ClosedFormBerezin("lacunary")
ALTERNATING = ClosedFormBerezin("alternating")


def lacunary_series(t, tol=1e-17, cap=LACUNARY_TERM_CAP):
    """(value, error bound) of (1 - t)^2 sum_{n >= 0} (2^n + 1) t^(2^n), compensated summation.

    Terms are added until the next one falls below ``tol`` times the running
    sum and the term ratio is below 1/2, so the remainder is bounded by the
    geometric tail of the next term.
    """
    if not 0.0 <= t < 1.0:
        raise DiskDomainError("t must lie in [0, 1)")
    if t == 0.0:
        return 0.0, 0.0
    terms = []
    power, k = t, 1  # power = t^k with k = 2^n
    while True:
        terms.append((k + 1) * power)
        nxt_k, nxt_p = 2 * k, power * power
        nxt = (nxt_k + 1) * nxt_p
        ratio = nxt / terms[-1] if terms[-1] > 0 else 0.0
        if ratio < 0.5 and nxt <= tol * math.fsum(terms):
            bound = nxt / (1.0 - ratio)
            break
        if nxt_k > cap:
            raise FeasibilityError(f"lacunary series not converged by exponent {cap} at t={t}")
        power, k = nxt_p, nxt_k
    scale = (1.0 - t) ** 2
    return scale * math.fsum(terms), scale * bound


def closed_form_berezin(variant, t):
    """Closed-form Berezin value at t = |z|^2 for a :class:`ClosedFormBerezin` or its kind name."""
    if isinstance(variant, str):
        variant = ClosedFormBerezin(variant)
    t = float(t)
    if not 0.0 <= t < 1.0:
        raise DiskDomainError("t must lie in [0, 1)")
    if variant.kind == "alternating":
        return ((1.0 - t) / (1.0 + t)) ** 2
    return lacunary_series(t, variant.tol, variant.cap)[0]


# --------------------------------------------------------------- little Bloch


def _analytic_coefficients(f):
    """Monomial coefficients {a: c} of an analytic polynomial symbol, else ConfigError."""
    if not isinstance(f, PolynomialSymbol):
        raise ConfigError(f"{getattr(f, 'label', f)!r} is not an analytic polynomial symbol")
    mons = f.monomials()
    if any(b != 0 for _, b in mons):
        raise ConfigError(f"{f.label} is not analytic (contains conj(w))")
    return {a: c for (a, _), c in mons.items()}


def _series_distance(coeffs, z, eps=1e-14):
    """||(f - f(z)) k_z||_2 from the Taylor coefficients of the analytic product."""
    deg = max(coeffs)
    t = abs(z) ** 2
    K = 1
    while kernel_tail_mass(z, K) > eps**2:
        K *= 2
    D = deg + K
    g = np.zeros(deg + 1, dtype=complex)
    for a, c in coeffs.items():
        g[a] += c
    g[0] -= sum(c * z**a for a, c in coeffs.items())
    n = np.arange(K + 1)
    kz = (1.0 - t) * (n + 1) * np.conj(z) ** n  # monomial coefficients of k_z
    prod = np.convolve(g, kz)[: D + 1]
    return float(np.sqrt(np.sum(np.abs(prod) ** 2 / (np.arange(prod.size) + 1.0))))


def little_bloch_rule(f, z):
    """Rule for f o phi_z: a tensor rule in lambda = phi_z(w), transported by phi_z.

    In lambda the integrand is |f(lambda) - f(z)|^2 |k_z(lambda)|^2, whose angular
    content is the degree of f plus the harmonics of |k_z|^2, which decay like |z|^k.
    """
    deg = max(_analytic_coefficients(f))
    r = abs(complex(z))
    spread = 0 if r == 0 else int(np.ceil(np.log(1e-18) / np.log(r)))
    R = max(32, deg // 2 + 1 + spread // 2)
    M = max(64, 2 * deg + spread + 1)
    return mobius_pullback(build_rule(R, M), z)


def little_bloch_distance(f, z, rule=None, method="quadrature"):
    """||f o phi_z - f(z)||_2 for an analytic polynomial symbol f.

    ``method`` is "quadrature" (integrate |f o phi_z - f(z)|^2 on ``rule``,
    default :func:`little_bloch_rule`), "series" (Taylor coefficients of
    (f - f(z)) k_z), or "hankel" (square root of the Berezin transform of
    H_conj(f)^* H_conj(f)).
    """
    check_disk(z)
    z = complex(z)
    coeffs = _analytic_coefficients(f)
    fz = f(np.asarray(z))
    if method == "series":
        return _series_distance(coeffs, z)
    if method == "hankel":
        from .berezin import berezin_operator
        from .space import min_degree_for_kernel

        N = max(coeffs) + min_degree_for_kernel(z, 1e-10) + 1
        G = hankel_gram(f.conj(), N)
        return float(np.sqrt(max(berezin_operator(G, z, tail_tol=1e-9).real, 0.0)))
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    rule = little_bloch_rule(f, z) if rule is None else rule
    vals = f(mobius(z, rule.nodes)) - fz
    return float(np.sqrt(integrate(np.abs(vals) ** 2, rule)))


# -------------------------------------------------------------------- library


@dataclass(frozen=True)
class LibraryEntry:
    """A named operator with its expected compactness and where that expectation comes from."""

    name: str
    source: object  # SumOfProducts, or a callable degree -> TruncatedOperator
    tag: str  # "compact" or "non-compact"
    provenance: str
    outside_hypothesis: bool = False

    @property
    def is_expression(self):
        return isinstance(self.source, SumOfProducts)

    def operator(self, degree):
        if self.is_expression:
            return toeplitz_expression(self.source, degree)
        return self.source(degree)


ONE_MINUS_ABS2 = Polynomial({(0, 0): 1.0, (1, 1): -1.0}, sup_bound=1.0)
ONE_MINUS_ABS2_SQ = Polynomial({(0, 0): 1.0, (1, 1): -2.0, (2, 2): 1.0}, sup_bound=1.0)
W, WBAR = Monomial(1, 0), Monomial(0, 1)


def _library():
    S = SumOfProducts.single
    return [
        LibraryEntry("indicator-half", S(IndicatorDisk(0.5)), "compact",
                     "symbol supported on a compact subset of the disk"),
        LibraryEntry("hankel-wbar", S(Monomial(1, 1)) + S(W, WBAR, coef=-1.0), "compact",
                     "Hankel Gram of conj(w); diagonal 1/((n+1)(n+2)) tends to 0"),
        LibraryEntry("vanishing-weight", S(ONE_MINUS_ABS2_SQ), "compact",
                     "continuous symbol vanishing on the circle; diagonal 2/((n+2)(n+3))"),
        LibraryEntry("weight-product", S(ONE_MINUS_ABS2, ONE_MINUS_ABS2), "compact",
                     "product of two Toeplitz operators with symbols vanishing on the circle"),
        LibraryEntry("annulus", S(IndicatorAnnulus(0.3, 0.6)), "compact",
                     "symbol supported on a compact subset of the disk"),
        LibraryEntry("w-indicator", S(W, IndicatorDisk(0.5)), "compact",
                     "bounded operator times a compact one"),
        LibraryEntry("identity", S(Constant(1.0)), "non-compact",
                     "identity on an infinite-dimensional space"),
        LibraryEntry("re-w", S(W, coef=0.5) + S(WBAR, coef=0.5), "non-compact",
                     "continuous symbol nonzero on the circle; Berezin transform does not vanish"),
        LibraryEntry("shift-product", S(W, WBAR), "non-compact",
                     "diagonal n/(n+1) tends to 1"),
        LibraryEntry("alternating", alternating_unitary, "non-compact",
                     "unitary operator; outside the Toeplitz algebra hypothesis", True),
        LibraryEntry("lacunary", lacunary_projection, "non-compact",
                     "projection with infinite-dimensional range; outside the Toeplitz algebra hypothesis",
                     True),
    ]


def test_library():
    """The curated operator library, compact-tagged entries first."""
    return _library()


test_library.__test__ = False  # not a pytest test despite the name


def preset(name):
    """Library entry by name (``identity``, ``lacunary``, ``alternating``, ``indicator-half``, ...)."""
    for entry in _library():
        if entry.name == name:
            return entry
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(preset_names())}")


def preset_names():
    return [e.name for e in _library()]
