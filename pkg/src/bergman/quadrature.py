"""Quadrature against normalized area measure on the unit disk.

Rules are tensor products in polar form: Gauss-Legendre in s = r^2 on [0, 1]
(normalized area measure is ds dtheta / 2pi, so radial moments are plain
polynomials in s) times an equispaced angular grid. A second family grades the
radial nodes toward the boundary for integrands with algebraic singularities
in 1 - |w|^2.

Rules can be pulled back through a disk automorphism to concentrate nodes near
a point close to the boundary; see :func:`mobius_pullback`.
"""
from dataclasses import dataclass, replace

import numpy as np

from .disk import check_disk
from .errors import QuadratureError


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes in D and positive weights summing to 1.

    ``exact_degree`` is the largest d such that every moment of w^a conj(w)^b
    with a, b <= d is integrated exactly; -1 means no monomial exactness is
    claimed (e.g. after a pullback).
    """

    nodes: np.ndarray
    weights: np.ndarray
    radial_order: int
    angular_order: int
    exact_degree: int
    center: complex = 0j
    #: 1 - |node|^2 computed without cancellation (None: derive from nodes)
    defect: np.ndarray = None

    def __len__(self):
        return self.nodes.size

    def one_minus_abs2(self):
        """1 - |w|^2 at the nodes, accurate even where nodes round to |w| = 1."""
        if self.defect is not None:
            return self.defect
        return 1.0 - np.abs(self.nodes) ** 2


@dataclass(frozen=True, eq=False)
class SingularRule(QuadratureRule):
    """Tensor rule whose radial nodes follow s = 1 - (1 - x)^grading."""

    grading: float = 5.0


def _angles(angular_order):
    return 2.0 * np.pi * np.arange(angular_order) / angular_order


def _tensor(s, ws, angular_order):
    r = np.sqrt(s)
    theta = _angles(angular_order)
    nodes = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = np.repeat(ws, angular_order) / angular_order
    return nodes, weights


def _gauss_legendre_unit(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def build_rule(radial_order, angular_order):
    """Gauss-Legendre (in r^2) x trapezoid (in angle) rule on the disk.

    Exact for w^a conj(w)^b whenever a, b <= min(2*radial_order - 1, angular_order - 1).
    """
    if int(radial_order) < 1 or int(angular_order) < 1:
        raise ValueError("radial_order and angular_order must be positive")
    radial_order, angular_order = int(radial_order), int(angular_order)
    s, ws = _gauss_legendre_unit(radial_order)
    nodes, weights = _tensor(s, ws, angular_order)
    exact = min(2 * radial_order - 1, angular_order - 1)
    return QuadratureRule(nodes, weights, radial_order, angular_order, exact)


def rule_for_degree(degree, extra=0):
    """Smallest tensor rule exact for monomials up to ``degree``, optionally padded."""
    d = int(degree) + int(extra)
    return build_rule(d // 2 + 1, d + 1)


def build_singular_rule(grading, radial_order, angular_order):
    """Rule graded toward |w| = 1 for weights like (1 - |w|^2)^(-alpha).

    The map s = 1 - (1 - x)^q turns (1 - s)^(-alpha) ds into
    q (1 - x)^(q(1 - alpha) - 1) dx, which is smooth for q(1 - alpha) >= 1.
    """
    if not grading > 1.0:
        raise ValueError("grading must be > 1")
    if int(radial_order) < 1 or int(angular_order) < 1:
        raise ValueError("radial_order and angular_order must be positive")
    q = float(grading)
    x, wx = _gauss_legendre_unit(int(radial_order))
    s = 1.0 - (1.0 - x) ** q
    ws = wx * q * (1.0 - x) ** (q - 1.0)
    nodes, weights = _tensor(s, ws, int(angular_order))
    defect = np.repeat((1.0 - x) ** q, int(angular_order))
    if q.is_integer():
        exact = min((2 * int(radial_order) - 1) // int(q), int(angular_order) - 1)
    else:
        exact = -1
    return SingularRule(nodes, weights, int(radial_order), int(angular_order), exact, defect=defect, grading=q)


def integrate(f, rule):
    """Sum of weight_i * f(node_i); ``f`` is a callable or an array of node samples."""
    values = f(rule.nodes) if callable(f) else np.asarray(f)
    if values.shape != rule.nodes.shape:
        raise ValueError(f"got {values.size} samples for a rule with {rule.nodes.size} nodes")
    # numpy pairwise summation: fixed order, reproducible run to run
    total = np.sum(rule.weights * values)
    return complex(total) if np.iscomplexobj(total) else float(total)


def mobius_pullback(rule, a):
    """The rule transported by phi_a: nodes phi_a(mu_i), weights w_i |phi_a'(mu_i)|^2.

    Integrals are unchanged in exact arithmetic; node density rises near ``a``.
    """
    check_disk(a)
    a = complex(a)
    if a == 0:
        return rule
    mu = rule.nodes
    denom = 1.0 - a.conjugate() * mu
    nodes = (a - mu) / denom
    ratio = (1.0 - abs(a) ** 2) / np.abs(denom) ** 2
    jac = ratio ** 2
    defect = rule.one_minus_abs2() * ratio
    return replace(rule, nodes=nodes, weights=rule.weights * jac, exact_degree=-1, center=a, defect=defect)


def balanced_center(z):
    """Pullback center for features near z: 1 - |a| = sqrt(1 - |z|), same direction as z.

    Puts features of size 1 - |z| at z and features of size 1 near the origin on
    a common scale sqrt(1 - |z|).
    """
    z = complex(z)
    r = abs(z)
    if r == 0.0:
        return 0j
    return z / r * (1.0 - np.sqrt(1.0 - r))


def adapted_rule(rule, z):
    """``rule`` pulled back toward ``z`` (unchanged for z = 0)."""
    return mobius_pullback(rule, balanced_center(z))


def require_exact(rule, degree, what="request"):
    """Raise :class:`QuadratureError` unless ``rule`` is monomial-exact to ``degree``."""
    if rule.exact_degree < degree:
        raise QuadratureError(
            f"{what} needs a rule exact to degree {degree}; rule is exact to {rule.exact_degree}"
        )
