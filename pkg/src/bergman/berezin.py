"""Berezin transforms, the six compactness conditions along boundary paths,
checks of the Berezin transform under Mobius conjugation, and Schur-test audits.

For a truncated operator S (finite rank on L^2_a) every quantity here is
computed for that operator exactly, apart from L^p norms and the singular
integrals, which use quadrature:

* S k_z only needs the first N+1 coefficients of k_z;
* S_z 1 = U_z S U_z 1 with U_z 1 = -k_z, so S_z 1 = -(S k_z o phi_z) phi_z'
  is evaluated pointwise without truncating U_z;
* <S_z 1, e_n> = sum_m conj(U[m, n]) (S U_z 1)_m uses the first columns of U_z,
  which the causal column recurrence gives exactly.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _backend
from .disk import check_disk, kernel_coefficients, kernel_tail_mass, mobius, mobius_derivative
from .errors import ConfigError, FeasibilityError, QuadratureError
from .operators import TruncatedOperator, conjugate, cutoff, operator_norm, singular_values, toeplitz_expression
from .quadrature import adapted_rule, build_rule, build_singular_rule, integrate
from .space import default_degree, lp_norm, max_degree, min_degree_for_kernel
from .symbols import SumOfProducts

#: Default L^2 limit on the kernel tail beyond the truncation degree.
KERNEL_TAIL_TOL = 1e-6
#: Looser limit used along boundary sweeps, where the degree cap binds.
SWEEP_TAIL_TOL = 2e-2
#: Radii beyond this are refused by sweeps.
FEASIBILITY_CAP = 0.995
DEFAULT_PS = (2, 4, 6)
DEFAULT_ANGLES = (0.0, np.pi / 4, np.pi / 2)


def _check_tail(z, N, tol):
    tail = np.sqrt(kernel_tail_mass(z, N))
    if tail > tol:
        raise FeasibilityError(
            f"degree {N} leaves kernel tail {tail:.3g} at |z|={abs(complex(z)):.6g} (limit {tol:g})"
        )
    return tail


def berezin_operator(S, z, tail_tol=KERNEL_TAIL_TOL):
    """<S k_z, k_z> from the matrix entries (the power-series formula).

    ``z`` may be a scalar or an array; the result has the same shape.
    """
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    check_disk(zs)
    N = S.degree
    for p in zs.ravel():
        _check_tail(p, N, tail_tol)
    C = np.array([kernel_coefficients(p, N) for p in zs.ravel()])
    vals = np.sum(np.conj(C) * (C @ S.entries.T), axis=1)
    return complex(vals[0]) if np.ndim(z) == 0 else vals.reshape(zs.shape)


def default_symbol_rule(z, radial_order=96, angular_order=256):
    return adapted_rule(build_rule(radial_order, angular_order), z)


def berezin_symbol_forms(u, z, rule=None):
    """(weighted-average value, change-of-variables value) of the Berezin transform of u."""
    check_disk(z)
    rule = default_symbol_rule(z) if rule is None else rule
    w = rule.nodes
    k = (1.0 - abs(z) ** 2) / np.abs(1.0 - np.conj(z) * w) ** 4 * (1.0 - abs(z) ** 2)
    weighted = integrate(u(w) * k, rule)
    composed = integrate(u(mobius(z, w)), rule)
    return complex(weighted), complex(composed)


def _radial_berezin(u, z, eps=1e-9):
    """sum_n (1 - t)^2 (n+1) t^n d_n from the closed-form diagonal d_n of T_u.

    The weights are the squared kernel coefficients, so truncating where the
    kernel tail mass drops below eps^2 costs at most sup|u| * eps^2.
    """
    t = abs(complex(z)) ** 2
    N = min_degree_for_kernel(z, eps)
    n = np.arange(N + 1)
    weights = (1.0 - t) ** 2 * (n + 1.0) * t**n
    return complex(np.sum(weights * u.radial_diagonal(N)))


def berezin_symbol(u, z, rule=None, tol=1e-8):
    """Berezin transform of the symbol u at z.

    Radial symbols (indicators, tables) use their closed-form Toeplitz diagonal,
    which is exact; quadrature converges only algebraically across their jumps.
    Other symbols integrate u |k_z|^2 dA on ``rule`` and cross-check it against
    integral u o phi_z dA, raising :class:`QuadratureError` when the two forms
    differ by more than ``tol``.
    """
    from .symbols import RadialSymbol

    check_disk(z)
    if isinstance(u, RadialSymbol) and rule is None:
        return _radial_berezin(u, z)
    a, b = berezin_symbol_forms(u, z, rule)
    if abs(a - b) > tol:
        raise QuadratureError(f"Berezin forms disagree by {abs(a - b):.3g} at z={z} (tol {tol:g})")
    return a


# ------------------------------------------------------------ conditions


@dataclass
class ConditionReport:
    """The computable forms of conditions (b)-(f) at one point z."""

    z: complex
    degree: int
    cond_b: float
    cond_c: float
    berezin: complex
    cond_d: np.ndarray
    cond_ef: dict
    kernel_tail: float = 0.0

    @property
    def interpolation_gap(self):
        """||S_z 1||_4 - ||S_z 1||_2^(1/4) ||S_z 1||_6^(3/4) (needs p = 2, 4, 6)."""
        e = self.cond_ef
        return e[4] - e[2] ** 0.25 * e[6] ** 0.75

    @property
    def cond_d_max(self):
        return float(np.max(self.cond_d)) if self.cond_d.size else 0.0

    def violations(self, tol=1e-9):
        """Invariant failures (empty when consistent)."""
        out = []
        if self.cond_c > self.cond_b * (1 + tol) + tol:
            out.append(f"|S~(z)| = {self.cond_c:.17g} exceeds ||S k_z|| = {self.cond_b:.17g}")
        if 2 in self.cond_ef and self.cond_d_max > self.cond_ef[2] * (1 + 1e-6) + tol:
            out.append(f"coefficient {self.cond_d_max:.17g} exceeds ||S_z 1||_2 = {self.cond_ef[2]:.17g}")
        return out


def conjugated_constant(S, z):
    """Coefficients h of S U_z 1 = -S k_z; S_z 1 = U_z h."""
    return -(S.entries @ kernel_coefficients(z, S.degree))


def sz1_values(S, z, points):
    """(S_z 1)(w) = h(phi_z(w)) phi_z'(w) at ``points``."""
    h = conjugated_constant(S, z)
    return _backend.horner(h, mobius(z, points)) * mobius_derivative(z, points)


def sz1_coefficients(S, z, n_max):
    """<S_z 1, e_n> for n = 0..n_max (exact for the truncation)."""
    N = S.degree
    h = conjugated_constant(S, z)
    cols = _backend.mobius_columns(complex(z), max(N, n_max), n_max + 1)[: N + 1]
    return np.conj(cols).T @ h


def sz1_lp_norm(S, z, p):
    """||S_z 1||_p for an even integer p, with no quadrature.

    Substituting w = phi_z(lambda) gives, for p = 2k,
    ||S_z 1||_p^p = ||h^k (1 - conj(z) lambda)^(2k-2)||_2^2 / (1 - |z|^2)^(2k-2)
    with h = S k_z, a polynomial. The factor (1 - conj(z) lambda) is applied one
    power at a time to h before multiplying, which keeps cancellation local.
    """
    k, rem = divmod(int(p), 2)
    if rem or k < 1 or p != int(p):
        raise ValueError("exact L^p norms need an even integer p >= 2")
    z = complex(z)
    h = S.entries @ kernel_coefficients(z, S.degree)
    mono = h * np.sqrt(np.arange(h.size) + 1.0)
    # the norm is homogeneous of degree 1 in h; normalizing keeps h^k from underflowing
    peak = float(np.abs(mono).max())
    if peak == 0.0:
        return 0.0
    e = int(np.frexp(peak)[1])  # rescale by an exact power of two
    mono = np.ldexp(mono.real, -e) + 1j * np.ldexp(mono.imag, -e)
    lin = np.array([1.0, -np.conj(z)])
    G = mono
    if k >= 2:
        h1 = np.convolve(mono, lin)
        h2 = np.convolve(h1, lin)
        # h1^2 h2^(k-2) = h^k (1 - conj(z) l)^(2k-2)
        G = np.convolve(h1, h1)
        for _ in range(k - 2):
            G = np.convolve(G, h2)
    mass = float(np.sum(np.abs(G) ** 2 / (np.arange(G.size) + 1.0)))
    return float(np.ldexp((mass / (1.0 - abs(z) ** 2) ** (2 * k - 2)) ** (1.0 / p), e))


def condition_rule(z, radial_order=64, angular_order=256):
    """Rule for quadrature L^p norms of S_z 1: a tensor rule pulled back toward z."""
    return adapted_rule(build_rule(radial_order, angular_order), z)


def _is_even(p):
    return float(p).is_integer() and int(p) % 2 == 0 and p >= 2


def sz1_norms(S, z, ps=DEFAULT_PS, rule=None, method="exact"):
    """{p: ||S_z 1||_p}; "exact" uses :func:`sz1_lp_norm` for even p and quadrature otherwise."""
    out = {}
    need_rule = method == "quadrature" or any(not _is_even(p) for p in ps)
    if need_rule:
        rule = condition_rule(z) if rule is None else rule
        vals = sz1_values(S, z, rule.nodes)
    for p in ps:
        if method == "exact" and _is_even(p):
            out[p] = sz1_lp_norm(S, z, p)
        else:
            out[p] = lp_norm(vals, p, rule)
    return out


def condition_profile(S, z, rule=None, n_max=16, ps=DEFAULT_PS, tail_tol=KERNEL_TAIL_TOL, method="exact"):
    """ConditionReport for the truncated operator S at z.

    L^p norms of S_z 1 are exact polynomial identities for even p; pass
    ``method="quadrature"`` to evaluate them on ``rule`` instead.
    """
    check_disk(z)
    z = complex(z)
    N = S.degree
    tail = _check_tail(z, N, tail_tol)
    kz = kernel_coefficients(z, N)
    skz = S.entries @ kz
    cond_b = float(scipy.linalg.norm(skz))  # BLAS nrm2 rescales, so tiny entries do not underflow
    ber = complex(np.vdot(kz, skz))
    cond_ef = sz1_norms(S, z, ps, rule, method)
    cond_d = np.abs(sz1_coefficients(S, z, n_max))
    return ConditionReport(z, N, cond_b, abs(ber), ber, cond_d, cond_ef, tail)


@dataclass
class BerezinProfile:
    theta: float
    label: str
    reports: list = field(default_factory=list)
    radial_order: int = 0
    angular_order: int = 0

    @property
    def radii(self):
        return np.array([abs(r.z) for r in self.reports])

    def column(self, name):
        if name.startswith("p"):
            return np.array([r.cond_ef[int(name[1:])] for r in self.reports])
        if name == "cond_d_max":
            return np.array([r.cond_d_max for r in self.reports])
        return np.array([getattr(r, name) for r in self.reports])


class OperatorSource:
    """Materializes an operator or expression at any degree, caching by degree."""

    def __init__(self, source, label=None):
        self.source = source
        self._cache = {}
        self.label = label or getattr(source, "label", "S")

    def at(self, degree):
        degree = int(degree)
        if degree not in self._cache:
            if isinstance(self.source, SumOfProducts):
                self._cache[degree] = toeplitz_expression(self.source, degree)
            elif isinstance(self.source, TruncatedOperator):
                self._cache[degree] = self.source.at_degree(degree)
            elif callable(self.source):
                self._cache[degree] = self.source(degree)
            else:
                raise ConfigError(f"cannot build an operator from {type(self.source).__name__}")
        return self._cache[degree]


def sweep_degree(r, base_degree, eps=1e-8, cap=None, quantum=64):
    """Truncation degree used at radius r: at least base, enough for the kernel tail."""
    cap = max_degree() if cap is None else cap
    need = default_degree(r, eps, cap=10**9)
    need = max(int(base_degree), -(-need // quantum) * quantum)
    return int(min(need, max(cap, base_degree)))


def _check_radii(radii, cap):
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0:
        raise ConfigError("radii must be a nonempty list")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ConfigError("radii must be strictly increasing in (0, 1)")
    if radii[-1] > cap:
        raise FeasibilityError(f"radius {radii[-1]:g} beyond the feasibility cap {cap:g}")
    return radii


def boundary_sweep(source, theta, radii, base_degree=128, rule_orders=(64, 256), n_max=16,
                   ps=DEFAULT_PS, cap=FEASIBILITY_CAP, eps=1e-8, tail_tol=SWEEP_TAIL_TOL, method="exact"):
    """Condition reports along the ray z = r e^{i theta}, raising the degree per radius."""
    radii = _check_radii(radii, cap)
    src = source if isinstance(source, OperatorSource) else OperatorSource(source)
    prof = BerezinProfile(float(theta), src.label, [], *rule_orders)
    base_rule = build_rule(*rule_orders)
    for r in radii:
        z = complex(r * np.exp(1j * theta))
        S = src.at(sweep_degree(r, base_degree, eps))
        rep = condition_profile(S, z, adapted_rule(base_rule, z), n_max, ps, tail_tol, method)
        prof.reports.append(rep)
    return prof


def sweep_rays(source, thetas=DEFAULT_ANGLES, radii=None, **kw):
    src = source if isinstance(source, OperatorSource) else OperatorSource(source)
    radii = default_radii() if radii is None else radii
    return [boundary_sweep(src, th, radii, **kw) for th in thetas]


def default_radii():
    return np.round(np.arange(0.1, 0.99 + 1e-9, 0.01), 10)


def berezin_conjugation_check(S, z, lambdas, margin=None):
    """max over lambda of |S~(phi_z(lambda)) - (S_z)~(lambda)|."""
    lam = np.atleast_1d(np.asarray(lambdas, dtype=complex))
    check_disk(z, lam)
    Sz = conjugate(S, z, margin=margin)
    lhs = berezin_operator(S, mobius(z, lam))
    rhs = berezin_operator(Sz, lam)
    return float(np.max(np.abs(lhs - rhs)))


# ------------------------------------------------------------- Schur audit


@dataclass
class SchurAudit:
    z: complex
    lhs: float
    rhs_core: float
    ratio: float
    lemma4_value: float

    @property
    def holder_bound(self):
        """rhs_core * lemma4_value^(5/6): what Holder's inequality guarantees for lhs."""
        return self.rhs_core * self.lemma4_value ** (5.0 / 6.0)


def default_singular_rule(radial_order=96, angular_order=256, grading=5.0):
    return build_singular_rule(grading, radial_order, angular_order)


def lemma4_integral(z, srule=None):
    """integral dA(l) / (|1 - conj(z) l|^(6/5) (1 - |l|^2)^(3/5))."""
    check_disk(z)
    srule = default_singular_rule() if srule is None else srule
    rule = adapted_rule(srule, z)
    w = rule.nodes
    vals = np.abs(1.0 - np.conj(z) * w) ** (-1.2) * rule.one_minus_abs2() ** (-0.6)
    return float(integrate(vals, rule))


def schur_rule(degree, grading=5.0):
    """Graded rule for the Schur-audit integrand at truncation ``degree``.

    (S K_z) is a polynomial of the truncation degree whose peaks need not sit
    near z, so the rule is not pulled back; it resolves degree-N oscillation
    everywhere instead.
    """
    N = int(degree)
    return build_singular_rule(grading, max(96, 2 * N), max(256, 4 * N))


def schur_audit(S, z, srule=None, convergence_tol=None):
    """Both sides of the weighted kernel-integral bound at z.

    lhs = integral |(S K_z)(w)| / sqrt(1 - |w|^2) dA(w) on the graded rule;
    rhs_core = ||S_z 1||_6 / sqrt(1 - |z|^2) (exact polynomial identity);
    lemma4_value = integral dA / (|1 - conj(z) l|^(6/5) (1 - |l|^2)^(3/5)).
    """
    check_disk(z)
    z = complex(z)
    srule = schur_rule(S.degree) if srule is None else srule
    sk = S.entries @ kernel_coefficients(z, S.degree, normalized=False)
    # graded nodes may round onto |w| = 1; the polynomial is fine there and the
    # weight uses the exactly tracked defect 1 - |w|^2
    vals = np.abs(_backend.horner(sk, srule.nodes)) / np.sqrt(srule.one_minus_abs2())
    lhs = float(integrate(vals, srule))
    rhs = float(sz1_lp_norm(S, z, 6) / np.sqrt(1.0 - abs(z) ** 2))
    if convergence_tol is not None:
        fine = build_singular_rule(srule.grading, 2 * srule.radial_order, 2 * srule.angular_order)
        ref = schur_audit(S, z, fine)
        if abs(ref.lhs - lhs) > convergence_tol * max(ref.lhs, 1e-300):
            raise QuadratureError(
                f"singular quadrature not converged at z={z}: {lhs:.10g} vs {ref.lhs:.10g} after doubling"
            )
    ratio = lhs / rhs if rhs > 0 else 0.0
    return SchurAudit(z, lhs, rhs, float(ratio), lemma4_integral(z, srule))


def schur_bound(S, r, chat, z_points, w_points):
    """Compare ||S - S_[r]|| with sqrt(c1 c2) built from sampled L^6 norms.

    c1 = chat * max ||S_z 1||_6 over sampled |z| >= r;
    c2 = chat * max ||(S*)_w 1||_6 over sampled w.
    """
    from .operators import adjoint

    z_points = [complex(p) for p in z_points if abs(p) >= r]
    if not z_points:
        raise ConfigError("need sample points with |z| >= r")
    Sa = adjoint(S)
    c1 = chat * max(sz1_lp_norm(S, p, 6) for p in z_points)
    c2 = chat * max(sz1_lp_norm(Sa, complex(p), 6) for p in w_points)
    gap = operator_norm(S - cutoff(S, r))
    bound = float(np.sqrt(c1 * c2))
    return {"r": float(r), "norm_tail": gap, "c1": c1, "c2": c2, "bound": bound, "holds": bool(gap <= bound)}


# ----------------------------------------------------------- inequalities


def interpolation_gap(values, rule):
    """||f||_4 - ||f||_2^(1/4) ||f||_6^(3/4); nonpositive when the interpolation bound holds."""
    return lp_norm(values, 4, rule) - lp_norm(values, 2, rule) ** 0.25 * lp_norm(values, 6, rule) ** 0.75


def tail_split_gap(values, rule, r):
    """||f||_2^2 - [(1 - r^2)^(1/2) ||f||_4^2 + integral_{|w|<=r} |f|^2]; nonpositive when the split holds."""
    a2 = np.abs(values) ** 2
    inner = float(integrate(np.where(np.abs(rule.nodes) <= r, a2, 0.0), rule))
    total = float(integrate(a2, rule))
    return total - (np.sqrt(1.0 - r * r) * lp_norm(values, 4, rule) ** 2 + inner)


# ------------------------------------------------------------- compactness


@dataclass
class CompactnessDiagnostics:
    degrees: list
    sigmas: dict
    k: int
    threshold: float
    counts: list
    verdict: str

    def sigma(self, k, degree=None):
        """k-th largest singular value (1-based) at ``degree`` (default: the largest)."""
        s = self.sigmas[self.degrees[-1] if degree is None else degree]
        return float(s[k - 1]) if k <= s.size else 0.0


def compactness_score(source, degrees=(128, 256, 512), k=96, rel_threshold=1e-3, stable_tol=1e-2):
    """Singular-value trend diagnostic for compactness at finite truncation.

    With theta = rel_threshold * sigma_1(N_max) and c(N) the number of singular
    values above theta:

    * "compact-consistent": sigma_k(N_max) < theta and c(N) stopped growing;
    * "non-compact-consistent": c(N) keeps growing while sigma_1 holds steady
      (relative change <= stable_tol) at a positive level;
    * "inconclusive" otherwise.
    """
    degrees = [int(d) for d in degrees]
    if len(degrees) < 2 or any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ConfigError("compactness_score needs at least two increasing degrees")
    src = source if isinstance(source, OperatorSource) else OperatorSource(source)
    sigmas = {N: singular_values(src.at(N)) for N in degrees}
    top = sigmas[degrees[-1]][0]
    theta = rel_threshold * top
    counts = [int(np.sum(sigmas[N] > theta)) for N in degrees]
    s1 = np.array([sigmas[N][0] for N in degrees])
    sk = sigmas[degrees[-1]][k - 1] if k <= sigmas[degrees[-1]].size else 0.0
    steady = top > 0 and np.all(np.abs(s1 - top) <= stable_tol * top)
    if top == 0:
        verdict = "compact-consistent"
    elif counts[-1] > counts[-2] and steady:
        verdict = "non-compact-consistent"
    elif sk < theta and counts[-1] == counts[-2]:
        verdict = "compact-consistent"
    else:
        verdict = "inconclusive"
    return CompactnessDiagnostics(degrees, sigmas, k, float(theta), counts, verdict)
