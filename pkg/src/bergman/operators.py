"""Truncated operators on L^2_a: entry (n, m) = <S e_m, e_n> for n, m <= N.

Products of truncations differ from truncations of products near the block
edge, so every operator carries an optional ``builder`` that regenerates it at
a larger degree. :func:`product` and :func:`conjugate` multiply at a working
degree N + margin and keep the leading N-block. For banded factors (polynomial
and radial symbols) the margin is the summed bandwidth and the block is exact;
otherwise the margin defaults to N.
"""
import csv
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
import scipy.linalg

from . import _backend
from .disk import check_disk, kernel_tail_mass
from .errors import FeasibilityError, QuadratureError
from .quadrature import build_rule, require_exact
from .space import BergmanFunction, basis_matrix
from .symbols import PolynomialSymbol, Samples, SumOfProducts

#: Column 0 of U_z may lose at most this much L^2 mass to truncation.
UNITARY_TAIL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    entries: np.ndarray
    label: str = ""
    bandwidth: int | None = None
    builder: Callable[[int], np.ndarray] | None = None

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("operator entries must form a square matrix")
        object.__setattr__(self, "entries", e)

    @property
    def degree(self):
        return self.entries.shape[0] - 1

    def at_degree(self, degree):
        """The same operator truncated to ``degree`` (rebuilt when enlarging)."""
        degree = int(degree)
        if degree == self.degree:
            return self
        if self.builder is not None:
            return replace(self, entries=self.builder(degree))
        if degree < self.degree:
            return replace(self, entries=self.entries[: degree + 1, : degree + 1])
        raise FeasibilityError(f"{self.label or 'operator'} cannot be enlarged beyond degree {self.degree}")

    def leading(self, size):
        """The leading size x size block of the matrix."""
        return self.entries[:size, :size]

    @property
    def H(self):
        return adjoint(self)

    def __add__(self, other):
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return combine([(1.0, self), (-1.0, other)])

    def __mul__(self, k):
        return combine([(k, self)])

    __rmul__ = __mul__


def identity(degree):
    return TruncatedOperator(np.eye(degree + 1, dtype=complex), "I", 0, lambda n: np.eye(n + 1, dtype=complex))


def diagonal_operator(fn, degree, label):
    """Operator with diagonal fn(n) for n = 0..degree, rebuildable at any degree."""

    def build(n):
        return np.diag(np.asarray(fn(np.arange(n + 1)), dtype=complex))

    return TruncatedOperator(build(degree), label, 0, build)


def combine(pairs):
    """sum of k * S over (k, S) pairs, all at the degree of the first operator."""
    degree = pairs[0][1].degree
    ops = [(complex(k), S.at_degree(degree)) for k, S in pairs]
    entries = sum(k * S.entries for k, S in ops)
    bws = [S.bandwidth for _, S in ops]
    bw = None if any(b is None for b in bws) else max(bws)
    can_build = all(S.builder is not None for _, S in ops)
    builder = (lambda n: sum(k * S.at_degree(n).entries for k, S in ops)) if can_build else None
    label = " + ".join(f"{k:g}·{S.label}" for k, S in ops)
    return TruncatedOperator(entries, label, bw, builder)


def adjoint(S):
    """Conjugate transpose."""
    builder = (lambda n: S.at_degree(n).entries.conj().T) if S.builder is not None else None
    return TruncatedOperator(S.entries.conj().T.copy(), f"({S.label})*", S.bandwidth, builder)


def apply(S, f):
    """S f for f a BergmanFunction of the same degree."""
    coeffs = f.coeffs if isinstance(f, BergmanFunction) else np.asarray(f, dtype=complex)
    if coeffs.size != S.degree + 1:
        raise ValueError(f"degree mismatch: operator {S.degree}, function {coeffs.size - 1}")
    return BergmanFunction(S.entries @ coeffs)


def singular_values(S):
    """All singular values of the truncation, descending."""
    return scipy.linalg.svdvals(S.entries)


def operator_norm(S):
    """Largest singular value: a lower bound for the norm of the untruncated operator."""
    return float(singular_values(S)[0]) if S.entries.size else 0.0


def hilbert_schmidt_norm(S):
    return float(np.sqrt(np.sum(np.abs(S.entries) ** 2)))


def _margin(ops, degree, margin):
    if margin is not None:
        return int(margin)
    bws = [S.bandwidth for S in ops[1:]]
    if any(b is None for b in bws):
        return degree
    return int(sum(bws))


def product(*ops, degree=None, margin=None):
    """Leading block of the product, multiplied at degree + margin."""
    if not ops:
        raise ValueError("empty product")
    degree = ops[0].degree if degree is None else int(degree)
    work = degree + _margin(ops, degree, margin)
    if not all(S.builder is not None for S in ops):
        work = min([work] + [S.degree for S in ops])
    mats = [S.at_degree(work).entries for S in ops]
    out = mats[0]
    for M in mats[1:]:
        out = out @ M
    entries = out[: degree + 1, : degree + 1]
    bws = [S.bandwidth for S in ops]
    bw = None if any(b is None for b in bws) else int(sum(bws))
    builder = None
    if all(S.builder is not None for S in ops):
        builder = lambda n: product(*ops, degree=n, margin=margin).entries  # noqa: E731
    return TruncatedOperator(entries, "·".join(S.label for S in ops), bw, builder)


# ------------------------------------------------------------------ Toeplitz


def _is_tensor_rule(rule):
    return rule.center == 0 and rule.radial_order * rule.angular_order == rule.nodes.size


def toeplitz_from_samples(values, rule, degree):
    """Entries integral u e_m conj(e_n) dA from node samples of u.

    Tensor rules use an FFT in angle: with w = r e^{i theta} the entry is
    sqrt((n+1)(m+1)) sum_i ws_i r_i^(n+m) uhat_i[n-m], where uhat_i is the
    angular Fourier coefficient on circle i.
    """
    N = int(degree)
    values = np.asarray(values, dtype=complex)
    if not _is_tensor_rule(rule) or rule.angular_order < 2 * N + 1:
        E = basis_matrix(rule.nodes, N)
        return np.conj(E).T @ ((rule.weights * values)[:, None] * E)
    R, M = rule.radial_order, rule.angular_order
    grid = values.reshape(R, M)
    r = np.abs(rule.nodes.reshape(R, M)[:, 0])
    ws = rule.weights.reshape(R, M)[:, 0] * M
    uhat = np.fft.fft(grid, axis=1) / M
    root = np.sqrt(np.arange(1, N + 2, dtype=float))
    logr = np.log(r)
    out = np.zeros((N + 1, N + 1), dtype=complex)
    m_all = np.arange(N + 1)
    for k in range(-N, N + 1):
        m = m_all[max(0, -k) : N + 1 - max(0, k)]
        n = m + k
        # ws_i r_i^(n+m): shape (R, len(m))
        radial = ws[:, None] * np.exp(np.outer(logr, n + m))
        out[n, m] = root[n] * root[m] * (uhat[:, k % M] @ radial)
    return out


def default_symbol_rule(degree):
    """Tensor rule used for pointwise symbols when none is supplied."""
    return build_rule(int(degree) + 16, 2 * int(degree) + 32)


def toeplitz(u, degree, rule=None):
    """T_u truncated to degree N.

    Without a rule, polynomial and radial symbols use their closed-form
    moments; other symbols use :func:`default_symbol_rule`. With a rule the
    entries always come from quadrature, and polynomial symbols are checked
    for sufficient exactness.
    """
    N = int(degree)
    if isinstance(u, Samples):
        entries = toeplitz_from_samples(u.values, u.rule, N)
        return TruncatedOperator(entries, f"T[{u.label}]", None, None)
    if rule is None:
        entries = u.toeplitz_entries(N)
        if entries is None:
            r = default_symbol_rule(N)
            entries = toeplitz_from_samples(u(r.nodes), r, N)
    else:
        if isinstance(u, PolynomialSymbol):
            require_exact(rule, N + u.max_power, f"T[{u.label}]")
        entries = toeplitz_from_samples(u(rule.nodes), rule, N)

    def build(n):
        return toeplitz(u, n, rule if rule is None or n <= N else None).entries

    return TruncatedOperator(entries, f"T[{u.label}]", u.bandwidth, build)


def toeplitz_expression(expr, degree, rule=None, margin=None):
    """sum_k coef_k T_{u_k1} ... T_{u_kj}, each product formed with a margin."""
    if not isinstance(expr, SumOfProducts) or not expr.terms:
        raise ValueError("empty expression")
    N = int(degree)
    total = np.zeros((N + 1, N + 1), dtype=complex)
    bws = []
    for term in expr.terms:
        factors = [toeplitz(u, N, rule) for u in term.factors]
        P = factors[0] if len(factors) == 1 else product(*factors, margin=margin)
        total += term.coef * P.entries
        bws.append(P.bandwidth)
    bw = None if any(b is None for b in bws) else max(bws)

    def build(n):
        return toeplitz_expression(expr, n, rule if rule is None or n <= N else None, margin).entries

    return TruncatedOperator(total, expr.label, bw, build)


def hankel_gram(u, degree, rule=None):
    """H_u^* H_u = T_{|u|^2} - T_{conj u} T_u."""
    expr = SumOfProducts.single(u.abs2()) + SumOfProducts.single(u.conj(), u, coef=-1.0)
    S = toeplitz_expression(expr, degree, rule)
    return replace(S, label=f"H*H[{u.label}]")


# -------------------------------------------------------------- Mobius maps


def _unitary_quadrature(z, N, rule):
    from .disk import mobius, mobius_derivative

    if rule is None:
        rule = build_rule(2 * N + 64, 4 * N + 64)
    E = basis_matrix(rule.nodes, N)
    F = basis_matrix(mobius(z, rule.nodes), N) * mobius_derivative(z, rule.nodes)[:, None]
    return np.conj(E).T @ (rule.weights[:, None] * F)


def mobius_unitary(z, degree, rule=None, method="recurrence", tail_tol=UNITARY_TAIL_TOL):
    """U_z f = (f o phi_z) phi_z' truncated to degree N.

    ``method="recurrence"`` builds column m+1 from column m by multiplying with
    phi_z in monomial coefficients; the recurrence is causal, so the leading
    block is exact. ``method="quadrature"`` integrates each entry with a rule.
    Column 0 is always compared with (|z|^2 - 1) sqrt(n+1) conj(z)^n.
    """
    check_disk(z)
    z = complex(z)
    N = int(degree)
    tail = kernel_tail_mass(z, N)
    if tail > tail_tol**2:
        raise FeasibilityError(
            f"degree {N} loses L^2 mass {np.sqrt(tail):.3g} of U_z 1 at |z|={abs(z):.6g} (limit {tail_tol:g})"
        )
    if method == "recurrence":
        entries = _backend.mobius_columns(z, N, N + 1)
    elif method == "quadrature":
        entries = _unitary_quadrature(z, N, rule)
    else:
        raise ValueError(f"unknown method {method!r}")
    n = np.arange(N + 1)
    col0 = (abs(z) ** 2 - 1.0) * np.sqrt(n + 1.0) * np.conj(z) ** n
    err = np.abs(entries[:, 0] - col0).max()
    if err > 1e-9:
        raise QuadratureError(f"column 0 of U_z misses its closed form by {err:.3g}")

    def build(k):
        return mobius_unitary(z, k, rule, method, tail_tol).entries

    return TruncatedOperator(entries, f"U[{z:g}]", None, build)


def conjugate(S, z, rule=None, margin=None):
    """S_z = U_z S U_z, multiplied at degree N + margin (default margin N)."""
    check_disk(z)
    N = S.degree
    U = mobius_unitary(z, N, rule)
    out = product(U, S, U, degree=N, margin=N if margin is None else margin)
    builder = None
    if S.builder is not None:
        builder = lambda n: conjugate(S.at_degree(n), z, rule, margin).entries  # noqa: E731
    return TruncatedOperator(out.entries, f"({S.label})_{z:g}", None, builder)


def cutoff(S, r):
    """S_[r]: the integral operator with kernel (S K_z)(w) restricted to |z| < r.

    In the basis this scales column m by r^(2m+2).
    """
    if not 0.0 < r < 1.0:
        raise ValueError("cutoff radius must lie in (0, 1)")
    scale = float(r) ** (2.0 * np.arange(S.degree + 1) + 2.0)
    builder = None
    if S.builder is not None:
        builder = lambda n: cutoff(S.at_degree(n), r).entries  # noqa: E731
    return TruncatedOperator(S.entries * scale[None, :], f"({S.label})_[{r:g}]", S.bandwidth, builder)


def write_matrix_csv(S, path, comment=None):
    """Row-major CSV with columns n,m,re,im, preceded by an optional '#' comment line."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "m", "re", "im"])
        E = S.entries
        for n in range(E.shape[0]):
            for m in range(E.shape[1]):
                w.writerow([n, m, repr(float(E[n, m].real)), repr(float(E[n, m].imag))])


def read_matrix_csv(path):
    rows = []
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    for rec in csv.DictReader(lines):
        rows.append((int(rec["n"]), int(rec["m"]), float(rec["re"]), float(rec["im"])))
    size = max(max(r[0], r[1]) for r in rows) + 1
    E = np.zeros((size, size), dtype=complex)
    for n, m, re, im in rows:
        E[n, m] = complex(re, im)
    return TruncatedOperator(E, "csv")
