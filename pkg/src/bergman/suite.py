"""The invariant suite behind ``bergman verify``.

Each check returns a :class:`Check` with the measured value, the limit it is
compared against, and a verdict. Reports contain no timings so repeated runs
in deterministic mode are byte-identical.
"""
from dataclasses import dataclass

import numpy as np

from .berezin import (
    DEFAULT_ANGLES,
    OperatorSource,
    berezin_conjugation_check,
    berezin_operator,
    berezin_symbol,
    compactness_score,
    condition_profile,
    lemma4_integral,
    schur_audit,
    schur_bound,
    sweep_rays,
    sz1_values,
    tail_split_gap,
)
from .disk import kernel, mobius, mobius_derivative, normalized_kernel
from .examples import (
    alternating_unitary,
    closed_form_berezin,
    lacunary_projection,
    little_bloch_distance,
    preset,
    test_library,
)
from .operators import (
    adjoint,
    conjugate,
    hankel_gram,
    identity,
    mobius_unitary,
    product,
    toeplitz,
    toeplitz_expression,
)
from .quadrature import build_rule, build_singular_rule, integrate
from .symbols import IndicatorDisk, Lacunary, Monomial, SumOfProducts

LIBRARY_RADII = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.97, 0.98, 0.99)
TAIL_RADII = tuple(np.round(np.arange(0.90, 0.9901, 0.01), 2))
SCHUR_DEGREE = 64
SCHUR_RADII = (0.0, 0.3, 0.6, 0.9, 0.99)


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    relation: str = "<="

    def row(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name:<58s} {self.value:>14.6e} {self.relation} {self.limit:.3e}"


def _le(name, value, limit):
    value = float(value)
    return Check(name, value, float(limit), bool(value <= limit), "<=")


def _lt(name, value, limit):
    value = float(value)
    return Check(name, value, float(limit), bool(value < limit), "<")


def _ge(name, value, limit):
    value = float(value)
    return Check(name, value, float(limit), bool(value >= limit), ">=")


def _grid(radii, angles=DEFAULT_ANGLES):
    return [r * np.exp(1j * a) for r in radii for a in angles]


# ------------------------------------------------------------------ checks


def check_geometry():
    pts = [complex(a, b) for a in np.linspace(-0.65, 0.65, 7) for b in np.linspace(-0.65, 0.65, 7)]
    inv = max(abs(mobius(z, mobius(z, w)) - w) for z in pts for w in pts)
    ident = max(
        abs((1 - abs(mobius(z, w)) ** 2) - (1 - abs(z) ** 2) * (1 - abs(w) ** 2) / abs(1 - np.conj(z) * w) ** 2)
        for z in pts for w in pts
    )
    chain = max(abs(mobius_derivative(z, mobius(z, w)) * mobius_derivative(z, w) - 1) for z in pts for w in pts)
    kz = abs(kernel(0.5, 0.5) - 16 / 9) + abs(normalized_kernel(0.5, 0.5) - 4 / 3)
    return [
        _le("mobius involution", inv, 1e-14),
        _le("1-|phi_z|^2 identity", ident, 1e-14),
        _le("chain rule phi_z'(phi_z) phi_z' = 1", chain, 1e-13),
        _le("kernel values at z = w = 0.5", kz, 1e-14),
    ]


def check_quadrature():
    rule = build_rule(8, 16)
    mom = max(
        abs(integrate(lambda w: w**a * np.conj(w) ** b, rule) - (1.0 / (a + 1) if a == b else 0.0))
        for a in range(rule.exact_degree + 1) for b in range(rule.exact_degree + 1)
    )
    return [
        _le("tensor rule moments up to exact degree", mom, 1e-13),
        _le("lemma4 integral at z = 0 vs 5/2", abs(lemma4_integral(0.0) - 2.5), 1e-5),
        _le(
            "singular rule lemma4 self-convergence at z = 0.9",
            abs(lemma4_integral(0.9) - lemma4_integral(0.9, build_singular_rule(5.0, 192, 512))),
            1e-5,
        ),
    ]


def check_counterexamples():
    zs = _grid(np.linspace(0.04, 0.8, 20))
    A = alternating_unitary(256)
    alt = max(abs(berezin_operator(A, z) - closed_form_berezin("alternating", abs(z) ** 2)) for z in zs)
    L = lacunary_projection(512)
    ts = np.linspace(0.0, 0.81, 28)
    lac = max(abs(berezin_operator(L, np.sqrt(t)) - closed_form_berezin("lacunary", t)) for t in ts)
    series = [closed_form_berezin("lacunary", t) for t in (0.9, 0.99, 0.999, 0.9999)]
    proj = max(
        abs(np.linalg.norm(L.entries @ _kz(z, 512)) ** 2 - berezin_operator(L, z).real) for z in zs
    )
    return [
        _le("alternating Berezin vs closed form, |z| <= 0.8", alt, 1e-8),
        _le("lacunary Berezin vs series, t <= 0.81", lac, 1e-8),
        _lt("lacunary series strictly decreasing at t -> 1", float(np.max(np.diff(series))), 0.0),
        _le("lacunary ||S k_z||^2 = S~(z)", proj, 1e-14),
        _le("lacunary projection idempotent", np.abs(L.entries @ L.entries - L.entries).max(), 0.0),
        _le("alternating unitary S*S = I", np.abs(A.entries.conj().T @ A.entries - np.eye(257)).max(), 0.0),
    ]


def _kz(z, N):
    from .disk import kernel_coefficients

    return kernel_coefficients(z, N)


def check_operators():
    n = np.arange(65)
    T = toeplitz(Monomial(1, 1), 64)
    Tb = toeplitz(Monomial(0, 1), 64)
    G = hankel_gram(Monomial(0, 1), 64)
    U = mobius_unitary(0.5, 128)
    col0 = -(0.75) * np.sqrt(np.arange(129) + 1.0) * 0.5 ** np.arange(129)
    UU = product(U, U, degree=128).leading(64)
    C = conjugate(toeplitz(Monomial(0, 1), 128), 0.4).leading(64)
    ref = toeplitz(Monomial(0, 1).compose(0.4), 128).leading(64)
    S = toeplitz_expression(SumOfProducts.single(Monomial(1, 0), IndicatorDisk(0.5)), 64)
    adj = np.abs(adjoint(conjugate(S, 0.3 + 0.2j)).entries - conjugate(adjoint(S), 0.3 + 0.2j).entries).max()
    return [
        _le("T[|w|^2] diagonal (n+1)/(n+2)", np.abs(np.diag(T.entries) - (n + 1) / (n + 2)).max(), 1e-12),
        _le("T[conj w] superdiagonal", np.abs(np.diag(Tb.entries, 1) - np.sqrt((n[:-1] + 1) / (n[:-1] + 2))).max(), 1e-12),
        _le("Hankel Gram of conj w diagonal, n <= 48", np.abs(np.diag(G.entries)[:49] - 1 / ((n[:49] + 1) * (n[:49] + 2))).max(), 1e-10),
        _le("Hankel Gram Berezin at 0 vs 1/2", abs(berezin_operator(G, 0.0) - 0.5), 1e-10),
        _ge("Hankel Gram smallest eigenvalue", float(np.linalg.eigvalsh(G.entries).min()), -1e-8),
        _le("U_0.5 column 0 closed form", np.abs(U.entries[:, 0] - col0).max(), 1e-10),
        _le("U_z^2 = I on leading 64-block", np.abs(UU - np.eye(64)).max(), 1e-8),
        _le("U T[conj w] U vs T[conj w o phi], leading 64-block", np.abs(C - ref).max(), 1e-6),
        _le("(S_w)* = (S*)_w", adj, 1e-10),
    ]


def check_conjugation():
    lam = [r * np.exp(1j * a) for r in (0.0, 0.25, 0.5) for a in np.linspace(0, 2 * np.pi, 6, endpoint=False)]
    S = toeplitz(Monomial(0, 1), 128)
    d = max(berezin_conjugation_check(S, z, lam) for z in (0.3, 0.5j))
    e = berezin_conjugation_check(identity(64), 0.4, lam)
    sym = abs(berezin_symbol(Monomial(0, 1), 0.5) - berezin_operator(toeplitz(Monomial(0, 1), 64), 0.5))
    return [
        _le("Berezin conjugation identity, T[conj w]", d, 1e-6),
        _le("Berezin conjugation identity, identity", e, 1e-12),
        _le("symbol Berezin vs operator Berezin", sym, 1e-8),
    ]


def check_library_sweeps():
    checks = []
    worst_cs, worst_int, worst_d, worst_split, worst_pnorm = 0.0, -np.inf, 0.0, -np.inf, 0.0
    for entry in test_library():
        src = OperatorSource(entry.operator, entry.name)
        profs = sweep_rays(src, radii=LIBRARY_RADII)
        for prof in profs:
            for rep in prof.reports:
                worst_cs = max(worst_cs, rep.cond_c - rep.cond_b * (1 + 8 * np.finfo(float).eps))
                worst_int = max(worst_int, rep.interpolation_gap)
                worst_d = max(worst_d, rep.cond_d_max - rep.cond_ef[2])
        if entry.is_expression:
            sups = []
            for base in (128, 256):
                p = sweep_rays(OperatorSource(entry.operator), radii=LIBRARY_RADII, base_degree=base)
                sups.append(np.array([max(r.cond_ef[q] for pr in p for r in pr.reports) for q in (2, 4, 6)]))
            worst_pnorm = max(worst_pnorm, float(np.max(np.abs(sups[1] / sups[0] - 1))))
            S = src.at(128)
            rule = build_rule(96, 256)
            for z in _grid((0.3, 0.7)):
                vals = sz1_values(S, z, rule.nodes)
                for r in (0.5, 0.9):
                    worst_split = max(worst_split, tail_split_gap(vals, rule, r))
    checks.append(_le("library sweep: cond_c - cond_b", worst_cs, 0.0))
    checks.append(_le("library sweep: interpolation inequality gap", worst_int, 1e-9))
    checks.append(_le("library sweep: cond_d entries - ||S_z 1||_2", worst_d, 1e-9))
    checks.append(_le("library: uniform p-norm sup change 128 -> 256", worst_pnorm, 0.05))
    checks.append(_le("library: tail split gap at r = 0.5, 0.9", worst_split, 1e-9))
    return checks


def check_necessity():
    checks = []
    for name in ("alternating", "lacunary"):
        entry = preset(name)
        prof = sweep_rays(OperatorSource(entry.operator, name), thetas=(0.0,), radii=TAIL_RADII)[0]
        cc = prof.column("cond_c")
        checks.append(_lt(f"{name}: max step of cond_c over last 10 radii", float(np.max(np.diff(cc))), 0.0))
        diag = compactness_score(entry.operator)
        s1 = min(diag.sigmas[N][0] for N in diag.degrees)
        checks.append(Check(f"{name}: verdict non-compact-consistent", s1, 0.99,
                            diag.verdict == "non-compact-consistent" and s1 >= 0.99, ">="))
        if name == "alternating":
            cb = prof.column("cond_b")
            checks.append(_le("alternating: |cond_b - 1|", float(np.max(np.abs(cb - 1))), 1e-6))
    return checks


def check_compact_side():
    checks = []
    for name in ("indicator-half", "hankel-wbar"):
        entry = preset(name)
        prof = sweep_rays(OperatorSource(entry.operator, name), radii=(0.5, 0.9, 0.99))
        last = max(max(p.reports[-1].cond_b, p.reports[-1].cond_c) for p in prof)
        checks.append(_le(f"{name}: max(cond_b, cond_c) at r = 0.99", last, 0.02))
        diag = compactness_score(entry.operator)
        checks.append(Check(f"{name}: verdict compact-consistent", diag.sigma(diag.k), diag.threshold,
                            diag.verdict == "compact-consistent", "<"))
    ind = compactness_score(preset("indicator-half").operator, degrees=(64, 128, 256))
    checks.append(_le("indicator-half: sigma_10 at N = 256", ind.sigma(10, 256), 1e-3))
    hk = compactness_score(preset("hankel-wbar").operator, degrees=(128, 256))
    k = np.arange(1, 21)
    checks.append(_le("hankel-wbar: sigma_k = 1/(k(k+1)), k <= 20",
                      float(np.max(np.abs(hk.sigmas[256][:20] - 1 / (k * (k + 1))))), 1e-12))
    return checks


def schur_constant(entries=None, degree=SCHUR_DEGREE, srule=None):
    """Largest audit ratio over the library (and adjoints) on the z-grid."""
    zs = list(dict.fromkeys(_grid(SCHUR_RADII)))
    entries = test_library() if entries is None else entries
    best = 0.0
    for e in entries:
        S = e.operator(degree)
        for T in (S, adjoint(S)):
            best = max(best, max(schur_audit(T, z, srule).ratio for z in zs))
    return best


def check_schur():
    from .berezin import schur_rule

    coarse = schur_constant()
    base = schur_rule(SCHUR_DEGREE)
    fine = build_singular_rule(5.0, 2 * base.radial_order, 2 * base.angular_order)
    refined = schur_constant(srule=fine)
    zs = list(dict.fromkeys(_grid(SCHUR_RADII)))
    worst = -np.inf
    for e in test_library():
        if not e.is_expression:
            continue
        S = e.operator(SCHUR_DEGREE)
        for r in (0.9, 0.99):
            ring = [r * np.exp(1j * t) for t in np.linspace(0, 2 * np.pi, 8, endpoint=False)]
            b = schur_bound(S, r, coarse, [z for z in zs if abs(z) >= r] + ring, zs)
            worst = max(worst, b["norm_tail"] / b["bound"])
    z0 = schur_audit(0 * identity(SCHUR_DEGREE), 0.5)
    return [
        _le("Schur constant change under rule refinement", abs(refined / coarse - 1), 0.10),
        _le("||S - S_[r]|| / sqrt(c1 c2), r = 0.9, 0.99", worst, 1.0),
        _le("audit of S = 0 gives lhs = rhs = 0", z0.lhs + z0.rhs_core, 0.0),
    ]


def check_little_bloch():
    w = [little_bloch_distance(Monomial(1, 0), r) for r in (0.5, 0.7, 0.9, 0.95, 0.99)]
    lac = [little_bloch_distance(Lacunary(12), r) for r in (0.9, 0.93, 0.96, 0.99)]
    cross = abs(little_bloch_distance(Lacunary(12), 0.95) - little_bloch_distance(Lacunary(12), 0.95, method="series"))
    return [
        _lt("little Bloch f = w: largest step (decreasing)", float(np.max(np.diff(w))), 0.0),
        _le("little Bloch f = w at r = 0.99", w[-1], 0.05),
        _ge("little Bloch lacunary(12): min over r in [0.9, 0.99]", min(lac), 0.1),
        _le("little Bloch lacunary(12): quadrature vs series", cross, 1e-8),
    ]


GROUPS = [
    ("geometry", check_geometry),
    ("quadrature", check_quadrature),
    ("counterexamples", check_counterexamples),
    ("operators", check_operators),
    ("berezin conjugation", check_conjugation),
    ("library sweeps", check_library_sweeps),
    ("hypothesis necessity", check_necessity),
    ("compact side", check_compact_side),
    ("schur", check_schur),
    ("little bloch", check_little_bloch),
]


def run_suite(groups=None):
    """[(group, [Check, ...]), ...] for the selected group names (default: all)."""
    out = []
    for name, fn in GROUPS:
        if groups is None or name in groups:
            out.append((name, fn()))
    return out


def format_report(results, version):
    lines = [f"# bergman {version} verify"]
    total = failed = 0
    for group, checks in results:
        lines.append(f"[{group}]")
        for c in checks:
            lines.append(c.row())
            total += 1
            failed += not c.passed
    lines.append(f"summary: {total - failed}/{total} passed")
    return "\n".join(lines) + "\n", failed
